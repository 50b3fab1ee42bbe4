"""Reference algorithms the fair engine is benchmarked against.

revenue_max solves the pure revenue LP (integral corners for the same
structural reason as the round LPs). randomized assigns services by fair
coin, restarting on dead ends. The branch-and-bound routines solve the
quantized lexicographic objective as an explicit integer program; on these
instances the root relaxation is already integral, so they measure what
enforcing integrality costs rather than finding different answers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InfeasibleError, InvariantError
from .lex_transform import (
    build_reduced_subproblem_lp,
    candidate_triples,
    effective_range_cap,
    quantize,
    round_to_plan,
    selection_rows,
)
from .fass import select_min_payment_request
from .model import (
    AssignmentPlan,
    PaymentVector,
    Scenario,
    payment_vector,
    request_payment,
    saturating_matching,
)
from .simplex import LPSolution, StandardLP, solve


@dataclass(frozen=True)
class RandomizedStats:
    """Aggregates over repeated randomized runs (seed = base_seed + run)."""

    runs: int
    base_seed: int
    mean_deviation: float
    mean_revenue: float


@dataclass(frozen=True)
class BnbResult:
    """Branch-and-bound outcome on a plain LP with integrality demands."""

    status: str  # "optimal" | "infeasible"
    values: np.ndarray | None
    objective_value: float
    branches: int
    nodes: int


@dataclass(frozen=True)
class IPResult:
    """Scenario-level integer-programming outcome."""

    plan: AssignmentPlan
    payments: PaymentVector
    objective_value: float
    branches: int
    nodes: int


def revenue_max(scenario: Scenario, *, pivot_rule: str = "dantzig") -> AssignmentPlan:
    """Assignment maximizing total payments, via the relaxed selection LP."""
    matching = saturating_matching(scenario)
    if matching is None:
        raise InfeasibleError("no assignment can serve every request")
    active = list(range(scenario.num_requests))
    triples = candidate_triples(scenario, active)
    services = sorted({(i, j) for _, i, j in triples})
    rows = selection_rows(triples, active, services, len(triples))
    # maximizing sum(a + b - b*q/baseline * x) == minimizing sum(b*q/baseline * x)
    cost = np.empty(len(triples))
    for t, (n, i, j) in enumerate(triples):
        req = scenario.requests[n]
        cost[t] = req.max_bonus * scenario.qos(i, j) / req.qos_baseline
    lp = StandardLP(num_vars=len(triples), objective=cost, rows=rows)

    col_of = {triple: t for t, triple in enumerate(triples)}
    basis = np.empty(len(rows), dtype=np.int64)
    for row, n in enumerate(active):
        basis[row] = col_of[(n, *matching[n])]
    for k in range(len(services)):
        basis[len(active) + k] = len(triples) + k
    solution = solve(lp, initial_basis=basis, pivot_rule=pivot_rule)
    if solution.status != "optimal":
        raise InvariantError(f"revenue LP came back {solution.status}")

    x = np.rint(solution.values)
    if np.max(np.abs(solution.values - x)) > 1e-6:
        raise InvariantError("revenue LP returned a fractional corner")
    choices = {}
    for t in np.flatnonzero(x == 1):
        n, i, j = triples[int(t)]
        choices[n] = (i, j)
    return AssignmentPlan(choices)


def randomized(scenario: Scenario, seed: int, max_restarts: int = 1000) -> AssignmentPlan:
    """Uniform random assignment with restart-on-dead-end semantics.

    Visits requests in a uniformly random order; each takes a uniformly
    random still-available authorized service. A request finding its pool
    empty aborts the attempt and restarts from scratch, up to max_restarts.
    """
    rng = random.Random(seed)
    pools = [
        [svc.key for svc in scenario.candidate_pool(n)] for n in range(scenario.num_requests)
    ]
    n_requests = scenario.num_requests
    for _ in range(max_restarts):
        order = rng.sample(range(n_requests), n_requests)
        used: set[tuple[int, int]] = set()
        choices: dict[int, tuple[int, int]] = {}
        for n in order:
            available = [key for key in pools[n] if key not in used]
            if not available:
                break
            pick = available[rng.randrange(len(available))]
            choices[n] = pick
            used.add(pick)
        else:
            return AssignmentPlan(choices)
    raise InfeasibleError(f"randomized assignment failed {max_restarts} times in a row")


def randomized_mean(scenario: Scenario, runs: int, base_seed: int = 0) -> RandomizedStats:
    """Mean payment deviation and revenue over `runs` randomized plans."""
    if runs < 1:
        raise ValueError("runs must be at least 1")
    deviations = np.empty(runs)
    revenues = np.empty(runs)
    for r in range(runs):
        plan = randomized(scenario, seed=base_seed + r)
        pv = payment_vector(plan, scenario)
        per = np.asarray(pv.per_request)
        deviations[r] = per.std()
        revenues[r] = math.fsum(pv.per_request)
    return RandomizedStats(
        runs=runs,
        base_seed=base_seed,
        mean_deviation=float(deviations.mean()),
        mean_revenue=float(revenues.mean()),
    )


def branch_and_bound_lp(
    lp: StandardLP,
    integer_cols: Sequence[int],
    *,
    tol: float = 1e-6,
    pivot_rule: str = "dantzig",
    lex_costs: np.ndarray | None = None,
    lex_exact: bool = False,
) -> BnbResult:
    """Depth-first LP-based branch and bound with best-bound pruning.

    Branches on the first fractional integer column (lowest index), floor
    branch explored first. Every node re-solves its relaxation cold, which
    is the honest cost of enforcing integrality without structural insight.
    lex_costs switches relaxation solves and bound comparisons to the
    level-row lexicographic order (see the solver module).
    """
    integer_cols = list(integer_cols)
    use_lex = lex_costs is not None
    best_key: tuple | float | None = None
    best_val = math.nan
    best_values: np.ndarray | None = None
    branches = 0
    nodes = 0
    stack: list[tuple[tuple, ...]] = [()]
    while stack:
        extra = stack.pop()
        node_lp = StandardLP(
            num_vars=lp.num_vars,
            objective=lp.objective,
            rows=list(lp.rows) + [(c.copy(), rel, rhs) for c, rel, rhs in extra],
            lower_bounds=lp.lower_bounds,
            upper_bounds=lp.upper_bounds,
        )
        solution = solve(node_lp, pivot_rule=pivot_rule, lex_costs=lex_costs, lex_exact=lex_exact)
        nodes += 1
        if solution.status == "unbounded":
            raise ValueError("relaxation is unbounded; cannot branch")
        if solution.status != "optimal":
            continue
        if use_lex:
            node_key = tuple(lex_costs @ solution.values)
            if best_key is not None and node_key >= best_key:
                continue
        else:
            node_key = solution.objective_value
            if best_key is not None and node_key >= best_key - 1e-12 * (1.0 + abs(best_key)):
                continue
        fractional = None
        for j in integer_cols:
            if abs(solution.values[j] - round(solution.values[j])) > tol:
                fractional = j
                break
        if fractional is None:
            best_key = node_key
            best_val = solution.objective_value
            best_values = solution.values.copy()
            continue
        branches += 1
        v = float(solution.values[fractional])
        floor_row = np.zeros(lp.num_vars)
        floor_row[fractional] = 1.0
        ceil_row = np.zeros(lp.num_vars)
        ceil_row[fractional] = -1.0
        stack.append(extra + ((ceil_row, "<=", -math.ceil(v)),))
        stack.append(extra + ((floor_row, "<=", float(math.floor(v))),))
    if best_values is None:
        return BnbResult(
            status="infeasible", values=None, objective_value=math.nan, branches=branches, nodes=nodes
        )
    return BnbResult(
        status="optimal",
        values=best_values,
        objective_value=float(best_val),
        branches=branches,
        nodes=nodes,
    )


def ip_branch_and_bound(
    scenario: Scenario,
    objective: str = "xi",
    *,
    step: float = 0.01,
    range_cap: int = 100,
) -> IPResult:
    """Solve one monolithic selection IP (no iterative freezing).

    objective "xi" uses the round-1 quantized lexicographic weights,
    "revenue" the revenue coefficients. Reported objective_value is the
    lexicographic score in "xi" mode and the total revenue in "revenue"
    mode. Useful as a timing and integrality reference; a single IP does
    not perform the round-by-round fairness refinement.
    """
    if objective not in ("xi", "revenue"):
        raise ValueError(f"unknown objective {objective!r}")
    if saturating_matching(scenario) is None:
        raise InfeasibleError("no assignment can serve every request")
    active = list(range(scenario.num_requests))
    if objective == "xi":
        n_triples = len(candidate_triples(scenario, active))
        cap = effective_range_cap(range_cap, n_triples, None)
        quant = quantize(scenario, active, step, cap)
        lp, layout = build_reduced_subproblem_lp(scenario, {}, active, quant)
        result = branch_and_bound_lp(
            lp, range(lp.num_vars), lex_costs=layout.lex_cost_rows(), lex_exact=True
        )
        if result.status != "optimal":
            raise InvariantError("selection IP found no integral solution")
        solution = LPSolution(
            status="optimal", values=result.values, objective_value=result.objective_value
        )
        plan = round_to_plan(solution, layout, {})
        value = result.objective_value + layout.offset
    else:
        triples = candidate_triples(scenario, active)
        services = sorted({(i, j) for _, i, j in triples})
        rows = selection_rows(triples, active, services, len(triples))
        cost = np.empty(len(triples))
        for t, (n, i, j) in enumerate(triples):
            req = scenario.requests[n]
            cost[t] = req.max_bonus * scenario.qos(i, j) / req.qos_baseline
        lp = StandardLP(num_vars=len(triples), objective=cost, rows=rows)
        result = branch_and_bound_lp(lp, range(lp.num_vars))
        if result.status != "optimal":
            raise InvariantError("selection IP found no integral solution")
        choices = {}
        for t in np.flatnonzero(np.rint(result.values) == 1):
            n, i, j = triples[int(t)]
            choices[n] = (i, j)
        plan = AssignmentPlan(choices)
        value = math.fsum(payment_vector(plan, scenario).per_request)
    return IPResult(
        plan=plan,
        payments=payment_vector(plan, scenario),
        objective_value=value,
        branches=result.branches,
        nodes=result.nodes,
    )


def ip_iterative(
    scenario: Scenario,
    *,
    step: float = 0.01,
    range_cap: int = 100,
) -> IPResult:
    """Max-min fair assignment with every round solved as an integer program.

    Runs the same freeze loop as the fair engine but hands each round to
    branch_and_bound_lp cold (no warm start, integrality enforced at every
    node). Produces the same plan on these instances; exists as the timing
    reference for what the relaxation-based engine saves.
    """
    if saturating_matching(scenario) is None:
        raise InfeasibleError("no assignment can serve every request")
    active = list(range(scenario.num_requests))
    frozen: dict[int, tuple[int, int]] = {}
    branches = 0
    nodes = 0
    while active:
        removed = set(frozen.values())
        n_triples = len(candidate_triples(scenario, active, excluded_services=removed))
        cap = effective_range_cap(range_cap, n_triples, None)
        quant = quantize(scenario, active, step, cap, excluded_services=removed)
        lp, layout = build_reduced_subproblem_lp(scenario, frozen, active, quant)
        result = branch_and_bound_lp(
            lp, range(lp.num_vars), lex_costs=layout.lex_cost_rows(), lex_exact=True
        )
        if result.status != "optimal":
            raise InvariantError("round IP found no integral solution")
        branches += result.branches
        nodes += result.nodes
        solution = LPSolution(
            status="optimal", values=result.values, objective_value=result.objective_value
        )
        plan_round = round_to_plan(solution, layout, frozen)
        payments = {n: request_payment(plan_round, scenario, n) for n in active}
        n_star = select_min_payment_request(payments)
        frozen[n_star] = plan_round.choices[n_star]
        active.remove(n_star)
    plan = AssignmentPlan(frozen)
    return IPResult(
        plan=plan,
        payments=payment_vector(plan, scenario),
        objective_value=math.nan,
        branches=branches,
        nodes=nodes,
    )

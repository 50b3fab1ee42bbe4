"""Exhaustive reference solvers for small scenarios.

These enumerate every feasible plan with exact (unquantized) payment
arithmetic and exist to certify the LP-based solvers in tests and in the
`oracle-check` command. Guard rails, not performance: instances must stay
within the enumeration cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .errors import InfeasibleError
from .model import AssignmentPlan, Scenario, lex_compare, payment_vector

DEFAULT_NODE_CAP = 10_000_000


@dataclass(frozen=True)
class EnumerationReport:
    """Outcome of a brute-force search over all feasible plans.

    optimal_plans holds every co-optimal plan in enumeration order;
    optimal_sorted and optimal_revenue describe the first of them (under
    the max-min objective all co-optimal plans share both).
    """

    feasible_count: int
    optimal_plans: tuple[AssignmentPlan, ...]
    optimal_sorted: tuple[float, ...]
    optimal_revenue: float


def enumerate_feasible(
    scenario: Scenario, node_cap: int = DEFAULT_NODE_CAP
) -> Iterator[AssignmentPlan]:
    """Yield every complete feasible plan, backtracking in index order.

    Deterministic: requests are assigned in id order and pools scanned in
    (provider, service) order. Raises ValueError when the search space
    exceeds node_cap partial assignments.
    """
    pools = [
        [svc.key for svc in scenario.candidate_pool(n)] for n in range(scenario.num_requests)
    ]
    bound = 1
    for pool in pools:
        bound *= max(1, len(pool))
        if bound > node_cap:
            raise ValueError(
                f"search space exceeds the enumeration cap ({node_cap} partial nodes)"
            )

    visited = 0
    choices: dict[int, tuple[int, int]] = {}
    used: set[tuple[int, int]] = set()

    def walk(n: int) -> Iterator[AssignmentPlan]:
        nonlocal visited
        if n == scenario.num_requests:
            yield AssignmentPlan(dict(choices))
            return
        for key in pools[n]:
            if key in used:
                continue
            visited += 1
            if visited > node_cap:
                raise ValueError(
                    f"search space exceeds the enumeration cap ({node_cap} partial nodes)"
                )
            choices[n] = key
            used.add(key)
            yield from walk(n + 1)
            del choices[n]
            used.discard(key)

    yield from walk(0)


def brute_force_mmf(scenario: Scenario, node_cap: int = DEFAULT_NODE_CAP) -> EnumerationReport:
    """Max-min fair optimum by exhaustive lexicographic comparison."""
    count = 0
    best_sorted: tuple[float, ...] | None = None
    best_plans: list[AssignmentPlan] = []
    for plan in enumerate_feasible(scenario, node_cap):
        count += 1
        pv = payment_vector(plan, scenario).sorted_view
        if best_sorted is None:
            best_sorted, best_plans = pv, [plan]
            continue
        cmp = lex_compare(pv, best_sorted)
        if cmp > 0:
            best_sorted, best_plans = pv, [plan]
        elif cmp == 0:
            best_plans.append(plan)
    if best_sorted is None:
        raise InfeasibleError("no feasible plan exists")
    return EnumerationReport(
        feasible_count=count,
        optimal_plans=tuple(best_plans),
        optimal_sorted=best_sorted,
        optimal_revenue=math.fsum(best_sorted),
    )


def brute_force_revenue(scenario: Scenario, node_cap: int = DEFAULT_NODE_CAP) -> EnumerationReport:
    """Revenue optimum by exhaustive summation (ties kept in order found)."""
    count = 0
    best_revenue = -math.inf
    best_plans: list[AssignmentPlan] = []
    best_sorted: tuple[float, ...] | None = None
    for plan in enumerate_feasible(scenario, node_cap):
        count += 1
        pv = payment_vector(plan, scenario)
        revenue = math.fsum(pv.per_request)
        if revenue > best_revenue:
            best_revenue = revenue
            best_plans = [plan]
            best_sorted = pv.sorted_view
        elif revenue == best_revenue:
            best_plans.append(plan)
    if best_sorted is None:
        raise InfeasibleError("no feasible plan exists")
    return EnumerationReport(
        feasible_count=count,
        optimal_plans=tuple(best_plans),
        optimal_sorted=best_sorted,
        optimal_revenue=best_revenue,
    )

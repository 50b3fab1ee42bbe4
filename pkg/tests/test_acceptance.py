"""Acceptance gate: seven criteria, one pass/fail line each in the summary.

Heavy fixtures are module-scoped so the oracle population and the timing
ladder run once. Expected wall time is a few minutes, dominated by the
20-rep timing ladder.
"""

import itertools
import time

import numpy as np
import pytest

from fairselect import (
    FassConfig,
    brute_force_mmf,
    build_reduced_subproblem_lp,
    fit_growth_exponent,
    pricing_sweep,
    quantize,
    run_fass,
    synthetic_qos_matrix,
    timing_run,
    verify_row_partition,
    xi_score,
)
from fairselect.lex_transform import QuantizedPayments, assignment_block, round_to_plan
from fairselect.scenario_io import parse_plan_csv, parse_scenario_json, plan_to_csv, scenario_to_json
from fairselect.simplex import solve

from conftest import (
    feasible_scenarios,
    fine_grid_scenario,
    grid_scenario,
    random_scenario,
    record_acceptance,
    two_request_scenario,
)

ORACLE_POPULATION = 500
FINE_CONFIG = FassConfig(step=1e-4, range_cap=1000, k_base=2)


@pytest.fixture(scope="module")
def oracle_runs():
    """Criterion 1/2 population: engine + exhaustive oracle, both step regimes.

    coarse: payments on the 0.01 lattice, solved at the default 0.01 step.
    fine: payments on the 1e-4 lattice inside a narrow band, solved at step
    1e-4 with a base-2 objective so the full span fits the level budget
    without coarsening.
    """
    t0 = time.perf_counter()
    coarse = [
        (sc, run_fass(sc), brute_force_mmf(sc))
        for sc in feasible_scenarios(grid_scenario, ORACLE_POPULATION, seed=404)
    ]
    fine = [
        (sc, run_fass(sc, FINE_CONFIG), brute_force_mmf(sc))
        for sc in feasible_scenarios(fine_grid_scenario, ORACLE_POPULATION, seed=505)
    ]
    elapsed = time.perf_counter() - t0
    return coarse, fine, elapsed


@pytest.fixture(scope="module")
def sweep_rows():
    """Criterion 4/5 population: full pricing sweep at the pinned protocol."""
    return pricing_sweep(synthetic_qos_matrix(seed=0), seed=0)


@pytest.fixture(scope="module")
def timing_rows():
    """Criterion 6 population: full variable ladder at 20 reps."""
    return timing_run(synthetic_qos_matrix(seed=0), reps=20, seed=0)


def worst_sorted_gap(runs):
    gaps = [
        float(np.max(np.abs(np.asarray(result.payments.sorted_view) - np.asarray(oracle.optimal_sorted))))
        for _, result, oracle in runs
    ]
    return max(gaps)


def test_criterion_1_oracle_equivalence(oracle_runs):
    coarse, fine, elapsed = oracle_runs
    worst_coarse = worst_sorted_gap(coarse)
    worst_fine = worst_sorted_gap(fine)
    passed = worst_coarse <= 0.01 + 1e-9 and worst_fine <= 1e-9 and elapsed < 60.0
    record_acceptance(
        "criterion 1: oracle equivalence",
        passed,
        f"{ORACLE_POPULATION} scenarios/regime, worst gap {worst_coarse:.2e} at step 0.01 "
        f"(tolerance one step) and {worst_fine:.2e} at step 1e-4 (exact), {elapsed:.1f}s",
    )


def test_criterion_2_integrality(oracle_runs):
    coarse, fine, _ = oracle_runs
    worst_gap = 0.0
    rounds = 0
    for _, result, _ in coarse + fine:
        for record in result.trace.rounds:
            worst_gap = max(worst_gap, record.max_integrality_gap)
            rounds += 1
    blocks_ok = 0
    for sc, _, _ in coarse + fine:
        active = list(range(sc.num_requests))
        quant = quantize(sc, active)
        lp, layout = build_reduced_subproblem_lp(sc, {}, active, quant)
        ok, _ = verify_row_partition(assignment_block(lp, layout), layout.num_request_rows)
        if ok:
            blocks_ok += 1
    total = len(coarse) + len(fine)
    passed = worst_gap <= 1e-6 and blocks_ok == total
    record_acceptance(
        "criterion 2: integrality",
        passed,
        f"worst |x - round(x)| {worst_gap:.2e} over {rounds} round LPs (tolerance 1e-6); "
        f"row partition verified on {blocks_ok}/{total} blocks (plus every engine round)",
    )


def test_criterion_3_order_reversal():
    counterexamples = 0
    comparisons = 0
    for K in (4, 8, 16):
        for length in (1, 2, 3, 4):
            vectors = list(itertools.combinations_with_replacement(range(7), length))
            scores = {v: xi_score(v, K) for v in vectors}
            for u, v in itertools.combinations(vectors, 2):
                comparisons += 1
                # u < v in tuple order is lexicographic order on sorted vectors
                if not scores[u] > scores[v]:
                    counterexamples += 1
    passed = counterexamples == 0
    record_acceptance(
        "criterion 3: order reversal",
        passed,
        f"{comparisons} ordered pairs, lengths <= 4, levels 0..6, K in {{4,8,16}}: "
        f"{counterexamples} counterexamples",
    )


def test_criterion_4_deviation_ordering(sweep_rows):
    table = {(r.level, r.algorithm): r for r in sweep_rows}
    levels = sorted({r.level for r in sweep_rows})
    fass_vs_rand = []
    rand_vs_revmax = []
    for level in levels:
        dev_f = table[(level, "fass")].mean_deviation
        dev_r = table[(level, "randomized")].mean_deviation
        dev_m = table[(level, "revenue_max")].mean_deviation
        fass_vs_rand.append(dev_f <= dev_r + 1e-12)
        rand_vs_revmax.append(dev_r <= dev_m + 1e-12)
    sample = table[(4, "fass")], table[(4, "randomized")], table[(4, "revenue_max")]
    passed = all(fass_vs_rand) and all(rand_vs_revmax)
    record_acceptance(
        "criterion 4: deviation ordering",
        passed,
        f"fass<=randomized at {sum(fass_vs_rand)}/{len(levels)} levels, "
        f"randomized<=revenue_max at {sum(rand_vs_revmax)}/{len(levels)} levels "
        f"(level 4: fass {sample[0].mean_deviation:.3f}, randomized {sample[1].mean_deviation:.3f}, "
        f"revenue_max {sample[2].mean_deviation:.3f}; 20 scenarios/level, 1000 randomized runs)",
    )


def test_criterion_5_revenue_ordering(sweep_rows):
    table = {(r.level, r.algorithm): r for r in sweep_rows}
    levels = sorted({r.level for r in sweep_rows})
    ordered = []
    gaps = []
    for level in levels:
        rev_f = table[(level, "fass")].mean_revenue
        rev_r = table[(level, "randomized")].mean_revenue
        rev_m = table[(level, "revenue_max")].mean_revenue
        ordered.append(rev_m >= rev_f - 1e-9 and rev_f >= rev_r - 1e-9)
        gaps.append((rev_m - rev_f) / rev_m)
    mean_gap = float(np.mean(gaps))
    passed = all(ordered) and mean_gap <= 0.15
    record_acceptance(
        "criterion 5: revenue ordering",
        passed,
        f"revenue_max >= fass >= randomized at {sum(ordered)}/{len(levels)} levels; "
        f"mean fass gap {100 * mean_gap:.2f}% of revenue_max (bound 15%)",
    )


def test_criterion_6_timing(timing_rows):
    fass = {r.vars: r.mean_ms for r in timing_rows if r.algorithm == "fass"}
    ip = {r.vars: r.mean_ms for r in timing_rows if r.algorithm == "ip"}
    top = max(fass)
    exponent = fit_growth_exponent(timing_rows)
    ratios = [ip[v] / fass[v] for v in sorted(fass)]
    passed = fass[top] <= 5000.0 and exponent <= 2.0 and all(r > 1.0 for r in ratios)
    record_acceptance(
        "criterion 6: timing",
        passed,
        f"fass {fass[top]:.0f} ms at {top} vars (bound 5000), growth exponent "
        f"{exponent:.2f} (bound 2), ip/fass ratio {min(ratios):.2f}..{max(ratios):.2f} "
        f"(20 reps/point)",
    )


def test_criterion_7_property_suite(oracle_runs):
    coarse, fine, _ = oracle_runs
    checks = []

    # payment arithmetic on the worked example
    result = run_fass(two_request_scenario())
    checks.append(result.payments.sorted_view == pytest.approx((0.5, 1.5)))

    # frozen payments never drop by more than one grid step
    monotone = True
    for runs, step in ((coarse, 0.01), (fine, 1e-4)):
        for _, res, _ in runs:
            payments = [r.payment for r in res.trace.rounds]
            for earlier, later in zip(payments, payments[1:]):
                if later < earlier - (step + 1e-9):
                    monotone = False
    checks.append(monotone)

    # quantization shift invariance of the chosen plan
    scenario = two_request_scenario()
    quant = quantize(scenario, [0, 1])
    shifted = QuantizedPayments(
        step=quant.step, requested_step=quant.requested_step, shift=quant.shift + 5,
        doublings=quant.doublings,
        grid={t: (a - 5, b - 5) for t, (a, b) in quant.grid.items()},
    )
    plans = []
    for grid in (quant, shifted):
        lp, layout = build_reduced_subproblem_lp(scenario, {}, [0, 1], grid)
        plans.append(round_to_plan(solve(lp, lex_costs=layout.lex_cost_rows(), lex_exact=True), layout, {}))
    checks.append(plans[0].choices == plans[1].choices)

    # serialization round trips
    round_trips = 0
    for sc in feasible_scenarios(random_scenario, 20, seed=71):
        if parse_scenario_json(scenario_to_json(sc)) == sc:
            plan = run_fass(sc).plan
            if parse_plan_csv(plan_to_csv(plan, sc)).choices == plan.choices:
                round_trips += 1
    checks.append(round_trips == 20)

    # deterministic replay
    replays = all(
        run_fass(sc).plan.choices == run_fass(sc).plan.choices
        for sc, _, _ in coarse[:5]
    )
    checks.append(replays)

    passed = all(checks)
    record_acceptance(
        "criterion 7: property suite",
        passed,
        f"arithmetic, monotone freezes ({len(coarse) + len(fine)} traces), shift "
        f"invariance, round trips (20), deterministic replay: "
        f"{sum(bool(c) for c in checks)}/5 groups hold",
    )

# Fairness/revenue comparison across pricing levels on a synthetic
# response-time matrix: the fair engine against revenue maximization and
# uniform random selection. Deviation is the population std of payments.
from fairselect import pricing_sweep, synthetic_qos_matrix, write_sweep_csv

matrix = synthetic_qos_matrix(seed=0)
print(f"matrix: {matrix.n_rows} rows x {matrix.n_cols} providers\n")

# trimmed protocol so the demo runs in seconds; the benchmark CLI exposes
# the full one (levels 1..8, 20 scenarios/level, 1000 randomized runs)
rows = pricing_sweep(
    matrix, levels=(1, 2, 3, 4), scenarios_per_level=5, randomized_runs=200, seed=0
)

print("level  algorithm     deviation   revenue")
for row in rows:
    print(f"{row.level:5d}  {row.algorithm:<12s}  {row.mean_deviation:9.3f}  {row.mean_revenue:8.2f}")

by_key = {(r.level, r.algorithm): r for r in rows}
fair_below_random = all(
    by_key[(lv, "fass")].mean_deviation <= by_key[(lv, "randomized")].mean_deviation
    for lv in (1, 2, 3, 4)
)
revenue_ordered = all(
    by_key[(lv, "revenue_max")].mean_revenue
    >= by_key[(lv, "fass")].mean_revenue
    >= by_key[(lv, "randomized")].mean_revenue
    for lv in (1, 2, 3, 4)
)
print(f"\nfair deviation <= randomized deviation at every level: {fair_below_random}")
print(f"revenue_max >= fass >= randomized at every level: {revenue_ordered}")

write_sweep_csv(rows, "sweep_demo.csv")
print("wrote sweep_demo.csv")

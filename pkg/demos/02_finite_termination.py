"""Douglas-Rachford reaches a fixed point after finitely many steps on the
orthant and the line x + y = 2, while alternating projections only converge
in the limit."""

import numpy as np

from projreflect import AffineSubspace, LatticeCone, run

S = LatticeCone(2)
A = AffineSubspace([[1.0, 1.0]], [2.0])
x0 = [-0.7, 3.6]

dr = run("dr", S, A, x0)
print("Douglas-Rachford:", dr.stop_reason, "after", dr.iterations, "steps")
for rec in dr.records:
    print(f"  n={rec.n}  x={np.round(rec.x, 4)}  d_S={rec.dist_S:.3g}  d_A={rec.dist_A:.3g}")

vn = run("map", S, A, x0)
print("\nalternating projections:", vn.stop_reason, "after", vn.iterations, "steps")
print("  step sizes shrink geometrically:", np.round(vn.step_sizes()[:6], 5))

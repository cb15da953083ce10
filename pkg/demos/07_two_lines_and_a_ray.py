"""Douglas-Rachford for two lines through the origin converges at rate
cos(theta). Replacing one line by a ray and the other by an affine line
keeps the local picture, so the iteration converges without terminating."""

import math

import numpy as np

from projreflect import run
from projreflect import oracles

for theta in (math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2 - 1e-6):
    res = oracles.ex44_two_lines(theta)
    print(f"theta={theta:.4f}  fitted rate {res.fitted_rate:.4f}  cos(theta) {math.cos(theta):.4f}")

S, A, x_star = oracles.ex44b_instance()
tr = run("dr", S, A, (2.0, 0.5), max_iters=1000, tol=0.0, reference_point=x_star)
print("\nray/line in floating point:", tr.stop_reason, "after", tr.iterations, "steps;",
      "Fejer monotone:", bool(np.all(np.diff(tr.fejer_dists()) <= 1e-10)))
exact = oracles.dr_exact_ray_line((1, 1), (0, 1), 1, (2, 0.5), 60)
print("exact rational iterate 60:", tuple(float(v) for v in exact[-1]),
      "| ever constant:", any(p == q for p, q in zip(exact, exact[1:])))

"""Near an interior point of a simplicial cone, projecting onto the cone or
onto its span gives the same answer, so Douglas-Rachford cannot tell the two
problems apart there. The safe ball radius is the distance to the nearest
facet; the smallest generator coefficient overestimates it for skewed
generators."""

import numpy as np

from projreflect import AffineSubspace, SimplicialCone
from projreflect import oracles

S = SimplicialCone.from_directions([[1.0, 0.0], [1.0, 1.0]])
x_star = S.generators.sum(axis=0)
naive = oracles.ex43_coincidence_radius(S, x_star)
safe = oracles.certified_coincidence_radius(S, x_star)
print(f"smallest coefficient {naive:.4f}, distance to nearest facet {safe:.4f}")

print("max |P_S y - P_span y| on the facet-distance ball:",
      oracles.ex43_projection_discrepancy(S, x_star, safe, samples=1000))
y = x_star + np.array([0.0, -0.99])
print("a point at distance 0.99 < smallest coefficient:",
      "cone", S.project(y).round(4), "span", S.span().project(y).round(4))

A = AffineSubspace([[0.3, 1.0]], [float(np.array([0.3, 1.0]) @ x_star)])
x0 = oracles.sample_ball(x_star, safe, 1, np.random.default_rng(2))[0]
worst, steps = oracles.ex43_dr_discrepancy(S, A, x_star, x0, safe, n_steps=100)
print(f"DR on (cone, A) vs (span, A): {steps} steps inside the ball, max gap {worst:.1e}")

"""Projections onto the sets the iterations use, and the Moreau split of a
point into a cone part and a polar-cone part."""

import numpy as np

from projreflect import (
    AffineSubspace,
    LatticeCone,
    SimplicialCone,
    lift_halfspace,
    project_polar,
)

rng = np.random.default_rng(0)
x = np.array([1.0, -2.0, 3.0])

orthant = LatticeCone(3)
print("orthant projection of", x, "->", orthant.project(x))
print("orthant reflection (the modulus) ->", orthant.reflect(x))

plane = AffineSubspace([[1.0, 1.0, 0.0]], [2.0])
print("projection onto x + y = 2 ->", plane.project(x))
print("row-space projector Q:\n", plane.Q)

# a cone spanned by two skewed unit vectors; projection solves an NNLS problem
cone = SimplicialCone.from_directions([[1.0, 0.0, 0.0], [1.0, 1.0, 1.0]])
p, q = cone.project(x), project_polar(cone, x)
print("\nsimplicial cone part", p.round(4), "polar part", q.round(4))
print("parts add up to x:", np.allclose(p + q, x), "| orthogonal:", abs(p @ q) < 1e-12)

# the same identities on random inputs
worst = 0.0
for _ in range(1000):
    y = rng.normal(size=3) * 5
    for K in (orthant, cone):
        p, q = K.project(y), project_polar(K, y)
        worst = max(worst, np.linalg.norm(p + q - y), abs(p @ q))
print("worst Moreau defect over 2000 draws:", f"{worst:.1e}")

# an inequality <a, x> <= b turns into an equality with a slack coordinate
A_hat, S_hat = lift_halfspace([1.0, 2.0], 4.0)
print("\nlifted halfspace rows", A_hat.rows, "rhs", A_hat.rhs, "cone dim", S_hat.dim)

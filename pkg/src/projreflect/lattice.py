"""Lattice operations on R^N with the componentwise order.

Every function here is a componentwise selection or negation, so the
lattice identities (x = x+ - x-, |x| = x+ + x-, ...) hold bitwise in
floating point.
"""

import numpy as np

__all__ = [
    "as_point",
    "check_same_dim",
    "pos_part",
    "neg_part",
    "modulus",
    "join",
    "meet",
]


def as_point(x, dim=None):
    """Return `x` as a finite 1-D float array, optionally checking its size."""
    p = np.asarray(x, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"a point must be a nonempty 1-D vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("a point must have finite entries")
    if dim is not None and p.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {p.size}")
    return p


def check_same_dim(x, y):
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")


def pos_part(x):
    """Positive part x+ = x v 0, i.e. the projection onto the orthant."""
    x = as_point(x)
    return np.maximum(x, 0.0)


def neg_part(x):
    """Negative part x- = (-x) v 0."""
    x = as_point(x)
    return np.maximum(-x, 0.0)


def modulus(x):
    """|x| = x v (-x)."""
    return np.abs(as_point(x))


def join(x, y):
    """Supremum x v y (componentwise max)."""
    x, y = as_point(x), as_point(y)
    check_same_dim(x, y)
    return np.maximum(x, y)


def meet(x, y):
    """Infimum x ^ y (componentwise min)."""
    x, y = as_point(x), as_point(y)
    check_same_dim(x, y)
    return np.minimum(x, y)

"""Projectable convex sets: the lattice cone, affine subspaces, simplicial
cones, spans, and polar cones.

All sets are immutable after construction. Factorizations (Cholesky of the
Gram matrices) are computed once in ``__init__``.
"""

import numpy as np
from scipy import linalg

from .lattice import as_point

__all__ = [
    "DEFAULT_TOL",
    "ProjectionError",
    "ConvexSet",
    "LatticeCone",
    "AffineSubspace",
    "SimplicialCone",
    "Span",
    "PolarCone",
    "line",
    "nnls",
    "project",
    "reflect",
    "project_affine",
    "projector_Q",
    "project_simplicial",
    "project_polar",
    "lift_halfspace",
]

DEFAULT_TOL = 1e-9
RCOND_MIN = 1e-12
UNIT_TOL = 1e-12


class ProjectionError(RuntimeError):
    """Raised when an iterative projection fails to reach its KKT tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


def _gram_cholesky(rows, what):
    gram = rows @ rows.T
    # reciprocal 2-norm condition number of the Gram matrix
    sv = np.linalg.svd(gram, compute_uv=False)
    if sv[-1] <= RCOND_MIN * sv[0]:
        raise ValueError(f"{what} are not linearly independent (Gram rcond {sv[-1] / sv[0]:.3g})")
    return linalg.cho_factor(gram, lower=True)


class ConvexSet:
    """Base class. Subclasses implement :meth:`project`."""

    dim: int
    is_cone = False

    def project(self, x):
        raise NotImplementedError

    def reflect(self, x):
        return 2.0 * self.project(x) - as_point(x, self.dim)

    def distance(self, x):
        x = as_point(x, self.dim)
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x, tol=DEFAULT_TOL):
        return self.distance(x) <= tol


class LatticeCone(ConvexSet):
    """The nonnegative orthant R^N_+; self-dual, with polar -R^N_+."""

    is_cone = True

    def __init__(self, dim):
        dim = int(dim)
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim

    def project(self, x):
        return np.maximum(as_point(x, self.dim), 0.0)

    def reflect(self, x):
        return np.abs(as_point(x, self.dim))

    def project_polar(self, x):
        return np.minimum(as_point(x, self.dim), 0.0)

    def contains(self, x, tol=DEFAULT_TOL):
        return bool(np.all(as_point(x, self.dim) >= -tol))

    def __eq__(self, other):
        return isinstance(other, LatticeCone) and other.dim == self.dim

    def __repr__(self):
        return f"LatticeCone(dim={self.dim})"


class AffineSubspace(ConvexSet):
    """The affine subspace ``{x : rows @ x = rhs}`` of finite codimension.

    Parameters
    ----------
    rows : (M, N) array_like
        Linearly independent functionals t_1..t_M.
    rhs : (M,) array_like
        Right-hand side values.

    Attributes
    ----------
    Q : (N, N) ndarray
        Orthogonal projector onto span{t_i}, ``T^T (T T^T)^{-1} T``.
    xbar : (N,) ndarray
        The minimum-norm point ``T^T (T T^T)^{-1} rhs`` of the subspace.
    """

    def __init__(self, rows, rhs):
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        rhs = np.atleast_1d(np.asarray(rhs, dtype=np.float64))
        if rows.ndim != 2:
            raise ValueError("rows must be a matrix")
        m, n = rows.shape
        if not 1 <= m <= n:
            raise ValueError(f"need 1 <= M <= N rows, got M={m}, N={n}")
        if rhs.shape != (m,):
            raise ValueError(f"rhs must have {m} entries, got {rhs.shape}")
        if not (np.all(np.isfinite(rows)) and np.all(np.isfinite(rhs))):
            raise ValueError("rows and rhs must be finite")
        self.dim = n
        self.rows = rows
        self.rhs = rhs
        self._chol = _gram_cholesky(rows, "affine rows")
        # T^* (T T^*)^{-1}, an N x M matrix
        self._pinv = linalg.cho_solve(self._chol, rows).T
        self.Q = self._pinv @ rows
        self.Q = 0.5 * (self.Q + self.Q.T)
        self.xbar = self._pinv @ rhs
        for a in (self.rows, self.rhs, self.Q, self.xbar, self._pinv):
            a.flags.writeable = False

    @property
    def codim(self):
        return self.rows.shape[0]

    def project(self, x):
        x = as_point(x, self.dim)
        return x + self._pinv @ (self.rhs - self.rows @ x)

    def apply_Q(self, v):
        return self._pinv @ (self.rows @ v)

    def residual(self, x):
        """Norm of ``T x - rhs``."""
        return float(np.linalg.norm(self.rows @ as_point(x, self.dim) - self.rhs))

    def __eq__(self, other):
        return (
            isinstance(other, AffineSubspace)
            and np.array_equal(other.rows, self.rows)
            and np.array_equal(other.rhs, self.rhs)
        )

    def __repr__(self):
        return f"AffineSubspace(rows={self.rows.tolist()}, rhs={self.rhs.tolist()})"


def line(point, direction):
    """The affine line ``point + R * direction`` as an :class:`AffineSubspace`."""
    point = as_point(point)
    direction = as_point(direction, point.size)
    if point.size < 2:
        raise ValueError("a line needs dimension >= 2")
    if not np.any(direction):
        raise ValueError("direction must be nonzero")
    rows = linalg.null_space(direction[None, :]).T
    return AffineSubspace(rows, rows @ point)


def nnls(G, b, maxiter=None, atol=None):
    """Lawson-Hanson active-set solver for ``min ||G lam - b||, lam >= 0``.

    Returns the coefficient vector. Raises :class:`ProjectionError` if the
    outer loop exceeds `maxiter` (default ``3 * k + 10``) iterations.
    """
    G = np.asarray(G, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n, k = G.shape
    if maxiter is None:
        maxiter = 3 * k + 10
    if atol is None:
        atol = 10 * max(n, k) * np.spacing(1.0) * max(1.0, np.abs(G).sum(axis=0).max()) * max(
            1.0, np.linalg.norm(b)
        )
    lam = np.zeros(k)
    passive = np.zeros(k, dtype=bool)
    w = G.T @ b
    it = 0
    while not passive.all() and np.max(np.where(passive, -np.inf, w)) > atol:
        it += 1
        if it > maxiter:
            raise ProjectionError("NNLS iteration cap exceeded", residual=float(np.max(w[~passive])))
        j = int(np.argmax(np.where(passive, -np.inf, w)))
        passive[j] = True
        while True:
            s = np.zeros(k)
            s[passive] = np.linalg.lstsq(G[:, passive], b, rcond=None)[0]
            if np.all(s[passive] > 0):
                break
            # step back to the boundary of the feasible region
            blocking = np.flatnonzero(passive & (s <= 0))
            ratios = lam[blocking] / (lam[blocking] - s[blocking])
            i = int(np.argmin(ratios))
            lam = lam + ratios[i] * (s - lam)
            passive &= lam > atol
            passive[blocking[i]] = False
            lam[~passive] = 0.0
        lam = s
        w = G.T @ (b - G @ lam)
    return lam


class _GeneratedCone(ConvexSet):
    def __init__(self, generators, what):
        gens = np.atleast_2d(np.asarray(generators, dtype=np.float64))
        k, n = gens.shape
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= N generators, got k={k}, N={n}")
        if not np.all(np.isfinite(gens)):
            raise ValueError("generators must be finite")
        self.dim = n
        self.generators = gens
        self._chol = _gram_cholesky(gens, what)
        self.generators.flags.writeable = False

    def coefficients(self, x):
        """Coordinates of the projection of `x` onto the span, in the generator basis."""
        x = as_point(x, self.dim)
        return linalg.cho_solve(self._chol, self.generators @ x)

    def span(self):
        return Span(self.generators)


class Span(_GeneratedCone):
    """The linear span of linearly independent generators (a cone whose polar
    is its orthogonal complement)."""

    is_cone = True

    def __init__(self, generators):
        super().__init__(generators, "span generators")

    def project(self, x):
        return self.generators.T @ self.coefficients(x)

    def __eq__(self, other):
        return isinstance(other, Span) and np.array_equal(other.generators, self.generators)

    def __repr__(self):
        return f"Span({self.generators.tolist()})"


class SimplicialCone(_GeneratedCone):
    """Nonnegative combinations of linearly independent unit generators.

    Projection solves a nonnegative least squares problem over the
    generator coefficients.
    """

    is_cone = True

    def __init__(self, generators):
        super().__init__(generators, "simplicial generators")
        norms = np.linalg.norm(self.generators, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise ValueError(f"generators must have unit norm, got norms {norms}")

    @classmethod
    def from_directions(cls, directions):
        d = np.atleast_2d(np.asarray(directions, dtype=np.float64))
        return cls(d / np.linalg.norm(d, axis=1, keepdims=True))

    def cone_coefficients(self, x):
        """Generator coefficients of the projection of `x` onto the cone."""
        x = as_point(x, self.dim)
        return nnls(self.generators.T, x)

    def project(self, x):
        return self.generators.T @ self.cone_coefficients(x)

    def contains(self, x, tol=DEFAULT_TOL):
        x = as_point(x, self.dim)
        lam = self.coefficients(x)
        return bool(np.all(lam >= -tol) and np.linalg.norm(self.generators.T @ lam - x) <= tol)

    def __eq__(self, other):
        return isinstance(other, SimplicialCone) and np.array_equal(
            other.generators, self.generators
        )

    def __repr__(self):
        return f"SimplicialCone({self.generators.tolist()})"


class PolarCone(ConvexSet):
    """Negative polar ``{y : <y, s> <= 0 for all s in cone}`` of a cone set.

    Projection is by Moreau decomposition, ``x - P_cone(x)``.
    """

    is_cone = True

    def __init__(self, cone):
        if not getattr(cone, "is_cone", False):
            raise ValueError(f"polar is defined here only for cones, got {cone!r}")
        self.cone = cone
        self.dim = cone.dim

    def project(self, x):
        x = as_point(x, self.dim)
        return x - self.cone.project(x)

    def __eq__(self, other):
        return isinstance(other, PolarCone) and other.cone == self.cone

    def __repr__(self):
        return f"PolarCone({self.cone!r})"


def project(s, x):
    """Nearest point of the set `s` to `x`."""
    return s.project(x)


def reflect(s, x):
    """Reflection ``2 P_s x - x``."""
    return s.reflect(x)


def project_affine(A, x):
    return A.project(x)


def projector_Q(A):
    """The orthogonal projector onto the span of the rows of `A`.

    The matching particular point is ``A.xbar``.
    """
    return A.Q


def project_simplicial(S, x):
    return S.project(x)


def project_polar(s, x):
    """Projection onto the negative polar cone of `s`."""
    x = as_point(x, s.dim)
    if isinstance(s, LatticeCone):
        return s.project_polar(x)
    return PolarCone(s).project(x)


def lift_halfspace(a, b):
    """Rewrite ``{x >= 0 : <a, x> <= b}`` with a slack variable.

    Returns the pair ``(A_hat, S_hat)`` in dimension N + 1, where
    ``A_hat = {(x, y) : <a, x> + y = b}`` and ``S_hat`` is the orthant.
    """
    a = as_point(a)
    if not np.any(a):
        raise ValueError("halfspace normal must be nonzero")
    row = np.append(a, 1.0)
    return AffineSubspace(row[None, :], [float(b)]), LatticeCone(a.size + 1)

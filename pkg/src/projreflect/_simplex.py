"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves ``min c^T x  s.t.  A x = b, x >= 0``. Small, deterministic, and
meant for the desk-scale LPs of the condition checkers.
"""

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-10


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible", "unbounded", "iteration_limit"
    x: np.ndarray = None
    fun: float = None
    basis: list = None
    farkas: np.ndarray = None  # y with A^T y <= 0, b^T y > 0 when infeasible
    iterations: int = 0


def _pivot(T, r, j):
    T[r] /= T[r, j]
    for i in range(T.shape[0]):
        if i != r and T[i, j] != 0.0:
            T[i] -= T[i, j] * T[r]


def _iterate(T, basis, ncols, max_iter, tol):
    """Bland-rule simplex on tableau `T` whose last row is the reduced-cost
    row (negated objective in the corner). Columns >= `ncols` never enter."""
    m = T.shape[0] - 1
    for it in range(max_iter):
        cost = T[-1, :ncols]
        entering = np.flatnonzero(cost < -tol)
        if entering.size == 0:
            return "optimal", it
        j = int(entering[0])
        col = T[:m, j]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return "unbounded", it
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, abs(best))]
        # Bland: among tied rows leave the smallest basic index
        r = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, r, j)
        basis[r] = j
    return "iteration_limit", max_iter


def linprog(c, A_eq, b_eq, max_iter=5000, tol=PIVOT_TOL):
    """Minimise ``c @ x`` over ``A_eq @ x = b_eq, x >= 0``.

    Returns an :class:`LPResult`. For infeasible problems `farkas` holds a
    vector y (in the original row signs) with ``A_eq.T @ y <= 0`` and
    ``b_eq @ y > 0``.
    """
    A = np.array(A_eq, dtype=np.float64, ndmin=2)
    b = np.array(b_eq, dtype=np.float64).ravel()
    c = np.asarray(c, dtype=np.float64).ravel()
    m, n = A.shape
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign

    # phase 1: artificial basis
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    status, it1 = _iterate(T, basis, n + m, max_iter, tol)
    if status != "optimal":
        return LPResult("iteration_limit", iterations=it1)
    # reduced cost of artificial i is 1 - y_i
    y = 1.0 - T[-1, n:n + m]
    if -T[-1, -1] > tol * max(1.0, np.abs(b).sum()):
        return LPResult("infeasible", farkas=y * sign, iterations=it1)

    # drive artificials out of the basis, dropping redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            cand = np.flatnonzero(np.abs(T[r, :n]) > tol)
            if cand.size:
                _pivot(T, r, int(cand[0]))
                basis[r] = int(cand[0])
                keep.append(r)
        else:
            keep.append(r)
    T2 = np.vstack([T[keep][:, list(range(n)) + [-1]], np.zeros((1, n + 1))])
    basis = [basis[r] for r in keep]
    T2[-1, :n] = c
    for r, j in enumerate(basis):
        T2[-1] -= c[j] * T2[r]
    status, it2 = _iterate(T2, basis, n, max_iter, tol)
    if status != "optimal":
        return LPResult(status, basis=basis, iterations=it1 + it2)
    x = np.zeros(n)
    for r, j in enumerate(basis):
        x[j] = T2[r, -1]
    return LPResult("optimal", x=x, fun=float(c @ x), basis=basis, iterations=it1 + it2)

"""Projection/reflection iterations for a cone S and an affine subspace A.

Every method is run in the split form

    x_n = x_{n-1} - kappa_n + Q lambda_n,    kappa_n in K = polar(S),

where Q is the projector onto the row space of A. The trace records the
split pieces and their running sums so that ``x_n - x_0 = -sigma_n + Q alpha_n``
can be checked at every step.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import as_point
from .sets import AffineSubspace, LatticeCone, project_polar

__all__ = [
    "AlgorithmParams",
    "DR",
    "MAP",
    "StepRecord",
    "IterationTrace",
    "RecessionReport",
    "step_map",
    "step_dr",
    "step_relaxed",
    "relaxed_expansion",
    "split_step",
    "run",
    "fitted_rate",
    "recession_diagnostic",
    "affine_witness",
    "dr_affine_membership_residual",
    "write_trace_csv",
    "write_trace_jsonl",
    "TRACE_COLUMNS",
    "STOP_REASONS",
]

TRACE_COLUMNS = ("n", "norm_x", "dist_S", "dist_A", "norm_Qalpha", "fejer_dist")
STOP_REASONS = ("converged", "finite_termination", "max_iters", "diverged")

# one-sided slack for "x_n in S" tests
MEMBERSHIP_TOL = 1e-10
# a step this small relative to |x| + |xbar| is rounding noise: the iterate is at rest
_REST = 64 * np.finfo(np.float64).eps
# a jump to rest from a step larger than this multiple of the rest level
# cannot come from a geometric tail
_JUMP = 1e6


@dataclass(frozen=True)
class AlgorithmParams:
    """Relaxation triple for ``c I + (1-c) R_A^b R_S^a``.

    ``(0, 0, 1/2)`` is Douglas-Rachford and ``(1/2, 1/2, 0)`` is von Neumann.
    """

    a: float = 0.0
    b: float = 0.0
    c: float = 0.5

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not (0.0 <= v < 1.0):
                raise ValueError(f"parameter {name}={v} must lie in [0, 1)")

    @property
    def tau(self):
        return 2.0 * (1.0 - self.b) * (1.0 - self.c)

    @property
    def kappa_scale(self):
        return 2.0 * (1.0 - self.a) * (1.0 - self.c)

    @classmethod
    def on_relaxation_curve(cls, c):
        """Parameters with ``1 - a = 1 - b = 1 / (2 (1 - c))``; needs c in [0, 1/2]."""
        if not (0.0 <= c <= 0.5):
            raise ValueError(f"c={c} is off the feasible segment [0, 1/2]")
        a = 1.0 - 1.0 / (2.0 * (1.0 - c))
        return cls(a, a, c)


DR = AlgorithmParams(0.0, 0.0, 0.5)
MAP = AlgorithmParams(0.5, 0.5, 0.0)


def _polar(S, x):
    return project_polar(S, x)


def step_map(S, A, x):
    """One von Neumann step ``P_A P_S x``."""
    return A.project(S.project(x))


def step_dr(S, A, x):
    """One Douglas-Rachford step ``(x + R_A R_S x) / 2``."""
    x = as_point(x, S.dim)
    return 0.5 * (x + A.reflect(S.reflect(x)))


def step_relaxed(params, S, A, x):
    """One step of ``c I + (1-c) R_A^b R_S^a`` in operator form."""
    a, b, c = params.a, params.b, params.c
    x = as_point(x, S.dim)
    y = a * x + (1.0 - a) * S.reflect(x)
    z = b * y + (1.0 - b) * A.reflect(y)
    return c * x + (1.0 - c) * z


def relaxed_expansion(params, S, A, x, xbar=None):
    """The same step in expanded form
    ``x - 2(1-a)(1-c) P_{S^-} x + 2(1-b)(1-c) Q (xbar - R_S^a x)``.
    """
    a = params.a
    x = as_point(x, S.dim)
    if xbar is None:
        xbar = A.xbar
    ra = a * x + (1.0 - a) * S.reflect(x)
    return x - params.kappa_scale * _polar(S, x) + params.tau * A.apply_Q(xbar - ra)


def split_step(params, S, A, x, xbar=None):
    """Return ``(kappa, Q lambda)`` for the step taken from `x`.

    Parameters are the relaxation triple; the DR and MAP presets give the
    classical splittings (for MAP, ``lambda = xbar - P_S x``).
    """
    if xbar is None:
        xbar = A.xbar
    a = params.a
    kappa = params.kappa_scale * _polar(S, x)
    ra = a * x + (1.0 - a) * S.reflect(x)
    q_lambda = params.tau * A.apply_Q(xbar - ra)
    return kappa, q_lambda


def _resolve(method, params):
    if isinstance(method, AlgorithmParams):
        return "relaxed", method
    name = str(method).lower()
    if name == "map":
        return "map", MAP
    if name == "dr":
        return "dr", DR
    if name == "relaxed":
        if params is None:
            raise ValueError("method 'relaxed' needs params")
        return "relaxed", params
    raise ValueError(f"unknown method {method!r}")


@dataclass
class StepRecord:
    n: int
    norm_x: float
    dist_S: float
    dist_A: float
    norm_Qalpha: float
    fejer_dist: float = math.nan
    x: np.ndarray = None
    kappa: np.ndarray = None
    lambda_img: np.ndarray = None
    sigma: np.ndarray = None
    alpha_img: np.ndarray = None


@dataclass
class IterationTrace:
    method: str
    params: AlgorithmParams
    S: object
    A: AffineSubspace
    records: list = field(default_factory=list)
    stop_reason: str = "max_iters"
    final: np.ndarray = None
    diverged_at: int = None

    @property
    def iterations(self):
        return self.records[-1].n

    @property
    def x0(self):
        return self.records[0].x

    def xs(self):
        return np.array([r.x for r in self.records])

    def shadow(self):
        """``P_S`` of the final iterate; for DR this is the solution estimate."""
        return self.S.project(self.final)

    def fejer_dists(self):
        return np.array([r.fejer_dist for r in self.records])

    def step_sizes(self):
        xs = self.xs()
        return np.linalg.norm(np.diff(xs, axis=0), axis=1)


def _record(n, x, S, A, ref, store, kappa, q_lambda, sigma, q_alpha):
    rec = StepRecord(
        n=n,
        norm_x=float(np.linalg.norm(x)),
        dist_S=S.distance(x),
        dist_A=float(np.linalg.norm(x - A.project(x))),
        norm_Qalpha=float(np.linalg.norm(q_alpha)),
        fejer_dist=float(np.linalg.norm(x - ref)) if ref is not None else math.nan,
    )
    if store:
        rec.x = x
        rec.kappa = kappa
        rec.lambda_img = q_lambda
        rec.sigma = sigma.copy()
        rec.alpha_img = q_alpha.copy()
    return rec


# overflow is reported through stop_reason, not as a warning
@np.errstate(over="ignore", invalid="ignore")
def run(method, S, A, x0, *, params=None, max_iters=10_000, tol=1e-12,
        reference_point=None, store_vectors=True):
    """Iterate from `x0` until the step size drops to `tol`, the iteration
    comes to rest at a feasible point (finite termination), or `max_iters`.

    `method` is ``"map"``, ``"dr"``, ``"relaxed"`` (with `params`) or an
    :class:`AlgorithmParams`. Finite termination means the sequence jumped
    from a step above ``tol`` to a rounding-level step, stayed there for a
    confirming step, and ``P_S x`` lies in A to within ``max(tol, 1e-9)``.

    Returns an :class:`IterationTrace`.
    """
    name, prm = _resolve(method, params)
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    x = as_point(x0, S.dim)
    if A.dim != S.dim:
        raise ValueError("S and A have different dimensions")
    ref = None if reference_point is None else as_point(reference_point, S.dim)

    if name == "map":
        def step(v):
            return step_map(S, A, v)
    elif name == "dr":
        def step(v):
            return step_dr(S, A, v)
    else:
        def step(v):
            return step_relaxed(prm, S, A, v)

    zero = np.zeros_like(x)
    sigma = zero.copy()
    q_alpha = zero.copy()
    trace = IterationTrace(name, prm, S, A)
    trace.records.append(_record(0, x, S, A, ref, store_vectors, zero, zero, sigma, q_alpha))
    feas_tol = max(tol, 1e-9)
    xbar_norm = float(np.linalg.norm(A.xbar))
    prev_step = math.inf
    pending_rest = False

    for n in range(1, max_iters + 1):
        kappa, q_lambda = split_step(prm, S, A, x)
        x_new = step(x)
        if not np.all(np.isfinite(x_new)):
            trace.stop_reason = "diverged"
            trace.diverged_at = n
            break
        sigma += kappa
        q_alpha += q_lambda
        trace.records.append(
            _record(n, x_new, S, A, ref, store_vectors, kappa, q_lambda, sigma, q_alpha)
        )
        step_len = float(np.linalg.norm(x_new - x))
        rest = _REST * (float(np.linalg.norm(x)) + xbar_norm)
        x = x_new

        if pending_rest:
            pending_rest = False
            if step_len <= rest:
                trace.stop_reason = "finite_termination"
                break
        if step_len <= rest:
            shadow = S.project(x)
            if (n > 1 and prev_step > _JUMP * rest and prev_step > tol
                    and float(np.linalg.norm(shadow - A.project(shadow))) <= feas_tol):
                pending_rest = True
                prev_step = step_len
                continue
            trace.stop_reason = "converged"
            break
        if step_len <= tol:
            trace.stop_reason = "converged"
            break
        prev_step = step_len
    else:
        trace.stop_reason = "max_iters"

    trace.final = x
    return trace


def fitted_rate(values, start=10, stop=100):
    """Geometric rate of a decaying positive sequence by least squares on
    ``log(values)`` over the index window ``[start, stop]``.

    Falls back to all positive entries when the window has fewer than two;
    returns 0.0 if the sequence vanishes after at most one positive term.
    """
    v = np.asarray(values, dtype=np.float64)
    idx = np.arange(v.size)
    ok = np.isfinite(v) & (v > 0)
    win = ok & (idx >= start) & (idx <= stop)
    if win.sum() < 2:
        win = ok
    if win.sum() < 2:
        return 0.0
    slope = np.polyfit(idx[win], np.log(v[win]), 1)[0]
    return float(np.exp(slope))


@dataclass
class RecessionReport:
    directions: list
    in_cone: bool
    sizes: list
    max_norm: float
    growing: bool = False

    @property
    def failure_signature(self):
        """Unbounded ``Q alpha_n`` along polar-cone directions."""
        return self.in_cone and self.growing


def recession_diagnostic(trace, tol=1e-9, angle=1e-3):
    """Cluster the directions ``Q alpha_n / |Q alpha_n|`` of a trace.

    Greedy leader clustering with an angular threshold; each cluster is
    represented by its normalised mean. ``in_cone`` reports whether every
    representative lies in the polar cone of S (within `tol`). When no
    ``Q alpha_n`` exceeds `tol`, the result has no directions and
    ``in_cone`` is False.

    ``growing`` flags a trace whose final ``|Q alpha_n|`` is at least twice
    the largest value over the first half of the trace. Bounded histories
    (every convergent run) have directions too, so only the combination
    ``in_cone and growing`` points at a norm-convergence failure.
    """
    if not trace.records:
        raise ValueError("empty trace")
    leaders, sums, sizes = [], [], []
    cos_min = math.cos(angle)
    max_norm = 0.0
    norms = []
    for rec in trace.records:
        v = rec.alpha_img
        if v is None:
            raise ValueError("trace was recorded without vectors")
        nv = float(np.linalg.norm(v))
        norms.append(nv)
        max_norm = max(max_norm, nv)
        if nv <= tol:
            continue
        q = v / nv
        for i, lead in enumerate(leaders):
            if float(lead @ q) >= cos_min:
                sums[i] += q
                sizes[i] += 1
                break
        else:
            leaders.append(q)
            sums.append(q.copy())
            sizes.append(1)
    directions = [s / np.linalg.norm(s) for s in sums]
    head = max(norms[: (len(norms) + 1) // 2])
    growing = len(norms) >= 4 and norms[-1] > tol and norms[-1] >= 2.0 * head
    if not directions:
        return RecessionReport([], False, [], max_norm, False)
    S = trace.S
    in_cone = all(np.linalg.norm(S.project(d)) <= tol for d in directions)
    if isinstance(S, LatticeCone):
        in_cone = all(bool(np.all(d <= tol)) for d in directions)
    return RecessionReport(directions, in_cone, sizes, max_norm, growing)


def affine_witness(S, A, x_prev, x_next, params=DR):
    """The point built from two consecutive iterates that must lie in A.

    For the relaxed step it is
    ``(x_next + (tau - 1) x_prev - 2 (1-a)(1-c)(1-2b) P_{S^-} x_prev) / tau``,
    which is ``x_next - P_{S^-} x_prev`` for Douglas-Rachford.
    """
    x_prev = as_point(x_prev, S.dim)
    x_next = as_point(x_next, S.dim)
    tau = params.tau
    gamma = params.kappa_scale * (1.0 - 2.0 * params.b)
    return (x_next + (tau - 1.0) * x_prev - gamma * _polar(S, x_prev)) / tau


def dr_affine_membership_residual(S, A, x_prev, x_next, params=DR):
    """``|T p - rhs|`` for the witness point p of :func:`affine_witness`."""
    return A.residual(affine_witness(S, A, x_prev, x_next, params))


def write_trace_csv(trace, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for r in trace.records:
            w.writerow([r.n, repr(r.norm_x), repr(r.dist_S), repr(r.dist_A),
                        repr(r.norm_Qalpha), repr(r.fejer_dist)])


def write_trace_jsonl(trace, path):
    with open(path, "w") as fh:
        for r in trace.records:
            row = {"n": r.n}
            for key in ("x", "kappa", "lambda_img", "sigma", "alpha_img"):
                v = getattr(r, key)
                row[key] = None if v is None else v.tolist()
            fh.write(json.dumps(row) + "\n")

"""Closed forms, recurrences and exact constructions for the rate examples.

These are independent of the iteration engine in :mod:`projreflect.iterate`
and serve as ground truth for it:

* the hyperplane example: alternating projections with closed form
  ``x_n = alpha0 (1 - a_m^2)^n (e_m - a_m a)``;
* the Douglas-Rachford recurrence for the same instance, its rational
  generating function and its damped-cosine solution;
* the simplicial-cone / span coincidence ball;
* two-line Douglas-Rachford rates and an exact (rational) run of the
  ray/line instance.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .iterate import fitted_rate, run, step_dr
from .lattice import as_point
from .sets import AffineSubspace, LatticeCone, SimplicialCone, Span

__all__ = [
    "Ex41Config",
    "hyperplane_normal",
    "ex41_instance",
    "ex41_closed_form",
    "Ex42State",
    "Ex42Result",
    "ex42_instance",
    "ex42_recurrence",
    "ex42_two_term",
    "rational_series",
    "ex42_generating_function",
    "ex42_gf_derivative_at_one",
    "ex42_weighted_sum",
    "OscillationFit",
    "ex42_oscillation_fit",
    "ex43_coincidence_radius",
    "certified_coincidence_radius",
    "sample_ball",
    "ex43_projection_discrepancy",
    "ex43_dr_discrepancy",
    "Ex44Result",
    "two_lines_instance",
    "ex44_two_lines",
    "ex44b_instance",
    "dr_exact_ray_line",
]


# -- alternating projections onto a hyperplane ------------------------------

def hyperplane_normal(dim, a_m, m=0):
    """Unit vector with entry `a_m` at index `m` and the remaining mass spread
    evenly over the other coordinates (all entries in ]0, 1[)."""
    if dim < 2:
        raise ValueError("need dim >= 2")
    if not 0.0 < a_m < 1.0:
        raise ValueError("a_m must lie in ]0, 1[")
    a = np.full(dim, math.sqrt((1.0 - a_m**2) / (dim - 1)))
    a[m] = a_m
    return a


@dataclass(frozen=True)
class Ex41Config:
    """Hyperplane ``<a, x> = 0`` with a strictly positive unit normal.

    `m` is a 0-based coordinate index.
    """

    a: tuple
    m: int = 0
    alpha0: float = 1.0

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        object.__setattr__(self, "a", tuple(float(v) for v in a))
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise ValueError("a must have unit norm")
        if not np.all((a > 0) & (a < 1)):
            raise ValueError("entries of a must lie in ]0, 1[")
        if not 0 <= self.m < a.size:
            raise ValueError("m out of range")
        if not self.alpha0 > 0:
            raise ValueError("alpha0 must be positive")

    @property
    def N(self):
        return len(self.a)

    @property
    def a_m(self):
        return self.a[self.m]

    @property
    def rate(self):
        return 1.0 - self.a_m**2


def ex41_instance(cfg):
    """``(S, A, x0)`` for the hyperplane example."""
    a = np.array(cfg.a)
    return LatticeCone(cfg.N), AffineSubspace(a[None, :], [0.0]), ex41_closed_form(cfg, 0)


def ex41_closed_form(cfg, n):
    a = np.array(cfg.a)
    e = np.zeros(cfg.N)
    e[cfg.m] = 1.0
    return cfg.alpha0 * cfg.rate**n * (e - cfg.a_m * a)


# -- Douglas-Rachford on the same hyperplane --------------------------------

@dataclass(frozen=True)
class Ex42State:
    n: int
    alpha: float
    beta: float


@dataclass
class Ex42Result:
    states: list
    n0: int  # first n with alpha_n <= 0, or None

    @property
    def alphas(self):
        return np.array([s.alpha for s in self.states])

    @property
    def betas(self):
        return np.array([s.beta for s in self.states])


def ex42_instance(a_m, alpha0=1.0, dim=2, m=0):
    """``(S, A, x0, a)`` with ``x0 = alpha0 (e_m - a_m a)``."""
    a = hyperplane_normal(dim, a_m, m)
    e = np.zeros(dim)
    e[m] = 1.0
    return LatticeCone(dim), AffineSubspace(a[None, :], [0.0]), alpha0 * (e - a_m * a), a


def _check_am(a_m):
    if not (0.0 < a_m and a_m**2 < 0.5):
        raise ValueError("need 0 < a_m with a_m^2 < 1/2")


def ex42_recurrence(a_m, alpha0, n_max, stop=True):
    """Iterate ``alpha' = alpha - a_m beta``, ``beta' = a_m alpha + (1 - 2 a_m^2) beta``
    from ``beta_0 = alpha0 a_m``.

    With ``stop=True`` the states end at the first nonpositive alpha (or at
    `n_max`); otherwise all `n_max` + 1 states are returned. `n0` is the
    first index with ``alpha_n <= 0`` among the returned states.
    """
    _check_am(a_m)
    if not alpha0 > 0:
        raise ValueError("alpha0 must be positive")
    alpha, beta = float(alpha0), float(alpha0) * a_m
    states = [Ex42State(0, alpha, beta)]
    n0 = None
    for n in range(1, n_max + 1):
        alpha, beta = alpha - a_m * beta, a_m * alpha + (1.0 - 2.0 * a_m**2) * beta
        states.append(Ex42State(n, alpha, beta))
        if alpha <= 0 and n0 is None:
            n0 = n
            if stop:
                break
    return Ex42Result(states, n0)


def ex42_two_term(a_m, alpha0, n_max):
    """alpha_n from ``alpha_{n+2} = 2x alpha_{n+1} - x alpha_n``, ``x = 1 - a_m^2``."""
    x = 1.0 - a_m**2
    out = [float(alpha0), x * alpha0]
    while len(out) < n_max + 1:
        out.append(2.0 * x * out[-1] - x * out[-2])
    return np.array(out[: n_max + 1])


def rational_series(num, den, terms):
    """First `terms` Taylor coefficients of ``num(z) / den(z)``.

    Polynomials are coefficient lists in increasing degree; ``den[0]`` must
    be nonzero.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    if den[0] == 0:
        raise ValueError("den(0) must be nonzero")
    out = []
    for k in range(terms):
        acc = num[k] if k < len(num) else 0.0
        for j in range(1, min(k, len(den) - 1) + 1):
            acc -= den[j] * out[k - j]
        out.append(acc / den[0])
    return np.array(out, dtype=np.float64)


def ex42_generating_function(a_m, alpha0, terms):
    """Coefficients of ``alpha0 (1 - x z) / (1 - 2 x z + x z^2)``."""
    x = 1.0 - a_m**2
    return rational_series([alpha0, -alpha0 * x], [1.0, -2.0 * x, x], terms)


def ex42_gf_derivative_at_one(a_m, alpha0):
    """``g'(1) = -alpha0 x (1 - x) / (1 - x)^2`` as written, unsimplified."""
    x = 1.0 - a_m**2
    return -alpha0 * x * (1.0 - x) / (1.0 - x) ** 2


def ex42_weighted_sum(a_m, alpha0, tail_tol=1e-12, n_cap=1_000_000):
    """Truncated ``sum_n n alpha_n``, stopped once the geometric envelope of
    the remaining tail drops below `tail_tol`."""
    x = 1.0 - a_m**2
    r = math.sqrt(x)
    fit = ex42_oscillation_fit(a_m, alpha0)
    prev, cur = float(alpha0), x * alpha0
    total = cur
    n = 1
    while n < n_cap:
        # bound on sum_{k > n} k C r^k
        tail = fit.C * r ** (n + 1) * ((n + 1) / (1 - r) + r / (1 - r) ** 2)
        if tail < tail_tol:
            break
        prev, cur = cur, 2.0 * x * cur - x * prev
        n += 1
        total += n * cur
    return total


@dataclass(frozen=True)
class OscillationFit:
    C: float
    theta: float
    phi: float
    r: float

    def alpha(self, n):
        n = np.asarray(n, dtype=np.float64)
        return self.C * self.r**n * np.cos(n * self.theta + self.phi)

    def envelope(self, n):
        return abs(self.C) * self.r ** np.asarray(n, dtype=np.float64)


def ex42_oscillation_fit(a_m, alpha0, alpha1=None):
    """Fit ``alpha_n = C r^n cos(n theta + phi)`` with ``r = sqrt(x)`` and
    ``theta = arccos(sqrt(x))`` to the first two terms."""
    if a_m == 0:
        raise ValueError("a_m = 0 is degenerate")
    _check_am(a_m)
    x = 1.0 - a_m**2
    r = math.sqrt(x)
    theta = math.acos(r)
    if alpha1 is None:
        alpha1 = x * alpha0
    c_cos = alpha0
    c_sin = (alpha0 * math.cos(theta) - alpha1 / r) / math.sin(theta)
    return OscillationFit(math.hypot(c_cos, c_sin), theta, math.atan2(c_sin, c_cos), r)


# -- simplicial cone vs its span --------------------------------------------

def ex43_coincidence_radius(S, x_star, tol=1e-9):
    """Smallest nonzero generator coefficient of `x_star` in S.

    This is the ball radius suggested for the coincidence of the cone and
    span projections. It is a valid radius only for orthonormal generators
    and interior points; :func:`certified_coincidence_radius` is valid in
    general.
    """
    if not isinstance(S, SimplicialCone):
        raise TypeError("S must be a SimplicialCone")
    x_star = as_point(x_star, S.dim)
    if not np.any(x_star):
        raise ValueError("x_star must be nonzero")
    lam = S.coefficients(x_star)
    if np.linalg.norm(S.generators.T @ lam - x_star) > tol or np.any(lam < -tol):
        raise ValueError("x_star is not in the cone")
    return float(lam[lam > tol].min())


def certified_coincidence_radius(S, x_star, tol=1e-9):
    """Largest radius r with ``P_S = P_span`` on the open ball B_r(x_star).

    ``min_j lam_j / |grad lam_j|`` over all generator coordinates, which is
    the distance from `x_star` to the nearest facet hyperplane; zero when
    `x_star` lies on the boundary of S.
    """
    if not isinstance(S, SimplicialCone):
        raise TypeError("S must be a SimplicialCone")
    x_star = as_point(x_star, S.dim)
    lam = S.coefficients(x_star)
    if np.linalg.norm(S.generators.T @ lam - x_star) > tol or np.any(lam < -tol):
        raise ValueError("x_star is not in the cone")
    G = S.generators
    grad = np.linalg.solve(G @ G.T, G)
    return float(max(0.0, np.min(lam / np.linalg.norm(grad, axis=1))))


def sample_ball(center, radius, count, rng, shrink=1e-6):
    """Uniform samples from the ball of radius ``(1 - shrink) * radius``."""
    center = as_point(center)
    d = center.size
    v = rng.normal(size=(count, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    rho = (1.0 - shrink) * radius * rng.uniform(size=(count, 1)) ** (1.0 / d)
    return center + rho * v


def ex43_projection_discrepancy(S, x_star, radius, samples=1000, seed=0):
    """Max ``|P_S y - P_span y|`` over uniform samples y in the ball."""
    rng = np.random.default_rng(seed)
    span = S.span()
    worst = 0.0
    for y in sample_ball(x_star, radius, samples, rng):
        worst = max(worst, float(np.linalg.norm(S.project(y) - span.project(y))))
    return worst


def ex43_dr_discrepancy(S, A, x_star, x0, radius, n_steps=100):
    """Run Douglas-Rachford for (S, A) and (span S, A) side by side from `x0`.

    Returns ``(max_discrepancy, steps_compared)``; comparison stops when an
    iterate leaves the ball.
    """
    span = S.span()
    x = y = as_point(x0, S.dim)
    worst = 0.0
    steps = 0
    for _ in range(n_steps):
        if np.linalg.norm(x - x_star) >= radius:
            break
        x, y = step_dr(S, A, x), step_dr(span, A, y)
        worst = max(worst, float(np.linalg.norm(x - y)))
        steps += 1
    return worst, steps


# -- two lines ---------------------------------------------------------------

@dataclass
class Ex44Result:
    trace: object
    fitted_rate: float
    expected_rate: float


def two_lines_instance(theta):
    """Lines through the origin: S = R e_1 and A at angle `theta` to it."""
    if not 0.0 < theta < math.pi / 2:
        raise ValueError("theta must lie strictly inside ]0, pi/2[")
    S = Span([[1.0, 0.0]])
    A = AffineSubspace([[-math.sin(theta), math.cos(theta)]], [0.0])
    return S, A


def ex44_two_lines(theta, x0=(1.0, 0.3), n_iter=200):
    """Douglas-Rachford for two lines at angle `theta`; the rate of
    ``|x_n - 0|`` fitted on iterations 10..100."""
    S, A = two_lines_instance(theta)
    trace = run("dr", S, A, x0, max_iters=n_iter, tol=0.0, reference_point=np.zeros(2))
    rate = fitted_rate([r.norm_x for r in trace.records])
    return Ex44Result(trace, rate, math.cos(theta))


def ex44b_instance():
    """Ray S = {(t, t) : t >= 0} and line A = {(t, 1)}; S & A = {(1, 1)}."""
    S = SimplicialCone.from_directions([[1.0, 1.0]])
    A = AffineSubspace([[0.0, 1.0]], [1.0])
    return S, A, np.array([1.0, 1.0])


def dr_exact_ray_line(direction, normal, rhs, x0, n_steps):
    """Exact rational Douglas-Rachford for a ray ``R_+ d`` and a line
    ``<t, x> = rhs``. Returns the list of iterates as tuples of Fractions."""
    d = [Fraction(v) for v in direction]
    t = [Fraction(v) for v in normal]
    r = Fraction(rhs)
    dd = sum(v * v for v in d)
    tt = sum(v * v for v in t)

    def dot(u, v):
        return sum(p * q for p, q in zip(u, v))

    def proj_ray(x):
        c = max(Fraction(0), dot(x, d) / dd)
        return [c * v for v in d]

    def proj_line(x):
        c = (r - dot(t, x)) / tt
        return [p + c * q for p, q in zip(x, t)]

    x = [Fraction(v) for v in x0]
    out = [tuple(x)]
    for _ in range(n_steps):
        rs = [2 * p - q for p, q in zip(proj_ray(x), x)]
        ra = [2 * p - q for p, q in zip(proj_line(rs), rs)]
        x = [(p + q) / 2 for p, q in zip(x, ra)]
        out.append(tuple(x))
    return out

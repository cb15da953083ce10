"""Checkers for sufficient conditions of norm convergence, for the
lattice cone S = R^N_+ and an affine subspace A with row-space projector Q.

Verdicts are ``"holds"``, ``"fails"`` or ``"undetermined"``. A failing
verdict always carries a certificate that :func:`verify_certificate`
re-checks without the LP.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import _simplex
from .sets import AffineSubspace, LatticeCone

__all__ = [
    "CONDITION_IDS",
    "ConditionReport",
    "TransversalityResult",
    "check_range_cap_cone",
    "check_Q_maps_S",
    "check_QAminusS_signed",
    "check_codim_one",
    "check_transversality_equivalence",
    "check_all",
    "verify_certificate",
]

CONDITION_IDS = (
    "range_cap_trivial",
    "Q_maps_S_into_S",
    "Q_A_minus_S_signed",
    "codim_one",
    "transversality",
)
TOL = 1e-9


@dataclass
class ConditionReport:
    condition: str
    verdict: str
    certificate: list = None
    seed: int = None
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.condition not in CONDITION_IDS:
            raise ValueError(f"unknown condition {self.condition!r}")
        if self.verdict not in ("holds", "fails", "undetermined"):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == "fails" and self.certificate is None:
            raise ValueError("a failing verdict needs a certificate")
        if self.certificate is not None:
            self.certificate = [float(v) for v in np.ravel(self.certificate)]

    def to_dict(self):
        d = {"condition": self.condition, "verdict": self.verdict,
             "certificate": self.certificate, "seed": self.seed}
        if self.detail:
            d["detail"] = self.detail
        return d

    def to_json(self):
        return json.dumps(self.to_dict())


def _check_inputs(A, S):
    if not isinstance(A, AffineSubspace):
        raise TypeError("A must be an AffineSubspace")
    if not isinstance(S, LatticeCone):
        raise TypeError("the checkers are implemented for the lattice cone only")
    if A.dim != S.dim:
        raise ValueError("dimension mismatch")


def _range_cap_lp(A):
    """max sum(x) s.t. x = T^T y, x >= 0, sum(x) <= 1, in standard form
    over (x, y+, y-, slack)."""
    T = A.rows
    m, n = T.shape
    top = np.hstack([np.eye(n), -T.T, T.T, np.zeros((n, 1))])
    bottom = np.hstack([np.ones(n), np.zeros(2 * m), [1.0]])
    A_eq = np.vstack([top, bottom])
    b_eq = np.append(np.zeros(n), 1.0)
    cost = np.concatenate([-np.ones(n), np.zeros(2 * m + 1)])
    return _simplex.linprog(cost, A_eq, b_eq)


def check_range_cap_cone(A, S):
    """Decide ``R(Q) & S = {0}``: no nonzero nonnegative vector in the row space."""
    _check_inputs(A, S)
    n = A.dim
    res = _range_cap_lp(A)
    if res.status != "optimal":
        return ConditionReport("range_cap_trivial", "undetermined",
                               detail={"lp_status": res.status})
    value = -res.fun
    if value < 0.5:
        if value > 1e-7:
            return ConditionReport("range_cap_trivial", "undetermined",
                                   detail={"lp_value": value})
        return ConditionReport("range_cap_trivial", "holds",
                               detail={"lp_value": value, "basis": res.basis})
    ray = np.maximum(res.x[:n], 0.0)
    ray = ray / ray.sum()
    return ConditionReport("range_cap_trivial", "fails", certificate=ray,
                           detail={"lp_value": value})


def check_Q_maps_S(A, S, tol=TOL):
    """``Q(S) <= S``, decided on the generators: every column ``Q e_j >= -tol``."""
    _check_inputs(A, S)
    Q = A.Q
    for j in range(A.dim):
        if np.any(Q[:, j] < -tol):
            e = np.zeros(A.dim)
            e[j] = 1.0
            return ConditionReport("Q_maps_S_into_S", "fails", certificate=e,
                                   detail={"image": Q[:, j].tolist()})
    return ConditionReport("Q_maps_S_into_S", "holds",
                           detail={"min_entry": float(Q.min())})


def _mixed_sign(v, tol):
    return bool(np.any(v > tol) and np.any(v < -tol))


def check_QAminusS_signed(A, S, samples=10_000, seed=0, tol=TOL):
    """``Q(A - S) <= S | (-S)``.

    Exact in codimension one (the row space is a line, so the condition
    is a sign test on the normal). In higher codimension it is a random
    falsifier over ``xbar - s`` with exponential ``s``: either a certificate
    ``s`` whose image has mixed signs, or ``undetermined``.
    """
    _check_inputs(A, S)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if A.codim == 1:
        t = A.rows[0]
        if _mixed_sign(t, tol):
            # s = c e_j at a positive entry of t, with <t, s> != rhs, maps to a
            # nonzero multiple of t
            j = int(np.argmax(t))
            s = np.zeros(A.dim)
            s[j] = 1.0 + 2.0 * abs(A.rhs[0]) / t[j]
            return ConditionReport("Q_A_minus_S_signed", "fails", certificate=s,
                                   detail={"sign_pattern": np.sign(t).tolist()})
        return ConditionReport("Q_A_minus_S_signed", "holds",
                               detail={"sign_pattern": np.sign(t).tolist()})
    rng = np.random.default_rng(seed)
    scale = 1.0 + float(np.abs(A.xbar).max())
    for _ in range(samples):
        s = rng.exponential(scale, size=A.dim)
        if _mixed_sign(A.apply_Q(A.xbar - s), tol):
            return ConditionReport("Q_A_minus_S_signed", "fails", certificate=s, seed=seed)
    return ConditionReport("Q_A_minus_S_signed", "undetermined", seed=seed,
                           detail={"samples": samples})


def check_codim_one(A):
    verdict = "holds" if A.codim == 1 else "fails"
    cert = None if verdict == "holds" else [float(A.codim)]
    return ConditionReport("codim_one", verdict, certificate=cert,
                           detail={"codim": A.codim})


@dataclass
class TransversalityResult:
    lhs: bool  # N(Q) + S = R^N, or None if undetermined
    rhs: bool  # R(Q) & S = {0}, or None if undetermined
    lhs_certificate: list = None
    rhs_report: ConditionReport = None

    def to_report(self):
        if self.lhs is None or self.rhs is None:
            verdict = "undetermined"
        else:
            verdict = "holds" if self.lhs else "fails"
        cert = self.lhs_certificate if verdict == "fails" else None
        if verdict == "fails" and cert is None:
            verdict = "undetermined"
        return ConditionReport("transversality", verdict, certificate=cert,
                               detail={"lhs": self.lhs, "rhs": self.rhs})


def _lhs(A):
    """Every ``+-e_j`` splits as (null-space vector) + (nonnegative vector),
    i.e. ``T s = T v`` has a solution ``s >= 0``."""
    T = A.rows
    n = A.dim
    for j in range(n):
        for sgn in (1.0, -1.0):
            v = np.zeros(n)
            v[j] = sgn
            res = _simplex.linprog(np.zeros(n), T, T @ v)
            if res.status == "infeasible":
                # w = T^T y satisfies w <= 0 and <w, v> > 0
                w = T.T @ res.farkas
                return False, (-w / np.abs(w).sum()).tolist()
            if res.status != "optimal":
                return None, None
    return True, None


def check_transversality_equivalence(A, S):
    """Evaluate both sides of ``N(Q) + S = H  <=>  R(Q) & S = {0}`` independently."""
    _check_inputs(A, S)
    lhs, cert = _lhs(A)
    rep = check_range_cap_cone(A, S)
    rhs = {"holds": True, "fails": False}.get(rep.verdict)
    return TransversalityResult(lhs, rhs, cert, rep)


def check_all(A, S, samples=10_000, seed=0):
    """Reports for every hypothesis, in the order of :data:`CONDITION_IDS`."""
    return [
        check_range_cap_cone(A, S),
        check_Q_maps_S(A, S),
        check_QAminusS_signed(A, S, samples=samples, seed=seed),
        check_codim_one(A),
        check_transversality_equivalence(A, S).to_report(),
    ]


def verify_certificate(report, A, tol=TOL):
    """Re-check a failing report's certificate directly (no LP)."""
    if report.verdict != "fails":
        raise ValueError("only failing reports carry certificates to verify")
    cert = np.asarray(report.certificate, dtype=np.float64)
    cid = report.condition
    if cid == "range_cap_trivial":
        return bool(np.all(cert >= -tol) and cert.sum() > 0.5
                    and np.linalg.norm(A.apply_Q(cert) - cert) <= tol)
    if cid == "Q_maps_S_into_S":
        return bool(np.all(cert >= 0) and np.any(A.apply_Q(cert) < -tol))
    if cid == "Q_A_minus_S_signed":
        return bool(np.all(cert >= 0) and _mixed_sign(A.apply_Q(A.xbar - cert), tol))
    if cid == "codim_one":
        return A.codim != 1 and cert[0] == A.codim
    if cid == "transversality":
        # a nonzero nonnegative vector in R(Q) blocks N(Q) + S = H
        return bool(np.all(cert >= -tol) and cert.sum() > 0.5
                    and np.linalg.norm(A.apply_Q(cert) - cert) <= tol)
    raise ValueError(f"unknown condition {cid!r}")

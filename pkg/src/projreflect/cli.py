"""Command-line front end.

    projreflect run PROBLEM.json [--out DIR] [--max-iters K] [--tol T] [--full-trace]
    projreflect check PROBLEM.json [--seed S]
    projreflect reproduce {ex41,ex42,ex43,ex44,fig1} [--out DIR] [...]
    projreflect sweep [--c-grid 0,0.25,0.5] [--out DIR]

Problem files are JSON::

    {"dim": 2,
     "cone": {"type": "lattice"},                     # or "simplicial" + "generators"
     "affine": {"rows": [[1, 1]], "rhs": [2]},
     "x0": [-0.7, 3.6],
     "method": {"name": "dr"},                        # "map", "dr", "relaxed" + a, b, c
     "opts": {"max_iters": 10000, "tol": 1e-12, "seed": 0},
     "reference_point": [1, 1]}                       # optional

Exit codes: 0 converged / finite termination / check evaluated / reproduction
within tolerance, 1 bad input or failed reproduction, 2 max_iters, 3 diverged.
"""

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import conditions, oracles
from .iterate import (
    DR,
    MAP,
    AlgorithmParams,
    fitted_rate,
    run,
    write_trace_csv,
    write_trace_jsonl,
)
from .sets import AffineSubspace, LatticeCone, SimplicialCone

EXIT_CODES = {"converged": 0, "finite_termination": 0, "max_iters": 2, "diverged": 3}
DEFAULT_OPTS = {"max_iters": 10_000, "tol": 1e-12, "seed": 0}
ORACLE_COLUMNS = ("n", "alpha", "beta", "closed_form", "gf_coeff", "engine", "discrepancy")


class ProblemError(ValueError):
    """Invalid problem file; the message names the offending field."""


@dataclass(eq=False)
class Problem:
    S: object
    A: AffineSubspace
    x0: np.ndarray
    method: str = "dr"
    params: AlgorithmParams = None
    max_iters: int = DEFAULT_OPTS["max_iters"]
    tol: float = DEFAULT_OPTS["tol"]
    seed: int = DEFAULT_OPTS["seed"]
    reference_point: np.ndarray = None

    def to_dict(self):
        if isinstance(self.S, LatticeCone):
            cone = {"type": "lattice"}
        else:
            cone = {"type": "simplicial", "generators": self.S.generators.tolist()}
        method = {"name": self.method}
        if self.method == "relaxed":
            method.update(a=self.params.a, b=self.params.b, c=self.params.c)
        d = {
            "dim": self.S.dim,
            "cone": cone,
            "affine": {"rows": self.A.rows.tolist(), "rhs": self.A.rhs.tolist()},
            "x0": self.x0.tolist(),
            "method": method,
            "opts": {"max_iters": self.max_iters, "tol": self.tol, "seed": self.seed},
        }
        if self.reference_point is not None:
            d["reference_point"] = self.reference_point.tolist()
        return d

    def __eq__(self, other):
        return isinstance(other, Problem) and self.to_dict() == other.to_dict()

    def run(self, **overrides):
        kw = dict(params=self.params, max_iters=self.max_iters, tol=self.tol,
                  reference_point=self.reference_point)
        kw.update(overrides)
        return run(self.method, self.S, self.A, self.x0, **kw)


def _field(d, key, where):
    if not isinstance(d, dict) or key not in d:
        raise ProblemError(f"missing field '{where}{key}'")
    return d[key]


def _vector(v, where, dim=None):
    try:
        arr = np.asarray(v, dtype=np.float64)
    except (TypeError, ValueError):
        raise ProblemError(f"field '{where}' must be a numeric vector") from None
    if arr.ndim != 1 or (dim is not None and arr.size != dim):
        raise ProblemError(f"field '{where}' must be a vector of length {dim}")
    if not np.all(np.isfinite(arr)):
        raise ProblemError(f"field '{where}' has non-finite entries")
    return arr


def parse_problem(data):
    """Build a :class:`Problem` from a decoded JSON object."""
    if not isinstance(data, dict):
        raise ProblemError("problem must be a JSON object")
    dim = _field(data, "dim", "")
    if not isinstance(dim, int) or dim < 1:
        raise ProblemError("field 'dim' must be a positive integer")
    cone = _field(data, "cone", "")
    kind = _field(cone, "type", "cone.")
    try:
        if kind == "lattice":
            S = LatticeCone(dim)
        elif kind == "simplicial":
            S = SimplicialCone(_field(cone, "generators", "cone."))
        else:
            raise ProblemError(f"field 'cone.type' must be 'lattice' or 'simplicial', got {kind!r}")
        if S.dim != dim:
            raise ProblemError("field 'cone.generators' does not match 'dim'")
        aff = _field(data, "affine", "")
        A = AffineSubspace(_field(aff, "rows", "affine."), _field(aff, "rhs", "affine."))
    except ProblemError:
        raise
    except (ValueError, TypeError) as exc:
        raise ProblemError(f"invalid set: {exc}") from None
    if A.dim != dim:
        raise ProblemError("field 'affine.rows' does not match 'dim'")
    x0 = _vector(_field(data, "x0", ""), "x0", dim)

    method = data.get("method", {"name": "dr"})
    name = _field(method, "name", "method.")
    params = None
    if name == "relaxed":
        try:
            params = AlgorithmParams(float(_field(method, "a", "method.")),
                                     float(_field(method, "b", "method.")),
                                     float(_field(method, "c", "method.")))
        except (TypeError, ValueError) as exc:
            raise ProblemError(f"invalid method parameters: {exc}") from None
    elif name not in ("map", "dr"):
        raise ProblemError(f"field 'method.name' must be map, dr or relaxed, got {name!r}")

    opts = dict(DEFAULT_OPTS)
    opts.update(data.get("opts", {}))
    try:
        max_iters, tol, seed = int(opts["max_iters"]), float(opts["tol"]), int(opts["seed"])
    except (TypeError, ValueError):
        raise ProblemError("field 'opts' has a non-numeric entry") from None
    if max_iters < 1:
        raise ProblemError("field 'opts.max_iters' must be >= 1")
    ref = data.get("reference_point")
    if ref is not None:
        ref = _vector(ref, "reference_point", dim)
    return Problem(S, A, x0, name, params, max_iters, tol, seed, ref)


def load_problem(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise ProblemError(f"{path}: {exc.strerror}") from None
    return parse_problem(data)


def write_problem(problem, path):
    with open(path, "w") as fh:
        json.dump(problem.to_dict(), fh, indent=2)


def _out_path(out, name):
    os.makedirs(out, exist_ok=True)
    return os.path.join(out, name)


def _finite_or_none(v):
    return v if v is None or math.isfinite(v) else None


@np.errstate(over="ignore", invalid="ignore")
def summarize(trace):
    """Summary dictionary for a finished run; non-finite values become null."""
    final = trace.final
    shadow = trace.shadow()
    if trace.records[-1].fejer_dist == trace.records[-1].fejer_dist:  # not NaN
        series = [r.fejer_dist for r in trace.records]
    else:
        series = trace.step_sizes() if trace.records[0].x is not None else []
    summary = {
        "stop_reason": trace.stop_reason,
        "iterations": trace.iterations,
        "final_dist_S": trace.S.distance(final),
        "final_dist_A": float(np.linalg.norm(final - trace.A.project(final))),
        "shadow_dist_A": float(np.linalg.norm(shadow - trace.A.project(shadow))),
        "fitted_rate": fitted_rate(series) if len(series) > 2 else None,
    }
    return {k: _finite_or_none(v) if isinstance(v, float) else v for k, v in summary.items()}


def cmd_run(path, out=None, max_iters=None, tol=None, full_trace=False):
    problem = load_problem(path)
    overrides = {}
    if max_iters is not None:
        overrides["max_iters"] = max_iters
    if tol is not None:
        overrides["tol"] = tol
    trace = problem.run(**overrides)
    summary = summarize(trace)
    if out:
        write_trace_csv(trace, _out_path(out, "trace.csv"))
        with open(_out_path(out, "summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2)
        if full_trace:
            write_trace_jsonl(trace, _out_path(out, "trace.jsonl"))
    print(json.dumps(summary))
    return EXIT_CODES[trace.stop_reason]


def cmd_check(path, seed=None, samples=10_000):
    problem = load_problem(path)
    if not isinstance(problem.S, LatticeCone):
        raise ProblemError("condition checks need cone.type 'lattice'")
    seed = problem.seed if seed is None else seed
    for rep in conditions.check_all(problem.A, problem.S, samples=samples, seed=seed):
        print(rep.to_json())
    return 0


# -- reproduce ----------------------------------------------------------------

def _write_rows(out, name, rows):
    if not out:
        return
    with open(_out_path(out, name), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(ORACLE_COLUMNS)
        for row in rows:
            w.writerow(["" if row.get(k) is None else row[k] for k in ORACLE_COLUMNS])


def reproduce_ex41(a_m=0.6, alpha0=1.0, dim=2, n=200, out=None):
    cfg = oracles.Ex41Config(tuple(oracles.hyperplane_normal(dim, a_m)), 0, alpha0)
    S, A, x0 = oracles.ex41_instance(cfg)
    trace = run("map", S, A, x0, max_iters=n, tol=0.0, reference_point=np.zeros(dim))
    rows, worst = [], 0.0
    for rec in trace.records:
        cf = oracles.ex41_closed_form(cfg, rec.n)
        disc = float(np.linalg.norm(rec.x - cf))
        worst = max(worst, disc)
        alpha = alpha0 * cfg.rate**rec.n
        rows.append({"n": rec.n, "alpha": alpha, "beta": alpha * a_m,
                     "closed_form": float(np.linalg.norm(cf)), "engine": rec.norm_x,
                     "discrepancy": disc})
    rate = fitted_rate([r.norm_x for r in trace.records])
    _write_rows(out, "ex41.csv", rows)
    ok = worst <= 1e-9 and abs(rate - cfg.rate) <= 1e-3
    return ok, {"max_discrepancy": worst, "fitted_rate": rate, "expected_rate": cfg.rate,
                "iterations": trace.iterations}


def reproduce_ex42(a_m=0.6, alpha0=1.0, dim=2, n=50, out=None):
    S, A, x0, a = oracles.ex42_instance(a_m, alpha0, dim)
    rec = oracles.ex42_recurrence(a_m, alpha0, n, stop=False)
    gf = oracles.ex42_generating_function(a_m, alpha0, n + 1)
    fit = oracles.ex42_oscillation_fit(a_m, alpha0)
    trace = run("dr", S, A, x0, max_iters=10 * n + 100, tol=0.0)
    e = np.zeros(dim)
    e[0] = 1.0
    rows, worst_engine, valid = [], 0.0, True
    for k, st in enumerate(rec.states):
        row = {"n": k, "alpha": st.alpha, "beta": st.beta,
               "closed_form": float(fit.alpha(k)), "gf_coeff": float(gf[k])}
        if valid and k < len(trace.records):
            disc = float(np.linalg.norm(trace.records[k].x - (st.alpha * e - st.beta * a)))
            worst_engine = max(worst_engine, disc)
            row["engine"] = trace.records[k].norm_x
            row["discrepancy"] = disc
        # the closed form holds for the next iterate only while alpha - a_m beta > 0
        valid = valid and st.alpha - st.beta * a_m > 0
        rows.append(row)
    _write_rows(out, "ex42.csv", rows)
    ks = np.arange(n + 1)
    env = fit.envelope(ks)
    gf_err = float(np.max(np.abs(gf - rec.alphas) / env))
    fit_err = float(np.max(np.abs(fit.alpha(ks) - rec.alphas) / env))
    ok = (worst_engine <= 1e-9 and gf_err <= 1e-8 and fit_err <= 1e-8
          and trace.stop_reason == "finite_termination")
    return ok, {"n0": rec.n0, "alpha_n0": rec.states[rec.n0].alpha if rec.n0 else None,
                "max_discrepancy": worst_engine, "gf_rel_err": gf_err, "fit_rel_err": fit_err,
                "stop_reason": trace.stop_reason, "iterations": trace.iterations}


def ex43_default_instance():
    """Skewed two-generator cone in R^3, x* = s1 + s2, and a plane through
    x* that misses the origin."""
    S = SimplicialCone.from_directions([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0]])
    x_star = S.generators.sum(axis=0)
    t = np.array([0.3, -0.2, 1.0])
    A = AffineSubspace(t[None, :], [float(t @ x_star)])
    return S, A, x_star


def reproduce_ex43(samples=1000, seed=0, out=None):
    S, A, x_star = ex43_default_instance()
    eps_min_coef = oracles.ex43_coincidence_radius(S, x_star)
    radius = oracles.certified_coincidence_radius(S, x_star)
    proj = oracles.ex43_projection_discrepancy(S, x_star, radius, samples, seed)
    rng = np.random.default_rng(seed)
    x0 = oracles.sample_ball(x_star, radius, 1, rng)[0]
    dr, steps = oracles.ex43_dr_discrepancy(S, A, x_star, x0, radius, n_steps=200)
    _write_rows(out, "ex43.csv", [{"n": 0, "engine": proj, "discrepancy": dr}])
    ok = proj <= 1e-9 and dr <= 1e-9
    return ok, {"min_coefficient_radius": eps_min_coef, "certified_radius": radius,
                "projection_discrepancy": proj, "dr_discrepancy": dr, "dr_steps": steps}


def reproduce_ex44(theta=math.pi / 4, out=None):
    res = oracles.ex44_two_lines(theta)
    x0n = res.trace.records[0].norm_x
    rows = [{"n": r.n, "closed_form": x0n * math.cos(theta) ** r.n, "engine": r.norm_x,
             "discrepancy": abs(r.norm_x - x0n * math.cos(theta) ** r.n)}
            for r in res.trace.records]
    _write_rows(out, "ex44.csv", rows)
    S, A, x_star = oracles.ex44b_instance()
    exact = oracles.dr_exact_ray_line((1, 1), (0, 1), 1, (2, 0.5), 1000)
    moving = all(p != q for p, q in zip(exact, exact[1:]))
    # shadow on the ray is ((x + y) / 2) (1, 1)
    never_solved = all(p[0] + p[1] != 2 for p in exact)
    ok = abs(res.fitted_rate - res.expected_rate) <= 0.02 and moving and never_solved
    return ok, {"fitted_rate": res.fitted_rate, "expected_rate": res.expected_rate,
                "ray_line_exact_no_termination": moving and never_solved}


def fig1_instance():
    return LatticeCone(2), AffineSubspace([[1.0, 1.0]], [2.0]), np.array([-0.7, 3.6])


def reproduce_fig1(out=None):
    S, A, x0 = fig1_instance()
    dr = run("dr", S, A, x0, max_iters=1000)
    vn = run("map", S, A, x0, max_iters=1000)
    rows = [{"n": r.n, "engine": r.norm_x, "discrepancy": r.dist_S} for r in dr.records]
    _write_rows(out, "fig1.csv", rows)
    ok = dr.stop_reason == "finite_termination" and vn.stop_reason != "finite_termination"
    return ok, {"dr_stop_reason": dr.stop_reason, "dr_iterations": dr.iterations,
                "dr_final": dr.final.tolist(), "map_stop_reason": vn.stop_reason,
                "map_iterations": vn.iterations}


REPRODUCERS = {
    "ex41": reproduce_ex41,
    "ex42": reproduce_ex42,
    "ex43": reproduce_ex43,
    "ex44": reproduce_ex44,
    "fig1": reproduce_fig1,
}


def cmd_reproduce(which, out=None, **params):
    if which not in REPRODUCERS:
        raise ProblemError(f"unknown reproduction target {which!r}")
    ok, info = REPRODUCERS[which](out=out, **params)
    info["target"] = which
    info["ok"] = ok
    print(json.dumps(info))
    return 0 if ok else 1


# -- sweep ----------------------------------------------------------------------

def sweep_battery(seed=0):
    """Named (S, A, x0) instances for the parameter sweep."""
    rng = np.random.default_rng(seed)
    battery = []
    cfg = oracles.Ex41Config(tuple(oracles.hyperplane_normal(3, 0.3)), 0, 1.0)
    battery.append(("hyperplane_positive_normal",) + oracles.ex41_instance(cfg))
    S, A, x0, _ = oracles.ex42_instance(0.6)
    battery.append(("dr_finite_termination", S, A, x0))
    battery.append(("fig1",) + fig1_instance())
    for codim in (1, 2):
        n = 5
        f = np.maximum(rng.normal(size=n), 0.0)
        rows = rng.normal(size=(codim, n))
        battery.append((f"random_codim{codim}", LatticeCone(n),
                        AffineSubspace(rows, rows @ f), rng.normal(size=n) * 3))
    return battery


def cmd_sweep(c_grid, out=None, max_iters=100_000, tol=1e-12, seed=0):
    if not c_grid:
        raise ProblemError("empty c grid")
    rows = []
    for c in c_grid:
        try:
            prm = AlgorithmParams.on_relaxation_curve(c)
        except ValueError as exc:
            print(f"warning: skipping c={c}: {exc}", file=sys.stderr)
            continue
        for name, S, A, x0 in sweep_battery(seed):
            trace = run(prm, S, A, x0, max_iters=max_iters, tol=tol, store_vectors=False)
            steps = [r.norm_x for r in trace.records]
            summary = {
                "c": c, "a": prm.a, "b": prm.b, "instance": name,
                "stop_reason": trace.stop_reason, "iterations": trace.iterations,
                "fitted_rate": fitted_rate(np.abs(np.diff(steps))) if len(steps) > 3 else "",
                "shadow_dist_A": float(np.linalg.norm(
                    trace.shadow() - A.project(trace.shadow()))),
            }
            rows.append(summary)
    cols = ["c", "a", "b", "instance", "stop_reason", "iterations", "fitted_rate",
            "shadow_dist_A"]
    if out:
        with open(_out_path(out, "sweep.csv"), "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=cols)
            w.writeheader()
            w.writerows(rows)
    for r in rows:
        print(json.dumps(r))
    return 0


# -- argument parsing -------------------------------------------------------------

def _common(p, iters=True):
    p.add_argument("--out", metavar="PATH", help="output directory")
    p.add_argument("--seed", type=int, default=None)
    if iters:
        p.add_argument("--max-iters", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--full-trace", action="store_true",
                       help="also dump every vector as JSON lines")


def build_parser():
    parser = argparse.ArgumentParser(prog="projreflect", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one method on a problem file")
    p.add_argument("problem")
    _common(p)

    p = sub.add_parser("check", help="evaluate the norm-convergence hypotheses")
    p.add_argument("problem")
    p.add_argument("--samples", type=int, default=10_000)
    _common(p, iters=False)

    p = sub.add_parser("reproduce", help="oracle vs engine for a rate example")
    p.add_argument("which")
    p.add_argument("--a-m", type=float, default=None)
    p.add_argument("--alpha0", type=float, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--samples", type=int, default=None)
    _common(p)

    p = sub.add_parser("sweep", help="relaxed method along 1-a = 1-b = 1/(2(1-c))")
    p.add_argument("--c-grid", default="0,0.125,0.25,0.375,0.5",
                   help="comma-separated values of c")
    _common(p)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.problem, args.out, args.max_iters, args.tol, args.full_trace)
        if args.command == "check":
            return cmd_check(args.problem, args.seed, args.samples)
        if args.command == "reproduce":
            params = {k: getattr(args, k) for k in ("a_m", "alpha0", "dim", "n", "theta",
                                                    "samples", "seed")
                      if getattr(args, k) is not None}
            allowed = {"ex41": {"a_m", "alpha0", "dim", "n"},
                       "ex42": {"a_m", "alpha0", "dim", "n"},
                       "ex43": {"samples", "seed"},
                       "ex44": {"theta"},
                       "fig1": set()}
            if args.which not in allowed:
                raise ProblemError(f"unknown reproduction target {args.which!r}")
            extra = set(params) - allowed[args.which]
            if extra:
                raise ProblemError(f"{args.which} does not take {sorted(extra)}")
            return cmd_reproduce(args.which, args.out, **params)
        if args.command == "sweep":
            try:
                grid = [float(v) for v in args.c_grid.split(",") if v.strip()]
            except ValueError:
                raise ProblemError("--c-grid must be comma-separated numbers") from None
            kw = {}
            if args.max_iters is not None:
                kw["max_iters"] = args.max_iters
            if args.tol is not None:
                kw["tol"] = args.tol
            return cmd_sweep(grid, args.out, seed=args.seed or 0, **kw)
    except ProblemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())

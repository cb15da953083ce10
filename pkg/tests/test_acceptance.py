"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (lines appear in the "acceptance criteria" summary) or
directly with ``python3 tests/test_acceptance.py``.
"""

import math
import time
from fractions import Fraction

import numpy as np

from projreflect import (
    DR,
    MAP,
    AffineSubspace,
    AlgorithmParams,
    LatticeCone,
    SimplicialCone,
    check_transversality_equivalence,
    dr_affine_membership_residual,
    fitted_rate,
    project_polar,
    relaxed_expansion,
    run,
    step_dr,
    step_map,
    step_relaxed,
    verify_certificate,
)
from projreflect import oracles

SEED = 20261015


def _rng(offset=0):
    return np.random.default_rng(SEED + offset)


def _random_cone(rng):
    n = int(rng.integers(1, 9))
    kind = rng.integers(3)
    if kind == 0:
        return LatticeCone(n)
    k = 1 if kind == 1 else int(rng.integers(1, n + 1))
    while True:
        G = rng.normal(size=(k, n))
        if np.linalg.matrix_rank(G) == k and np.linalg.cond(G) < 1e3:
            return SimplicialCone.from_directions(G)


def _feasible_instance(rng, n, m):
    f = np.maximum(rng.normal(size=n), 0.0)
    f[rng.integers(n)] += 0.5
    while True:
        rows = rng.normal(size=(m, n))
        if np.linalg.cond(rows) < 1e3:
            return LatticeCone(n), AffineSubspace(rows, rows @ f), f


def _suite():
    """Named (S, A, x0, f) instances, f a point of S & A."""
    rng = _rng(6)
    inst = [("fig1", LatticeCone(2), AffineSubspace([[1.0, 1.0]], [2.0]),
             np.array([-0.7, 3.6]), np.array([1.0, 1.0]))]
    S, A, x0, _ = oracles.ex42_instance(0.6)
    inst.append(("finite_termination", S, A, x0, np.zeros(2)))
    cfg = oracles.Ex41Config((0.6, 0.8), 1, 1.0)
    S, A, x0 = oracles.ex41_instance(cfg)
    inst.append(("hyperplane", S, A, x0, np.zeros(2)))
    for k in range(12):
        n = int(rng.integers(2, 8))
        m = int(rng.integers(1, n))
        S, A, f = _feasible_instance(rng, n, m)
        inst.append((f"lattice_{k}", S, A, rng.normal(size=n) * 3, f))
    for k in range(4):
        n = int(rng.integers(2, 6))
        S = _random_cone(rng)
        while not isinstance(S, SimplicialCone) or S.dim < 2:
            S = _random_cone(rng)
        n = S.dim
        f = S.generators.T @ rng.exponential(size=S.generators.shape[0])
        rows = rng.normal(size=(1, n))
        inst.append((f"simplicial_{k}", S, AffineSubspace(rows, rows @ f),
                     rng.normal(size=n) * 3, f))
    return inst


def _methods():
    return [("map", MAP), ("dr", DR)] + [
        (f"relaxed_c{c}", AlgorithmParams.on_relaxation_curve(c)) for c in (0.1, 0.25, 0.4)
    ]


def criterion_1():
    rng = _rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    kinds = set()
    for _ in range(1000):
        S = _random_cone(rng)
        kinds.add(type(S).__name__ if not isinstance(S, SimplicialCone)
                  else ("ray" if S.generators.shape[0] == 1 else "simplicial"))
        x = rng.normal(size=S.dim) * rng.exponential(3.0)
        p = S.project(x)
        q = project_polar(S, x)
        nx2 = float(x @ x) or 1.0
        worst = max(worst,
                    np.linalg.norm(x - p - q) / math.sqrt(nx2),
                    abs(p @ q) / nx2,
                    abs(S.distance(x) ** 2 + np.linalg.norm(x - q) ** 2 - nx2) / nx2)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and dt < 1.0 and len(kinds) == 3
    return ok, f"max relative error {worst:.2e}, cone kinds {sorted(kinds)}, {dt:.2f}s"


def criterion_2():
    rng = _rng(2)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, n + 1))
        S, A, _ = _feasible_instance(rng, n, m)
        x = rng.normal(size=n) * 3
        worst = max(worst,
                    np.linalg.norm(step_relaxed(AlgorithmParams(0, 0, 0.5), S, A, x)
                                   - step_dr(S, A, x)),
                    np.linalg.norm(step_relaxed(AlgorithmParams(0.5, 0.5, 0), S, A, x)
                                   - step_map(S, A, x)))
    dt = time.perf_counter() - t0
    return worst <= 1e-12 and dt < 1.0, f"max deviation {worst:.2e}, {dt:.2f}s"


def criterion_3():
    rng = _rng(3)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, n + 1))
        S, A, _ = _feasible_instance(rng, n, m)
        prm = AlgorithmParams(*rng.uniform(0, 1, size=3) * 0.999)
        x = rng.normal(size=n) * 3
        worst = max(worst, np.linalg.norm(step_relaxed(prm, S, A, x)
                                          - relaxed_expansion(prm, S, A, x)))
    dt = time.perf_counter() - t0
    return worst <= 1e-10 and dt < 1.0, f"max deviation {worst:.2e}, {dt:.2f}s"


def criterion_4():
    t0 = time.perf_counter()
    worst, rates, rate_err = 0.0, [], 0.0
    for a_m in (0.6, 0.3, 0.05):
        cfg = oracles.Ex41Config(tuple(oracles.hyperplane_normal(2, a_m)), 0, 1.0)
        S, A, x0 = oracles.ex41_instance(cfg)
        tr = run("map", S, A, x0, max_iters=200, tol=0.0)
        if tr.iterations != 200:
            return False, f"a_m={a_m}: run stopped at {tr.iterations} ({tr.stop_reason})"
        for rec in tr.records:
            worst = max(worst, np.linalg.norm(rec.x - oracles.ex41_closed_form(cfg, rec.n)))
        rate = fitted_rate([r.norm_x for r in tr.records])
        rates.append(rate)
        rate_err = max(rate_err, abs(rate - (1 - a_m**2)))
    dt = time.perf_counter() - t0
    monotone = all(r1 < r2 for r1, r2 in zip(rates, rates[1:])) and rates[-1] > 0.99
    ok = worst <= 1e-9 and rate_err <= 1e-3 and monotone and dt < 1.0
    return ok, (f"termwise {worst:.2e}, rate error {rate_err:.2e}, rates "
                f"{[round(r, 5) for r in rates]}, {dt:.2f}s")


def criterion_5():
    t0 = time.perf_counter()
    problems = []
    # termwise engine/recurrence agreement and finite termination over a grid
    for a_m in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7):
        for alpha0 in (0.5, 1.0, 3.0):
            S, A, x0, a = oracles.ex42_instance(a_m, alpha0)
            tr = run("dr", S, A, x0, max_iters=10_000, tol=0.0)
            if tr.stop_reason != "finite_termination":
                problems.append(f"a_m={a_m} alpha0={alpha0}: {tr.stop_reason}")
            rec = oracles.ex42_recurrence(a_m, alpha0, len(tr.records) - 1, stop=False)
            valid = True
            for st, r in zip(rec.states, tr.records):
                if not valid:
                    break
                if np.linalg.norm(r.x - (st.alpha * np.array([1.0, 0.0]) - st.beta * a)) > 1e-9:
                    problems.append(f"a_m={a_m} n={st.n}: engine differs")
                valid = st.alpha - st.beta * a_m > 0
            if np.linalg.norm(tr.shadow()) > 1e-9:
                problems.append(f"a_m={a_m}: shadow not 0")
    rec = oracles.ex42_recurrence(0.6, 1.0, 50)
    if rec.n0 != 3 or abs(rec.states[3].alpha + 0.180224) > 1e-12:
        problems.append(f"n0={rec.n0}")
    # three computations of alpha_n and the weighted sum
    for a_m in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7):
        ref = oracles.ex42_recurrence(a_m, 1.0, 50, stop=False).alphas
        gf = oracles.ex42_generating_function(a_m, 1.0, 51)
        fit = oracles.ex42_oscillation_fit(a_m, 1.0)
        env = fit.envelope(np.arange(51))
        if np.max(np.abs(gf - ref) / env) > 1e-8 or np.max(np.abs(fit.alpha(np.arange(51)) - ref) / env) > 1e-8:
            problems.append(f"a_m={a_m}: series/fit disagree")
        total = oracles.ex42_weighted_sum(a_m, 1.0)
        closed = oracles.ex42_gf_derivative_at_one(a_m, 1.0)
        if not (total < 0 and abs(total - closed) <= 1e-6 * abs(closed)):
            problems.append(f"a_m={a_m}: weighted sum {total} vs {closed}")
    dt = time.perf_counter() - t0
    ok = not problems and dt < 5.0
    return ok, ("; ".join(problems[:3]) or "n0=3, alpha_3=-0.180224, all grids agree") + f", {dt:.2f}s"


def _run_suite():
    for name, S, A, x0, f in _suite():
        for mname, prm in _methods():
            yield name, mname, prm, S, A, run(prm, S, A, x0, max_iters=20_000,
                                              tol=1e-13, reference_point=f)


def criterion_6():
    worst_w, worst_t, steps = 0.0, 0.0, 0
    for _, mname, prm, S, A, tr in _run_suite():
        x0 = tr.records[0].x
        for prev, rec in zip(tr.records, tr.records[1:]):
            worst_t = max(worst_t, np.linalg.norm(rec.x - x0 + rec.sigma - rec.alpha_img))
            if mname != "map":
                worst_w = max(worst_w, dr_affine_membership_residual(S, A, prev.x, rec.x, prm))
                steps += 1
    ok = worst_w <= 1e-8 and worst_t <= 1e-8
    return ok, f"affine witness {worst_w:.2e} over {steps} steps, telescoping {worst_t:.2e}"


def criterion_7():
    worst, runs = -math.inf, 0
    for _, _, _, _, _, tr in _run_suite():
        d = tr.fejer_dists()
        worst = max(worst, float(np.max(np.diff(d))))
        runs += 1
    return worst <= 1e-10, f"largest increase {worst:.2e} over {runs} runs"


def criterion_8():
    rng = _rng(8)
    t0 = time.perf_counter()
    disagree, undetermined, bad_cert, fails = 0, 0, 0, 0
    for k in range(200):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, n + 1))
        rows = rng.normal(size=(m, n))
        if k % 3 == 0:
            rows[0] = np.abs(rows[0])  # force a positive vector into the row space
        A = AffineSubspace(rows, rng.normal(size=m))
        res = check_transversality_equivalence(A, LatticeCone(n))
        if res.lhs is None or res.rhs is None:
            undetermined += 1
            continue
        disagree += res.lhs != res.rhs
        for rep in (res.to_report(), res.rhs_report):
            if rep.verdict == "fails":
                fails += 1
                bad_cert += not verify_certificate(rep, A)
    dt = time.perf_counter() - t0
    ok = disagree == 0 and undetermined == 0 and bad_cert == 0 and dt < 30.0
    return ok, (f"{disagree} disagreements, {undetermined} undetermined, "
                f"{bad_cert}/{fails} bad certificates, {dt:.2f}s")


def criterion_9():
    rng = _rng(9)
    problems = []
    methods = [("map", MAP), ("dr", DR),
               ("relaxed", AlgorithmParams.on_relaxation_curve(0.25))]
    for k in range(50):
        n = int(rng.integers(2, 9))
        S, A, _ = _feasible_instance(rng, n, 1)
        x0 = rng.normal(size=n) * 3
        for mname, prm in methods:
            tr = run(prm, S, A, x0, max_iters=100_000, tol=1e-12, store_vectors=False)
            shadow = tr.shadow()
            res = max(S.distance(shadow), float(np.linalg.norm(shadow - A.project(shadow))))
            if prm.a > 0:  # the limit itself is feasible
                res = max(res, S.distance(tr.final), float(np.linalg.norm(tr.final - A.project(tr.final))))
            if tr.stop_reason not in ("converged", "finite_termination") or res > 1e-6:
                problems.append(f"instance {k} {mname}: {tr.stop_reason}, residual {res:.1e}")
    return not problems, "; ".join(problems[:3]) or "150 runs converged with residuals <= 1e-6"


def criterion_10():
    details, ok = [], True
    for theta in (math.pi / 6, math.pi / 4, math.pi / 3):
        res = oracles.ex44_two_lines(theta)
        ok &= abs(res.fitted_rate - math.cos(theta)) <= 0.02
        details.append(f"{res.fitted_rate:.4f}/{math.cos(theta):.4f}")
    S, A, x_star = oracles.ex44b_instance()
    x0 = (2.0, 0.5)
    tr = run("dr", S, A, x0, max_iters=1000, tol=0.0, reference_point=x_star)
    fejer = float(np.max(np.diff(tr.fejer_dists()))) <= 1e-10
    ok &= fejer and tr.stop_reason != "finite_termination"
    exact = oracles.dr_exact_ray_line((1, 1), (0, 1), 1, x0, 1000)
    target = (Fraction(1), Fraction(1))
    never = all(p != target for p in exact) and all(p != q for p, q in zip(exact, exact[1:]))
    ok &= never
    return ok, (f"rates {', '.join(details)}; ray/line: stop {tr.stop_reason}, Fejer {fejer}, "
                f"exact iterates never constant {never}")


def criterion_11():
    instances = [
        (SimplicialCone([[1.0, 0.0], [0.0, 1.0]]), np.array([2.0, 3.0])),
        (SimplicialCone.from_directions([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]), None),
        (SimplicialCone.from_directions([[1.0, 0.2, 0.0], [0.0, 1.0, 0.3], [0.1, 0.0, 1.0]]), None),
    ]
    rng = _rng(11)
    worst_p, worst_dr, steps = 0.0, 0.0, 0
    for k, (S, x_star) in enumerate(instances):
        if x_star is None:
            x_star = S.generators.sum(axis=0)
        radius = oracles.certified_coincidence_radius(S, x_star)
        worst_p = max(worst_p, oracles.ex43_projection_discrepancy(S, x_star, radius, 1000, seed=k))
        t = rng.normal(size=S.dim)
        A = AffineSubspace(t[None, :], [float(t @ x_star)])
        for x0 in oracles.sample_ball(x_star, radius, 5, rng):
            d, s = oracles.ex43_dr_discrepancy(S, A, x_star, x0, radius, n_steps=200)
            worst_dr = max(worst_dr, d)
            steps += s
    ok = worst_p <= 1e-9 and worst_dr <= 1e-9 and steps > 0
    return ok, f"projections {worst_p:.2e}, DR {worst_dr:.2e} over {steps} in-ball steps"


CRITERIA = [
    (1, "Moreau identities on lattice, ray and simplicial cones", criterion_1),
    (2, "relaxed presets reproduce DR and MAP", criterion_2),
    (3, "relaxed step operator form equals expansion", criterion_3),
    (4, "hyperplane MAP closed form and rates", criterion_4),
    (5, "hyperplane DR recurrence, termination, series", criterion_5),
    (6, "affine witness and telescoping identities per step", criterion_6),
    (7, "Fejer monotonicity", criterion_7),
    (8, "transversality sides agree, certificates verify", criterion_8),
    (9, "codimension-one runs converge to feasible points", criterion_9),
    (10, "two-line rates and ray/line non-termination", criterion_10),
    (11, "simplicial cone and span coincide near an interior point", criterion_11),
]


def _gate(acceptance, number):
    _, title, fn = CRITERIA[number - 1]
    ok, detail = fn()
    acceptance(number, title, ok, detail)
    assert ok, detail


def test_moreau_identities(acceptance):
    _gate(acceptance, 1)


def test_presets_match_dr_and_map(acceptance):
    _gate(acceptance, 2)


def test_relaxed_operator_matches_expansion(acceptance):
    _gate(acceptance, 3)


def test_hyperplane_map_reproduction(acceptance):
    _gate(acceptance, 4)


def test_hyperplane_dr_reproduction(acceptance):
    _gate(acceptance, 5)


def test_per_step_identities(acceptance):
    _gate(acceptance, 6)


def test_fejer_monotone(acceptance):
    _gate(acceptance, 7)


def test_transversality_equivalence(acceptance):
    _gate(acceptance, 8)


def test_codim_one_convergence(acceptance):
    _gate(acceptance, 9)


def test_two_lines_and_ray_line(acceptance):
    _gate(acceptance, 10)


def test_simplicial_span_coincidence(acceptance):
    _gate(acceptance, 11)


if __name__ == "__main__":
    failed = 0
    for number, title, fn in CRITERIA:
        ok, detail = fn()
        failed += not ok
        print(f"[{'PASS' if ok else 'FAIL'}] {number:>2} {title}: {detail}")
    raise SystemExit(1 if failed else 0)

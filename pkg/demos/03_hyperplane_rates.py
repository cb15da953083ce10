"""Alternating projections between the orthant and a hyperplane through the
origin with a positive unit normal a. From x0 = e_m - a_m a the iterates
stay on one ray and shrink by exactly 1 - a_m^2 per step, so small entries
of a give rates arbitrarily close to one."""

from projreflect import fitted_rate, run
from projreflect import oracles

print(" a_m    measured    1 - a_m^2")
for a_m in (0.6, 0.3, 0.1, 0.05, 0.01):
    cfg = oracles.Ex41Config(tuple(oracles.hyperplane_normal(3, a_m)), 0, 1.0)
    S, A, x0 = oracles.ex41_instance(cfg)
    tr = run("map", S, A, x0, max_iters=200, tol=0.0)
    err = max(float(abs(r.x - oracles.ex41_closed_form(cfg, r.n)).max()) for r in tr.records)
    rate = fitted_rate([r.norm_x for r in tr.records])
    print(f"{a_m:5.2f}   {rate:.6f}    {cfg.rate:.6f}   (closed form error {err:.1e})")

"""Douglas-Rachford on the same hyperplane problem. The iterates follow a
two-term linear recurrence whose coefficients oscillate, so some alpha_n
turns negative and the iteration stops at a fixed point."""

import numpy as np

from projreflect import run
from projreflect import oracles

a_m = 0.6
S, A, x0, a = oracles.ex42_instance(a_m)
rec = oracles.ex42_recurrence(a_m, 1.0, 20)
print("recurrence:", [(s.n, round(s.alpha, 6), round(s.beta, 6)) for s in rec.states])
print("first nonpositive alpha at n =", rec.n0)

tr = run("dr", S, A, x0)
print("\nengine:", tr.stop_reason, "after", tr.iterations, "steps")
print("fixed point", tr.final.round(6), "= -0.49152 a; its orthant shadow", tr.shadow())

gf = oracles.ex42_generating_function(a_m, 1.0, 8)
fit = oracles.ex42_oscillation_fit(a_m, 1.0)
print("\nseries coefficients:", np.round(gf, 6))
print(f"damped cosine: C={fit.C:.4f} r={fit.r:.4f} theta={fit.theta:.4f} phi={fit.phi:.1e}")
print("fit values:", np.round(fit.alpha(np.arange(8)), 6))
print("sum n alpha_n =", round(oracles.ex42_weighted_sum(a_m, 1.0), 10),
      " closed form", round(oracles.ex42_gf_derivative_at_one(a_m, 1.0), 10))

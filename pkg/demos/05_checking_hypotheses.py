"""Hypothesis checkers for norm convergence on the orthant. Failing verdicts
carry certificates that can be re-checked without solving an LP."""

import numpy as np

from projreflect import AffineSubspace, LatticeCone, check_all, verify_certificate

r = 1 / np.sqrt(2)
cases = {
    "positive normal (0.6, 0.8)": AffineSubspace([[0.6, 0.8]], [0.0]),
    "mixed normal (1, -1)/sqrt2": AffineSubspace([[r, -r]], [0.5]),
    "two rows e1, e2 - e3": AffineSubspace([[1, 0, 0], [0, 1, -1]], [1.0, 0.0]),
    "full rank": AffineSubspace(np.eye(3), [1.0, 1.0, 1.0]),
}
for name, A in cases.items():
    print(name)
    for rep in check_all(A, LatticeCone(A.dim), samples=2000, seed=1):
        extra = ""
        if rep.verdict == "fails":
            extra = f"certificate {np.round(rep.certificate, 3)} verified={verify_certificate(rep, A)}"
        print(f"  {rep.condition:20s} {rep.verdict:12s} {extra}")

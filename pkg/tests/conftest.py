import numpy as np
import pytest

from projreflect import AffineSubspace, LatticeCone, SimplicialCone

_ACCEPTANCE = []


def random_simplicial(rng, dim, k):
    while True:
        G = rng.normal(size=(k, dim))
        if np.linalg.matrix_rank(G) == k and np.linalg.cond(G) < 1e3:
            return SimplicialCone.from_directions(G)


def random_feasible_affine(rng, dim, codim, S=None):
    """Random A with a point of S (default: the orthant) in it; returns (A, f)."""
    if S is None:
        f = np.maximum(rng.normal(size=dim), 0.0)
        f[rng.integers(dim)] += 0.5
    else:
        f = S.generators.T @ rng.exponential(size=S.generators.shape[0])
    while True:
        rows = rng.normal(size=(codim, dim))
        if np.linalg.cond(rows) < 1e3:
            return AffineSubspace(rows, rows @ f), f


def lattice_battery(rng, count, max_dim=8):
    """Random feasible (S, A, x0, f) with f in S & A."""
    out = []
    for _ in range(count):
        n = int(rng.integers(2, max_dim + 1))
        m = int(rng.integers(1, n + 1))
        A, f = random_feasible_affine(rng, n, m)
        out.append((LatticeCone(n), A, rng.normal(size=n) * 3.0, f))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def acceptance():
    """Record one acceptance line (number, title, passed, detail)."""
    def record(number, title, passed, detail=""):
        _ACCEPTANCE.append((number, title, bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE):
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{mark}] {number:>2} {title}: {detail}")

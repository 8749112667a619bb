import itertools

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from convexpoly import ConvexPolynomial, make_convex

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@st.composite
def convex_polys(draw, max_degree=20):
    """Random convex-polynomials, including sparse ones."""
    n = draw(st.integers(0, max_degree))
    coef = st.one_of(st.just(0.0), st.floats(1e-3, 1.0))
    raw = draw(st.lists(coef, min_size=n + 1, max_size=n + 1))
    if sum(raw) <= 0:
        raw[-1] = 1.0
    return make_convex(raw, "renormalize")


def random_convex(rng, max_degree):
    n = int(rng.integers(0, max_degree + 1))
    raw = rng.random(n + 1) * (rng.random(n + 1) < 0.7)
    raw[int(rng.integers(0, n + 1))] += 0.1
    return make_convex(raw, "renormalize")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def simplex_grid(N, steps):
    """All coefficient vectors of length N + 1 on the simplex with spacing 1/steps."""
    bars = np.array(list(itertools.combinations(range(steps + N), N)), dtype=np.int64).reshape(-1, N)
    edges = np.hstack([np.full((len(bars), 1), -1), bars, np.full((len(bars), 1), steps + N)])
    return (np.diff(edges, axis=1) - 1) / steps


# (name, target, interval) used by the brute-force comparisons
BRUTE_TARGETS = [
    ("quadratic", lambda x: 0.6 * x**2 + 0.4, (-2.0, -1.0)),
    ("kink", lambda x: np.abs(x + 1.5), (-2.0, -1.0)),
    ("exp", np.exp, (-1.0, 0.0)),
    ("cosine", lambda x: np.cos(3 * x), (-1.0, 1.0)),
    ("cubic", lambda x: x**3 - 0.3, (-1.5, -1.0)),
]


def brute_l2(model, grid):
    G, b = model.gram, model.linear
    return float(np.min(np.einsum("ij,jk,ik->i", grid, G, grid) - 2 * grid @ b + model.constant))


def brute_uniform(x, fx, grid, chunk=200_000):
    V = x[:, None] ** np.arange(grid.shape[1])
    return min(float(np.min(np.max(np.abs(grid[i:i + chunk] @ V.T - fx), axis=1)))
               for i in range(0, len(grid), chunk))


def grid_slack(x, N, steps):
    """Bound on how much rounding an optimum to the grid can raise the uniform error."""
    return float(np.sum(np.max(np.abs(x)) ** np.arange(N + 1))) / steps


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES = {}


def record_criterion(number, title, checks):
    """Store and print the verdict of one criterion; returns the failing check names."""
    failed = [name for name, ok in checks if not ok]
    line = f"criterion {number} {'PASS' if not failed else 'FAIL'}: {title}"
    if failed:
        line += f" (failed: {', '.join(failed)})"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return failed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog as scipy_linprog

from convexpoly.errors import Infeasible
from convexpoly.lp import linprog


def random_lp(rng, nv, mu, me):
    """Feasible, bounded LP: a box row keeps it bounded, a known point keeps it feasible."""
    x0 = rng.random(nv)
    A_ub = rng.standard_normal((mu, nv))
    b_ub = A_ub @ x0 + rng.random(mu)
    A_ub = np.vstack([A_ub, np.ones(nv)])
    b_ub = np.append(b_ub, nv + 1.0)
    A_eq = rng.standard_normal((me, nv)) if me else None
    b_eq = A_eq @ x0 if me else None
    c = rng.standard_normal(nv)
    return c, A_ub, b_ub, A_eq, b_eq


@pytest.mark.parametrize("seed", range(25))
def test_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    nv, mu, me = int(rng.integers(2, 9)), int(rng.integers(1, 12)), int(rng.integers(0, 3))
    c, A_ub, b_ub, A_eq, b_eq = random_lp(rng, nv, mu, me)
    ref = scipy_linprog(c, A_ub, b_ub, A_eq, b_eq, bounds=(0, None), method="highs")
    assert ref.status == 0
    res = linprog(c, A_ub, b_ub, A_eq, b_eq)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(ref.fun, abs=1e-8 * max(1.0, abs(ref.fun)))
    assert np.all(res.x >= 0)
    assert np.all(A_ub @ res.x <= b_ub + 1e-9)
    if me:
        np.testing.assert_allclose(A_eq @ res.x, b_eq, atol=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_duals_certify_optimality(seed):
    rng = np.random.default_rng(100 + seed)
    c, A_ub, b_ub, _, _ = random_lp(rng, 5, 8, 0)
    res = linprog(c, A_ub, b_ub)
    y = res.duals[: len(b_ub)]
    # y <= 0 for <= rows and strong duality b.y = c.x
    assert np.all(y <= 1e-9)
    assert float(b_ub @ y) == pytest.approx(res.objective, abs=1e-8)
    assert np.all(c - A_ub.T @ y >= -1e-9)


def test_infeasible():
    with pytest.raises(Infeasible):
        linprog([1.0, 1.0], A_ub=[[1.0, 1.0]], b_ub=[-1.0])


def test_unbounded():
    res = linprog([-1.0, 0.0], A_ub=[[0.0, 1.0]], b_ub=[1.0])
    assert res.status == "unbounded"


def test_beale_cycling_example():
    # cycles under Dantzig's rule with naive tie-breaking; Bland's rule terminates
    c = np.array([-0.75, 150.0, -0.02, 6.0])
    A = np.array([[0.25, -60.0, -0.04, 9.0], [0.5, -90.0, -0.02, 3.0], [0.0, 0.0, 1.0, 0.0]])
    b = np.array([0.0, 0.0, 1.0])
    res = linprog(c, A, b)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(-0.05)


def test_warm_basis():
    c = np.array([-1.0, -2.0])
    A = np.array([[1.0, 1.0], [1.0, 3.0]])
    b = np.array([4.0, 6.0])
    cold = linprog(c, A, b)
    warm = linprog(c, A, b, basis=cold.basis)
    assert warm.iterations == 0
    assert warm.objective == pytest.approx(cold.objective)


def test_bad_warm_basis():
    with pytest.raises(ValueError):
        # x1 basic in the first row alone gives x1 = 4 > 2 in the second
        linprog([-1.0, 0.0], [[1.0, 0.0], [2.0, 0.0]], [4.0, 4.0], basis=[0, 3])


def test_on_iterate_sees_feasible_vertices():
    seen = []
    c = np.array([-1.0, -1.0])
    A = np.array([[1.0, 2.0], [3.0, 1.0]])
    b = np.array([4.0, 6.0])
    linprog(c, A, b, on_iterate=lambda basis, xB: seen.append(np.min(xB)))
    assert seen and min(seen) >= -1e-12


@given(st.lists(st.floats(0.1, 10.0), min_size=2, max_size=6), st.floats(0.5, 5.0))
def test_knapsack_relaxation(values, cap):
    # max sum v_i x_i s.t. sum x_i <= cap, x_i <= 1: greedy is optimal
    v = np.array(values)
    n = v.size
    A = np.vstack([np.ones(n), np.eye(n)])
    b = np.concatenate([[cap], np.ones(n)])
    res = linprog(-v, A, b)
    k = min(cap, n)
    order = np.sort(v)[::-1]
    whole = int(k)
    want = order[:whole].sum() + (k - whole) * (order[whole] if whole < n else 0.0)
    assert -res.objective == pytest.approx(want, rel=1e-10)

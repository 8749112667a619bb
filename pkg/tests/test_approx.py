import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sklearn.base import clone

from convexpoly import ConvexPolynomial, Measure, make_convex
from convexpoly.approx import (ConvexPolynomialRegressor, QuadraticModel, best_l2, best_uniform,
                               build_quadratic_model, chebyshev_grid, density_probe, weighted_density_probe)
from convexpoly.errors import NonPSDModel, RangeOverflow, SupportViolation, WeightVanishes

from conftest import BRUTE_TARGETS, brute_l2, brute_uniform, convex_polys, grid_slack, simplex_grid

LEB = Measure.lebesgue(-2.0, -1.0)


@pytest.fixture(scope="module")
def grid3():
    return simplex_grid(3, 200)


class TestQuadraticModel:
    def test_lebesgue_gram(self):
        m = build_quadratic_model(LEB, None, 1)
        np.testing.assert_allclose(m.gram, [[1.0, -1.5], [-1.5, 7 / 3]], rtol=1e-15)

    def test_zero_target(self):
        m = build_quadratic_model(LEB, lambda x: 0 * x, 3)
        assert np.all(m.linear == 0)

    def test_atom_gram(self):
        m = build_quadratic_model(Measure.atom(-2.0), None, 1)
        np.testing.assert_array_equal(m.gram, [[1.0, -2.0], [-2.0, 4.0]])

    def test_symmetric(self):
        m = build_quadratic_model(Measure.lebesgue(-3.0, -1.0, (1.0, 0.1)), np.cos, 8)
        np.testing.assert_array_equal(m.gram, m.gram.T)
        assert m.check_psd() > -1e-8

    @pytest.mark.parametrize("seed", range(5))
    def test_objective_matches_quadrature(self, seed):
        rng = np.random.default_rng(seed)
        mu = Measure(atoms=((-1.7, 0.3),), pieces=((-2.0, -1.0, (1.0, 0.2)),))
        f = lambda x: np.sin(2 * x) + 0.5
        m = build_quadratic_model(mu, f, 6)
        a = rng.dirichlet(np.ones(7))
        t, w = np.polynomial.legendre.leggauss(60)
        x = 0.5 * t - 1.5
        direct = 0.5 * np.sum(w * (1.0 + 0.2 * x) * (np.polyval(a[::-1], x) - f(x)) ** 2)
        direct += 0.3 * (np.polyval(a[::-1], -1.7) - f(-1.7)) ** 2
        assert m.objective(a) == pytest.approx(direct, rel=1e-8)
        assert m.residual_norm(a) ** 2 == pytest.approx(direct, rel=1e-8)

    def test_non_psd(self):
        bad = QuadraticModel(np.array([[1.0, 2.0], [2.0, 1.0]]), np.zeros(2), 0.0)
        with pytest.raises(NonPSDModel):
            best_l2(bad)


class TestBestL2:
    def test_recovers_convex_polynomial(self):
        truth = np.array([0.1, 0.0, 0.3, 0.0, 0.6])
        f = lambda x: np.polynomial.polynomial.polyval(x, truth)
        r = best_l2(build_quadratic_model(LEB, f, 4), tol=1e-14, max_iter=5000)
        assert r.error <= 1e-6
        assert np.max(np.abs(r.coeffs - truth)) <= 1e-4

    def test_vertex_target(self):
        r = best_l2(build_quadratic_model(LEB, lambda x: x, 2))
        np.testing.assert_allclose(r.coeffs, [0.0, 1.0, 0.0], atol=1e-12)
        assert r.error <= 1e-12

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            best_l2(build_quadratic_model(LEB, lambda x: x, 2), tol=0.0)

    @pytest.mark.parametrize("name,f,interval", BRUTE_TARGETS, ids=[t[0] for t in BRUTE_TARGETS])
    def test_brute_force(self, grid3, name, f, interval):
        m = build_quadratic_model(Measure.lebesgue(*interval), f, 3)
        r = best_l2(m, tol=1e-12, max_iter=5000)
        brute = brute_l2(m, grid3)
        assert abs(r.error**2 - brute) <= 1e-3
        assert r.error**2 <= brute + 1e-12

    @pytest.mark.parametrize("name,f,interval", BRUTE_TARGETS[1:4], ids=[t[0] for t in BRUTE_TARGETS[1:4]])
    def test_converged_certificates(self, name, f, interval):
        m = build_quadratic_model(Measure.lebesgue(*interval), f, 6)
        tol = 1e-9
        r = best_l2(m, tol=tol, max_iter=5000)
        assert r.status == "Converged" and r.gap <= tol
        # no coordinate swap along a feasible direction helps
        a = r.coeffs
        base = m.objective(a)
        for i in np.flatnonzero(a > 1e-4):
            for j in range(a.size):
                if i != j:
                    b = a.copy()
                    b[i] -= 1e-4
                    b[j] += 1e-4
                    assert m.objective(b) >= base - 1e-8

    @pytest.mark.parametrize("f,interval", [(np.exp, (-1.0, 0.0)), (lambda x: np.abs(x + 1.5), (-2.0, -1.0)),
                                            (lambda x: np.cos(3 * x), (-3.0, -1.5))])
    def test_nonincreasing_in_degree(self, f, interval):
        mu = Measure.lebesgue(*interval)
        errs = [best_l2(build_quadratic_model(mu, f, N), max_iter=3000).error for N in (2, 4, 8, 16, 32)]
        assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))

    def test_warm_start(self):
        m = build_quadratic_model(LEB, lambda x: np.abs(x + 1.5), 8)
        cold = best_l2(m, tol=1e-10, max_iter=3000)
        warm = best_l2(m, tol=1e-10, max_iter=3000, initial=cold.coeffs)
        assert warm.error <= cold.error + 1e-12
        assert warm.iterations <= cold.iterations

    def test_error_recomputable(self):
        m = build_quadratic_model(LEB, np.sin, 5)
        r = best_l2(m)
        assert r.error == pytest.approx(m.residual_norm(r.coeffs), rel=1e-8)
        assert r.gap >= -1e-12


class TestBestUniform:
    @pytest.mark.parametrize("N", [1, 2, 5, 9])
    def test_monomial_target(self, N):
        x = chebyshev_grid(-3.0, -2.0, 128)
        r = best_uniform(lambda t: t, x, N)
        assert r.error <= 1e-9

    def test_obstruction(self):
        x = chebyshev_grid(-2.0, 0.0, 128)
        r = best_uniform(lambda t: np.full_like(t, -5.0), x, 10)
        assert r.error >= 4.0

    def test_nested_degrees(self):
        x = chebyshev_grid(-3.0, -1.5, 257)
        f = lambda t: np.abs(t + 2)
        e20 = best_uniform(f, x, 20).error
        e60 = best_uniform(f, x, 60).error
        assert e60 <= e20

    def test_error_is_recomputed_max(self):
        x = chebyshev_grid(-2.0, -1.0, 200)
        f = lambda t: np.abs(t + 1.5)
        r = best_uniform(f, x, 12)
        recheck = float(np.max(np.abs(r.poly(x) - f(x))))
        assert r.error == pytest.approx(recheck, rel=1e-10, abs=1e-14)

    @pytest.mark.parametrize("name,f,interval", BRUTE_TARGETS, ids=[t[0] for t in BRUTE_TARGETS])
    def test_brute_force(self, grid3, name, f, interval):
        x = chebyshev_grid(*interval, 64)
        fx = f(x)
        r = best_uniform(fx, x, 3)
        brute = brute_uniform(x, fx, grid3)
        assert r.error <= brute + 1e-3
        assert r.error >= brute - grid_slack(x, 3, 200)

    def test_range_overflow(self):
        with pytest.raises(RangeOverflow):
            best_uniform(np.abs, np.linspace(-1e3, -2.0, 50), 200)

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            best_uniform(np.abs, [], 3)

    def test_warm_start_agrees(self):
        x = chebyshev_grid(-3.0, -1.5, 128)
        f = lambda t: np.abs(t + 2)
        r10, state = best_uniform(f, x, 10, return_state=True)
        warm = best_uniform(f, x, 20, warm_start=state)
        cold = best_uniform(f, x, 20)
        assert warm.error <= r10.error
        assert warm.error == pytest.approx(cold.error, rel=1e-6)

    def test_grid_is_sorted_chebyshev(self):
        x = chebyshev_grid(-3.0, -1.5, 9)
        assert np.all(np.diff(x) > 0) and x[0] > -3.0 and x[-1] < -1.5


@given(convex_polys(max_degree=15), st.floats(-1.0, 1.0))
def test_obstruction_bound(p, x):
    assert abs(p(x) + 5.0) >= 4.0 - 1e-12


class TestDensityProbe:
    def test_dense_below_minus_one(self):
        rep = density_probe(-3.0, -1.5, lambda x: np.abs(x + 2), [5, 10, 20, 40, 80])
        e = rep.errors
        assert all(b < a for a, b in zip(e, e[1:]))
        assert e[-1] <= 0.1 * e[0]

    def test_obstructed(self):
        rep = density_probe(-2.0, 0.0, lambda x: np.full_like(x, -5.0), [5, 10])
        assert rep.verdict == "Obstructed"
        assert rep.lower_bound >= 4 - 1e-9
        assert all(e >= rep.lower_bound - 1e-9 for e in rep.errors)
        assert -1.0 <= rep.witness <= 1.0

    def test_exp_series_target(self):
        rep = density_probe(0.0, 1.0, lambda x: np.exp(x - 1), [4, 8, 12])
        assert all(e < 1e-3 for e in rep.errors)

    def test_l2_mode(self):
        rep = density_probe(-2.0, -1.0, lambda x: np.abs(x + 1.5), [2, 4, 8, 16], mode="l2")
        e = rep.errors
        assert all(b <= a + 1e-12 for a, b in zip(e, e[1:]))
        assert rep.to_dict()["curve"][0]["degree"] == 2

    def test_positivity_bound(self):
        rep = density_probe(1.0, 2.0, lambda x: -x, [2, 4])
        assert rep.verdict == "Obstructed" and rep.lower_bound >= 2.0 - 1e-12

    @pytest.mark.parametrize("kwargs", [dict(a=1.0, b=0.0, degrees=[2]), dict(a=-2.0, b=-1.0, degrees=[4, 2]),
                                        dict(a=-2.0, b=-1.0, degrees=[2], mode="sup")])
    def test_bad_input(self, kwargs):
        with pytest.raises(ValueError):
            density_probe(f=np.abs, **kwargs)


class TestWeightedDensity:
    def test_unit_weight_matches_best_l2(self):
        mu = Measure.lebesgue(-2.0, -1.2)
        f = lambda x: np.ones_like(x)
        target = lambda x: np.abs(x + 1.6)
        r = weighted_density_probe(mu, f, target, 6, tol=1e-12, max_iter=3000)
        direct = best_l2(build_quadratic_model(mu, target, 6), tol=1e-12, max_iter=3000)
        assert r.error == pytest.approx(direct.error, rel=1e-6, abs=1e-10)

    def test_scalar_multiple_improves(self):
        mu = Measure.lebesgue(-2.0, -1.2)
        f = lambda x: 1.0 + x**2
        errs = [weighted_density_probe(mu, f, lambda x: -2.0 * f(x), N).error for N in (10, 40)]
        assert errs[1] < errs[0]

    def test_support_violation(self):
        mu = Measure(atoms=((-0.5, 1.0),), pieces=((-2.0, -1.5, (1.0,)),))
        with pytest.raises(SupportViolation):
            weighted_density_probe(mu, np.ones_like, np.ones_like, 3)

    def test_weight_vanishes(self):
        mu = Measure.lebesgue(-2.0, -1.2)
        with pytest.raises(WeightVanishes):
            weighted_density_probe(mu, lambda x: np.zeros_like(x), np.ones_like, 3)


class TestRegressor:
    def test_fit_predict(self):
        x = np.linspace(-2.0, -1.0, 80)
        y = 0.3 + 0.7 * x**2
        est = ConvexPolynomialRegressor(degree=4, tol=1e-13, max_iter=3000).fit(x[:, None], y)
        np.testing.assert_allclose(est.predict(x[:, None]), y, atol=1e-5)
        assert est.coef_.size == 5 and isinstance(est.poly_, ConvexPolynomial)
        assert est.score(x[:, None], y) > 0.999

    def test_uniform_loss(self):
        x = np.linspace(-3.0, -2.0, 50)
        est = ConvexPolynomialRegressor(degree=3, loss="uniform").fit(x[:, None], x)
        assert est.result_.error <= 1e-9

    def test_clone_and_params(self):
        est = ConvexPolynomialRegressor(degree=7, loss="uniform")
        twin = clone(est)
        assert twin.get_params() == est.get_params()

    def test_not_fitted(self):
        from sklearn.exceptions import NotFittedError
        with pytest.raises(NotFittedError):
            ConvexPolynomialRegressor().predict([[0.0]])

    @pytest.mark.parametrize("kwargs", [dict(loss="huber"), dict(degree=-1)])
    def test_bad_params(self, kwargs):
        with pytest.raises(ValueError):
            ConvexPolynomialRegressor(**kwargs).fit([[0.0], [1.0]], [0.0, 1.0])

    def test_two_features(self):
        with pytest.raises(ValueError):
            ConvexPolynomialRegressor().fit([[0.0, 1.0], [1.0, 2.0]], [0.0, 1.0])

    def test_sample_weight(self):
        x = np.array([-1.0, -0.5, 0.0, 0.5])
        y = np.array([1.0, 0.25, 0.0, 0.25])
        est = ConvexPolynomialRegressor(degree=2, tol=1e-13).fit(x[:, None], y, sample_weight=[1, 1, 1, 1])
        np.testing.assert_allclose(est.coef_, [0.0, 0.0, 1.0], atol=1e-6)

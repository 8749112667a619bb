import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from convexpoly import ConvexPolynomial, Measure, multiply, peaking_polynomial
from convexpoly.polycore import EvalResult
from convexpoly.errors import CommonDiscontinuity, ExtractionFailed, HypothesisFailed, InvalidMeasure, NonFiniteSample
from convexpoly.measures import (Bounded, DistributionFunction, MomentGrowthCertificate, certify_sequence,
                                 distribution, extract_exponents, growth_certificate, integration_by_parts_check,
                                 lebesgue_integral, moment, quadrature_rule, rs_integral, weighted_moment,
                                 weighted_moment_log)

LEB = Measure.lebesgue(-2.0, -1.0)
UNIT_ATOM = Measure.atom(-1.0)


def exact_moment(atoms, pieces, n):
    """Moment with Fraction arithmetic from the antiderivative."""
    total = Fraction(0)
    for x, w in atoms:
        total += Fraction(w) * Fraction(x) ** n
    for lo, hi, dens in pieces:
        for j, d in enumerate(dens):
            m = n + j + 1
            total += Fraction(d) * (Fraction(hi) ** m - Fraction(lo) ** m) / m
    return total


class TestMoment:
    def test_second_moment(self):
        assert moment(LEB, 2).value == pytest.approx(7 / 3, rel=1e-15)

    def test_third_moment(self):
        assert moment(LEB, 3).value == pytest.approx(-15 / 4, rel=1e-15)

    @pytest.mark.parametrize("n", [0, 1, 2, 7, 50, 1001])
    def test_unit_atom(self, n):
        assert moment(UNIT_ATOM, n).value == (-1) ** n

    def test_negative_order(self):
        with pytest.raises(ValueError):
            moment(LEB, -1)

    @pytest.mark.parametrize("n", [1, 3, 801])
    def test_symmetric_cancellation(self, n):
        r = moment(Measure.lebesgue(-2.0, 2.0), n)
        assert r.value == 0.0 and r.sign == 0

    def test_empty_measure(self):
        assert moment(Measure(), 3).value == 0.0

    @pytest.mark.parametrize("n", [0, 1, 5, 20, 60])
    def test_against_fraction_oracle(self, n):
        atoms = [(-2.5, 0.25), (-1.25, 0.5)]
        pieces = [(-3.0, -2.0, [1.0, 0.5, 0.25]), (-1.0, 0.5, [2.0])]
        mu = Measure(atoms=atoms, pieces=[(lo, hi, d) for lo, hi, d in pieces])
        want = float(exact_moment(atoms, pieces, n))
        assert moment(mu, n).value == pytest.approx(want, rel=1e-13)

    def test_log_domain_large_order(self):
        # int_{-3}^{-2} x^800 dx = (3^801 - 2^801) / 801
        mu = Measure.lebesgue(-3.0, -2.0)
        r = moment(mu, 800)
        assert r.log_domain and r.sign == 1
        want = math.log(3**801 - 2**801) - math.log(801)
        assert r.magnitude_log == pytest.approx(want, rel=1e-13)

    def test_log_domain_odd_sign(self):
        r = moment(Measure.lebesgue(-3.0, -2.0), 801)
        assert r.sign == -1

    @given(st.integers(0, 40), st.floats(-3, -1.1), st.floats(0.05, 1.5))
    def test_even_odd_parity(self, n, lo, width):
        # mass on (-inf, -1): sign of the moment is (-1)^n
        mu = Measure.lebesgue(lo - width, lo)
        assert moment(mu, n).sign == (-1) ** n


class TestDistribution:
    def test_half_interval(self):
        assert distribution(LEB, -1.5) == pytest.approx(0.5)

    def test_below_support(self):
        assert distribution(LEB, -7.0) == 0.0

    def test_right_continuous_at_atom(self):
        assert distribution(UNIT_ATOM, -1.0) == 1.0
        assert distribution(UNIT_ATOM, np.nextafter(-1.0, -2.0)) == 0.0

    def test_total_mass(self):
        mu = Measure(atoms=((0.5, 0.25),), pieces=((-2.0, -1.0, (2.0,)),))
        assert mu.total_mass() == pytest.approx(2.25)

    def test_callable_matches_function(self):
        mu = Measure(atoms=((-1.5, 0.3),), pieces=((-2.0, -1.0, (1.0, 1.0)),), positive=False)
        F = DistributionFunction(mu)
        xs = np.linspace(-2.5, 0.0, 41)
        np.testing.assert_allclose(F(xs), [distribution(mu, x) for x in xs], atol=1e-15)
        assert F(-1.5) == distribution(mu, -1.5)

    @given(st.lists(st.floats(-4, 2), min_size=2, max_size=30))
    def test_monotone_for_positive(self, xs):
        mu = Measure(atoms=((-1.5, 0.3), (0.2, 0.1)), pieces=((-3.0, -2.0, (0.0, -1.0)),))
        F = DistributionFunction(mu)
        xs = np.sort(xs)
        assert np.all(np.diff(F(xs)) >= -1e-15)


class TestRiemannStieltjes:
    def test_square_against_moment(self):
        r = rs_integral(lambda x: x**2, DistributionFunction(LEB), -2.0, -1.0)
        assert abs(r.value - 7 / 3) <= max(r.error_estimate, 1e-12) * 4
        assert r.value == pytest.approx(7 / 3, rel=1e-6)

    @pytest.mark.parametrize("mu", [LEB, UNIT_ATOM, Measure(atoms=((-1.2, 0.7),), pieces=((-2.0, -1.5, (1.0,)),))])
    def test_constant_integrand(self, mu):
        F = DistributionFunction(mu)
        r = rs_integral(lambda x: 1.0, F, -2.5, 0.0)
        assert r.value == pytest.approx(F(0.0) - F(-2.5), abs=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 5, 9])
    def test_single_jump(self, n):
        F = DistributionFunction(Measure.atom(-1.5))
        r = rs_integral(lambda x: x**n, F, -2.0, -1.0)
        assert r.value == pytest.approx((-1.5) ** n, rel=1e-14)

    def test_atom_on_partition_point(self):
        # -1.5 is an edge of the uniform partition of [-2, -1] at every level
        F = DistributionFunction(Measure.atom(-1.5))
        r = rs_integral(lambda x: x**3, F, -2.0, -1.0, refinement=3)
        assert r.value == pytest.approx(-3.375, rel=1e-14)

    def test_non_finite(self):
        with pytest.raises(NonFiniteSample):
            # -1.9375 is the first midpoint tag of the coarsest partition
            rs_integral(lambda x: np.where(x == -1.9375, np.inf, x), DistributionFunction(LEB), -2.0, -1.0)

    def test_bad_refinement(self):
        with pytest.raises(ValueError):
            rs_integral(lambda x: x, DistributionFunction(LEB), -2.0, -1.0, refinement=0)

    def test_estimates_shrink(self):
        F = DistributionFunction(LEB)
        ests = [rs_integral(np.sin, F, -2.0, -1.0, refinement=k).error_estimate for k in range(2, 8)]
        assert all(b <= a / 2 for a, b in zip(ests, ests[1:]))

    @pytest.mark.parametrize("n", [0, 3, 10, 25, 40])
    def test_matches_closed_form(self, n):
        mu = Measure.lebesgue(-3.0, -1.0)
        r = rs_integral(lambda x: x**n, DistributionFunction(mu), -3.0, -1.0, refinement=14)
        assert r.value == pytest.approx(moment(mu, n).value, rel=1e-6)


class TestIntegrationByParts:
    @pytest.mark.parametrize("n", [0, 1, 4, 12])
    def test_monomial(self, n):
        g = np.zeros(n + 1)
        g[n] = 1.0
        assert integration_by_parts_check(g, DistributionFunction(LEB), -2.0, -1.0) < 1e-8

    def test_constant_exact(self):
        mu = Measure(atoms=((-1.5, 0.4),), pieces=((-2.0, -1.0, (1.0, 0.3)),))
        assert integration_by_parts_check([3.0], DistributionFunction(mu), -2.0, -1.0) == 0.0

    def test_atom_inside(self):
        mu = Measure(atoms=((-1.5, 0.4),), pieces=((-2.0, -1.0, (1.0,)),))
        assert integration_by_parts_check([0.0, 1.0, 2.0], DistributionFunction(mu), -2.0, -1.0) < 1e-12

    def test_atom_at_endpoint(self):
        mu = Measure(atoms=((-2.0, 1.0),), pieces=((-2.0, -1.0, (1.0,)),))
        with pytest.raises(CommonDiscontinuity):
            integration_by_parts_check([0.0, 1.0], DistributionFunction(mu), -2.0, -1.0)

    def test_lebesgue_integral_fraction(self):
        # int_{-2}^{-1} (1 + x)(2 - x) dx
        want = Fraction(-(-1) ** 3, 3) + Fraction((-1) ** 2, 2) + 2 * (-1) - (
            Fraction(-(-8), 3) + Fraction(4, 2) + 2 * (-2))
        assert lebesgue_integral([2.0, 1.0, -1.0], LEB, -2.0, -1.0) == pytest.approx(float(want), rel=1e-15)


class TestWeightedMoment:
    @pytest.mark.parametrize("n", [0, 3, 20, 75])
    def test_unit_weight(self, n):
        assert weighted_moment(LEB, lambda x: np.ones_like(x), n) == pytest.approx(moment(LEB, n).value, rel=1e-12)

    @pytest.mark.parametrize("n", [0, 3, 20])
    def test_shift(self, n):
        mu = Measure(atoms=((-1.25, 0.5),), pieces=((-2.0, -1.0, (1.0, 0.1)),))
        assert weighted_moment(mu, lambda x: x, n) == pytest.approx(moment(mu, n + 1).value, rel=1e-12)

    def test_distribution_weight_against_rs(self):
        F = DistributionFunction(LEB)
        # int_{-2}^{-1} x (x + 2) dx = -2/3
        wm = weighted_moment(LEB, F, 1)
        rs = rs_integral(lambda x: x * F(x), F, -2.0, -1.0, refinement=14).value
        assert wm == pytest.approx(-2 / 3, rel=1e-12)
        assert abs(wm - rs) < 1e-6

    def test_nonsmooth_weight_converges(self):
        # int_{-2}^{-1} |x + 1.5| x^2 dx computed piecewise with fractions
        exact = Fraction(0)
        for lo, hi, s in ((Fraction(-2), Fraction(-3, 2), -1), (Fraction(-3, 2), Fraction(-1), 1)):
            anti = lambda x: x**4 / 4 + Fraction(3, 2) * x**3 / 3
            exact += s * (anti(hi) - anti(lo))
        assert weighted_moment(LEB, lambda x: np.abs(x + 1.5), 2) == pytest.approx(float(exact), rel=1e-8)

    def test_overflow_safe(self):
        s, l = weighted_moment_log(Measure.lebesgue(-3.0, -2.0), lambda x: 1.0 + 0 * x, 900)
        assert s == 1 and l == pytest.approx(moment(Measure.lebesgue(-3.0, -2.0), 900).magnitude_log, rel=1e-10)

    def test_non_finite(self):
        with pytest.raises(NonFiniteSample):
            weighted_moment(LEB, lambda x: np.full_like(x, np.nan), 1)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            weighted_moment(LEB, lambda x: x, 1, quad_order=2)


class TestQuadratureRule:
    def test_exact_for_polynomials(self):
        mu = Measure(atoms=((-0.5, 0.25),), pieces=((-2.0, -1.0, (1.0, 0.5)),))
        x, w = quadrature_rule(mu, degree=20)
        for n in (0, 5, 20, 40):
            assert math.fsum(w * x**n) == pytest.approx(moment(mu, n).value, rel=1e-12)

    def test_probe_refinement(self):
        x, w = quadrature_rule(LEB, (lambda t: np.abs(t + 1.3),))
        # int_{-2}^{-1} |x + 1.3| dx = 0.7^2/2 + 0.3^2/2
        assert math.fsum(w * np.abs(x + 1.3)) == pytest.approx(0.29, rel=1e-9)


class TestGrowthCertificate:
    def test_lebesgue_rate(self):
        cert = growth_certificate(LEB, N=60)
        assert isinstance(cert, MomentGrowthCertificate)
        assert 1.8 <= cert.m <= 2.0
        assert cert.holds()

    @pytest.mark.parametrize("n", range(0, 61, 2))
    def test_even_moments_closed_form(self, n):
        assert moment(LEB, n).value == pytest.approx((2 ** (n + 1) - 1) / (n + 1), rel=1e-10)

    def test_unit_atom_bounded(self):
        v = growth_certificate(UNIT_ATOM, N=60)
        assert isinstance(v, Bounded) and v.sup == 1.0

    def test_unit_interval_bounded(self):
        v = growth_certificate(Measure.lebesgue(0.0, 1.0), N=60)
        assert isinstance(v, Bounded) and v.sup == 1.0 and v.argmax == 0

    def test_small_horizon(self):
        with pytest.raises(ValueError):
            growth_certificate(LEB, N=5)

    def test_revalidates(self):
        mu = Measure(atoms=((-1.0, 0.3), (-1.7, 0.2)), pieces=((-2.5, -2.0, (1.0, 0.2)),))
        cert = growth_certificate(mu, N=60)
        assert cert.revalidate(lambda n: moment(mu, n))

    def test_weighted_revalidates(self):
        f = lambda x: 1.0 + np.abs(np.sin(x))
        cert = growth_certificate(LEB, f, N=40)
        assert isinstance(cert, MomentGrowthCertificate)
        assert cert.revalidate(lambda n: EvalResult.from_log(*weighted_moment_log(LEB, f, n)))

    def test_revalidate_detects_tampering(self):
        cert = growth_certificate(LEB, N=60)
        assert not cert.revalidate(lambda n: moment(Measure.lebesgue(-2.0, -1.1), n))

    def test_negated_measure(self):
        # inf of the moments of mu is the sup of the moments of -mu
        mu = Measure.lebesgue(-2.0, -1.5)
        cert = growth_certificate(mu, N=60)
        neg = growth_certificate(-mu, N=60)
        assert isinstance(cert, MomentGrowthCertificate) and isinstance(neg, MomentGrowthCertificate)
        assert neg.m == pytest.approx(cert.m, rel=0.05)

    def test_creeping_sequence_not_certified(self):
        n = np.arange(61)
        v = 2.0 - 1.0 / (n + 1.0)
        assert isinstance(certify_sequence(np.ones(61), np.log(v), 60), Bounded)

    def test_geometric_sequence(self):
        n = np.arange(41)
        cert = certify_sequence(np.ones(41), n * math.log(1.5) + 0.1, 40)
        assert cert.m == pytest.approx(1.5, rel=1e-12) and cert.c == pytest.approx(math.exp(0.1), rel=1e-12)

    @given(st.floats(-3.0, -1.2), st.floats(0.05, 1.0), st.floats(0.1, 3.0))
    def test_parity_and_growth(self, hi, width, eps):
        mu = Measure.lebesgue(hi - width, hi)
        f = lambda x: eps + 0 * x
        signs = np.array([weighted_moment_log(mu, f, n)[0] for n in range(30)])
        assert np.all(signs == (-1) ** np.arange(30))
        evens = [weighted_moment_log(mu, f, n)[1] for n in range(0, 60, 2)]
        assert evens[-1] > evens[len(evens) // 2]


class TestExtractExponents:
    def test_square_skips_odd_exponent(self):
        mu = Measure.lebesgue(-3.0, -2.0)
        assert extract_exponents([ConvexPolynomial([0.0, 0.0, 1.0])], mu, None, 1e-3, 1.01) == [2]

    def test_identity_on_positive_side(self):
        mu = Measure.lebesgue(2.0, 3.0)
        assert extract_exponents([ConvexPolynomial([0.0, 1.0])], mu, None, 1e-3, 1.01) == [1]

    def test_peaking_powers(self):
        pp = peaking_polynomial(-2.5, -1.5)
        mu = Measure.lebesgue(-2.0, -1.0)
        polys = [pp.poly]
        for _ in range(3):
            polys.append(multiply(polys[-1], pp.poly))
        values = [lebesgue_integral(p, mu, -2.0, -1.0) for p in polys]
        m = 1.01
        c = 0.999 * min(v / m**k for k, v in enumerate(values, start=1))
        ns = extract_exponents(polys, mu, None, c, m)
        assert all(1 <= n <= p.degree for n, p in zip(ns, polys))
        assert all(moment(mu, n).value >= c * m**k for k, n in enumerate(ns, start=1))

    def test_hypothesis_failed(self):
        with pytest.raises(HypothesisFailed):
            extract_exponents([ConvexPolynomial([1.0])], LEB, None, 2.0, 1.5)

    def test_constant_cannot_extract(self):
        with pytest.raises(ExtractionFailed):
            extract_exponents([ConvexPolynomial([1.0])], LEB, None, 0.5, 1.1)


class TestMeasureModel:
    def test_overlap(self):
        with pytest.raises(InvalidMeasure):
            Measure(pieces=((-2.0, -1.0, (1.0,)), (-1.5, 0.0, (1.0,))))

    def test_shared_endpoint(self):
        Measure(pieces=((-2.0, -1.0, (1.0,)), (-1.0, 0.0, (1.0,))))

    def test_negative_density(self):
        with pytest.raises(InvalidMeasure):
            Measure.lebesgue(-2.0, -1.0, (0.0, 1.0))

    def test_negative_atom(self):
        with pytest.raises(InvalidMeasure):
            Measure(atoms=((0.0, -1.0),))

    def test_bad_piece(self):
        with pytest.raises(InvalidMeasure):
            Measure.lebesgue(1.0, 1.0)

    def test_json_round_trip(self):
        mu = Measure(atoms=((-1.5, 0.25),), pieces=((-3.0, -2.0, (2.0, 0.5)),))
        back = Measure.from_json(mu.to_json())
        assert back.to_dict() == mu.to_dict()
        assert json.loads(mu.to_json())["pieces"][0]["interval"] == [-3.0, -2.0]

    def test_support(self):
        mu = Measure(atoms=((0.5, 0.0), (-4.0, 1.0)), pieces=((-2.0, -1.0, (1.0,)),))
        assert mu.support_bounds == (-4.0, -1.0)
        assert mu.max_abs_support == 4.0

    def test_variation_from(self):
        mu = Measure(atoms=((-0.5, -0.25),), pieces=((-2.0, 0.0, (1.0,)),), positive=False)
        assert mu.variation_from(-1.0) == pytest.approx(1.25)

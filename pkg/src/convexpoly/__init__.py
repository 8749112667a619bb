"""Approximation by convex-polynomials: polynomials whose coefficients lie on the probability simplex."""

from .approx import (ApproximationResult, ConvexPolynomialRegressor, DensityReport, QuadraticModel,
                     best_l2, best_uniform, build_quadratic_model, chebyshev_grid, density_probe,
                     weighted_density_probe)
from .cyclic import (CyclicityVerdict, DiscretizedSpace, convex_cyclic_test, discretize,
                     invariant_set_probe, odd_power_test, orbit_sup, scalar_closure_demo)
from .errors import ConvexPolyError
from .expr import Expression, parse_expression
from .measures import (Bounded, DistributionFunction, Measure, MomentGrowthCertificate, Piece,
                       growth_certificate, moment, rs_integral, weighted_moment)
from .peaking import PeakingPolynomial, min_even_degree, peaking_polynomial, verify_peak
from .polycore import ConvexPolynomial, EvalResult, compose, evaluate, make_convex, multiply
from .series import (ConvexPowerSeries, combine, exp_series, fit_convex_series, modulus_bound_check,
                     resolvent_series, truncate_to_convex)

__version__ = "0.1.0"

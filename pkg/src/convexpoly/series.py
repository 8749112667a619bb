"""Convex-power series: ``sum_n c_n x**n`` with ``c_n >= 0`` and ``sum_n c_n = 1``.

A series is a lazy coefficient rule plus an analytic bound on the mass
left after degree ``N``.  Truncation folds that mass into the constant
term, so the result is again a convex-polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .approx import ApproximationResult, QuadraticModel, best_l2
from .errors import BadDomain, BadParameter, UnsupportedComposition
from .polycore import ConvexPolynomial, make_convex

MASS_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class ConvexPowerSeries:
    """Coefficients from ``block(N) -> [c_0, ..., c_N]``; ``tail(N)`` bounds the rest.

    ``block`` must be pure; results are cached per instance.
    """

    block: Callable[[int], np.ndarray]
    tail: Callable[[int], float]
    name: str = "series"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def coeffs(self, N: int) -> np.ndarray:
        if N < 0:
            raise ValueError("N must be >= 0")
        hit = self._cache.get("block")
        if hit is None or hit.size <= N:
            hit = np.asarray(self.block(max(N, 2 * (0 if hit is None else hit.size))), dtype=float)
            hit.setflags(write=False)
            self._cache["block"] = hit
        return hit[: N + 1]

    def coeff(self, n: int) -> float:
        return float(self.coeffs(n)[n])

    def partial_mass(self, N: int) -> float:
        return math.fsum(self.coeffs(N))

    def tail_bound(self, N: int) -> float:
        """Analytic upper bound on ``1 - partial_mass(N)``."""
        return float(self.tail(N))

    def __call__(self, x, N: int = 200):
        """Partial sum of degree ``N`` (no folding)."""
        x = np.asarray(x)
        out = np.zeros_like(x, dtype=np.result_type(x, float))
        for c in self.coeffs(N)[::-1]:
            out = out * x + c
        return out if out.ndim else out[()]

    def check(self, degrees: Sequence[int] = (5, 10, 20, 50)) -> bool:
        """Sampled invariants: nonnegative coefficients, mass at most one, tail within bound."""
        top = max(degrees)
        if np.any(self.coeffs(top) < 0):
            return False
        masses = [self.partial_mass(N) for N in sorted(degrees)]
        if any(b < a - MASS_SLACK for a, b in zip(masses, masses[1:])):
            return False
        rounding = 4 * np.finfo(float).eps
        return all(m <= 1 + MASS_SLACK and 1 - m <= self.tail_bound(N) + rounding
                   for N, m in zip(sorted(degrees), masses))


def _exp_block(N: int) -> np.ndarray:
    n = np.arange(N + 1)
    return np.exp(-1.0 - np.array([math.lgamma(k + 1) for k in n]))


def _exp_tail(N: int) -> float:
    if N >= 2:
        return math.exp(-1.0 - math.lgamma(N + 1)) / N
    return 1.0 - math.fsum(_exp_block(N))


def exp_series() -> ConvexPowerSeries:
    """``exp(x - 1) = sum_n e^{-1} x^n / n!``."""
    return ConvexPowerSeries(_exp_block, _exp_tail, "exp")


def resolvent_series(a: float) -> ConvexPowerSeries:
    """``(1 - a) / (x - a) = sum_n (a - 1) a^{-(n+1)} x^n`` for ``a > 1``."""
    a = float(a)
    if not (math.isfinite(a) and a > 1.0):
        raise BadParameter(f"resolvent series needs a > 1, got {a!r}")

    def block(N):
        return (a - 1.0) * np.power(a, -(np.arange(N + 1) + 1.0))

    return ConvexPowerSeries(block, lambda N: a ** -(N + 1.0), f"resolvent({a!r})")


def constant_series() -> ConvexPowerSeries:
    """The constant 1."""
    return from_polynomial(ConvexPolynomial([1.0]))


def from_polynomial(p: ConvexPolynomial) -> ConvexPowerSeries:
    """A convex-polynomial as a series with zero tail."""
    c = p.coeffs

    def block(N):
        out = np.zeros(N + 1)
        k = min(N + 1, c.size)
        out[:k] = c[:k]
        return out

    return ConvexPowerSeries(block, lambda N: 0.0 if N >= p.degree else 1.0 - math.fsum(c[: N + 1]),
                             f"poly{tuple(c.tolist())}")


def truncate_to_convex(s: ConvexPowerSeries, N: int) -> ConvexPolynomial:
    """Degree-``N`` truncation with the missing mass added to the constant term.

    On ``[-1, 1]`` it differs from the series by at most twice the tail.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    c = np.array(s.coeffs(N), dtype=float)
    c[0] += max(0.0, 1.0 - math.fsum(c))
    return make_convex(c)


# ------------------------------------------------------------ combinations


def mix(series: Sequence[ConvexPowerSeries], weights: Sequence[float]) -> ConvexPowerSeries:
    """Convex combination ``sum_i w_i s_i``."""
    w = make_convex(weights, "reject").coeffs
    if len(series) < w.size or len(series) != len(weights):
        raise ValueError("one weight per series is required")
    w = np.pad(w, (0, len(series) - w.size))
    pairs = [(wi, s) for wi, s in zip(w, series) if wi > 0]

    def block(N):
        return sum(wi * s.coeffs(N) for wi, s in pairs)

    def tail(N):
        return sum(wi * s.tail_bound(N) for wi, s in pairs)

    return ConvexPowerSeries(block, tail, "mix")


def product(s: ConvexPowerSeries, t: ConvexPowerSeries) -> ConvexPowerSeries:
    """Cauchy product; the tail after ``N`` is at most the sum of both tails after ``N // 2``."""

    def block(N):
        return np.convolve(s.coeffs(N), t.coeffs(N))[: N + 1]

    def tail(N):
        return min(1.0, s.tail_bound(N // 2) + t.tail_bound(N // 2))

    return ConvexPowerSeries(block, tail, f"({s.name})*({t.name})")


def compose(p, s: ConvexPowerSeries) -> ConvexPowerSeries:
    """``p(s(x))`` for a convex-polynomial ``p`` (finite reorganization).

    Series-into-series composition is not supported.
    """
    if isinstance(p, ConvexPowerSeries):
        raise UnsupportedComposition("composing a series with a series is not supported")
    if not isinstance(p, ConvexPolynomial):
        raise TypeError("the outer function must be a ConvexPolynomial")
    a = p.coeffs

    def block(N):
        base = s.coeffs(N)
        out = np.zeros(N + 1)
        power = np.zeros(N + 1)
        power[0] = 1.0
        for k, ak in enumerate(a):
            if k:
                power = np.convolve(power, base)[: N + 1]
            out += ak * power
        return out

    def tail(N):
        # the k-th power keeps all but k * tail(N // k) of its mass
        return min(1.0, sum(ak * k * s.tail_bound(N // k) for k, ak in enumerate(a) if k))

    return ConvexPowerSeries(block, tail, f"poly∘({s.name})")


def combine(operands: Sequence, mode: str = "mix", weights: Optional[Sequence[float]] = None) -> ConvexPowerSeries:
    """Dispatcher: ``mix`` (with weights), ``product`` (any number), ``compose`` (outer, inner)."""
    operands = list(operands)
    if mode == "mix":
        if weights is None:
            raise ValueError("mix needs weights")
        return mix(operands, weights)
    if mode == "product":
        out = operands[0]
        for s in operands[1:]:
            out = product(out, s)
        return out
    if mode == "compose":
        if len(operands) != 2:
            raise ValueError("compose takes (outer, inner)")
        return compose(operands[0], operands[1])
    raise ValueError(f"unknown mode {mode!r}")


# ------------------------------------------------------------ modulus bound


def _complex_horner(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z, dtype=complex)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def modulus_bound_check(p: ConvexPolynomial, c: float, samples: int = 4096) -> float:
    """``max |p(z)| - p(c)`` over a polar grid of the closed disk of radius ``c``.

    Nonnegative coefficients give ``|p(z)| <= p(|z|) <= p(c)``, so the result
    is at most rounding noise (it is zero when ``z = c`` is on the grid).
    """
    if not c > 0:
        raise ValueError("c must be > 0")
    side = max(2, int(math.isqrt(max(samples, 4))))
    r = np.linspace(0.0, c, side)
    theta = np.linspace(0.0, 2 * np.pi, side, endpoint=False)
    z = (r[:, None] * np.exp(1j * theta[None, :])).ravel()
    return float(np.max(np.abs(_complex_horner(p.coeffs, z))) - p(c))


# ------------------------------------------------------------ fitting


@dataclass(frozen=True)
class SeriesFit:
    poly: ConvexPolynomial
    residual: float  # root-mean-square over the samples
    threshold: float
    verdict: str  # "Representation-consistent" | "NoRepresentation-consistent"
    solver: ApproximationResult

    def to_dict(self) -> dict:
        return {
            "coeffs": [float(c) for c in self.poly.coeffs],
            "residual": self.residual,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "status": self.solver.status,
            "iterations": self.solver.iterations,
            "gap": self.solver.gap,
        }


def fit_convex_series(x, y, N: int, threshold: Optional[float] = None, tol: float = 1e-14,
                      max_iter: int = 5000) -> SeriesFit:
    """Least-squares convex-polynomial fit of degree ``N`` to samples on ``[-1, inf)``.

    The verdict compares the RMS residual with ``threshold`` (default
    ``1e-6 * max(1, max|y|)``).
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape or x.size == 0:
        raise ValueError("x and y must be nonempty and of equal length")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("samples must be finite")
    if np.any(x < -1.0):
        raise BadDomain(f"sample at x = {float(x.min())!r} lies below -1")
    if np.unique(x).size < N + 1:
        raise ValueError(f"need at least {N + 1} distinct sample points")
    if threshold is None:
        threshold = 1e-6 * max(1.0, float(np.max(np.abs(y))))
    model = QuadraticModel.from_samples(x, y, N)
    res = best_l2(model, tol=tol, max_iter=max_iter)
    rms = float(np.sqrt(np.mean((res.poly(x) - y) ** 2)))
    verdict = "Representation-consistent" if rms <= threshold else "NoRepresentation-consistent"
    return SeriesFit(res.poly, rms, float(threshold), verdict, res)

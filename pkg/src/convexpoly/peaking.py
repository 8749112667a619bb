"""Peaking convex-polynomials on ``[a, 0]`` with the peak at ``x0 <= -1``.

For ``x0 < -1`` the family is

    p(x) = (1 - alpha + r*alpha*x0) - r*alpha*x0 * x**n + alpha * x**(n+1),
    r = (n + 1) / n,

with ``n`` even.  ``n`` is the smallest even integer making
``x0**(n+1) - (n+1)*x0 + n`` negative (which forces ``p(x0) > 1``) and
``alpha`` is half the tighter of the two bounds that keep the constant
coefficient and ``p(a)`` positive.  For ``x0 = -1`` the line
``(x - a) / (1 - a)`` is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ._logmath import LOG_SWITCH
from .errors import BadEndpoints, ConvexPolyError, DegenerateAlpha, NotBelowMinusOne, SearchExhausted
from .polycore import ConvexPolynomial, make_convex

DEGREE_SEARCH_CAP = 10_000


def _condition(x0: float, n: int) -> float:
    """``x0**(n+1) - (n+1)*x0 + n``; -inf once the power overflows."""
    if (n + 1) * math.log(abs(x0)) > 700:
        return -math.inf
    return x0 ** (n + 1) - (n + 1) * x0 + n


def min_even_degree(x0: float, cap: int = DEGREE_SEARCH_CAP) -> int:
    """Smallest even ``n >= 2`` with ``x0**(n+1) - (n+1)*x0 + n < 0``."""
    if not x0 < -1:
        raise NotBelowMinusOne(f"x0 = {x0!r} is not below -1")
    for n in range(2, cap + 1, 2):
        if _condition(x0, n) < 0:
            return n
    raise SearchExhausted(f"no even n <= {cap} works for x0 = {x0!r}; x0 is too close to -1")


@dataclass(frozen=True)
class PeakingPolynomial:
    a: float
    x0: float
    n: Optional[int]
    alpha: Optional[float]
    # (exponent, coefficient) pairs; may leave the simplex after with_alpha()
    terms: tuple = field(repr=False)
    peak_value: float = math.nan

    @property
    def linear(self) -> bool:
        return self.n is None

    @property
    def raw_coeffs(self) -> np.ndarray:
        deg = max(k for k, _ in self.terms)
        c = np.zeros(deg + 1)
        for k, v in self.terms:
            c[k] += v
        return c

    @property
    def poly(self) -> Optional[ConvexPolynomial]:
        """The convex-polynomial, or ``None`` if the coefficients left the simplex."""
        try:
            return make_convex(self.raw_coeffs, "reject")
        except ConvexPolyError:
            return None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k, v in self.terms:
            out = out + v * x**k
        return out

    def with_alpha(self, alpha: float) -> "PeakingPolynomial":
        """Same ``n``, different step size; no feasibility check."""
        if self.linear:
            raise ValueError("the endpoint case has no alpha")
        return replace(
            self,
            alpha=alpha,
            terms=_terms(self.x0, self.n, alpha),
            peak_value=closed_form_peak(self.x0, self.n, alpha),
        )

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "x0": self.x0,
            "n": self.n,
            "alpha": self.alpha,
            "peak_value": self.peak_value,
            "coeffs": [float(c) for c in self.raw_coeffs],
        }


def _terms(x0: float, n: int, alpha: float) -> tuple:
    r = (n + 1) / n
    return (
        (0, 1.0 - alpha + r * alpha * x0),
        (n, -r * alpha * x0),
        (n + 1, alpha),
    )


def closed_form_peak(x0: float, n: int, alpha: float) -> float:
    """``p(x0) = 1 - (alpha/n) * (x0**(n+1) - (n+1)*x0 + n)``."""
    return 1.0 - (alpha / n) * (x0 ** (n + 1) - (n + 1) * x0 + n)


def factored_peak(x0: float, n: int, alpha: float) -> float:
    """Same value through ``(x0 - 1)**2 * (x0**(n-1) + 2*x0**(n-2) + ... + n)``."""
    inner = 0.0
    for j in range(1, n + 1):  # Horner over coefficients 1, 2, ..., n
        inner = inner * x0 + j
    return 1.0 - (alpha / n) * (x0 - 1.0) ** 2 * inner


def alpha_bounds(a: float, x0: float, n: int) -> tuple[float, float]:
    """(bound keeping the constant coefficient positive, bound keeping p(a) > 0)."""
    r = (n + 1) / n
    alpha1 = 1.0 / (1.0 - r * x0)
    # K = |a|^n (r|x0| - |a|) + (r x0 - 1) since a < 0 and n is even
    lead = r * abs(x0) - abs(a)
    log_an = n * math.log(abs(a))
    if log_an < LOG_SWITCH:
        K = math.exp(log_an) * lead + (r * x0 - 1.0)
        alpha2 = math.inf if K >= 0 else -1.0 / K
    elif lead > 0:
        alpha2 = math.inf
    elif lead < 0:
        alpha2 = math.exp(-log_an - math.log(-lead))
    else:
        alpha2 = 1.0 / (1.0 - r * x0)
    return alpha1, alpha2


def peaking_polynomial(a: float, x0: float) -> PeakingPolynomial:
    if x0 > -1 or not a < x0:
        raise BadEndpoints(f"need a < x0 <= -1, got a = {a!r}, x0 = {x0!r}")
    if x0 == -1:
        slope = 1.0 / (1.0 - a)
        terms = ((0, -a * slope), (1, slope))
        return PeakingPolynomial(a, x0, None, None, terms, (x0 - a) * slope)
    n = min_even_degree(x0)
    alpha1, alpha2 = alpha_bounds(a, x0, n)
    alpha = 0.5 * min(alpha1, alpha2)
    peak = closed_form_peak(x0, n, alpha) if alpha > 0 else 1.0
    if not peak > 1.0:
        # the excess of p(x0) over 1 is below double resolution
        raise DegenerateAlpha(f"alpha = {alpha!r} is degenerate for a = {a!r}, x0 = {x0!r}, n = {n}")
    return PeakingPolynomial(a, x0, n, alpha, _terms(x0, n, alpha), peak)


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    detail: str = ""
    witness: Optional[float] = None

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "witness": self.witness}


@dataclass(frozen=True)
class PeakReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _first_failure(mask, x):
    bad = np.flatnonzero(~mask)
    return (False, float(x[bad[0]])) if bad.size else (True, None)


def _sign_changes(values, x, tol):
    """Locations where the sign of ``values`` flips, ignoring ``|values| <= tol``.

    Each flip is placed at the zero crossing of the raw values between the
    two kept samples that bracket it (linear interpolation).
    """
    s = np.where(values > tol, 1, np.where(values < -tol, -1, 0))
    idx = np.flatnonzero(s)
    out = []
    for i, j in zip(idx[:-1], idx[1:]):
        if s[i] == s[j]:
            continue
        seg = values[i : j + 1]
        k = i + int(np.flatnonzero(np.sign(seg[1:]) != np.sign(seg[:-1]))[0])
        v0, v1 = values[k], values[k + 1]
        t = v0 / (v0 - v1) if v0 != v1 else 0.5
        out.append(float(x[k] + t * (x[k + 1] - x[k])))
    return np.array(out)


def _noise_tol(diff, p_scale, h, order):
    """Sign tolerance: 1e-12 of the quantity's scale, never below rounding noise."""
    eps = np.finfo(float).eps
    return max(1e-12 * float(np.max(np.abs(diff))), 64 * eps * p_scale / h**order)


def verify_peak(pp: PeakingPolynomial, grid_size: int = 10_001) -> PeakReport:
    """Check the seven peaking properties on a uniform grid.

    Failures are reported, not raised; each failed check names a witness
    grid point where one exists.
    """
    if grid_size < 100:
        raise ValueError("grid_size must be >= 100")
    if pp.linear:
        return _verify_linear(pp, grid_size)

    a, x0, n, alpha = pp.a, pp.x0, pp.n, pp.alpha
    x = np.linspace(a, 0.0, grid_size)
    h = x[1] - x[0]
    p = pp(x)
    p0 = float(pp(x0))
    scale = max(1.0, float(np.max(np.abs(p))))
    checks = []

    c = pp.raw_coeffs
    convex = bool(np.all(c >= 0) and abs(math.fsum(c) - 1.0) <= 1e-10)
    neg = np.flatnonzero(c < 0)
    checks.append(PropertyCheck(
        "1_convex", convex,
        "coefficients nonnegative and summing to 1" if convex else f"negative coefficient at index {neg.tolist()}",
    ))

    # centred differences, step = grid cell
    d1 = (pp(x + h) - pp(x - h)) / (2 * h)
    d2 = (pp(x + h) - 2 * pp(x) + pp(x - h)) / h**2
    tol1 = _noise_tol(d1, scale, h, 1)
    tol2 = _noise_tol(d2, scale, h, 2)

    interior = (x > a + h / 2) & (x < -h / 2)
    xi = x[interior]
    flips = _sign_changes(d1[interior], xi, tol1)
    crit_ok = flips.size == 1 and abs(flips[0] - x0) <= h
    checks.append(PropertyCheck(
        "2_critical_points", bool(crit_ok),
        f"derivative sign changes at {flips.tolist()}; expected one near x0 = {x0}",
        None if crit_ok or not flips.size else float(flips[0]),
    ))

    left = x < x0 - h / 2
    right = (x > x0 + h / 2) & (x < 0)
    ok_l, w_l = _first_failure(d1[left] > -tol1, x[left])
    ok_r, w_r = _first_failure(d1[right] < tol1, x[right])
    checks.append(PropertyCheck(
        "3_monotone", ok_l and ok_r,
        "increasing on [a, x0), decreasing on (x0, 0)",
        w_l if not ok_l else w_r,
    ))

    away = np.abs(x - x0) > h / 2
    ok_pos, w_pos = _first_failure(p[away] > 0, x[away])
    ok_max, w_max = _first_failure(p[away] < p0, x[away])
    argmax_ok = abs(x[np.argmax(p)] - x0) <= h
    checks.append(PropertyCheck(
        "4_absolute_max", ok_pos and ok_max and argmax_ok,
        f"0 < p(x) < p(x0) = {p0!r} off x0; grid argmax at {float(x[np.argmax(p)])!r}",
        w_pos if not ok_pos else w_max,
    ))

    x_infl = (n - 1) / n * x0
    flips2 = _sign_changes(d2[interior], xi, tol2)
    s_left = d2[interior][xi < x_infl - h]
    infl_ok = (
        flips2.size == 1
        and abs(flips2[0] - x_infl) <= h
        and bool(np.all(s_left < tol2))
    )
    checks.append(PropertyCheck(
        "5_concavity", bool(infl_ok),
        f"second-difference sign changes at {flips2.tolist()}; expected one near {x_infl!r}",
        None if infl_ok or not flips2.size else float(flips2[0]),
    ))

    direct = closed_form_peak(x0, n, alpha)
    factored = factored_peak(x0, n, alpha)
    rel = lambda u, v: abs(u - v) / max(abs(u), abs(v), 1e-300)
    form_ok = rel(direct, factored) <= 1e-10 and rel(direct, p0) <= 1e-10 and rel(pp.peak_value, p0) <= 1e-10
    checks.append(PropertyCheck(
        "6_peak_value", form_ok,
        f"p(x0) = {p0!r}, direct form {direct!r}, factored form {factored!r}",
    ))

    cond = x0 ** (n + 1) - (n + 1) * x0 + n
    if cond < 0:
        ok7 = p0 > 1
        detail = f"condition {cond!r} < 0 so p(x0) = {p0!r} must exceed 1"
    else:
        ok7 = True
        detail = f"condition {cond!r} >= 0; property vacuous"
    checks.append(PropertyCheck("7_peak_exceeds_one", bool(ok7), detail))
    return PeakReport(tuple(checks))


def _verify_linear(pp: PeakingPolynomial, grid_size: int) -> PeakReport:
    a, x0 = pp.a, pp.x0
    x = np.linspace(a, x0, grid_size)
    h = x[1] - x[0]
    p = pp(x)
    p0 = float(pp(x0))
    c = pp.raw_coeffs
    convex = bool(np.all(c >= 0) and abs(math.fsum(c) - 1.0) <= 1e-10)
    d1 = (pp(x + h) - pp(x - h)) / (2 * h)
    ok_inc, w_inc = _first_failure(d1 > 0, x)
    away = np.abs(x - x0) > h / 2
    ok_pos, w_pos = _first_failure((p[away] >= 0) & (p[away] < p0), x[away])
    na = "not applicable to the endpoint peak (x0 = -1)"
    return PeakReport((
        PropertyCheck("1_convex", convex, "linear (x - a)/(1 - a)"),
        PropertyCheck("2_critical_points", ok_inc, "no critical points: constant positive slope", w_inc),
        PropertyCheck("3_monotone", ok_inc, "increasing on [a, -1]", w_inc),
        PropertyCheck("4_absolute_max", ok_pos, f"0 <= p(x) < p(-1) = {p0!r} on [a, -1)", w_pos),
        PropertyCheck("5_concavity", True, na),
        PropertyCheck("6_peak_value", abs(p0 - pp.peak_value) <= 1e-12, f"p(-1) = {p0!r}"),
        PropertyCheck("7_peak_exceeds_one", True, na),
    ))


def sample_curve(pp: PeakingPolynomial, points: int = 1001):
    """(x, p(x)) samples over the verification interval."""
    hi = pp.x0 if pp.linear else 0.0
    x = np.linspace(pp.a, hi, points)
    return x, pp(x)

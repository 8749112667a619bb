"""Finite measures on the line: atoms plus piecewise-polynomial densities.

Provides exact moments, the right-continuous distribution function, a
Riemann-Stieltjes integrator, Gauss-Legendre weighted moments and
moment-growth certificates (finite evidence that ``sup_n int x^n f dmu``
is infinite).
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as P

from ._logmath import LOG_SWITCH, exp_signed, power_terms, signed_log, signed_logsumexp
from .errors import CommonDiscontinuity, ExtractionFailed, HypothesisFailed, InvalidMeasure, NonFiniteSample
from .polycore import ConvexPolynomial, EvalResult

POSITIVITY_SAMPLES = 1000
# order doubling stops here; refinement continues by splitting into panels
ORDER_CAP = 256
PANEL_CAP = 256


@dataclass(frozen=True, eq=False)
class Piece:
    lower: float
    upper: float
    density: np.ndarray  # ascending power coefficients

    def __post_init__(self):
        d = np.trim_zeros(np.atleast_1d(np.asarray(self.density, dtype=float)), "b")
        if d.size == 0:
            d = np.zeros(1)
        d.setflags(write=False)
        object.__setattr__(self, "density", d)
        object.__setattr__(self, "lower", float(self.lower))
        object.__setattr__(self, "upper", float(self.upper))
        if not (np.isfinite(self.lower) and np.isfinite(self.upper) and self.lower < self.upper):
            raise InvalidMeasure(f"piece needs finite l < u, got [{self.lower}, {self.upper}]")
        if not np.all(np.isfinite(d)):
            raise InvalidMeasure("density coefficients must be finite")

    @property
    def degree(self) -> int:
        return self.density.size - 1

    @property
    def is_zero(self) -> bool:
        return not np.any(self.density)

    def __call__(self, x):
        return P.polyval(x, self.density)


@dataclass(frozen=True, eq=False)
class Measure:
    """Weighted atoms plus polynomial densities on non-overlapping intervals.

    ``positive`` asserts nonnegativity; it is checked on construction
    (weights, and the density at 1000 samples per piece).
    """

    atoms: tuple = ()
    pieces: tuple = ()
    positive: bool = True

    def __post_init__(self):
        atoms = tuple((float(x), float(w)) for x, w in self.atoms)
        pieces = tuple(p if isinstance(p, Piece) else Piece(*p) for p in self.pieces)
        pieces = tuple(sorted(pieces, key=lambda p: p.lower))
        for x, w in atoms:
            if not (math.isfinite(x) and math.isfinite(w)):
                raise InvalidMeasure("atoms must be finite")
        for p, q in zip(pieces[:-1], pieces[1:]):
            if p.upper > q.lower:
                raise InvalidMeasure(f"pieces [{p.lower}, {p.upper}] and [{q.lower}, {q.upper}] overlap")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "pieces", pieces)
        if self.positive:
            if any(w < 0 for _, w in atoms):
                raise InvalidMeasure("negative atom weight in a positive measure")
            for p in pieces:
                s = np.linspace(p.lower, p.upper, POSITIVITY_SAMPLES)
                if np.any(p(s) < 0):
                    raise InvalidMeasure(f"density negative on [{p.lower}, {p.upper}]")

    @classmethod
    def lebesgue(cls, lower: float, upper: float, density: Sequence[float] = (1.0,)) -> "Measure":
        return cls(pieces=(Piece(lower, upper, density),))

    @classmethod
    def atom(cls, x: float, weight: float = 1.0) -> "Measure":
        return cls(atoms=((x, weight),), positive=weight >= 0)

    @classmethod
    def from_atoms(cls, locations, weights) -> "Measure":
        weights = np.asarray(weights, dtype=float)
        return cls(
            atoms=tuple(zip(np.asarray(locations, dtype=float).tolist(), weights.tolist())),
            positive=bool(np.all(weights >= 0)),
        )

    def scaled(self, factor: float) -> "Measure":
        return Measure(
            atoms=tuple((x, factor * w) for x, w in self.atoms),
            pieces=tuple(Piece(p.lower, p.upper, factor * p.density) for p in self.pieces),
            positive=self.positive and factor >= 0,
        )

    def __neg__(self):
        return self.scaled(-1.0)

    @property
    def breakpoints(self) -> np.ndarray:
        pts = [x for x, _ in self.atoms]
        for p in self.pieces:
            pts += [p.lower, p.upper]
        return np.unique(pts)

    @property
    def support_bounds(self) -> tuple[float, float]:
        live = [x for x, w in self.atoms if w != 0]
        for p in self.pieces:
            if not p.is_zero:
                live += [p.lower, p.upper]
        if not live:
            return (math.nan, math.nan)
        return (min(live), max(live))

    @property
    def max_abs_support(self) -> float:
        lo, hi = self.support_bounds
        return max(abs(lo), abs(hi)) if math.isfinite(lo) else 0.0

    def total_mass(self) -> float:
        return distribution(self, math.inf)

    def variation_from(self, threshold: float) -> float:
        """``|mu|([threshold, inf))``; densities integrated in absolute value."""
        total = math.fsum(abs(w) for x, w in self.atoms if x >= threshold)
        for p in self.pieces:
            lo = max(p.lower, threshold)
            if lo < p.upper and not p.is_zero:
                t, w = _leggauss(max(8, p.degree + 2))
                x = 0.5 * (p.upper - lo) * t + 0.5 * (p.upper + lo)
                total += 0.5 * (p.upper - lo) * float(np.sum(w * np.abs(p(x))))
        return total

    def to_dict(self) -> dict:
        return {
            "atoms": [[x, w] for x, w in self.atoms],
            "pieces": [
                {"interval": [p.lower, p.upper], "density": [float(c) for c in p.density]}
                for p in self.pieces
            ],
            "positive": self.positive,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Measure":
        pieces = tuple(
            Piece(pc["interval"][0], pc["interval"][1], pc.get("density", [1.0]))
            for pc in data.get("pieces", [])
        )
        return cls(
            atoms=tuple(tuple(a) for a in data.get("atoms", [])),
            pieces=pieces,
            positive=bool(data.get("positive", True)),
        )

    @classmethod
    def from_json(cls, text: str) -> "Measure":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@lru_cache(maxsize=64)
def _leggauss(q: int):
    t, w = np.polynomial.legendre.leggauss(q)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def _piece_nodes(piece: Piece, q: int, panels: int = 1):
    """Composite Gauss-Legendre nodes on the piece, weights already times the density."""
    t, w = _leggauss(q)
    edges = np.linspace(piece.lower, piece.upper, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (half[:, None] * t + mid[:, None]).ravel()
    wx = (half[:, None] * w).ravel()
    return x, wx * piece(x)


def _schedule(q0: int):
    """Refinement levels (order, panels): double the order up to a cap, then the panels."""
    q, panels = q0, 1
    yield q, panels
    while q < ORDER_CAP:
        q *= 2
        yield q, panels
    while panels < PANEL_CAP:
        panels *= 2
        yield q, panels


def _vectorized(f: Callable, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
        if y.ndim == 0:
            return np.full(x.shape, float(y))
    except (TypeError, ValueError):
        pass
    return np.array([float(f(v)) for v in x])


def _antiderivatives(mu: Measure):
    return [(p, P.polyint(p.density)) for p in mu.pieces]


# ---------------------------------------------------------------- moments


def _moment_terms(mu: Measure, n: int):
    """Signed log terms whose sum is the n-th moment."""
    signs, logs = [], []
    for x, w in mu.atoms:
        if w == 0:
            continue
        s, l = power_terms(x, [n])
        signs.append(np.sign(w) * s[0])
        logs.append(math.log(abs(w)) + l[0])
    for p in mu.pieces:
        for j, d in enumerate(p.density):
            if d == 0:
                continue
            m = n + j + 1
            for end, sgn in ((p.upper, 1.0), (p.lower, -1.0)):
                s, l = power_terms(end, [m])
                signs.append(sgn * np.sign(d) * s[0])
                logs.append(math.log(abs(d) / m) + l[0])
    return np.array(signs), np.array(logs)


def moment(mu: Measure, n: int) -> EvalResult:
    """Exact n-th moment ``int x^n dmu`` from antiderivatives.

    Computed directly while every term fits in a double, otherwise as a
    sign-tracked log-sum-exp.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    signs, logs = _moment_terms(mu, n)
    if logs.size == 0:
        return EvalResult.from_value(0.0)
    if np.max(logs) < LOG_SWITCH:
        terms = [w * x**n for x, w in mu.atoms]
        for p in mu.pieces:
            for j, d in enumerate(p.density):
                m = n + j + 1
                terms.append(d * (p.upper**m - p.lower**m) / m)
        return EvalResult.from_value(math.fsum(terms))
    return EvalResult.from_log(*signed_logsumexp(logs, signs))


def distribution(mu: Measure, x: float) -> float:
    """``F(x) = mu((-inf, x])``, right-continuous at atoms."""
    terms = [w for loc, w in mu.atoms if loc <= x]
    for p in mu.pieces:
        if x <= p.lower:
            continue
        anti = P.polyint(p.density)
        hi = min(x, p.upper)
        terms.append(P.polyval(hi, anti) - P.polyval(p.lower, anti))
    return math.fsum(terms)


class DistributionFunction:
    """Callable ``F`` of a measure, with a thread-safe scalar cache."""

    def __init__(self, source: Measure):
        self.source = source
        self._anti = _antiderivatives(source)
        self._cache: dict = {}
        self._lock = threading.Lock()

    def _eval(self, x: float) -> float:
        terms = [w for loc, w in self.source.atoms if loc <= x]
        for p, anti in self._anti:
            if x <= p.lower:
                continue
            terms.append(P.polyval(min(x, p.upper), anti) - P.polyval(p.lower, anti))
        return math.fsum(terms)

    def __call__(self, x):
        if np.ndim(x) == 0:
            x = float(x)
            with self._lock:
                hit = self._cache.get(x)
            if hit is None:
                hit = self._eval(x)
                with self._lock:
                    self._cache[x] = hit
            return hit
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for loc, w in self.source.atoms:
            out += np.where(x >= loc, w, 0.0)
        for p, anti in self._anti:
            clipped = np.clip(x, p.lower, p.upper)
            out += P.polyval(clipped, anti) - P.polyval(p.lower, anti)
        return out

    def jumps(self):
        return self.source.atoms


# ------------------------------------------------- Riemann-Stieltjes integrals


@dataclass(frozen=True)
class RSResult:
    value: float
    error_estimate: float
    cells: int


def _rs_sum(g, F: DistributionFunction, a: float, b: float, cells: int) -> float:
    edges = np.linspace(a, b, cells + 1)
    tags = 0.5 * (edges[:-1] + edges[1:])
    # a jump inside (x_{k-1}, x_k] is tagged at the atom itself
    for loc, w in F.jumps():
        if a < loc <= b and w != 0:
            k = min(int(np.searchsorted(edges, loc, side="left")) - 1, cells - 1)
            tags[max(k, 0)] = loc
    gv = _vectorized(g, tags)
    if not np.all(np.isfinite(gv)):
        bad = tags[~np.isfinite(gv)][0]
        raise NonFiniteSample(f"g is not finite at tag {bad!r}")
    dF = np.diff(F(edges))
    return math.fsum(gv * dF)


def rs_integral(g: Callable, F: DistributionFunction, a: float, b: float,
                refinement: int = 12, base_cells: int = 8) -> RSResult:
    """Riemann-Stieltjes sums of ``g dF`` over ``[a, b]`` on doubling uniform partitions.

    Tags are cell midpoints, except that a cell containing an atom of F is
    tagged at the atom.  Returns the finest sum and, as error estimate, its
    difference from the previous level.
    """
    if refinement < 1:
        raise ValueError("refinement must be >= 1")
    if not a < b:
        raise ValueError("need a < b")
    prev = _rs_sum(g, F, a, b, base_cells)
    cells = base_cells
    for _ in range(refinement):
        cells *= 2
        cur = _rs_sum(g, F, a, b, cells)
        err = abs(cur - prev)
        prev = cur
    return RSResult(prev, err, cells)


def _as_poly_coeffs(g) -> np.ndarray:
    if isinstance(g, ConvexPolynomial):
        return np.asarray(g.coeffs, dtype=float)
    if isinstance(g, np.polynomial.Polynomial):
        return np.asarray(g.coef, dtype=float)
    return np.atleast_1d(np.asarray(g, dtype=float))


def lebesgue_integral(g, mu: Measure, a: float, b: float) -> float:
    """Exact ``int_{(a, b]} g dmu`` for polynomial ``g`` (ascending coefficients)."""
    c = _as_poly_coeffs(g)
    terms = [w * P.polyval(x, c) for x, w in mu.atoms if a < x <= b]
    for p in mu.pieces:
        lo, hi = max(a, p.lower), min(b, p.upper)
        if lo < hi:
            anti = P.polyint(P.polymul(c, p.density))
            terms.append(P.polyval(hi, anti) - P.polyval(lo, anti))
    return math.fsum(terms)


def integration_by_parts_check(g, F: DistributionFunction, a: float, b: float) -> float:
    """Residual of ``int g dF = g(b)F(b) - g(a)F(a) - int F dg`` for polynomial ``g``.

    The left side is the exact integral against the measure; ``int F g' dx``
    uses Gauss-Legendre on each segment between breakpoints, exact there
    because F is a polynomial on each segment.
    """
    mu = F.source
    for x, w in mu.atoms:
        if w != 0 and (x == a or x == b):
            raise CommonDiscontinuity(f"F jumps at the endpoint {x!r}")
    c = _as_poly_coeffs(g)
    dc = P.polyder(c)
    if not np.any(dc):
        # constant g: int g dF is g (F(b) - F(a)) by definition, so both sides coincide
        return abs(c[0] * F(b) - c[0] * F(a) - (P.polyval(b, c) * F(b) - P.polyval(a, c) * F(a)))
    lhs = lebesgue_integral(c, mu, a, b)
    dmax = max((p.degree for p in mu.pieces), default=0)
    q = (max(len(dc) - 1, 0) + dmax + 1) // 2 + 2
    cuts = np.unique(np.concatenate([[a, b], mu.breakpoints]))
    cuts = cuts[(cuts >= a) & (cuts <= b)]
    t, w = _leggauss(q)
    parts = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        half = 0.5 * (hi - lo)
        x = half * t + 0.5 * (hi + lo)
        parts.append(half * float(np.sum(w * F(x) * P.polyval(x, dc))))
    rhs = P.polyval(b, c) * F(b) - P.polyval(a, c) * F(a) - math.fsum(parts)
    return abs(lhs - rhs)


# ------------------------------------------------------- weighted moments


def _node_logs(x, vals, n):
    """Signed logs of ``vals * x**n``."""
    s_v, l_v = signed_log(vals)
    with np.errstate(divide="ignore"):
        lx = np.log(np.abs(x))
    neg = (x < 0) & (n % 2 == 1)
    signs = s_v * np.where(neg, -1.0, 1.0)
    if n == 0:
        return signs, l_v
    return signs, l_v + n * lx


def _log_weighted(mu: Measure, f: Optional[Callable], n: int, q: int, panels: int = 1):
    """(sign, log|sum|, log sum|terms|) of the quadrature sum."""
    signs, logs = [], []
    if mu.atoms:
        ax = np.array([x for x, _ in mu.atoms])
        aw = np.array([w for _, w in mu.atoms])
        fv = aw if f is None else aw * _vectorized(f, ax)
        s, l = _node_logs(ax, fv, n)
        signs.append(s)
        logs.append(l)
    for p in mu.pieces:
        x, w = _piece_nodes(p, q, panels)
        fv = w if f is None else w * _vectorized(f, x)
        if not np.all(np.isfinite(fv)):
            raise NonFiniteSample(f"weight function is not finite on [{p.lower}, {p.upper}]")
        s, l = _node_logs(x, fv, n)
        signs.append(s)
        logs.append(l)
    if not signs:
        return 0, -math.inf, -math.inf
    signs, logs = np.concatenate(signs), np.concatenate(logs)
    sign, log_mag = signed_logsumexp(logs, signs)
    return sign, log_mag, signed_logsumexp(logs, np.abs(signs))[1]


def _same(a, b, rtol, floor=1e-13):
    """Successive values agree to ``rtol``, or below the cancellation floor."""
    (sa, la, l1a), (sb, lb, _) = a, b
    _, ldiff = signed_logsumexp([la, lb], [sa, -sb])
    scale = max(la, math.log(floor) + l1a) if sa != 0 else math.log(floor) + l1a
    return ldiff <= math.log(rtol) + scale


def weighted_moment_log(mu: Measure, f: Optional[Callable], n: int, quad_order: Optional[int] = None,
                        rtol: float = 1e-9) -> tuple[int, float]:
    """(sign, log|.|) of ``int x^n f dmu``; Gauss-Legendre on pieces, exact on atoms."""
    dmax = max((p.degree for p in mu.pieces), default=0)
    q = quad_order or max(4, 2 * (n + dmax))
    if q < 4:
        raise ValueError("quad_order must be >= 4")
    if f is None or not mu.pieces:
        q = max(q, (n + dmax) // 2 + 2)
        return _log_weighted(mu, f, n, q)[:2]
    prev = None
    for q, panels in _schedule(q):
        cur = _log_weighted(mu, f, n, q, panels)
        if prev is not None and _same(prev, cur, rtol):
            break
        prev = cur
    return cur[:2]


def weighted_moment(mu: Measure, f: Optional[Callable], n: int, quad_order: Optional[int] = None) -> float:
    """``int x^n f(x) dmu``.  The order doubles until two successive values agree to 1e-9."""
    return exp_signed(*weighted_moment_log(mu, f, n, quad_order))


def quadrature_rule(mu: Measure, probes: Sequence[Callable] = (), degree: int = 0,
                    min_order: int = 64, rtol: float = 1e-9):
    """Nodes and weights representing ``mu``.

    Gauss-Legendre per piece, exact for polynomials of degree ``2*degree``
    times the density; the rule is then refined (order doubling, then panel
    splitting) until the integral of every probe function agrees to
    ``rtol`` between successive levels.  Atoms are nodes with their own
    weights.
    """
    dmax = max((p.degree for p in mu.pieces), default=0)
    q0 = max(min_order, degree + dmax // 2 + 2)

    def build(q, panels):
        xs = [np.array([x for x, _ in mu.atoms])]
        ws = [np.array([w for _, w in mu.atoms])]
        for p in mu.pieces:
            x, w = _piece_nodes(p, q, panels)
            xs.append(x)
            ws.append(w)
        return np.concatenate(xs), np.concatenate(ws)

    if not (probes and mu.pieces):
        return build(q0, 1)

    def integrals(x, w):
        terms = [w * _vectorized(g, x) for g in probes]
        return np.array([math.fsum(t) for t in terms]), np.array([np.sum(np.abs(t)) for t in terms])

    prev = None
    for q, panels in _schedule(q0):
        x, w = build(q, panels)
        cur, l1 = integrals(x, w)
        if prev is not None and np.all(np.abs(cur - prev) <= rtol * np.maximum(np.abs(cur), 1e-13 * l1)):
            break
        prev = cur
    return x, w


# -------------------------------------------------- growth certificates


@dataclass(frozen=True)
class MomentGrowthCertificate:
    """Finite witness that moments grow geometrically.

    Every listed value satisfies ``v_k >= c * m**n_k`` where ``n_k`` is the
    exponent; since ``n_k >= k`` this implies the indexed form
    ``v_k >= c * m**k``.
    """

    c: float
    m: float
    exponents: tuple
    values: tuple
    log_values: tuple
    horizon: int

    def holds(self) -> bool:
        lc, lm = math.log(self.c), math.log(self.m)
        return all(lv >= lc + n * lm - 1e-12 * max(1.0, abs(lv))
                   for n, lv in zip(self.exponents, self.log_values))

    def revalidate(self, recompute: Callable[[int], EvalResult], rtol: float = 1e-9) -> bool:
        """Recompute each moment independently and re-check the bound."""
        for n, lv in zip(self.exponents, self.log_values):
            r = recompute(n)
            if r.sign <= 0 or abs(r.magnitude_log - lv) > rtol:
                return False
        return self.holds()

    def to_dict(self) -> dict:
        return {
            "kind": "certificate",
            "c": self.c,
            "m": self.m,
            "exponents": list(self.exponents),
            "values": list(self.values),
            "log_values": list(self.log_values),
            "horizon": self.horizon,
        }


@dataclass(frozen=True)
class Bounded:
    """No geometric growth detected up to the horizon."""

    sup: float
    argmax: int
    horizon: int

    def to_dict(self) -> dict:
        return {"kind": "bounded", "sup": self.sup, "argmax": self.argmax, "horizon": self.horizon}


GROWTH_THRESHOLD = 1e-3


def certify_sequence(signs, logs, horizon: int, threshold: float = GROWTH_THRESHOLD):
    """Growth detection on a sequence given as (sign, log|v_n|), n = 0..horizon.

    Running maxima among the positive terms are fitted as ``log v = log c +
    n log m``.  A certificate needs three records, a fitted ``m > 1 +
    threshold``, and the same on the later half of the records (so a
    sequence creeping up to a finite limit is not certified).
    """
    signs = np.asarray(signs)
    logs = np.asarray(logs, dtype=float)
    rec_n, rec_l = [], []
    best = -math.inf
    for n, (s, l) in enumerate(zip(signs, logs)):
        if s > 0 and l > best:
            best = l
            rec_n.append(n)
            rec_l.append(l)

    def bounded():
        vals = [exp_signed(int(s), l) for s, l in zip(signs, logs)]
        k = int(np.argmax(vals))
        return Bounded(float(vals[k]), k, horizon)

    if len(rec_n) < 3:
        return bounded()
    ns = np.array(rec_n, dtype=float)
    ls = np.array(rec_l)
    slope = np.polyfit(ns, ls, 1)[0]
    half = len(ns) // 2
    tail = np.polyfit(ns[half:], ls[half:], 1)[0] if len(ns) - half >= 2 else slope
    lthr = math.log1p(threshold)
    if not (slope > lthr and tail > lthr):
        return bounded()
    m = math.exp(slope)
    lc = float(np.min(ls - ns * slope))
    return MomentGrowthCertificate(
        c=math.exp(lc),
        m=m,
        exponents=tuple(rec_n),
        values=tuple(exp_signed(1, l) for l in rec_l),
        log_values=tuple(float(l) for l in rec_l),
        horizon=horizon,
    )


def moment_sequence(mu: Measure, f: Optional[Callable], N: int):
    """(signs, logs) of ``int x^n f dmu`` for n = 0..N."""
    signs, logs = np.zeros(N + 1), np.full(N + 1, -math.inf)
    for n in range(N + 1):
        if f is None:
            r = moment(mu, n)
            signs[n], logs[n] = r.sign, r.magnitude_log
        else:
            signs[n], logs[n] = weighted_moment_log(mu, f, n)
    return signs, logs


def growth_certificate(mu: Measure, f: Optional[Callable] = None, N: int = 60,
                       threshold: float = GROWTH_THRESHOLD) -> Union[MomentGrowthCertificate, Bounded]:
    """Certificate of geometric growth of the weighted moments, or ``Bounded``."""
    if N < 10:
        raise ValueError("N must be >= 10")
    signs, logs = moment_sequence(mu, f, N)
    return certify_sequence(signs, logs, N, threshold)


def extract_exponents(polys: Sequence[ConvexPolynomial], mu: Measure, f: Optional[Callable],
                      c: float, m: float) -> list[int]:
    """For each ``p_k`` with ``int p_k f dmu >= c m^k`` pick the first
    exponent ``1 <= n_k <= deg p_k`` with ``int x^{n_k} f dmu >= c m^k``."""
    top = max(p.degree for p in polys)
    moments = np.array([
        exp_signed(*(weighted_moment_log(mu, f, n) if f is not None else
                     (lambda r: (r.sign, r.magnitude_log))(moment(mu, n))))
        for n in range(top + 1)
    ])
    out = []
    for k, p in enumerate(polys, start=1):
        need = c * m**k
        value = math.fsum(p.coeffs * moments[: p.degree + 1])
        if value < need:
            raise HypothesisFailed(f"k = {k}: int p_k f dmu = {value!r} < c m^k = {need!r}")
        hits = [n for n in range(1, p.degree + 1) if moments[n] >= need]
        if not hits:
            raise ExtractionFailed(f"k = {k}: no exponent in 1..{p.degree} reaches {need!r}")
        out.append(hits[0])
    return out

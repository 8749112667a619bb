"""Convex-polynomials: coefficient vectors on the probability simplex.

A convex-polynomial ``p(x) = sum_k a_k x**k`` has ``a_k >= 0`` and
``sum_k a_k = 1``.  The class is immutable; the algebra (``multiply``,
``compose``) never leaves the simplex.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from ._logmath import LOG_MAX, LOG_SWITCH, exp_signed, signed_logsumexp, power_terms
from .errors import DegreeOverflow, EmptyInput, MassMismatch, NegativeCoefficient, ZeroMass

EPS_SIMPLEX = 1e-12
EPS_MASS = 1e-10
DEFAULT_DEGREE_CAP = 10_000


def _canonical(raw, policy: str) -> np.ndarray:
    try:
        arr = np.array(raw, dtype=float).ravel()
    except (TypeError, ValueError) as exc:
        raise EmptyInput(f"coefficients are not numeric: {exc}") from None
    if arr.size == 0:
        raise EmptyInput("empty coefficient sequence")
    if not np.all(np.isfinite(arr)):
        raise NegativeCoefficient("non-finite coefficient")
    worst = int(np.argmin(arr))
    if arr[worst] < -EPS_SIMPLEX:
        raise NegativeCoefficient(f"coefficient {worst} = {arr[worst]!r} < 0")
    arr = np.maximum(arr, 0.0)
    total = math.fsum(arr)
    if total <= 0.0:
        raise ZeroMass("coefficients sum to zero")
    if policy == "reject" and abs(total - 1.0) > EPS_MASS:
        raise MassMismatch(f"coefficients sum to {total!r}, not 1")
    arr = arr / total
    nz = np.flatnonzero(arr)
    arr = arr[: nz[-1] + 1]
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ConvexPolynomial:
    """A polynomial with nonnegative coefficients summing to one.

    ``coeffs[k]`` is the coefficient of ``x**k``.  Construction clips
    negatives above ``-1e-12``, rescales the mass to exactly one and trims
    trailing zeros, so ``degree`` is well defined.
    """

    coeffs: np.ndarray = field()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _canonical(self.coeffs, "reject"))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        """Vectorised Horner evaluation (no overflow control)."""
        x = np.asarray(x)
        out = np.zeros_like(x, dtype=np.result_type(x, float))
        for c in self.coeffs[::-1]:
            out = out * x + c
        return out if out.ndim else out[()]

    def __eq__(self, other):
        if not isinstance(other, ConvexPolynomial):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(
            np.all(self.coeffs == other.coeffs)
        )

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"ConvexPolynomial({self.coeffs.tolist()!r})"

    def allclose(self, other: "ConvexPolynomial", atol: float = 1e-12) -> bool:
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n)
        b = np.zeros(n)
        a[: self.coeffs.size] = self.coeffs
        b[: other.coeffs.size] = other.coeffs
        return bool(np.allclose(a, b, rtol=0.0, atol=atol))

    @classmethod
    def monomial(cls, k: int) -> "ConvexPolynomial":
        c = np.zeros(k + 1)
        c[k] = 1.0
        return cls(c)

    def to_dict(self) -> dict:
        return {"coeffs": [float(c) for c in self.coeffs]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, policy: str = "reject") -> "ConvexPolynomial":
        return make_convex(data["coeffs"], policy=policy)

    @classmethod
    def from_json(cls, text: str, policy: str = "reject") -> "ConvexPolynomial":
        return cls.from_dict(json.loads(text), policy=policy)


def make_convex(raw: Sequence[float], policy: Literal["reject", "renormalize"] = "reject") -> ConvexPolynomial:
    """Validate ``raw`` as a convex-polynomial coefficient sequence.

    Under ``"renormalize"`` small negatives are clipped and the sequence is
    divided by its sum; under ``"reject"`` the sum must already be within
    1e-10 of one.
    """
    if policy not in ("reject", "renormalize"):
        raise ValueError(f"unknown policy {policy!r}")
    poly = ConvexPolynomial.__new__(ConvexPolynomial)
    object.__setattr__(poly, "coeffs", _canonical(raw, policy))
    return poly


@dataclass(frozen=True)
class EvalResult:
    value: float
    magnitude_log: float
    sign: int
    overflowed: bool
    log_domain: bool = False

    @classmethod
    def from_log(cls, sign: int, log_mag: float) -> "EvalResult":
        value = exp_signed(sign, log_mag)
        return cls(value, log_mag, sign, not math.isfinite(value), True)

    @classmethod
    def from_value(cls, value: float) -> "EvalResult":
        value = float(value)
        sign = int(np.sign(value))
        log_mag = math.log(abs(value)) if value != 0 else -math.inf
        return cls(value, log_mag, sign, False, False)


def _log_evaluate(coeffs: np.ndarray, x: float) -> EvalResult:
    ks = np.flatnonzero(coeffs)
    signs, logs = power_terms(x, ks)
    sign, log_mag = signed_logsumexp(np.log(coeffs[ks]) + logs, signs)
    return EvalResult.from_log(sign, log_mag)


def evaluate(p: ConvexPolynomial, x: float, force_log: bool = False) -> EvalResult:
    """Evaluate ``p`` at a real ``x`` with overflow control.

    Horner is used for ``|x| <= 1`` or while ``degree * ln|x| <= 700``;
    beyond that the monomial terms are summed in the log domain with sign
    tracking.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    ax = abs(x)
    if force_log or (ax > 1.0 and p.degree * math.log(ax) > LOG_SWITCH):
        return _log_evaluate(p.coeffs, x)
    acc = 0.0
    for c in p.coeffs[::-1]:
        acc = acc * x + c
    return EvalResult.from_value(acc)


def multiply(p: ConvexPolynomial, q: ConvexPolynomial) -> ConvexPolynomial:
    return make_convex(np.convolve(p.coeffs, q.coeffs), "renormalize")


def compose(p: ConvexPolynomial, q: ConvexPolynomial, degree_cap: int = DEFAULT_DEGREE_CAP) -> ConvexPolynomial:
    """Coefficients of ``p(q(x))`` by Horner's scheme over convolutions."""
    if p.degree * q.degree > degree_cap:
        raise DegreeOverflow(
            f"deg p * deg q = {p.degree * q.degree} exceeds cap {degree_cap}"
        )
    acc = np.array([p.coeffs[-1]])
    for c in p.coeffs[-2::-1]:
        acc = np.convolve(acc, q.coeffs)
        acc[0] += c
    return make_convex(acc, "renormalize")


def derivative_at_zero(p: ConvexPolynomial, k: int):
    """``p^(k)(0) = k! * a_k``.

    Returns a float for ``k <= 170``; beyond that ``k!`` overflows doubles,
    so an :class:`EvalResult` carrying the log-magnitude is returned instead.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    a = float(p.coeffs[k]) if k <= p.degree else 0.0
    if k <= 170:
        return math.factorial(k) * a
    if a == 0.0:
        return EvalResult.from_value(0.0)
    log_mag = math.lgamma(k + 1) + math.log(a)
    if log_mag <= LOG_MAX:
        return EvalResult(math.exp(log_mag), log_mag, 1, False, True)
    return EvalResult.from_log(1, log_mag)

"""Sign-tracked log-domain helpers shared by polycore, measures and approx."""

import math

import numpy as np
from scipy.special import logsumexp

# exp() of anything above this overflows a double
LOG_MAX = math.log(np.finfo(float).max)
# switch to log-domain accumulation past this log-magnitude
LOG_SWITCH = 700.0


def signed_log(values):
    """Split ``values`` into (sign, log|value|) arrays; zeros map to (0, -inf)."""
    values = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore"):
        return np.sign(values), np.log(np.abs(values))


def signed_logsumexp(logs, signs):
    """Return (sign, log|sum|) of ``sum(signs * exp(logs))``.

    Cancellation to exact zero yields sign 0 and log -inf.
    """
    logs = np.asarray(logs, dtype=float)
    signs = np.asarray(signs, dtype=float)
    keep = (signs != 0) & np.isfinite(logs)
    if not keep.any():
        return 0, -math.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        out, sign = logsumexp(logs[keep], b=signs[keep], return_sign=True)
    # scipy reports an exact zero sum with a nan or zero sign
    if not np.isfinite(sign) or sign == 0 or out == -math.inf:
        return 0, -math.inf
    sign = int(sign)
    return sign, float(out)


def power_terms(x, exponents):
    """(sign, log|x|^k) for each exponent k; 0**0 is 1."""
    exponents = np.asarray(exponents)
    if x == 0:
        signs = np.where(exponents == 0, 1.0, 0.0)
        logs = np.where(exponents == 0, 0.0, -np.inf)
        return signs, logs
    signs = np.where((exponents % 2 == 1) & (x < 0), -1.0, 1.0)
    return signs, exponents * math.log(abs(x))


def exp_signed(sign, log_mag):
    """Back to a float; overflows to +-inf rather than raising."""
    if sign == 0:
        return 0.0
    if log_mag > LOG_MAX:
        return math.copysign(math.inf, sign)
    return sign * math.exp(log_mag)

"""Scalar special functions: log-gamma and the modified Bessel function K.

Both are thin, domain-checked wrappers over ``scipy.special``. ``log_bessel_k``
is the workhorse for GIG normalising constants, where a ratio of two Bessel
values would otherwise overflow or underflow.
"""

import math
import warnings

import numpy as np
from scipy.special import gammaln, kve


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


class BesselOverflowWarning(RuntimeWarning):
    """K_order(x) exceeded double range; a saturated value was returned."""


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x!r}")
    return float(gammaln(x))


def log_bessel_k(order, x):
    """ln K_order(x) for x > 0, finite even where K itself overflows.

    Uses the exponentially scaled ``kve``; falls back to the small-argument
    asymptote ``K_v(x) ~ Gamma(|v|)/2 (2/x)^|v|`` when ``kve`` saturates.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("log_bessel_k needs x > 0")
    v = abs(float(order))
    with np.errstate(over="ignore", divide="ignore"):
        out = np.log(kve(v, x)) - x
    bad = ~np.isfinite(out)
    if np.any(bad):
        xb = x[bad] if out.ndim else x
        if v > 1e-10:
            approx = gammaln(v) - math.log(2.0) + v * (math.log(2.0) - np.log(xb))
        else:
            approx = np.log(-np.log(xb / 2.0) - np.euler_gamma)
        if out.ndim:
            out[bad] = approx
        else:
            out = np.asarray(approx)
    return float(out) if out.ndim == 0 else out


def bessel_k(order, x):
    """Modified Bessel function of the second (third) kind, K_order(x).

    Parameters
    ----------
    order : float
        Any real order; K is even in it.
    x : float
        Positive argument.

    Returns
    -------
    float
        K_order(x). If the true value exceeds the double range, ``sys.float_info.max``
        is returned and a :class:`BesselOverflowWarning` is emitted.
    """
    if not x > 0:
        raise DomainError(f"bessel_k needs x > 0, got {x!r}")
    lk = log_bessel_k(order, x)
    if lk > 709.78:
        warnings.warn(
            f"K_{order}({x}) overflows (log value {lk:.3g})",
            BesselOverflowWarning,
            stacklevel=2,
        )
        return np.finfo(float).max
    return math.exp(lk)


def bessel_k_ratio(order_num, order_den, x):
    """K_order_num(x) / K_order_den(x), computed in log space."""
    return math.exp(log_bessel_k(order_num, x) - log_bessel_k(order_den, x))

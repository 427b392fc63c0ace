"""Normal and Student-t distribution kernels.

Thin vectorized wrappers over ``scipy.special`` primitives (erf / erfinv and
the regularized incomplete beta function).  These carry the numeric accuracy
of the whole dependence-modelling stack, so they have their own oracle tests
against high-precision references; everything else builds on top of them.
"""

from __future__ import annotations

import numpy as np
from scipy import special as _sp

_SQRT2 = float(np.sqrt(2.0))
_LOG_2PI = float(np.log(2.0 * np.pi))


def norm_cdf(x):
    """Standard normal CDF via erf."""
    x = np.asarray(x, dtype=float)
    return 0.5 * (1.0 + _sp.erf(x / _SQRT2))


def norm_ppf(p):
    """Standard normal quantile via erfinv; p must lie in (0, 1)."""
    p = np.asarray(p, dtype=float)
    return _SQRT2 * _sp.erfinv(2.0 * p - 1.0)


def norm_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x - 0.5 * _LOG_2PI)


def t_cdf(x, nu: float):
    """Student-t CDF with ``nu`` degrees of freedom.

    Uses the tail identity 2*P(T > |x|) = I_w(nu/2, 1/2) with
    w = nu / (nu + x^2), where I is the regularized incomplete beta.
    """
    x = np.asarray(x, dtype=float)
    w = nu / (nu + x * x)
    tail = 0.5 * _sp.betainc(0.5 * nu, 0.5, w)
    return np.where(x > 0.0, 1.0 - tail, tail)


def t_ppf(p, nu: float):
    """Student-t quantile; p must lie in (0, 1)."""
    p = np.asarray(p, dtype=float)
    q = 2.0 * np.minimum(p, 1.0 - p)
    w = _sp.betaincinv(0.5 * nu, 0.5, q)
    # Guard w == 0 (p at machine extremes): the quantile is +-inf.
    with np.errstate(divide="ignore"):
        mag = np.sqrt(nu * (1.0 - w) / w)
    return np.where(p < 0.5, -mag, mag)


def t_pdf(x, nu: float):
    x = np.asarray(x, dtype=float)
    lognorm = (
        _sp.gammaln(0.5 * (nu + 1.0))
        - _sp.gammaln(0.5 * nu)
        - 0.5 * np.log(nu * np.pi)
    )
    return np.exp(lognorm - 0.5 * (nu + 1.0) * np.log1p(x * x / nu))

"""Minimal distribution kernel: chi-square CDF/quantile and the standard
Gaussian quantile.

Kept free of third-party dependencies so the numerical core of every test
decision stays auditable.  The incomplete-gamma evaluation follows the
classic series / continued-fraction split (Abramowitz & Stegun 6.5, in the
arrangement popularized by Numerical Recipes); the Gaussian quantile uses
Acklam's rational approximation refined with one Newton step.
"""

from __future__ import annotations

import math

from .errors import InvalidInput

_MAX_ITER = 500
_REL_EPS = 1e-15


def _lower_gamma_series(s: float, x: float) -> float:
    # Regularized P(s, x) by the ascending series; converges fast for x < s + 1.
    term = 1.0 / s
    total = term
    for k in range(1, _MAX_ITER):
        term *= x / (s + k)
        total += term
        if abs(term) < abs(total) * _REL_EPS:
            break
    return total * math.exp(-x + s * math.log(x) - math.lgamma(s))


def _upper_gamma_cf(s: float, x: float) -> float:
    # Regularized Q(s, x) by Lentz's continued fraction; used for x >= s + 1.
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b if b != 0 else 1.0 / tiny
    f = d
    for k in range(1, _MAX_ITER):
        an = -k * (k - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        f *= delta
        if abs(delta - 1.0) < _REL_EPS:
            break
    return f * math.exp(-x + s * math.log(x) - math.lgamma(s))


def regularized_gamma_p(s: float, x: float) -> float:
    """Regularized lower incomplete gamma P(s, x) for s > 0, x >= 0."""
    if s <= 0:
        raise InvalidInput(f"shape parameter must be positive, got {s}")
    if x < 0:
        raise InvalidInput(f"gamma argument must be non-negative, got {x}")
    if x == 0:
        return 0.0
    if x < s + 1.0:
        p = _lower_gamma_series(s, x)
    else:
        p = 1.0 - _upper_gamma_cf(s, x)
    # Roundoff can spill a few ULP outside [0, 1].
    return min(1.0, max(0.0, p))


def _check_df(df: int) -> None:
    if not isinstance(df, int) or isinstance(df, bool) or df < 1:
        raise InvalidInput(f"degrees of freedom must be a positive integer, got {df!r}")


def chi2_cdf(x: float, df: int) -> float:
    """CDF of the chi-square distribution with ``df`` degrees of freedom."""
    _check_df(df)
    if x < 0:
        raise InvalidInput(f"chi-square argument must be non-negative, got {x}")
    return regularized_gamma_p(df / 2.0, x / 2.0)


def chi2_quantile(df: int, q: float) -> float:
    """Quantile of the chi-square distribution, by bracketed bisection."""
    _check_df(df)
    if not 0.0 < q < 1.0:
        raise InvalidInput(f"quantile level must lie in (0, 1), got {q}")
    lo = 0.0
    hi = df + 10.0
    while chi2_cdf(hi, df) < q:
        hi *= 2.0
        if hi > 1e12:
            raise InvalidInput(f"quantile bracket failed for df={df}, q={q}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if chi2_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def gaussian_cdf(z: float) -> float:
    """Standard normal CDF via the error function."""
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


# Acklam's coefficients for the inverse normal CDF (relative error < 1.2e-9
# before refinement).
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)

_P_LOW = 0.02425


def gaussian_quantile(q: float) -> float:
    """Inverse standard normal CDF, accurate to well under 1e-8."""
    if not 0.0 < q < 1.0:
        raise InvalidInput(f"quantile level must lie in (0, 1), got {q}")
    if q < _P_LOW:
        r = math.sqrt(-2.0 * math.log(q))
        z = (((((_C[0] * r + _C[1]) * r + _C[2]) * r + _C[3]) * r + _C[4]) * r + _C[5]) / \
            ((((_D[0] * r + _D[1]) * r + _D[2]) * r + _D[3]) * r + 1.0)
    elif q <= 1.0 - _P_LOW:
        r = q - 0.5
        s = r * r
        z = (((((_A[0] * s + _A[1]) * s + _A[2]) * s + _A[3]) * s + _A[4]) * s + _A[5]) * r / \
            (((((_B[0] * s + _B[1]) * s + _B[2]) * s + _B[3]) * s + _B[4]) * s + 1.0)
    else:
        r = math.sqrt(-2.0 * math.log(1.0 - q))
        z = -(((((_C[0] * r + _C[1]) * r + _C[2]) * r + _C[3]) * r + _C[4]) * r + _C[5]) / \
            ((((_D[0] * r + _D[1]) * r + _D[2]) * r + _D[3]) * r + 1.0)
    # One Newton step against the erf-based CDF doubles the accurate digits.
    pdf = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    if pdf > 0.0:
        z -= (gaussian_cdf(z) - q) / pdf
    return z

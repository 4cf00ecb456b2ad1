"""Special functions backing the statistical tests.

All routines are self-contained so p-values can be replicated without
any third-party numerics.  Documented accuracy targets (part of the
public contract):

* ``normal_cdf``   -- absolute error <= 1e-12 (error-function evaluation)
* ``t_cdf``        -- absolute error <= 1e-10 (regularized incomplete
  beta via Lentz continued fraction)
* ``kolmogorov_sf``-- alternating series, terms added until below 1e-12
* ``normal_quantile`` -- rational initial guess polished by two Newton
  steps against ``normal_cdf``; relative error near machine precision
"""

from __future__ import annotations

import math

from ..errors import InvalidArgumentError

_SQRT2 = math.sqrt(2.0)
_BETA_EPS = 1e-15
_BETA_MAX_ITER = 500


def normal_cdf(z: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-z / _SQRT2)


def normal_sf(z: float) -> float:
    """Standard normal survival function, accurate in the upper tail."""
    return 0.5 * math.erfc(z / _SQRT2)


def _normal_pdf(z: float) -> float:
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


# Rational approximation coefficients (Acklam); only used as the
# initial guess, which two Newton corrections sharpen to full precision.
_NQ_A = (
    -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
    1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00,
)
_NQ_B = (
    -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
    6.680131188771972e+01, -1.328068155288572e+01,
)
_NQ_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
    -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00,
)
_NQ_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
    3.754408661907416e+00,
)


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF on (0, 1)."""
    if not (0.0 < p < 1.0):
        raise InvalidArgumentError(f"quantile probability must lie in (0,1), got {p}")
    p_low, p_high = 0.02425, 1 - 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        x = (
            ((((_NQ_C[0] * q + _NQ_C[1]) * q + _NQ_C[2]) * q + _NQ_C[3]) * q + _NQ_C[4]) * q
            + _NQ_C[5]
        ) / ((((_NQ_D[0] * q + _NQ_D[1]) * q + _NQ_D[2]) * q + _NQ_D[3]) * q + 1.0)
    elif p <= p_high:
        q = p - 0.5
        r = q * q
        x = (
            (((((_NQ_A[0] * r + _NQ_A[1]) * r + _NQ_A[2]) * r + _NQ_A[3]) * r + _NQ_A[4]) * r + _NQ_A[5])
            * q
            / (((((_NQ_B[0] * r + _NQ_B[1]) * r + _NQ_B[2]) * r + _NQ_B[3]) * r + _NQ_B[4]) * r + 1.0)
        )
    else:
        q = math.sqrt(-2.0 * math.log1p(-p))
        x = -(
            ((((_NQ_C[0] * q + _NQ_C[1]) * q + _NQ_C[2]) * q + _NQ_C[3]) * q + _NQ_C[4]) * q
            + _NQ_C[5]
        ) / ((((_NQ_D[0] * q + _NQ_D[1]) * q + _NQ_D[2]) * q + _NQ_D[3]) * q + 1.0)
    for _ in range(2):
        err = normal_cdf(x) - p
        pdf = _normal_pdf(x)
        if pdf <= 0.0:
            break
        x -= err / pdf
    return x


def log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Lentz evaluation of the incomplete-beta continued fraction."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise InvalidArgumentError(
        f"incomplete beta did not converge for a={a}, b={b}, x={x}"
    )


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0.0 or b <= 0.0:
        raise InvalidArgumentError(f"beta parameters must be positive, got a={a}, b={b}")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = math.exp(
        a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def t_cdf(t: float, df: float) -> float:
    """Student t CDF with (possibly fractional) df >= 1."""
    if df < 1.0:
        raise InvalidArgumentError(f"degrees of freedom must be >= 1, got {df}")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x)
    return 1.0 - tail if t >= 0.0 else tail


def t_sf(t: float, df: float) -> float:
    return t_cdf(-t, df)


def t_quantile(p: float, df: float) -> float:
    """Inverse t CDF by Newton iteration seeded from the normal quantile."""
    if not (0.0 < p < 1.0):
        raise InvalidArgumentError(f"quantile probability must lie in (0,1), got {p}")
    if df < 1.0:
        raise InvalidArgumentError(f"degrees of freedom must be >= 1, got {df}")
    if p == 0.5:
        return 0.0
    x = normal_quantile(p)
    # Expand a bracket around the normal-based guess, then bisect/Newton.
    lo, hi = x, x
    step = 1.0 + abs(x)
    while t_cdf(lo, df) > p:
        lo -= step
        step *= 2.0
    step = 1.0 + abs(x)
    while t_cdf(hi, df) < p:
        hi += step
        step *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_cdf(mid, df) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def f_cdf(x: float, df1: float, df2: float) -> float:
    """F distribution CDF built on the incomplete beta."""
    if df1 <= 0.0 or df2 <= 0.0:
        raise InvalidArgumentError(
            f"degrees of freedom must be positive, got df1={df1}, df2={df2}"
        )
    if x <= 0.0:
        return 0.0
    y = df1 * x / (df1 * x + df2)
    return regularized_incomplete_beta(df1 / 2.0, df2 / 2.0, y)


def kolmogorov_sf(x: float) -> float:
    """Kolmogorov distribution survival function Q(x) = 2*sum (-1)^(k-1) exp(-2 k^2 x^2).

    Terms are accumulated until they drop below 1e-12 (at least until
    the alternating tail is provably below that), and the result is
    clamped to [0, 1].
    """
    if x < 0.0:
        raise InvalidArgumentError(f"kolmogorov_sf requires x >= 0, got {x}")
    if x == 0.0:
        return 1.0
    if x < 0.18:
        # Below here 1 - Q(x) < 1e-13, smaller than the series tolerance.
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 100_001):
        term = math.exp(-2.0 * (k * x) * (k * x))
        total += sign * term
        if term < 1e-12:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))

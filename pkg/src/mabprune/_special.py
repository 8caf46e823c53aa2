"""Scalar special functions: regularized incomplete beta, Beta quantiles,
Bernoulli KL divergence.

Pure Python on purpose. These are the reference routines; the batched
versions in the kernel backends are checked against them.
"""

import math

_CF_EPS = 1e-15
_CF_TINY = 1e-300
_CF_MAX_ITER = 500


def _betacf(a, b, x):
    # Modified Lentz evaluation of the continued fraction for I_x(a, b).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a, b, x):
    """Regularized incomplete beta function I_x(a, b) for a, b > 0."""
    if a <= 0 or b <= 0:
        raise ValueError("betainc requires a > 0 and b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    # The continued fraction converges fast only on one side of the mean.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def beta_quantile(a, b, level, tol=1e-8):
    """Quantile of Beta(a, b) at ``level`` by bisection on :func:`betainc`."""
    if level <= 0.0:
        return 0.0
    if level >= 1.0:
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if betainc(a, b, mid) < level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def kl_bernoulli(p, q):
    """KL divergence between Bernoulli(p) and Bernoulli(q), with 0 ln 0 = 0."""
    out = 0.0
    if p > 0.0:
        if q <= 0.0:
            return math.inf
        out += p * math.log(p / q)
    if p < 1.0:
        if q >= 1.0:
            return math.inf
        out += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return out


def kl_ucb_bound(mean, plays, log_t, tol=1e-6):
    """Largest q in [mean, 1] with plays * kl(mean, q) <= log_t."""
    if mean >= 1.0:
        return 1.0
    lo, hi = max(mean, 0.0), 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if plays * kl_bernoulli(mean, mid) <= log_t:
            lo = mid
        else:
            hi = mid
    return lo

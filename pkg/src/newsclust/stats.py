"""Regularized incomplete beta, Student-t tail probabilities and simple OLS."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from ._validation import check_xy

_FPMIN = 1e-300
_EPS = 1e-16
_MAX_ITER = 10_000


class InsufficientDataError(ValueError):
    pass


def _betacf(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the incomplete-beta continued fraction.
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta did not converge for a={a}, b={b}, x={x}")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)``."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: float) -> float:
    """``P(|T| >= |t|)`` for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be positive")
    if math.isnan(t):
        raise ValueError("t is NaN")
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    return min(1.0, max(0.0, betainc(df / 2.0, 0.5, df / (df + t * t))))


def t_cdf(t: float, df: float) -> float:
    tail = 0.5 * t_two_sided_p(t, df)
    return 1.0 - tail if t > 0 else tail


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    pearson_r: float
    t_statistic: float
    p_value: float
    n: int
    stderr: float = 0.0

    def to_dict(self) -> dict:
        return {k: (None if isinstance(v, float) and not math.isfinite(v) else v)
                for k, v in asdict(self).items()}


def ols_regression(xs, ys) -> RegressionResult:
    """Least-squares fit ``y = slope * x + intercept`` with a two-sided slope test.

    The p-value comes from Student's t with ``n - 2`` degrees of freedom.  An
    exact fit with a nonzero slope reports ``p = 0``; a constant response
    reports slope 0, ``t = 0`` and ``p = 1``.
    """
    x, y = check_xy(xs, ys)
    n = x.size
    if n < 3:
        raise InsufficientDataError(f"regression needs at least 3 points, got {n}")
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise InsufficientDataError("xs have zero variance")
    syy = float(dy @ dy)
    slope = float(dx @ dy) / sxx
    intercept = float(ym - slope * xm)
    resid = y - (slope * x + intercept)
    sse = float(resid @ resid)
    stderr = math.sqrt(sse / (n - 2) / sxx)
    pearson_r = float(dx @ dy) / math.sqrt(sxx * syy) if syy > 0 else 0.0
    if slope == 0.0:
        t_stat = 0.0
    elif stderr == 0.0:
        t_stat = math.copysign(math.inf, slope)
    else:
        t_stat = slope / stderr
    return RegressionResult(slope, intercept, pearson_r, t_stat,
                            t_two_sided_p(t_stat, n - 2), n, stderr)


__all__ = ["betainc", "t_two_sided_p", "t_cdf", "RegressionResult", "ols_regression",
           "InsufficientDataError"]

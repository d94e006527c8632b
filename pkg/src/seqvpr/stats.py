"""Paired two-tailed Student-t test, dependency-free.

The re-selection trigger compares two windows of correction magnitudes.
Those windows are frequently all zeros (a healthy technique corrects
nothing), so the zero-variance edge case gets an explicit rule instead of
a division by zero: identical means fail to reject, different means
reject with certainty.

The t tail probability is computed through the regularized incomplete
beta function, evaluated by the standard continued fraction (modified
Lentz), which is well conditioned for the small degrees of freedom used
here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDof, LengthMismatch, TooFewSamples

_MAX_ITER = 300
_REL_TOL = 1e-12
_TINY = 1e-300


@dataclass(frozen=True)
class PairedTestResult:
    t_statistic: float
    degrees_of_freedom: int
    p_value: float
    reject_h0: bool


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta integral at x."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        coef = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + coef * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + coef / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        coef = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + coef * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + coef / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _REL_TOL:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge "
        f"(a={a}, b={b}, x={x})"
    )


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), the regularized incomplete beta function."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # Use the fraction on the side where it converges fastest.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_two_tailed_p(t: float, nu: int) -> float:
    """Two-tailed tail probability of Student's t with nu degrees of freedom.

    p = I_{nu/(nu+t^2)}(nu/2, 1/2). Exactly symmetric in the sign of t and
    monotonically decreasing in |t|.
    """
    if int(nu) != nu or nu < 1:
        raise InvalidDof(f"degrees of freedom must be a positive integer, got {nu}")
    nu = int(nu)
    t = float(t)
    if math.isinf(t):
        return 0.0
    x = nu / (nu + t * t)
    p = regularized_incomplete_beta(nu / 2.0, 0.5, x)
    return min(max(p, 0.0), 1.0)


def paired_t_test(a, b, alpha: float = 0.05) -> PairedTestResult:
    """Paired-sample two-tailed t test of mean(a - b) = 0.

    Uses the sample (n-1) standard deviation of the pairwise differences.
    Zero-variance differences short-circuit: all-equal pairs give p = 1,
    a constant non-zero difference gives p = 0.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(
            f"paired samples must be equal-length vectors, "
            f"got {a.shape} and {b.shape}"
        )
    n = a.size
    if n < 2:
        raise TooFewSamples(f"need at least 2 pairs, got {n}")

    d = a - b
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    nu = n - 1
    if sd == 0.0:
        if mean == 0.0:
            t, p = 0.0, 1.0
        else:
            t, p = math.copysign(math.inf, mean), 0.0
    else:
        t = mean / (sd / math.sqrt(n))
        p = student_t_two_tailed_p(t, nu)
    return PairedTestResult(
        t_statistic=t,
        degrees_of_freedom=nu,
        p_value=p,
        reject_h0=p < alpha,
    )

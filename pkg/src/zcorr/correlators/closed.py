"""Closed-form pair correlations: codimensions 1-3 and the point case k = m."""

from fractions import Fraction
import math

import mpmath
import numpy as np

from ..errors import DomainError
from ..kernel import pair_kernel

__all__ = [
    "f_m_eval",
    "g_l_eval",
    "kappa_low_codim_closed",
    "kappa_point_closed",
    "kappa_point_fm",
    "low_codim_formula",
    "point_fm_formula",
]


def f_m_eval(m, x, y, form="poly"):
    """``f_m(x, y) = y^{m-1} + 2 x y^{m-2} + ... + m x^{m-1}``.

    ``form="rational"`` uses ``(m x^{m+1} + y^{m+1} - (m+1) x^m y) / (x - y)^2``,
    which is undefined at ``x == y``.  Its numerator cancels to second order
    near the diagonal, so real float inputs are converted to exact fractions
    (floats are dyadic rationals) and the result is rounded once.
    """
    if m < 1:
        raise DomainError(f"f_m needs m >= 1, got {m}")
    if form == "poly":
        return sum((i + 1) * x**i * y ** (m - 1 - i) for i in range(m))
    if form == "rational":
        if x == y:
            raise DomainError("rational form of f_m is singular at x == y")
        exact = isinstance(x, (float, np.floating)) or isinstance(y, (float, np.floating))
        if exact:
            x, y = Fraction(float(x)), Fraction(float(y))
        val = (m * x ** (m + 1) + y ** (m + 1) - (m + 1) * x**m * y) / (x - y) ** 2
        return float(val) if exact else val
    raise ValueError(f"unknown form {form!r}")


def g_l_eval(l, x, y):
    """``g_l(x, y) = x^l + x^{l-1} y + ... + y^l``."""
    if l < 0:
        raise DomainError(f"g_l needs l >= 0, got {l}")
    return sum(x ** (l - i) * y**i for i in range(l + 1))


def _check_r(r):
    if not np.isfinite(r) or r <= 0:
        raise DomainError(f"need r > 0, got r={r!r}")


def low_codim_formula(k, m, P, Q, R, S, detA):
    """Codimension 1-3 pair correlation as a polynomial in ``P, Q, R, S`` over ``det A^k``.

    Generic in the number type: works for floats and for exact series alike.
    """
    if k == 1:
        num = P**2 + 2 * (m - 1) * P * R + Q**2 + (m - 1) ** 2 * R**2 + (m - 1) * S**2
        return num / (m**2 * detA)
    if k == 2:
        num = (
            4 * (m - 1) * P**2 * R**2
            + 2 * P**2 * S**2
            + 4 * (m - 1) * (m - 2) * P * R**3
            + 4 * (m - 2) * P * R * S**2
            + 2 * (m - 1) * Q**2 * R**2
            + 4 * Q**2 * S**2
            + (m - 1) * (m - 2) ** 2 * R**4
            + 2 * (m - 2) ** 2 * R**2 * S**2
            + 2 * (m - 2) * S**4
        )
        return num / (m**2 * (m - 1) * detA**2)
    if k == 3:
        num = (
            9 * (m - 1) * (m - 2) * P**2 * R**4
            + 12 * (m - 2) * P**2 * R**2 * S**2
            + 6 * P**2 * S**4
            + 6 * (m - 3) * (m - 1) * (m - 2) * P * R**5
            + 12 * (m - 3) * (m - 2) * P * R**3 * S**2
            + 12 * (m - 3) * P * R * S**4
            + 3 * (m - 1) * (m - 2) * Q**2 * R**4
            + 12 * (m - 2) * Q**2 * R**2 * S**2
            + 18 * Q**2 * S**4
            + (m - 1) * (m - 2) * (m - 3) ** 2 * R**6
            + 3 * (m - 2) * (m - 3) ** 2 * R**4 * S**2
            + 6 * (m - 3) ** 2 * R**2 * S**4
            + 6 * (m - 3) * S**6
        )
        return num / (m**2 * (m - 1) * (m - 2) * detA**3)
    raise DomainError(f"closed low-codimension forms exist for k in 1..3, got k={k}")


def point_fm_formula(m, P, Q, R, S, detA):
    """``(P^2 f_m(R^2, S^2) + Q^2 f_m(S^2, R^2)) / (m det(A)^m)``, generic in the number type."""
    R2, S2 = R**2, S**2
    num = P**2 * f_m_eval(m, R2, S2) + Q**2 * f_m_eval(m, S2, R2)
    return num / (m * detA**m)


def kappa_low_codim_closed(r, k, m):
    """Explicit polynomial-in-(P, Q, R, S) pair correlations for ``k = 1, 2, 3``."""
    _check_r(r)
    if k not in (1, 2, 3):
        raise DomainError(f"closed low-codimension forms exist for k in 1..3, got k={k}")
    if m < k:
        raise DomainError(f"need k <= m, got k={k}, m={m}")
    pk = pair_kernel(r)
    return low_codim_formula(k, m, pk.P, pk.Q, pk.R, pk.S, pk.detA)


def kappa_point_closed(r, m):
    """Point pair correlation ``kappa_mm(r)`` from the closed formula in ``v = e^{-r^2}``.

    The numerator cancels to ``O(r^{4+...})`` against a ``(1-v)^{m+2}`` denominator,
    so the formula is evaluated with enough extra mpmath digits to absorb that.
    """
    _check_r(r)
    if m < 1:
        raise DomainError(f"need m >= 1, got {m}")
    u_est = float(r) ** 2
    lost = (m + 2) * max(0.0, -math.log10(u_est)) if u_est > 0 else 0.0
    with mpmath.workdps(30 + int(math.ceil(lost))):
        rr = mpmath.mpf(r)
        u = rr * rr
        v = mpmath.exp(-u)
        one_minus_v = -mpmath.expm1(-u)
        num = (
            m * (1 - v ** (m + 1)) * one_minus_v
            + u * (2 * m + 2) * (v ** (m + 1) - v)
            + u**2 * (v ** (m + 1) + v**m + ((m + 1) * v + 1) * (v**m - v) / (v - 1))
        )
        return float(num / (m * one_minus_v ** (m + 2)))


def kappa_point_fm(r, m):
    """``kappa_mm = (P^2 f_m(R^2, S^2) + Q^2 f_m(S^2, R^2)) / (m det(A)^m)``."""
    _check_r(r)
    if m < 1:
        raise DomainError(f"need m >= 1, got {m}")
    pk = pair_kernel(r)
    return point_fm_formula(m, pk.P, pk.Q, pk.R, pk.S, pk.detA)

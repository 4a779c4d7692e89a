"""Published low-order expansion coefficients, used as exact regression targets.

All tables are keyed by the power of ``u = r^2``.  Only printed terms are
listed; powers skipped in print are checked separately (``omitted_powers``).
"""

from fractions import Fraction as F

__all__ = [
    "POINT_SERIES",
    "codim_series",
    "CODIM_MIN_M",
    "omitted_powers",
]

# kappa_mm for m = 1..6
POINT_SERIES = {
    1: {1: F(1, 2), 3: F(-1, 36), 5: F(1, 720), 7: F(-1, 16800), 9: F(1, 435456),
        11: F(-691, 8382528000)},
    2: {0: F(3, 4), 2: F(1, 24), 4: F(-1, 288), 6: F(1, 4800), 8: F(-1, 96768),
        10: F(691, 1524096000)},
    3: {-1: F(1), 1: F(1, 4), 3: F(-11, 2160), 5: F(-1, 50400), 7: F(1, 80640),
        9: F(-4871, 5029516800)},
    4: {-2: F(5, 4), 0: F(95, 144), 2: F(19, 576), 4: F(-79, 40320), 6: F(7, 82944),
        8: F(-6049, 2235340800)},
    5: {-3: F(3, 2), -1: F(4, 3), 1: F(55, 288), 3: F(-19, 16800), 5: F(-257, 1451520),
        7: F(21337, 1397088000)},
    6: {-4: F(7, 4), -2: F(7, 3), 0: F(5257, 8640), 2: F(407, 14400), 4: F(-103, 82944),
        6: F(38177, 1197504000)},
}

CODIM_MIN_M = {1: 1, 2: 2, 3: 3}


def _codim1(m):
    m = F(m)
    return {
        -1: (m - 1) / m,
        0: (m - 1) / (2 * m),
        1: (m + 2) * (m + 1) / (12 * m**2),
        3: -(m + 4) * (m + 3) / (720 * m**2),
        5: (m + 6) * (m + 5) / (30240 * m**2),
        7: -(m + 8) * (m + 7) / (1209600 * m**2),
    }


def _codim2(m):
    m = F(m)
    return {
        -2: (m - 2) / m,
        -1: (m - 2) / m,
        0: (5 * m**2 - 7 * m + 12) / (12 * (m - 1) * m),
        1: (m - 2) * (m + 2) * (m + 1) / (12 * (m - 1) * m**2),
        2: (m + 3) * (m + 2) / (240 * (m - 1) * m),
        3: -(m - 2) * (m + 4) * (m + 3) / (720 * (m - 1) * m**2),
    }


def _codim3(m):
    m = F(m)
    return {
        -3: (m - 3) / m,
        -2: 3 * (m - 3) / (2 * m),
        -1: (m**2 - 4 * m + 6) / ((m - 2) * m),
        0: (m - 3) * (3 * m**2 - m + 8) / (8 * m * (m - 1) * (m - 2)),
        1: (m + 2) * (m + 1) * (19 * m**2 - 79 * m + 120)
        / (240 * m**2 * (m - 1) * (m - 2)),
        2: (m - 3) * (m + 3) * (m + 2) / (160 * m * (m - 1) * (m - 2)),
    }


_CODIM = {1: _codim1, 2: _codim2, 3: _codim3}


def codim_series(k, m):
    """Printed coefficients of ``kappa_km`` for ``k`` in 1..3 at integer ``m``."""
    if k not in _CODIM:
        raise ValueError(f"printed codimension series exist for k in 1..3, got k={k}")
    if m < CODIM_MIN_M[k]:
        raise ValueError(f"kappa_{k}m needs m >= {CODIM_MIN_M[k]}, got m={m}")
    return _CODIM[k](m)


def omitted_powers(table):
    """Powers strictly between the first and last printed ones that were not printed."""
    lo, hi = min(table), max(table)
    return [p for p in range(lo, hi) if p not in table]

"""Exact small-distance expansions in u = r^2.

The series is computed with exact rationals, so coefficients can be compared
to hand-derived values with ==.  Repulsion (m = 1), neutrality (m = 2) and
attraction (m >= 3) show up as the valuation of the Laurent series.
"""

from fractions import Fraction

from zcorr.series import kappa_series, parity_check

for m in range(1, 5):
    s = kappa_series(m, m, order=6)
    head = ", ".join(f"u^{p}: {c}" for p, c in list(s.terms().items())[:3])
    print(f"kappa_{m}{m}  valuation {s.valuation:>2}  {head}")

# codimension one on CP^m: the u^1 coefficient is (m+2)(m+1)/(12 m^2)
for m in range(1, 6):
    c = kappa_series(1, m, order=4).coefficient(1)
    assert c == Fraction((m + 2) * (m + 1), 12 * m * m)
    print(f"kappa_1{m}: u coefficient {c}")

print("parity rule holds for m = 1..8:", all(parity_check(m) for m in range(1, 9)))

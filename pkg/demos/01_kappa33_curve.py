"""Tabulate the codimension-3 point pair correlation on CP^3 and look at it.

kappa_33 diverges like r^-2 at the origin: zeros of three random sections in
three complex dimensions attract.  Far apart the correlation tends to 1 at a
Gaussian rate, so at r = 4 it still sits 5e-6 above 1.
"""

import numpy as np

from zcorr.correlators import kappa_point_closed

rs = np.linspace(0.2, 4.0, 20)
print(f"{'r':>6} {'kappa_33':>14} {'r^2 kappa_33':>14}")
for r in rs:
    k = kappa_point_closed(r, 3)
    print(f"{r:6.2f} {k:14.8f} {r * r * k:14.8f}")

# the tail: kappa_33(r) - 1 decays like a polynomial times exp(-r^2)
for r in (3.0, 4.0, 5.0, 6.0):
    print(f"kappa_33({r}) - 1 = {kappa_point_closed(r, 3) - 1:.4e}")

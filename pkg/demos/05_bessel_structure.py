"""
Where the filter thresholds come from
=====================================

The disturbing term of the single-frequency map is 2 J1(x)^2, whose maximum
0.677 gives the 0.678 cutoff. A band average of J1^2 can never exceed
max J1^2 = 0.3386, hence 0.340 for the multi-frequency filter.
"""
import math

import numpy as np
from scipy import optimize

from submig import bessel

res = optimize.minimize_scalar(lambda x: -bessel.bessel_j1(x) ** 2, bounds=(1, 3), method="bounded")
print(f"max 2 J1^2 = {-2 * res.fun:.6f} at x = {res.x:.5f}")
print(f"first zero of J1: {optimize.brentq(bessel.bessel_j1, 3, 4.5):.5f}")

r = np.linspace(0, 1, 2001)
avg = bessel.j1_squared_band_average(r, 2 * math.pi / 0.6, 2 * math.pi / 0.3)
print(f"band-averaged J1^2 peaks at {avg.max():.6f} (r = {r[np.argmax(avg)]:.4f}), bound {bessel.J1_MAX ** 2:.6f}")

# the three evaluation regimes, side by side
for x in (0.5, 7.9, 8.1, 24.9, 25.1, 100.0):
    print(f"x = {x:6.1f}  J0 = {bessel.bessel_j0(x): .15f}  J1 = {bessel.bessel_j1(x): .15f}")

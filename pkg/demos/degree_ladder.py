"""
Mapping degree from the Wess-Zumino integral
============================================

For ``u : S^3 -> SU(2)`` the integral of ``c tr((u^-1 du)^3)`` is the
mapping degree.  The quaternion powers ``q^k`` have degree ``k``.  The
per-tetrahedron integral is discretized, so the normalization is fixed once
per ``(N, scheme)`` by Richardson extrapolation on a generator map.
"""

import numpy as np

import homotopykit as hk
from homotopykit.lie import calibration_info

for n in (2, 3):
    info = calibration_info(n)
    print(f"SU({n}) {info['scheme']}: multiplier {info['calibration']:.6f} "
          f"(levels {info['levels']}, extrapolation order {info['order']:.2f})")

mesh = hk.build_s3(3)
ks = np.arange(-2, 4)
raw = {}
for scheme in ("polar", "first_order"):
    raw[scheme] = np.array([hk.secondary_invariant(hk.quaternion_power_map(mesh, int(k)),
                                                   scheme=scheme, strict=False).raw[0] for k in ks])

print("\n  k       polar  first_order")
for i, k in enumerate(ks):
    print(f"{k:+3d}  {raw['polar'][i]:10.6f}  {raw['first_order'][i]:11.6f}")

# least-squares slope of raw value against k
for scheme, r in raw.items():
    print(f"{scheme:>11s} slope {np.polyfit(ks, r, 1)[0]:.6f}")

# the same generator embedded in SU(3) gives the same integers
u3 = hk.embedded_power_map(mesh, 2, 3)
print("\nq^2 embedded in SU(3):", hk.secondary_invariant(u3).raw)

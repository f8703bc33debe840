"""
Homotopy classification of flag-valued maps
===========================================

Two maps ``phi, psi : M -> SU(N)/T`` are compared in stages.  Different
fluxes mean they are not even 2-homotopic.  Otherwise a lift
``u : M -> SU(N)`` with ``psi = u . phi`` exists, and its secondary
invariant, reduced modulo the lattice of stabilizer degrees, decides.
"""

import homotopykit as hk

s3 = hk.build_s3(3)
t3 = hk.build_t3(8)
cases = [
    ("Hopf vs Hopf", hk.hopf_map(s3, 1), hk.hopf_map(s3, 1)),
    ("Hopf vs Hopf^2", hk.hopf_map(s3, 1), hk.hopf_map(s3, 2)),
    ("torus d=1 vs d=2", hk.torus_degree_map(t3, 1), hk.torus_degree_map(t3, 2)),
    ("SU(3): constant vs flag(q)", hk.CosetMap.constant(s3, 3),
     hk.flag_projection(hk.embedded_power_map(s3, 1, 3))),
]
for name, phi, psi in cases:
    v = hk.homotopy_verdict(phi, psi)
    extra = f"coset {v.coset}" if v.coset is not None else f"difference {v.primary_difference.tolist()}"
    print(f"{name:28s} {v.tag:16s} {extra}")

# q^2 needs more resolution than a level-3 mesh offers: the smoothed lift
# develops a defect, which is reported instead of a wrong integer
phi, psi = hk.CosetMap.constant(s3, 2), hk.flag_projection(hk.quaternion_power_map(s3, 2))
v = hk.homotopy_verdict(phi, psi, max_subdivisions=0)
print("\nlevel 3, no refinement, constant vs flag(q^2):", v.tag, "|", v.reason)
# by default the verdict subdivides and resamples both maps, here once;
# confirming the result on level 5 would take minutes, so it is skipped
v = hk.homotopy_verdict(phi, psi, confirm=False)
print("with automatic refinement:", v.tag, "coset", v.coset,
      f"after {v.refinements} subdivision(s) (raw {v.secondary.raw[0]:.6f})")

# every decided verdict is recomputed one level finer by default.  A small
# rounding gap cannot expose aliasing, but disagreement between levels can
s2 = hk.build_s3(2)
a, b = hk.hopf_map(s2, 1), hk.hopf_map(s2, 2)
v = hk.homotopy_verdict(a, b, confirm=False)
print("\nlevel 2, Hopf vs Hopf^2, unconfirmed:", v.tag, "coset", v.coset,
      f"(gap {v.gaps['secondary']:.4f})")
v = hk.homotopy_verdict(a, b)
print("confirmed:", v.tag, "|", v.reason)

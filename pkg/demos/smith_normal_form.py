"""
Integer homology with the Smith normal form
===========================================

Betti numbers and torsion come from elementary divisors of the boundary
matrices.  Everything is exact integer arithmetic.
"""

import numpy as np

import homotopykit as hk
from homotopykit.homology import dump_abstract_complex

A = np.array([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
U, D, V = hk.smith_normal_form(A)
print("A =\n", A, "\nD = U A V =\n", D)
assert np.array_equal(U.dot(A.astype(object)).dot(V), D)

# real projective plane on six vertices: H_1 = Z/2
rp2 = hk.rp2_boundaries()
for k, h in enumerate(hk.complex_homology(rp2)):
    parts = ([f"Z^{h.betti}"] if h.betti else []) + [f"Z/{t}" for t in h.torsion]
    print(f"H_{k}(RP^2) = {' + '.join(parts) or '0'}")

# the same complex as the JSON layout accepted by `homotopykit homology --complex`
print(dump_abstract_complex(rp2)[1]["entries"][:4], "...")

for name, mesh in (("S^3", hk.build_s3(2)), ("T^3", hk.build_t3(3))):
    print(name, mesh.counts, "Betti", hk.betti_numbers(mesh))

"""
Primary invariant on the 3-torus
================================

On ``T^3`` the second homology is ``Z^3``.  A map into the flag manifold is
determined up to 2-homotopy by the Berry fluxes of its projectors through a
basis of 2-cycles.  The basis is normalized so cycle ``i`` is the
coordinate torus normal to axis ``i``.
"""

import numpy as np

import homotopykit as hk
from homotopykit.homology import coordinate_pairing

mesh = hk.build_t3(8)
print(mesh, "Betti numbers", hk.betti_numbers(mesh))

cycles = hk.two_cycle_basis(mesh)
pairing = coordinate_pairing(mesh, [z.as_array(mesh.counts[2]) for z in cycles])
print("pairing with (dy^dz, dz^dx, dx^dy):\n", pairing)

# Degree-d maps of the xy-torus onto S^2, constant along z
for d in range(4):
    inv = hk.primary_invariant(hk.torus_degree_map(mesh, d))
    print(f"d={d}: flux rows {inv.fluxes.tolist()}  gap {inv.gap:.1e}")

# Fluxes are gauge invariant: acting by a smooth SU(2)-valued map (here a diagonal one)
# leaves them unchanged
phi = hk.torus_degree_map(mesh, 2)
w = hk.diagonal_torus_map(mesh, 2, rng=0, amplitude=0.5)
print("after acting by a torus-valued map:", hk.primary_invariant(phi.act(w)).fluxes[2])

a, b = hk.torus_degree_map(mesh, 1), hk.torus_degree_map(mesh, 3)
print("primary difference (1 vs 3):", hk.primary_difference(a, b).tolist())
print("2-homotopic:", hk.is_2_homotopic(a, b), hk.is_2_homotopic(a, a))

# coarse grids alias the map; the flux is still an integer but the wrong one
coarse = hk.build_t3(4)
print("\nd=3 on a 4^3 grid:", hk.primary_invariant(hk.torus_degree_map(coarse, 3)).fluxes[2],
      "(aliased)")

"""Homotopy classification of maps from closed 3-manifolds into flag manifolds.

Maps ``M^3 -> SU(N)/T`` are compared in two stages: the primary invariant
(Berry fluxes through a basis of 2-cycles) decides 2-homotopy, and the
secondary invariant (the calibrated Wess-Zumino integral of a relative lift)
decides homotopy modulo the stabilizer lattice.
"""

from .errors import (AntipodalDegenerate, BranchCut, DegenerateTriangle, GapTooLarge,
                     HomotopyKitError, MeshMismatch, NonConvergent, NotAComplex,
                     NotAStabilizer, PrimaryMismatch, ResourceLimit, SingularInput,
                     SizeMismatch, SolveFailed)
from .fixtures import (diagonal_torus_map, embedded_power_map, hopf_map, quaternion_power_map,
                       random_gauge_map, torus_degree_map)
from .homology import (HomologySummary, betti_numbers, complex_homology, elementary_divisors,
                       homology, rp2_boundaries, smith_normal_form, two_cycle_basis)
from .invariants import (PrimaryInvariant, SecondaryInvariant, conjugation_invariance_check,
                         is_2_homotopic, primary_difference, primary_invariant,
                         secondary_invariant, stabilizer_lattice, whitehead_hopf)
from .lattice import Lattice, hermite_normal_form
from .lie import (GroupSpec, calibration_info, nominal_constant, principal_log, project_unitary,
                  wz_tet, wz_tet_values)
from .lifting import (LiftResult, Verdict, construct_lift, homotopy_verdict, is_nullhomotopic,
                      pointwise_transporter)
from .maps import (CosetMap, GroupMap, flag_projection, hopf_projection, pointwise_conjugate,
                   pointwise_inverse, pointwise_product, resample)
from .mesh import SimplicialComplex3, TwoCycle, build_s3, build_t3, integrate_3form, subdivide

__all__ = [
    "AntipodalDegenerate",
    "betti_numbers",
    "BranchCut",
    "build_s3",
    "build_t3",
    "calibration_info",
    "complex_homology",
    "conjugation_invariance_check",
    "construct_lift",
    "CosetMap",
    "DegenerateTriangle",
    "diagonal_torus_map",
    "elementary_divisors",
    "embedded_power_map",
    "flag_projection",
    "GapTooLarge",
    "GroupMap",
    "GroupSpec",
    "hermite_normal_form",
    "homology",
    "HomologySummary",
    "homotopy_verdict",
    "HomotopyKitError",
    "hopf_map",
    "hopf_projection",
    "integrate_3form",
    "is_2_homotopic",
    "is_nullhomotopic",
    "Lattice",
    "LiftResult",
    "MeshMismatch",
    "nominal_constant",
    "NonConvergent",
    "NotAComplex",
    "NotAStabilizer",
    "pointwise_conjugate",
    "pointwise_inverse",
    "pointwise_product",
    "pointwise_transporter",
    "primary_difference",
    "primary_invariant",
    "PrimaryInvariant",
    "PrimaryMismatch",
    "principal_log",
    "project_unitary",
    "quaternion_power_map",
    "random_gauge_map",
    "resample",
    "ResourceLimit",
    "rp2_boundaries",
    "secondary_invariant",
    "SecondaryInvariant",
    "SimplicialComplex3",
    "SingularInput",
    "SizeMismatch",
    "smith_normal_form",
    "SolveFailed",
    "stabilizer_lattice",
    "subdivide",
    "torus_degree_map",
    "two_cycle_basis",
    "TwoCycle",
    "Verdict",
    "whitehead_hopf",
    "wz_tet",
    "wz_tet_values",
]

__version__ = "0.1.0"

"""Primary and secondary homotopy invariants of sampled maps.

Primary invariant
    Berry-phase fluxes of the projector line bundles through a basis of
    integer 2-cycles.  On a triangle ``(v0, v1, v2)`` the flux of ``P_k`` is
    ``arg tr(P_k(v0) P_k(v1) P_k(v2)) / 2 pi``; sums over closed surfaces are
    exactly integral (Chern numbers of the sampled line bundle).
Secondary invariant
    ``c tr((u^-1 du)^3)`` integrated over the mesh, calibrated so that the
    generator of pi_3 integrates to one.
Whitehead oracle
    Hopf invariant of an S^2-valued map as ``sum alpha cup F`` with
    ``delta alpha = F``, independent of any lift to SU(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import lsqr

from ._parallel import chunked_map
from .errors import BranchCut, DegenerateTriangle, GapTooLarge, NotAStabilizer, SolveFailed
from .homology import two_cycle_basis
from .lattice import Lattice
from .lie import calibration_info, wz_tet_values
from .maps import CosetMap, GroupMap, _same, pointwise_conjugate, pointwise_inverse
from .mesh import integrate_3form

__all__ = [
    "GAP_LIMIT",
    "PrimaryInvariant",
    "SecondaryInvariant",
    "triangle_fluxes",
    "primary_invariant",
    "primary_difference",
    "is_2_homotopic",
    "secondary_invariant",
    "whitehead_hopf",
    "stabilizer_lattice",
    "conjugation_invariance_check",
]

GAP_LIMIT = 0.25
DEGENERATE_TOL = 1e-9
SOLVE_TOL = 1e-8
STABILIZER_TOL = 1e-8


def _gap(raw):
    raw = np.asarray(raw, dtype=float)
    return float(np.max(np.abs(raw - np.round(raw)))) if raw.size else 0.0


@dataclass(frozen=True)
class PrimaryInvariant:
    """Integer flux matrix: rows are 2-cycles, columns projector indices.

    For several group factors the columns of all factors are concatenated.
    """

    fluxes: np.ndarray
    raw: np.ndarray
    gap: float

    def to_dict(self):
        return {"raw": self.raw.tolist(), "value": self.fluxes.tolist(), "gap": self.gap}


@dataclass(frozen=True)
class SecondaryInvariant:
    raw: tuple
    value: tuple
    gap: float
    calibration: tuple
    constants: tuple
    scheme: str

    def to_dict(self):
        return {"raw": list(self.raw), "value": list(self.value), "gap": self.gap,
                "calibration": list(self.calibration)}


# ------------------------------------------------------------------ primary

def triangle_fluxes(phi: CosetMap, threads=None):
    """Per-triangle Berry fluxes, shape (F, sum of N over factors).

    Triangles and their orientation follow ``phi.complex.triangles``.

    Raises
    ------
    DegenerateTriangle
        If some ``|tr(P(v0) P(v1) P(v2))| < 1e-9``.
    """
    tri = phi.complex.triangles
    cols = []
    for P in phi.values:
        def work(a, b, P=P):
            t = tri[a:b]
            prod = P[t[:, 0]] @ P[t[:, 1]] @ P[t[:, 2]]
            return np.trace(prod, axis1=-2, axis2=-1)
        tr = np.concatenate(chunked_map(work, len(tri), threads)) if len(tri) else \
            np.zeros((0, P.shape[1]), dtype=complex)
        small = np.abs(tr) < DEGENERATE_TOL
        if np.any(small):
            where = np.flatnonzero(np.any(small, axis=1))
            raise DegenerateTriangle(
                f"{len(where)} triangles with vanishing projector overlap; subdivide the mesh",
                where=where)
        cols.append(np.angle(tr) / (2 * np.pi))
    return np.concatenate(cols, axis=1)


def primary_invariant(phi: CosetMap, basis=None, *, strict=True, threads=None) -> PrimaryInvariant:
    """Fluxes of every projector through every basis 2-cycle.

    Parameters
    ----------
    basis : list of TwoCycle, optional
        Defaults to :func:`homotopykit.homology.two_cycle_basis`.
    strict : bool
        Raise :class:`GapTooLarge` when some raw flux is 0.25 or more away
        from an integer.
    """
    c = phi.complex
    if basis is None:
        basis = two_cycle_basis(c)
    width = sum(phi.group.factors)
    if not basis:
        empty = np.zeros((0, width))
        return PrimaryInvariant(empty.astype(np.int64), empty, 0.0)
    F = triangle_fluxes(phi, threads)
    raw = np.zeros((len(basis), width))
    for i, z in enumerate(basis):
        idx = np.array(z.support, dtype=np.int64)
        if idx.size and idx.max() >= len(F):
            raise ValueError("2-cycle does not belong to this mesh")
        coef = np.array([z.coefficients[t] for t in z.support], dtype=float)
        for k in range(width):
            raw[i, k] = math.fsum((coef * F[idx, k]).tolist())
    gap = _gap(raw)
    if strict and gap >= GAP_LIMIT:
        raise GapTooLarge(f"primary flux gap {gap:.3f} >= {GAP_LIMIT}; refine the mesh", gap=gap)
    return PrimaryInvariant(np.round(raw).astype(np.int64), raw, gap)


def primary_difference(phi: CosetMap, psi: CosetMap, basis=None, *, threads=None):
    """``primary(phi) - primary(psi)`` as an integer matrix."""
    _same(phi, psi)
    if basis is None:
        basis = two_cycle_basis(phi.complex)
    a = primary_invariant(phi, basis, threads=threads)
    b = primary_invariant(psi, basis, threads=threads)
    return a.fluxes - b.fluxes


def is_2_homotopic(phi: CosetMap, psi: CosetMap, basis=None, *, threads=None) -> bool:
    return not np.any(primary_difference(phi, psi, basis, threads=threads))


# ------------------------------------------------------------------ secondary

def secondary_invariant(u: GroupMap, *, scheme=None, strict=True, threads=None) -> SecondaryInvariant:
    """Calibrated integral of ``c tr((u^-1 du)^3)`` for every group factor.

    Parameters
    ----------
    scheme : {"polar", "first_order"}, optional
        Discretization of the tet integral; defaults to ``u.group.scheme``.
    strict : bool
        Raise :class:`GapTooLarge` if the rounding gap is 0.25 or more.

    Raises
    ------
    BranchCut
        With ``where`` holding the offending tet indices.
    """
    c = u.complex
    group = u.group
    scheme = scheme or group.scheme
    if group.calibration is not None and scheme == group.scheme:
        cals = group.calibration
    else:
        cals = tuple(calibration_info(n, scheme)["calibration"] for n in group.factors)
    raws = []
    tets, orient = c.tets, c.orientations
    for U, const, cal in zip(u.values, group.wz_constants, cals):
        def work(a, b, U=U):
            try:
                return wz_tet_values(U[tets[a:b]], orient[a:b], scheme)
            except BranchCut as err:
                where = None if err.where is None else np.asarray(err.where) + a
                raise BranchCut(str(err), where=where) from None
        dens = np.concatenate(chunked_map(work, c.n_tets, threads)) if c.n_tets else np.zeros(0)
        raws.append(float(cal * const * integrate_3form(c, dens)))
    raw = tuple(raws)
    gap = _gap(raw)
    if strict and gap >= GAP_LIMIT:
        raise GapTooLarge(f"secondary gap {gap:.3f} >= {GAP_LIMIT}; refine the mesh", gap=gap)
    return SecondaryInvariant(raw, tuple(int(round(r)) for r in raw), gap, tuple(cals),
                              tuple(group.wz_constants), scheme)


# ------------------------------------------------------------------ Whitehead oracle

def whitehead_hopf(phi: CosetMap, *, threads=None) -> float:
    """Hopf invariant of an S^2-valued map on a mesh with ``b_2 = 0``.

    ``F`` is the Berry flux 2-cochain of the first projector; ``alpha``
    solves ``delta alpha = F`` in the least-squares sense; the result is
    the pairing of the ordered cup product ``alpha cup F`` with the
    fundamental class.
    """
    c = phi.complex
    if phi.group.factors != (2,):
        raise ValueError("whitehead_hopf needs an S^2 = SU(2)/U(1) map")
    if c.periodic:
        raise ValueError("whitehead_hopf needs a mesh with vanishing second Betti number")
    F = triangle_fluxes(phi, threads)[:, 0]
    delta = c.boundary_matrix(2).T.tocsr().astype(float)
    sol = lsqr(delta, F, atol=1e-14, btol=1e-14, iter_lim=20 * delta.shape[1])
    alpha = sol[0]
    resid = float(np.linalg.norm(delta @ alpha - F))
    if resid > SOLVE_TOL:
        raise SolveFailed(f"coboundary solve residual {resid:.2e} > {SOLVE_TOL}")
    edge_index = {tuple(e): i for i, e in enumerate(c.edges.tolist())}
    tri_index = {tuple(t): i for i, t in enumerate(c.triangles.tolist())}
    tets = c.canonical_tets.tolist()
    front = np.array([edge_index[(t[0], t[1])] for t in tets])
    back = np.array([tri_index[(t[1], t[2], t[3])] for t in tets])
    vals = c.fundamental_class * alpha[front] * F[back]
    return math.fsum(vals.tolist())


# ------------------------------------------------------------------ stabilizers

def stabilizer_lattice(phi: CosetMap, generators, *, threads=None) -> Lattice:
    """HNF lattice spanned by the secondary values of stabilizer maps.

    Raises
    ------
    NotAStabilizer
        If some generator moves ``phi`` by more than 1e-8 at a vertex.
    """
    dim = len(phi.group.factors)
    values = []
    for i, w in enumerate(generators):
        moved = float(np.max(phi.act(w).distance(phi), initial=0.0))
        if moved > STABILIZER_TOL:
            raise NotAStabilizer(f"generator {i} moves phi by {moved:.2e}")
        values.append(secondary_invariant(w, threads=threads).value)
    return Lattice(values, dim)


def conjugation_invariance_check(w: GroupMap, u: GroupMap, *, threads=None) -> float:
    """``|raw(u w u^-1) - raw(w)|_inf``; zero up to discretization error."""
    conj = pointwise_conjugate(w, u)
    a = secondary_invariant(conj, strict=False, threads=threads).raw
    b = secondary_invariant(w, strict=False, threads=threads).raw
    return float(max(abs(x - y) for x, y in zip(a, b)))


def inversion_defect(u: GroupMap, *, threads=None) -> float:
    """``|raw(u^-1) + raw(u)|_inf``."""
    a = secondary_invariant(pointwise_inverse(u), strict=False, threads=threads).raw
    b = secondary_invariant(u, strict=False, threads=threads).raw
    return float(max(abs(x + y) for x, y in zip(a, b)))

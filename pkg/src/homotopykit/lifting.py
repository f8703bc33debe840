"""Relative lifts ``psi = u . phi`` and the homotopy verdict pipeline.

The lift is built vertexwise from the direct-rotation transporter and then
smoothed by a right gauge ``u_i -> u_i s_i`` with ``s_i`` in the stabilizer
torus of ``phi_i``.  Such a gauge leaves ``u . phi`` exactly unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .errors import (AntipodalDegenerate, BranchCut, DegenerateTriangle, HomotopyKitError,
                     NonConvergent, PrimaryMismatch, ResourceLimit, SingularInput)
from .homology import two_cycle_basis
from .invariants import (GAP_LIMIT, primary_invariant, secondary_invariant,
                         stabilizer_lattice)
from .lie import dagger
from .maps import CosetMap, GroupMap, _same, resample
from .mesh import subdivide

__all__ = [
    "ANTIPODAL_ANGLE",
    "LiftResult",
    "Verdict",
    "pointwise_transporter",
    "construct_lift",
    "homotopy_verdict",
    "is_nullhomotopic",
]

ANTIPODAL_ANGLE = 1e-4
# squared overlap |<p|q>|^2 = cos^2(angle / 2) of two Bloch vectors at
# angle pi - ANTIPODAL_ANGLE
OVERLAP_TOL = np.sin(ANTIPODAL_ANGLE / 2) ** 2
RESIDUAL_TOL = 1e-8


def _det_correct(g):
    n = g.shape[-1]
    phase = np.angle(np.linalg.det(g))
    return g * np.exp(-1j * phase / n)[..., None, None]


def _polar(A):
    W, s, Vh = np.linalg.svd(A)
    return W @ Vh, s


def _transport(P, Q, X=None):
    """Polar factor of ``sum_k Q_k X P_k`` and the smallest overlap."""
    if X is None:
        M = np.einsum("...kab,...kbc->...ac", Q, P)
    else:
        M = np.einsum("...kab,...bc,...kcd->...ad", Q, X, P)
    g, s = _polar(M)
    return _det_correct(g), s[..., -1]


def pointwise_transporter(p, q):
    """Minimal-rotation ``g`` in SU(N) with ``g p_k g^dagger = q_k`` for all k.

    Parameters
    ----------
    p, q : (..., N, N, N) arrays of ordered projector tuples

    Notes
    -----
    ``g`` is the unitary polar factor of ``sum_k Q_k P_k``, which maps every
    line of ``p`` onto the matching line of ``q``; its determinant phase is
    removed with the principal N-th root.  For S^2 this is the rotation in
    the plane of the two Bloch vectors, with ``tr g > 0``.

    Raises
    ------
    AntipodalDegenerate
        If some line of ``q`` is orthogonal (within the antipodal tolerance)
        to the matching line of ``p``.
    """
    P = np.asarray(p, dtype=complex)
    Q = np.asarray(q, dtype=complex)
    overlap = np.real(np.einsum("...kab,...kba->...k", P, Q))
    bad = np.min(overlap, axis=-1) <= OVERLAP_TOL
    if np.any(bad):
        raise AntipodalDegenerate("no minimal transporter between (nearly) antipodal points",
                                  where=np.flatnonzero(np.ravel(bad)))
    g, _ = _transport(P, Q)
    return g


@dataclass
class LiftResult:
    u: GroupMap
    residual: float
    edge_gap: float
    iterations: int
    energy: float
    initial_energy: float
    repaired_vertices: tuple = ()

    @property
    def smoothing_report(self):
        return {"iterations": self.iterations, "energy": self.energy,
                "initial_energy": self.initial_energy}

    def to_dict(self):
        return {"residual": self.residual, "edge_gap": self.edge_gap,
                "smoothing": self.smoothing_report,
                "repaired_vertices": list(self.repaired_vertices)}


def _greedy_coloring(A):
    n = A.shape[0]
    colors = -np.ones(n, dtype=np.int64)
    indptr, indices = A.indptr, A.indices
    for v in range(n):
        used = set(colors[indices[indptr[v]:indptr[v + 1]]].tolist())
        c = 0
        while c in used:
            c += 1
        colors[v] = c
    return [np.flatnonzero(colors == c) for c in range(colors.max() + 1)] if n else []


def _energy(U, edges):
    if len(edges) == 0:
        return 0.0
    d = U[edges[:, 0]] - U[edges[:, 1]]
    return float(np.sum(np.abs(d) ** 2))


def _spectral_phases(G, P, A, edges):
    """Per-projector U(1) synchronization: top eigenvectors of W^k."""
    n_v, n = P.shape[0], P.shape[1]
    z = np.ones((n_v, n), dtype=complex)
    if len(edges) == 0 or n_v < 3:
        return z
    i, j = edges[:, 0], edges[:, 1]
    rel = dagger(G[i]) @ G[j]
    for k in range(n):
        # W_ij = tr(P_k,i g_i^dag g_j P_k,j)
        w = np.einsum("eab,ebc,eca->e", P[i, k], rel, P[j, k])
        W = sp.coo_matrix((np.r_[w, np.conj(w)], (np.r_[i, j], np.r_[j, i])),
                          shape=(n_v, n_v)).tocsr()
        try:
            _, vec = eigsh(W, k=1, which="LA", v0=np.ones(n_v, dtype=complex), tol=1e-10)
            v = vec[:, 0]
        except Exception:
            v = np.ones(n_v, dtype=complex)
        mag = np.abs(v)
        z[:, k] = np.where(mag > 1e-300, v / np.where(mag > 0, mag, 1.0), 1.0)
    return z


def _det_potential(z, edges, n_v):
    """Continuous branch of ``arg prod_k z_ik`` via a least-squares potential."""
    theta = np.angle(np.prod(z, axis=1))
    if len(edges) == 0:
        return theta
    i, j = edges[:, 0], edges[:, 1]
    w = np.angle(np.exp(1j * (theta[j] - theta[i])))
    m = len(edges)
    D = sp.coo_matrix((np.r_[-np.ones(m), np.ones(m)], (np.r_[np.arange(m), np.arange(m)], np.r_[i, j])),
                      shape=(m, n_v)).tocsr()
    L = (D.T @ D).tolil()
    rhs = D.T @ w
    # pin vertex 0 to its own phase
    L[0, :] = 0
    L[0, 0] = 1
    rhs[0] = theta[0]
    phi = sp.linalg.spsolve(L.tocsc(), rhs)
    return theta + 2 * np.pi * np.round((phi - theta) / (2 * np.pi))


def _gauge(P, z):
    """``s_i = sum_k z_ik P_k(phi_i)``."""
    return np.einsum("vk,vkab->vab", z, P)


def _fiber_phases(G, P, U0):
    """Phases putting ``G s`` nearest to ``U0`` within the fibre of lifts."""
    z = np.einsum("vkab,vbc,vca->vk", P, dagger(G), U0)
    mag = np.abs(z)
    z = np.where(mag > 1e-300, z / np.where(mag > 0, mag, 1.0), 1.0)
    # fix the determinant; a good initial guess keeps the correction small
    return z * np.exp(-1j * np.angle(np.prod(z, axis=1)) / z.shape[1])[:, None]


def _smooth(G, P, mesh, max_sweeps, tol, U0=None):
    n_v, n = P.shape[0], P.shape[1]
    edges = mesh.edges
    edges = edges[edges[:, 0] != edges[:, 1]]
    A = mesh.vertex_adjacency.tocsr()
    if U0 is None:
        z = _spectral_phases(G, P, A, edges)
        Phi = _det_potential(z, edges, n_v)
        z = z * np.exp(-1j * Phi / n)[:, None]
    else:
        z = _fiber_phases(G, P, U0)
    U = G @ _gauge(P, z)
    e0 = _energy(G, edges)
    energy = _energy(U, edges)
    colors = _greedy_coloring(A)
    pairs = [(k, l) for k in range(n) for l in range(k + 1, n)]
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        for verts in colors:
            M = A[verts] @ U.reshape(n_v, -1)
            M = np.asarray(M).reshape(len(verts), n, n)
            Pv = P[verts]
            # A_k = tr(P_k u_i^dag M)
            Ak = np.einsum("vkab,vbc,vca->vk", Pv, dagger(U[verts]), M)
            s = np.ones((len(verts), n), dtype=complex)
            for k, l in pairs:
                delta = np.angle(Ak[:, k] + np.conj(Ak[:, l]))
                rot = np.exp(1j * delta)
                s[:, k] *= rot
                s[:, l] *= np.conj(rot)
                Ak[:, k] *= np.conj(rot)
                Ak[:, l] *= rot
            U[verts] = U[verts] @ _gauge(Pv, s)
        new = _energy(U, edges)
        done = energy - new <= tol * max(energy, 1e-300)
        energy = new
        if done:
            break
    else:
        if max_sweeps:
            raise NonConvergent(f"gauge smoothing did not converge in {max_sweeps} sweeps")
    return U, sweeps, energy, e0


def construct_lift(phi: CosetMap, psi: CosetMap, *, basis=None, edge_gap_bound=None,
                   initial=None, max_sweeps=500, tol=1e-12, threads=None) -> LiftResult:
    """Continuous ``u`` with ``u . phi = psi``, sampled at the mesh vertices.

    Parameters
    ----------
    basis : list of TwoCycle, optional
        Used for the obstruction check; computed if omitted.
    edge_gap_bound : float, optional
        Defaults to ``max(phi.edge_gap, psi.edge_gap) + 0.5``.
    initial : GroupMap, optional
        Starting guess, e.g. a coarse lift resampled to this mesh.  It
        replaces the spectral phase synchronization and saves most sweeps
        on fine meshes.

    Raises
    ------
    PrimaryMismatch
        The primary invariants differ, so no lift exists.
    AntipodalDegenerate
        Some vertex has antipodal targets and no usable neighbour reference.
    NonConvergent
        Smoothing stalled or the smoothed lift exceeds ``edge_gap_bound``.
    """
    _same(phi, psi)
    c = phi.complex
    if basis is None:
        basis = two_cycle_basis(c)
    if basis:
        a = primary_invariant(phi, basis, threads=threads)
        b = primary_invariant(psi, basis, threads=threads)
        diff = a.fluxes - b.fluxes
        if np.any(diff):
            raise PrimaryMismatch("primary invariants differ; no lift exists", difference=diff)
    if edge_gap_bound is None:
        edge_gap_bound = max(phi.edge_gap, psi.edge_gap) + 0.5

    if initial is not None:
        _same(phi, initial)
    values, repaired = [], set()
    iterations, energy, e0 = 0, 0.0, 0.0
    for f, (P, Q) in enumerate(zip(phi.values, psi.values)):
        if np.array_equal(P, Q):
            n = P.shape[-1]
            values.append(np.broadcast_to(np.eye(n, dtype=complex), (c.n_vertices, n, n)).copy())
            continue
        G, fixed = _transporters(P, Q, c)
        repaired.update(fixed)
        U0 = None if initial is None else initial.values[f]
        U, it, en, en0 = _smooth(G, P, c, max_sweeps, tol, U0)
        iterations = max(iterations, it)
        energy += en
        e0 += en0
        values.append(U)
    u = GroupMap(c, values, phi.group, check=False)
    residual = float(np.max(u_phi_distance(u, phi, psi), initial=0.0))
    if residual > RESIDUAL_TOL:
        raise NonConvergent(f"lift residual {residual:.2e} exceeds {RESIDUAL_TOL}")
    gap = u.edge_gap
    if gap > edge_gap_bound:
        raise NonConvergent(f"lift edge gap {gap:.3f} exceeds the bound {edge_gap_bound:.3f}")
    return LiftResult(u, residual, gap, iterations, energy, e0, tuple(sorted(repaired)))


def u_phi_distance(u, phi, psi):
    return phi.act(u).distance(psi)


def _transporters(P, Q, c):
    """Direct-rotation transporters; antipodal vertices use neighbour references."""
    overlap = np.real(np.einsum("vkab,vkba->vk", P, Q)).min(axis=1)
    bad = np.flatnonzero(overlap <= OVERLAP_TOL)
    good = overlap > OVERLAP_TOL
    G = np.empty(P.shape[:1] + P.shape[2:], dtype=complex)
    if np.any(good):
        G[good], _ = _transport(P[good], Q[good])
    if bad.size == 0:
        return G, []
    A = c.vertex_adjacency.tocsr()
    for v in bad:
        nbrs = [w for w in A.indices[A.indptr[v]:A.indptr[v + 1]] if good[w]]
        if not nbrs:
            raise AntipodalDegenerate("antipodal vertex without a regular neighbour; subdivide",
                                      where=np.array([v]))
        X = G[nbrs].mean(axis=0)
        g, smin = _transport(P[v], Q[v], X)
        if smin <= np.sqrt(OVERLAP_TOL):
            raise AntipodalDegenerate("neighbour reference is degenerate too; subdivide",
                                      where=np.array([v]))
        G[v] = g
    return G, bad.tolist()


# ------------------------------------------------------------------ verdicts

TAGS = ("NotTwoHomotopic", "Homotopic", "NotHomotopic", "Inconclusive")


@dataclass
class Verdict:
    tag: str
    primary_difference: np.ndarray = None
    lift: LiftResult = None
    secondary: object = None
    lattice: object = None
    coset: list = None
    gaps: dict = field(default_factory=dict)
    reason: str = ""
    refinements: int = 0
    mesh: str = None
    confirmed_on: str = None

    def to_dict(self):
        out = {"verdict": self.tag, "gaps": self.gaps, "refinements": self.refinements}
        if self.mesh is not None:
            out["mesh"] = self.mesh
        if self.confirmed_on is not None:
            out["confirmed_on"] = self.confirmed_on
        if self.reason:
            out["reason"] = self.reason
        if self.primary_difference is not None:
            out["primary_difference"] = np.asarray(self.primary_difference).tolist()
        if self.secondary is not None:
            out["secondary"] = self.secondary.to_dict()
        if self.lattice is not None:
            out["lattice"] = self.lattice.to_dict()
        if self.coset is not None:
            out["coset"] = list(self.coset)
        if self.lift is not None:
            out["lift"] = self.lift.to_dict()
        return out


# failures that a finer mesh can cure
_REFINABLE = (BranchCut, NonConvergent, AntipodalDegenerate, DegenerateTriangle)
MAX_SUBDIVISIONS = 2


def homotopy_verdict(phi: CosetMap, psi: CosetMap, stabilizer_generators=(), *,
                     basis=None, max_subdivisions=MAX_SUBDIVISIONS, confirm=True,
                     threads=None) -> Verdict:
    """Decide whether ``phi`` and ``psi`` are homotopic.

    Pipeline: primary difference, lift, secondary invariant of the lift,
    stabilizer lattice, coset reduction.

    A branch cut, an antipodal vertex without a usable reference, a
    degenerate triangle or stalled smoothing triggers a subdivision with
    midpoint resampling of both maps and of the stabilizer generators, at
    most ``max_subdivisions`` times; after that the verdict is
    ``Inconclusive``.  Rounding gaps of 0.25 or more give ``Inconclusive``
    at once, with a refinement suggestion.

    With ``confirm`` (the default) a decided verdict is recomputed on one
    further subdivision, warm-started from the resampled lift, and must
    come out the same.  Small gaps cannot reveal aliasing on coarse meshes;
    this check can.  It costs roughly eight times the first pass.
    """
    _same(phi, psi)
    gens = list(stabilizer_generators)
    v, phi, psi, gens = _refined_verdict(phi, psi, gens, basis, max_subdivisions, threads)
    if not confirm or v.tag == "Inconclusive":
        return v
    try:
        fine = subdivide(phi.complex)
    except ResourceLimit as limit:
        return replace(v, tag="Inconclusive", reason=f"cannot confirm under subdivision: {limit}")
    initial = resample(v.lift.u, fine) if v.lift is not None else None
    try:
        w = _verdict_once(resample(phi, fine), resample(psi, fine),
                          [resample(g, fine) for g in gens], None, threads, initial)
    except _REFINABLE as err:
        return replace(v, tag="Inconclusive",
                       reason=f"confirmation failed: {type(err).__name__}: {err}")
    if (w.tag, w.coset) != (v.tag, v.coset):
        return replace(v, tag="Inconclusive",
                       reason=f"verdict changed under subdivision: {_describe(v)} on "
                              f"{phi.complex.id}, {_describe(w)} on {fine.id}")
    v.confirmed_on = fine.id
    return v


def _describe(v):
    return v.tag if v.coset is None else f"{v.tag} {v.coset}"


def _refined_verdict(phi, psi, gens, basis, max_subdivisions, threads):
    refinements = 0
    while True:
        try:
            v = _verdict_once(phi, psi, gens, basis, threads)
        except _REFINABLE as err:
            if refinements >= max_subdivisions:
                v = Verdict("Inconclusive", reason=f"{type(err).__name__}: {err}; persisted "
                                                   f"after {refinements} subdivision(s)")
                break
            try:
                fine = subdivide(phi.complex)
            except ResourceLimit as limit:
                v = Verdict("Inconclusive", reason=f"{type(err).__name__}: {err}; {limit}")
                break
            phi, psi = resample(phi, fine), resample(psi, fine)
            gens = [resample(w, fine) for w in gens]
            basis = None
            refinements += 1
            continue
        break
    v.refinements = refinements
    v.mesh = phi.complex.id
    return v, phi, psi, gens


def _verdict_once(phi, psi, gens, basis, threads, initial=None):
    if basis is None:
        basis = two_cycle_basis(phi.complex)
    gaps = {}
    a = primary_invariant(phi, basis, strict=False, threads=threads)
    b = primary_invariant(psi, basis, strict=False, threads=threads)
    gaps["primary"] = max(a.gap, b.gap)
    if gaps["primary"] >= GAP_LIMIT:
        return Verdict("Inconclusive", gaps=gaps, reason="primary flux gap too large; refine")
    diff = a.fluxes - b.fluxes
    if np.any(diff):
        return Verdict("NotTwoHomotopic", primary_difference=diff, gaps=gaps)
    try:
        lift = construct_lift(phi, psi, basis=basis, initial=initial, threads=threads)
        sec = secondary_invariant(lift.u, strict=False, threads=threads)
    except SingularInput as err:
        return Verdict("Inconclusive", primary_difference=diff, gaps=gaps,
                       reason=f"{type(err).__name__}: {err}")
    gaps["secondary"] = sec.gap
    lattice = stabilizer_lattice(phi, gens, threads=threads)
    if sec.gap >= GAP_LIMIT:
        return Verdict("Inconclusive", primary_difference=diff, lift=lift, secondary=sec,
                       lattice=lattice, gaps=gaps, reason="secondary gap too large; refine")
    coset = lattice.reduce(sec.value)
    tag = "Homotopic" if not any(coset) else "NotHomotopic"
    return Verdict(tag, primary_difference=diff, lift=lift, secondary=sec, lattice=lattice,
                   coset=coset, gaps=gaps)


def is_nullhomotopic(u: GroupMap, *, threads=None) -> bool:
    """True iff the secondary invariant of ``u`` rounds to zero.

    Raises
    ------
    GapTooLarge
        When the rounding is not trustworthy.
    """
    sec = secondary_invariant(u, strict=True, threads=threads)
    return not any(sec.value)

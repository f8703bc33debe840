"""Vertex-sampled maps into SU(N) products and into flag manifolds SU(N)/T.

A point of the full flag manifold is stored as the ordered tuple of rank-1
orthogonal projectors ``(P_1, ..., P_N)`` with ``sum_k P_k = I``.  The group
acts by simultaneous conjugation, and the coset of ``g`` is the tuple
``P_k = g E_kk g^dagger``.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .errors import MeshMismatch
from .lie import GroupSpec, UNITARY_TOL, dagger, project_unitary
from .mesh import SimplicialComplex3

__all__ = [
    "GroupMap",
    "CosetMap",
    "pointwise_product",
    "pointwise_inverse",
    "pointwise_conjugate",
    "hopf_projection",
    "flag_projection",
    "resample",
]


def _as_factor_list(values, group):
    if isinstance(values, np.ndarray):
        values = [values]
    values = [np.asarray(v, dtype=complex) for v in values]
    if group is None:
        group = GroupSpec(tuple(v.shape[-1] for v in values))
    if len(values) != len(group.factors):
        raise ValueError(f"{len(values)} value arrays for {len(group.factors)} factors")
    return values, group


def _max_edge_gap(c, arrays):
    e = c.edges
    if len(e) == 0:
        return 0.0
    gap = 0.0
    for a in arrays:
        d = (a[e[:, 0]] - a[e[:, 1]]).reshape(len(e), -1)
        gap = max(gap, float(np.max(np.linalg.norm(d, axis=1))))
    return gap


class GroupMap:
    """Per-vertex SU(N_1) x ... x SU(N_k) values on a mesh.

    Parameters
    ----------
    mesh : SimplicialComplex3
    values : (V, N, N) array, or sequence of such arrays (one per factor)
    group : GroupSpec, optional
        Inferred from the value shapes if omitted.
    check : bool
        Verify unitarity and unit determinant to 1e-10.
    """

    def __init__(self, mesh, values, group=None, *, check=True):
        values, group = _as_factor_list(values, group)
        for v, n in zip(values, group.factors):
            if v.shape != (mesh.n_vertices, n, n):
                raise ValueError(f"expected values of shape {(mesh.n_vertices, n, n)}, got {v.shape}")
            if check:
                err = np.linalg.norm(dagger(v) @ v - np.eye(n), axis=(-2, -1))
                derr = np.abs(np.linalg.det(v) - 1.0)
                if v.size and (err.max() > UNITARY_TOL or derr.max() > UNITARY_TOL):
                    raise ValueError("values are not special unitary to 1e-10")
            v.setflags(write=False)
        self.complex = mesh
        self.group = group
        self.values = tuple(values)

    @property
    def complex_ref(self) -> str:
        return self.complex.id

    @property
    def n_factors(self) -> int:
        return len(self.values)

    @cached_property
    def edge_gap(self) -> float:
        """max over edges and factors of ``||U_i - U_j||_F``."""
        return _max_edge_gap(self.complex, self.values)

    @classmethod
    def identity(cls, mesh, group):
        if isinstance(group, int):
            group = GroupSpec((group,))
        vals = [np.broadcast_to(np.eye(n, dtype=complex), (mesh.n_vertices, n, n)).copy()
                for n in group.factors]
        return cls(mesh, vals, group, check=False)

    def __repr__(self):
        return f"GroupMap(factors={list(self.group.factors)}, n_vertices={self.complex.n_vertices})"


class CosetMap:
    """Per-vertex ordered projector tuples, one tuple per group factor.

    Parameters
    ----------
    mesh : SimplicialComplex3
    values : (V, N, N, N) array, or sequence of such arrays
        ``values[v, k]`` is the projector ``P_k`` at vertex ``v``.
    group : GroupSpec, optional
    check : bool
        Verify that every tuple is a full flag to 1e-10.
    """

    def __init__(self, mesh, values, group=None, *, check=True):
        values, group = _as_factor_list(values, group)
        for v, n in zip(values, group.factors):
            if v.shape != (mesh.n_vertices, n, n, n):
                raise ValueError(f"expected projectors of shape {(mesh.n_vertices, n, n, n)}, got {v.shape}")
            if check and v.size:
                _check_flags(v)
            v.setflags(write=False)
        self.complex = mesh
        self.group = group
        self.values = tuple(values)

    @property
    def complex_ref(self) -> str:
        return self.complex.id

    @cached_property
    def edge_gap(self) -> float:
        return _max_edge_gap(self.complex, self.values)

    @classmethod
    def constant(cls, mesh, group):
        if isinstance(group, int):
            group = GroupSpec((group,))
        vals = []
        for n in group.factors:
            base = np.zeros((n, n, n), dtype=complex)
            base[np.arange(n), np.arange(n), np.arange(n)] = 1.0
            vals.append(np.broadcast_to(base, (mesh.n_vertices, n, n, n)).copy())
        return cls(mesh, vals, group, check=False)

    def act(self, u: GroupMap) -> "CosetMap":
        """``u . phi``: simultaneous conjugation ``P_k -> u P_k u^dagger``."""
        _same(self, u)
        out = []
        for P, U in zip(self.values, u.values):
            Ue = U[:, None]
            out.append(Ue @ P @ dagger(Ue))
        return CosetMap(self.complex, out, self.group, check=False)

    def distance(self, other: "CosetMap"):
        """Per-vertex tuple distance ``sqrt(sum_k ||P_k - Q_k||_F^2)``, max over factors."""
        _same(self, other)
        d = np.zeros(self.complex.n_vertices)
        for P, Q in zip(self.values, other.values):
            diff = (P - Q).reshape(len(P), -1)
            d = np.maximum(d, np.linalg.norm(diff, axis=1))
        return d

    def __repr__(self):
        return f"CosetMap(factors={list(self.group.factors)}, n_vertices={self.complex.n_vertices})"


def _check_flags(P, tol=UNITARY_TOL):
    n = P.shape[-1]
    herm = np.linalg.norm(P - dagger(P), axis=(-2, -1)).max()
    idem = np.linalg.norm(P @ P - P, axis=(-2, -1)).max()
    total = np.linalg.norm(P.sum(axis=1) - np.eye(n), axis=(-2, -1)).max()
    rank = np.abs(np.trace(P, axis1=-2, axis2=-1) - 1.0).max()
    if max(herm, idem, total, rank) > tol:
        raise ValueError("values are not ordered rank-1 projector tuples to 1e-10")


def _same(a, b):
    if a.complex is not b.complex and a.complex.id != b.complex.id:
        raise MeshMismatch("maps live on different meshes")
    if a.group.factors != b.group.factors:
        raise MeshMismatch(f"group mismatch: {a.group.factors} vs {b.group.factors}")


def pointwise_product(u: GroupMap, v: GroupMap) -> GroupMap:
    _same(u, v)
    return GroupMap(u.complex, [a @ b for a, b in zip(u.values, v.values)], u.group, check=False)


def pointwise_inverse(u: GroupMap) -> GroupMap:
    return GroupMap(u.complex, [dagger(a) for a in u.values], u.group, check=False)


def pointwise_conjugate(u: GroupMap, v: GroupMap) -> GroupMap:
    """``v u v^-1`` vertexwise."""
    _same(u, v)
    return GroupMap(u.complex, [b @ a @ dagger(b) for a, b in zip(u.values, v.values)],
                    u.group, check=False)


def flag_projection(u: GroupMap) -> CosetMap:
    """Coset map ``g -> (g E_11 g^dagger, ..., g E_NN g^dagger)``."""
    out = []
    for U in u.values:
        # P_k = column k outer column k
        cols = np.swapaxes(U, -1, -2)
        out.append(cols[..., :, None] * np.conj(cols[..., None, :]))
    return CosetMap(u.complex, out, u.group, check=False)


def hopf_projection(u: GroupMap) -> CosetMap:
    """S^2 = SU(2)/U(1): ``u -> (P, I - P)`` with ``P = u E_11 u^dagger``."""
    if u.group.factors != (2,):
        raise ValueError("hopf_projection needs a single SU(2) factor")
    return flag_projection(u)


def _nearest_flag(A):
    """Ordered rank-1 projector tuples nearest to the near-flags ``A`` (..., N, N, N)."""
    A = 0.5 * (A + dagger(A))
    _, V = np.linalg.eigh(A)
    vecs = V[..., :, -1]  # (..., N, N) top eigenvector of each P_k
    M = np.swapaxes(vecs, -1, -2)  # columns are the vectors
    W, _, Vh = np.linalg.svd(M)
    Q = W @ Vh
    cols = np.swapaxes(Q, -1, -2)
    return cols[..., :, None] * np.conj(cols[..., None, :])


def resample(m, fine: SimplicialComplex3):
    """Extend a map from a coarse mesh to ``subdivide(coarse)``.

    Coarse vertices keep their values; every new vertex gets the average of
    its two parents, projected back to SU(N) (polar factor) or to the flag
    manifold (nearest ordered projector tuple).
    """
    parents = fine.parent_vertices
    if parents is None:
        raise MeshMismatch("mesh carries no parent information; build it with subdivide()")
    if parents.max(initial=-1) >= m.complex.n_vertices:
        raise MeshMismatch("fine mesh does not refine the map's mesh")
    a, b = parents[:, 0], parents[:, 1]
    out = []
    for vals in m.values:
        mid = 0.5 * (vals[a] + vals[b])
        new = a != b
        res = vals[a].copy()
        if np.any(new):
            if isinstance(m, GroupMap):
                res[new] = project_unitary(mid[new])
            else:
                res[new] = _nearest_flag(mid[new])
        out.append(res)
    return type(m)(fine, out, m.group, check=False)

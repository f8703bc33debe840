"""Exact integer homology via Smith normal form.

Everything here works over Python integers.  Two elimination routes:

* :func:`smith_normal_form` is the dense textbook reduction with
  minimal-absolute-value pivoting and full transforms ``U A V = D``.
* :func:`elementary_divisors` eliminates unit pivots on a sparse
  dict-of-dicts copy first (Markowitz-style choice to limit fill) and hands
  the small remainder to the dense routine.  Boundary matrices of meshes
  are almost entirely unit-pivot, so this scales to tens of thousands of
  simplices.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import NotAComplex
from .mesh import SimplicialComplex3, TwoCycle

__all__ = [
    "HomologySummary",
    "smith_normal_form",
    "elementary_divisors",
    "homology",
    "complex_homology",
    "betti_numbers",
    "two_cycle_basis",
    "coordinate_pairing",
    "rp2_boundaries",
    "load_abstract_complex",
    "dump_abstract_complex",
]


@dataclass(frozen=True)
class HomologySummary:
    betti: int
    torsion: tuple = field(default_factory=tuple)

    def __post_init__(self):
        t = tuple(int(x) for x in self.torsion)
        for a, b in zip(t, t[1:]):
            if b % a:
                raise ValueError("torsion coefficients must form a divisibility chain")
        if any(x < 2 for x in t):
            raise ValueError("torsion coefficients are >= 2")
        object.__setattr__(self, "torsion", t)

    def to_dict(self):
        return {"betti": self.betti, "torsion": list(self.torsion)}


# ------------------------------------------------------------------ dense SNF

def _to_rows(A):
    if sp.issparse(A):
        A = A.toarray()
    A = np.asarray(A, dtype=object)
    if A.ndim != 2:
        raise ValueError("expected a 2-d integer matrix")
    return [[int(x) for x in row] for row in A], A.shape


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(A):
    """Smith normal form ``U A V = D`` over the integers.

    Parameters
    ----------
    A : (m, n) integer array_like (dense or scipy sparse)

    Returns
    -------
    U, D, V : object arrays of Python ints
        ``U`` (m x m) and ``V`` (n x n) unimodular, ``D`` diagonal with
        nonnegative entries ``d_1 | d_2 | ...``.
    """
    D, (m, n) = _to_rows(A)
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q row_src
        rs, rd = D[src], D[dst]
        for k in range(n):
            if rs[k]:
                rd[k] -= q * rs[k]
        us, ud = U[src], U[dst]
        for k in range(m):
            if us[k]:
                ud[k] -= q * us[k]

    def add_col(dst, src, q):  # col_dst -= q col_src
        for row in D:
            if row[src]:
                row[dst] -= q * row[src]
        for row in V:
            if row[src]:
                row[dst] -= q * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                row = D[i]
                for j in range(t, n):
                    x = row[j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                break
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, D[i][t] // p)
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, D[t][j] // p)
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            # divisibility: fold an offending row into row t and retry
            bad = next((i for i in range(t + 1, m)
                        if any(D[i][j] % p for j in range(t + 1, n))), None)
            if bad is None:
                break
            add_row(t, bad, -1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        if all(D[i][j] == 0 for i in range(t, m) for j in range(t, n)):
            break
    as_obj = lambda M, r, c: np.array(M, dtype=object).reshape(r, c)
    return as_obj(U, m, m), as_obj(D, m, n), as_obj(V, n, n)


def _diagonal(D):
    return [int(D[i, i]) for i in range(min(D.shape)) if D[i, i] != 0]


# ------------------------------------------------------------------ sparse route

def elementary_divisors(A):
    """Nonzero elementary divisors of an integer matrix, ascending.

    ``len(result)`` is the rank.  Exact; ``A`` may be scipy sparse.
    """
    A = sp.coo_matrix(A)
    rows, cols = {}, {}
    for r, c, v in zip(A.row.tolist(), A.col.tolist(), A.data.tolist()):
        v = int(v)
        if v:
            rows.setdefault(r, {})
            rows[r][c] = rows[r].get(c, 0) + v
    for r in list(rows):
        rows[r] = {c: v for c, v in rows[r].items() if v}
        if not rows[r]:
            del rows[r]
        else:
            for c in rows[r]:
                cols.setdefault(c, set()).add(r)

    n_units = 0
    heap = [(len(rs), c) for c, rs in cols.items()]
    heapq.heapify(heap)
    deferred = set()
    while heap:
        cnt, c = heapq.heappop(heap)
        rs = cols.get(c)
        if not rs:
            continue
        if cnt != len(rs):
            heapq.heappush(heap, (len(rs), c))
            continue
        units = [r for r in rs if abs(rows[r][c]) == 1]
        if not units:
            deferred.add(c)
            continue
        p = min(units, key=lambda r: (len(rows[r]), r))
        prow = rows.pop(p)
        pv = prow[c]
        for cc in prow:
            cols[cc].discard(p)
        touched = set()
        for r in list(cols[c]):
            row = rows[r]
            q = row[c] * pv  # pv = +-1, so q = row[c] / pv
            for cc, v in prow.items():
                nv = row.get(cc, 0) - q * v
                if nv:
                    if cc not in row:
                        cols[cc].add(r)
                    row[cc] = nv
                else:
                    if cc in row:
                        del row[cc]
                        cols[cc].discard(r)
            touched.update(row)
            if not row:
                del rows[r]
        del cols[c]
        n_units += 1
        for cc in touched | set(prow):
            if cc in cols and cols[cc]:
                heapq.heappush(heap, (len(cols[cc]), cc))
                deferred.discard(cc)
    # dense remainder
    rest_rows = sorted(rows)
    rest_cols = sorted({c for r in rest_rows for c in rows[r]})
    divisors = [1] * n_units
    if rest_rows:
        ci = {c: j for j, c in enumerate(rest_cols)}
        M = [[0] * len(rest_cols) for _ in rest_rows]
        for i, r in enumerate(rest_rows):
            for c, v in rows[r].items():
                M[i][ci[c]] = v
        _, D, _ = smith_normal_form(np.array(M, dtype=object))
        divisors += _diagonal(D)
    return sorted(divisors)


# ------------------------------------------------------------------ homology

def _compose_is_zero(d_k, d_k1):
    if d_k is None or d_k1 is None:
        return True
    a = sp.csr_matrix(d_k, dtype=np.int64) if not sp.issparse(d_k) else d_k.astype(np.int64)
    b = sp.csr_matrix(d_k1, dtype=np.int64) if not sp.issparse(d_k1) else d_k1.astype(np.int64)
    if a.shape[1] != b.shape[0]:
        raise NotAComplex(f"shapes {a.shape} and {b.shape} do not compose")
    # entries are tiny for boundary matrices; verify exactly with object ints
    # if anything could overflow int64
    if max(np.abs(a.data).max(initial=0), np.abs(b.data).max(initial=0)) > 2**20:
        prod = np.array(a.toarray(), dtype=object).dot(np.array(b.toarray(), dtype=object))
        return not np.any(prod != 0)
    return (a @ b).count_nonzero() == 0


def homology(d_next, d_k, n_k=None):
    """Homology in degree k from ``d_{k+1}: C_{k+1} -> C_k`` and ``d_k: C_k -> C_{k-1}``.

    Either map may be ``None`` (the zero map); ``n_k`` gives ``dim C_k`` when
    both are missing.
    """
    if d_next is None and d_k is None and n_k is None:
        raise ValueError("cannot infer the chain group rank")
    if not _compose_is_zero(d_k, d_next):
        raise NotAComplex("boundary of boundary is nonzero")
    if n_k is None:
        n_k = (d_k.shape[1] if d_k is not None else d_next.shape[0])
    rank_k = len(elementary_divisors(d_k)) if d_k is not None and min(d_k.shape) else 0
    div = elementary_divisors(d_next) if d_next is not None and min(d_next.shape) else []
    betti = n_k - rank_k - len(div)
    return HomologySummary(betti, tuple(d for d in div if d > 1))


def complex_homology(boundaries, sizes=None):
    """Homology in every degree of a chain complex.

    ``boundaries[k-1]`` is ``d_k: C_k -> C_{k-1}`` for ``k = 1..top``.
    """
    bs = [None if b is None else (b if sp.issparse(b) else np.asarray(b, dtype=object))
          for b in boundaries]
    top = len(bs)
    if sizes is None:
        sizes = [bs[0].shape[0]] + [b.shape[1] for b in bs]
    out = []
    for k in range(top + 1):
        d_k = bs[k - 1] if k >= 1 else None
        d_next = bs[k] if k < top else None
        out.append(homology(_as_sparse(d_next), _as_sparse(d_k), sizes[k]))
    return out


def _as_sparse(M):
    if M is None or sp.issparse(M):
        return M
    if M.size == 0:
        return sp.csr_matrix(M.shape, dtype=np.int64)
    if max(abs(int(x)) for x in M.ravel()) < 2**62:
        return sp.csr_matrix(M.astype(np.int64))
    return M


def betti_numbers(c: SimplicialComplex3):
    """Betti numbers (b0, b1, b2, b3) of a mesh."""
    hs = complex_homology([c.boundary_matrix(k) for k in (1, 2, 3)], sizes=c.counts)
    return tuple(h.betti for h in hs)


# ------------------------------------------------------------------ 2-cycles

def _reduce_columns(M, n_rows):
    """Column reduction with unit pivots over Z, tracking the transform V.

    Returns (lows, zero_columns_V) where ``lows[i]`` is the pivot row of
    reduced column i (or -1) and the V-columns of the zero columns span
    the kernel.  Returns None if a non-unit pivot blocks pure additions.
    """
    M = sp.csc_matrix(M)
    pivot_of = {}
    R, V = [], []
    for j in range(M.shape[1]):
        lo, hi = M.indptr[j], M.indptr[j + 1]
        col = {int(r): int(v) for r, v in zip(M.indices[lo:hi], M.data[lo:hi]) if v}
        vcol = {j: 1}
        while col:
            low = max(col)
            i = pivot_of.get(low)
            if i is None:
                break
            pv = R[i][low]
            if col[low] % pv:
                return None
            q = col[low] // pv
            for r, v in R[i].items():
                nv = col.get(r, 0) - q * v
                if nv:
                    col[r] = nv
                else:
                    col.pop(r, None)
            for r, v in V[i].items():
                nv = vcol.get(r, 0) - q * v
                if nv:
                    vcol[r] = nv
                else:
                    vcol.pop(r, None)
        if col:
            pivot_of[max(col)] = j
        R.append(col)
        V.append(vcol)
    lows = [max(col) if col else -1 for col in R]
    return lows, R, V


def _kernel_dense(M):
    """Integer kernel basis of M via the V transform of the dense SNF."""
    _, D, V = smith_normal_form(M)
    r = len(_diagonal(D))
    return [V[:, j] for j in range(r, V.shape[1])]


def two_cycle_basis(c: SimplicialComplex3):
    """Integer 2-cycles freely generating H_2(M; Z) modulo torsion.

    Periodic (torus) meshes: the basis is rebased so that its pairing with
    the constant 2-forms ``(dy^dz, dz^dx, dx^dy)`` is the identity, i.e.
    cycle ``i`` is homologous to the coordinate torus normal to axis ``i``.
    Otherwise the cycles are sorted by their supports.
    """
    d2 = c.boundary_matrix(2)
    d3 = c.boundary_matrix(3)
    n_tri = d2.shape[1]
    red2 = _reduce_columns(d2, d2.shape[0])
    red3 = _reduce_columns(d3, n_tri)
    if red2 is None or red3 is None:
        return _two_cycle_basis_dense(c)
    lows2, _, V2 = red2
    lows3, _, _ = red3
    killed = {lo for lo in lows3 if lo >= 0}
    cycles = [V2[j] for j in range(n_tri) if lows2[j] == -1 and j not in killed]
    cycles = [np.array([vc.get(t, 0) for t in range(n_tri)], dtype=np.int64) for vc in cycles]
    return _normalize_cycles(c, cycles)


def _two_cycle_basis_dense(c):
    d2 = c.boundary_matrix(2).toarray().astype(object)
    d3 = c.boundary_matrix(3).toarray().astype(object)
    Z = _kernel_dense(d2)  # columns spanning ker d2
    if not Z:
        return []
    Zm = np.array(Z, dtype=object).T  # (F, z)
    # express im d3 in the Z basis, then split off the free quotient
    _, Dz, Vz = smith_normal_form(Zm)
    rz = len(_diagonal(Dz))
    # coordinates of b in basis Z: solve Zm x = b exactly via the SNF
    Uz, _, _ = smith_normal_form(Zm)
    B = Uz.dot(d3)
    coords = np.array([[B[i, j] // Dz[i, i] for j in range(B.shape[1])]
                       for i in range(rz)], dtype=object)
    coords = Vz[:, :rz].dot(coords)
    U, D, _ = smith_normal_form(coords)
    rank_b = len(_diagonal(D))
    Uinv = _unimodular_inverse(U)
    free = [Uinv[:, j] for j in range(rank_b, Uinv.shape[1])]
    cycles = [np.array(Zm.dot(f), dtype=np.int64) for f in free]
    return _normalize_cycles(c, cycles)


def _unimodular_inverse(U):
    n = U.shape[0]
    Ui, D, V = smith_normal_form(U)
    # Ui U V = D = diag(+-1) -> U^-1 = V D Ui
    return V.dot(D).dot(Ui) if n else U


def coordinate_pairing(c: SimplicialComplex3, cycles):
    """Exact pairing of 2-cycles with ``(dy^dz, dz^dx, dx^dy)`` on a periodic mesh."""
    pts = c.simplex_points(2).astype(object)
    e1 = pts[:, 1] - pts[:, 0]
    e2 = pts[:, 2] - pts[:, 0]
    cross = np.stack([e1[:, 1] * e2[:, 2] - e1[:, 2] * e2[:, 1],
                      e1[:, 2] * e2[:, 0] - e1[:, 0] * e2[:, 2],
                      e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]], axis=1)
    denom = 2 * c.period**2
    out = []
    for z in cycles:
        row = []
        for a in range(3):
            s = sum(int(zv) * int(cv) for zv, cv in zip(z, cross[:, a]) if zv)
            if s % denom:
                raise ValueError("pairing is not integral; basis is not a cycle")
            row.append(s // denom)
        out.append(row)
    return np.array(out, dtype=object).reshape(len(cycles), 3)


def _normalize_cycles(c, cycles):
    if c.periodic and len(cycles) == 3:
        P = coordinate_pairing(c, cycles)
        _, D, _ = smith_normal_form(P)
        if _diagonal(D) == [1, 1, 1]:
            Pinv = _unimodular_inverse(P)
            # rows of Z' = P^-1 Z pair to the identity
            Z = np.array(cycles, dtype=object)
            cycles = [np.array(row, dtype=np.int64) for row in Pinv.dot(Z)]
            return [_make_cycle(z) for z in cycles]
    cycles = [_make_cycle(z) for z in cycles]
    cycles.sort(key=lambda z: (z.support, [z.coefficients[t] for t in z.support]))
    return cycles


def _make_cycle(z):
    z = np.asarray(z)
    nz = np.flatnonzero(z)
    # sign convention: first nonzero coefficient positive is not imposed,
    # orientation carries homological meaning for the coordinate tori
    return TwoCycle({int(t): int(z[t]) for t in nz})


# ------------------------------------------------------------------ abstract complexes

def rp2_boundaries():
    """Boundary matrices (d1, d2) of the 6-vertex real projective plane."""
    faces = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
             (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5)]
    edges = sorted({(f[i], f[j]) for f in faces for i in range(3) for j in range(i + 1, 3)})
    eidx = {e: k for k, e in enumerate(edges)}
    d1 = np.zeros((6, len(edges)), dtype=np.int64)
    for k, (a, b) in enumerate(edges):
        d1[a, k] -= 1
        d1[b, k] += 1
    d2 = np.zeros((len(edges), len(faces)), dtype=np.int64)
    for k, (a, b, cc) in enumerate(faces):
        d2[eidx[(b, cc)], k] += 1
        d2[eidx[(a, cc)], k] -= 1
        d2[eidx[(a, b)], k] += 1
    return [d1, d2]


def load_abstract_complex(source):
    """Read boundary matrices from JSON.

    Accepted layout: a list whose entries are either a list of
    ``[row, col, value]`` triplets or an object
    ``{"shape": [rows, cols], "entries": [[row, col, value], ...]}``.
    Shapes missing from triplet-only entries are inferred from neighbouring
    matrices and the largest indices.
    """
    data = json.loads(source) if isinstance(source, str) else source
    if isinstance(data, dict) and "boundaries" in data:
        data = data["boundaries"]
    if not isinstance(data, list):
        raise ValueError("abstract complex must be a JSON list of boundary matrices")
    entries, shapes = [], []
    for k, item in enumerate(data):
        if isinstance(item, dict):
            trip = item.get("entries", [])
            shape = item.get("shape")
        else:
            trip, shape = item, None
        for t in trip:
            if len(t) != 3 or not all(isinstance(x, int) for x in t):
                raise ValueError(f"matrix {k}: triplets must be [row, col, int value]")
        entries.append(trip)
        shapes.append(list(shape) if shape is not None else None)
    # infer sizes: C_k size = rows of d_{k+1} = cols of d_k
    top = len(entries)
    sizes = [0] * (top + 1)
    for k, (trip, shape) in enumerate(zip(entries, shapes)):
        if shape is not None:
            sizes[k] = max(sizes[k], shape[0])
            sizes[k + 1] = max(sizes[k + 1], shape[1])
        for r, cc, _ in trip:
            sizes[k] = max(sizes[k], r + 1)
            sizes[k + 1] = max(sizes[k + 1], cc + 1)
    mats = []
    for k, trip in enumerate(entries):
        M = np.zeros((sizes[k], sizes[k + 1]), dtype=object)
        for r, cc, v in trip:
            M[r, cc] += v
        mats.append(M)
    return mats


def dump_abstract_complex(boundaries):
    out = []
    for M in boundaries:
        M = np.asarray(M.toarray() if sp.issparse(M) else M, dtype=object)
        nz = [[int(i), int(j), int(M[i, j])] for i, j in zip(*np.nonzero(M != 0))]
        out.append({"shape": list(M.shape), "entries": nz})
    return out

"""Oriented tetrahedral meshes of closed 3-manifolds.

Two builders ship: the boundary of the 4-simplex projected onto the unit
sphere in R^4 (a triangulated S^3), and a periodic Kuhn triangulation of the
unit cube (a triangulated T^3).  Both can be refined by edge subdivision.

Simplices are identified by canonical keys.  For ordinary meshes the key is
the sorted vertex tuple.  Periodic meshes are Delta-complexes (for small grids
two distinct edges can join the same pair of vertices), so their simplices are
keyed by integer lattice points modulo translation by the period; the lattice
"lift" of every tetrahedron vertex is stored alongside the mesh.
"""

from __future__ import annotations

import hashlib
import math
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import ResourceLimit, SizeMismatch

__all__ = [
    "SimplicialComplex3",
    "TwoCycle",
    "build_s3",
    "build_t3",
    "subdivide",
    "integrate_3form",
    "MAX_TETS",
]

MAX_S3_LEVEL = 6
MAX_T3_SIZE = 32
MAX_TETS = 5 * 8**MAX_S3_LEVEL


def _parity(seq) -> int:
    """Sign of the permutation that sorts ``seq`` (entries distinct)."""
    sign = 1
    items = list(seq)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


def _canon_periodic(points, period):
    """Canonical key of a set of lattice points modulo ``period * Z^3``.

    ``points`` must already be lexicographically sorted.  Lex order is
    translation invariant, so only the translate has to be chosen.
    """
    # every candidate is the sorted tuple minus one shift, so the
    # lexicographically largest shift gives the smallest key
    sx, sy, sz = max((x - x % period, y - y % period, z - z % period) for x, y, z in points)
    return tuple((x - sx, y - sy, z - sz) for x, y, z in points)


class TwoCycle:
    """Integer 2-chain on the triangles of a complex, with zero boundary."""

    def __init__(self, coefficients):
        self.coefficients = {int(k): int(v) for k, v in dict(coefficients).items() if v != 0}

    @property
    def support(self):
        return tuple(sorted(self.coefficients))

    def as_array(self, n_triangles):
        out = np.zeros(n_triangles, dtype=np.int64)
        for k, v in self.coefficients.items():
            out[k] = v
        return out

    def __repr__(self):
        return f"TwoCycle({len(self.coefficients)} triangles)"


class SimplicialComplex3:
    """Oriented tetrahedral mesh of a closed 3-manifold.

    Parameters
    ----------
    vertices : (V, d) float array
        Geometric coordinates; points of the unit sphere in R^4 for S^3
        meshes, points of [0, 1)^3 for periodic meshes.
    tets : (T, 4) int array
        Ordered vertex indices.
    orientations : (T,) int array of +-1
        The oriented simplex is ``orientations[t] * [tets[t]]``.
    period : int, optional
        Lattice units per unit box side; set for periodic meshes only.
    lifts : (T, 4, 3) int array, optional
        Integer lattice coordinates of every tet vertex (periodic meshes).
    on_sphere : bool
        Whether subdivision re-projects new vertices to the unit sphere.
    """

    def __init__(self, vertices, tets, orientations=None, *, period=None,
                 lifts=None, on_sphere=False, level=0):
        self.vertices = np.asarray(vertices, dtype=float)
        self.tets = np.asarray(tets, dtype=np.int64).reshape(-1, 4)
        if orientations is None:
            orientations = np.ones(len(self.tets), dtype=np.int64)
        self.orientations = np.asarray(orientations, dtype=np.int64)
        if self.orientations.shape != (len(self.tets),):
            raise SizeMismatch("one orientation sign per tetrahedron required")
        if not np.all(np.abs(self.orientations) == 1):
            raise ValueError("orientations must be +1 or -1")
        self.period = None if period is None else int(period)
        self.lifts = None if lifts is None else np.asarray(lifts, dtype=np.int64)
        if (self.period is None) != (self.lifts is None):
            raise ValueError("periodic meshes need both period and lifts")
        self.on_sphere = bool(on_sphere)
        self.level = int(level)
        # set by subdivide(): the two parent vertices of every vertex
        self.parent_vertices = None
        for arr in (self.vertices, self.tets, self.orientations):
            arr.setflags(write=False)
        if self.lifts is not None:
            self.lifts.setflags(write=False)

    # ------------------------------------------------------------------ basics

    @property
    def periodic(self) -> bool:
        return self.period is not None

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_tets(self) -> int:
        return len(self.tets)

    @cached_property
    def id(self) -> str:
        """Content hash, used to tie map files to their mesh."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.tets).tobytes())
        h.update(np.ascontiguousarray(self.orientations).tobytes())
        h.update(np.round(self.vertices, 12).tobytes())
        if self.lifts is not None:
            h.update(np.ascontiguousarray(self.lifts).tobytes())
        return h.hexdigest()[:16]

    def __repr__(self):
        kind = "periodic" if self.periodic else ("S3" if self.on_sphere else "abstract")
        return (f"SimplicialComplex3({kind}, V={self.n_vertices}, "
                f"T={self.n_tets}, level={self.level})")

    # ------------------------------------------------------------ skeleton

    def _points(self, t):
        if self.periodic:
            return [tuple(int(c) for c in p) for p in self.lifts[t]]
        return [int(v) for v in self.tets[t]]

    def _key(self, pts):
        """Canonical key of a sorted point tuple."""
        if self.periodic:
            return _canon_periodic(pts, self.period)
        return tuple(pts)

    @cached_property
    def _skeleton(self):
        periodic = self.periodic
        P = self.period
        tet_canon = []
        fundamental = np.empty(self.n_tets, dtype=np.int64)
        keys = [dict(), dict(), dict()]  # vertices, edges, triangles
        for t in range(self.n_tets):
            pts = self._points(t)
            order = sorted(range(4), key=lambda i: pts[i])
            fundamental[t] = self.orientations[t] * _parity(order)
            spts = [pts[i] for i in order]
            tet_canon.append(spts)
            for k in (1, 2, 3):
                for sub in _subsets(spts, k):
                    keys[k - 1].setdefault(self._key(sub), None)
        index = []
        for k in range(3):
            ordered = sorted(keys[k])
            index.append({key: i for i, key in enumerate(ordered)})

        def vid(p):
            if periodic:
                return vertex_of[tuple(c % P for c in p)]
            return p

        if periodic:
            vertex_of = {}
            for key in index[0]:
                vertex_of[key[0]] = None
            # vertex ids follow the lattice point -> mesh vertex map of the tets
            for t in range(self.n_tets):
                for p, v in zip(self._points(t), self.tets[t]):
                    vertex_of[tuple(c % P for c in p)] = int(v)

        simplex_vertices = []
        simplex_points = []
        for k in range(3):
            arr = np.empty((len(index[k]), k + 1), dtype=np.int64)
            pts_arr = []
            for key, i in index[k].items():
                arr[i] = [vid(p) for p in key]
                if periodic:
                    pts_arr.append((i, key))
            simplex_vertices.append(arr)
            if periodic:
                parr = np.empty((len(index[k]), k + 1, 3), dtype=np.int64)
                for i, key in pts_arr:
                    parr[i] = key
                simplex_points.append(parr)
        tet_vertices = np.array([[vid(p) for p in spts] for spts in tet_canon],
                                dtype=np.int64).reshape(-1, 4)
        simplex_vertices.append(tet_vertices)
        if periodic:
            simplex_points.append(np.array(tet_canon, dtype=np.int64).reshape(-1, 4, 3))

        # boundary operators as integer triplets
        boundaries = []
        for k in (1, 2, 3):
            rows, cols, vals = [], [], []
            if k == 3:
                cells = ((t, tet_canon[t]) for t in range(self.n_tets))
            else:
                cells = ((i, list(key)) for key, i in index[k].items())
            lower = index[k - 1]
            for j, spts in cells:
                for drop in range(k + 1):
                    face = spts[:drop] + spts[drop + 1:]
                    rows.append(lower[self._key(face)])
                    cols.append(j)
                    vals.append(-1 if drop % 2 else 1)
            n_rows = len(lower)
            n_cols = self.n_tets if k == 3 else len(index[k])
            boundaries.append((n_rows, n_cols,
                               np.array(rows, dtype=np.int64),
                               np.array(cols, dtype=np.int64),
                               np.array(vals, dtype=np.int64)))
        return {
            "counts": (len(index[0]), len(index[1]), len(index[2]), self.n_tets),
            "simplex_vertices": simplex_vertices,
            "simplex_points": simplex_points if periodic else None,
            "boundaries": boundaries,
            "fundamental": fundamental,
        }

    @property
    def counts(self):
        """Numbers of vertices, edges, triangles and tetrahedra."""
        return self._skeleton["counts"]

    @property
    def edges(self):
        """(E, 2) vertex indices of the edges, in canonical order."""
        return self._skeleton["simplex_vertices"][1]

    @property
    def triangles(self):
        """(F, 3) vertex indices of the triangles, in canonical order."""
        return self._skeleton["simplex_vertices"][2]

    @property
    def canonical_tets(self):
        """(T, 4) tet vertex indices reordered canonically."""
        return self._skeleton["simplex_vertices"][3]

    @property
    def fundamental_class(self):
        """Coefficient of each canonically ordered tet in the fundamental cycle."""
        return self._skeleton["fundamental"]

    def simplex_points(self, k):
        """Lattice lifts (n_k, k+1, 3) of the canonical k-simplices (periodic only)."""
        pts = self._skeleton["simplex_points"]
        return None if pts is None else pts[k]

    def boundary_triplets(self, k):
        """Boundary operator from k-chains to (k-1)-chains as (rows, cols, r, c, v)."""
        if k not in (1, 2, 3):
            raise ValueError("k must be 1, 2 or 3")
        return self._skeleton["boundaries"][k - 1]

    def boundary_matrix(self, k):
        """Sparse integer matrix of the k-th boundary operator."""
        n_rows, n_cols, r, c, v = self.boundary_triplets(k)
        return sp.csr_matrix((v, (r, c)), shape=(n_rows, n_cols), dtype=np.int64)

    def edge_displacements(self):
        """Shortest-representative displacement vector of every edge.

        For periodic meshes this is the lattice displacement divided by the
        period, which keeps winding information; otherwise the plain
        coordinate difference.
        """
        if self.periodic:
            pts = self.simplex_points(1)
            return (pts[:, 1] - pts[:, 0]) / self.period
        e = self.edges
        return self.vertices[e[:, 1]] - self.vertices[e[:, 0]]

    @cached_property
    def vertex_adjacency(self):
        """Symmetric sparse 0/1 adjacency matrix of the 1-skeleton."""
        e = self.edges
        n = self.n_vertices
        mask = e[:, 0] != e[:, 1]
        e = e[mask]
        data = np.ones(2 * len(e))
        A = sp.coo_matrix((data, (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])),
                          shape=(n, n)).tocsr()
        A.data[:] = 1.0
        return A

    # ------------------------------------------------------------ checks

    def is_closed_oriented(self) -> bool:
        """Every triangle lies in exactly two tets with opposite induced signs."""
        n_rows, _, r, c, v = self.boundary_triplets(3)
        counts = np.bincount(r, minlength=n_rows)
        if np.any(counts != 2):
            return False
        total = np.zeros(n_rows, dtype=np.int64)
        np.add.at(total, r, v * self.fundamental_class[c])
        return bool(np.all(total == 0))

    def euler_characteristic(self) -> int:
        v, e, f, t = self.counts
        return v - e + f - t

    def boundary_squares_vanish(self) -> bool:
        """Exact check of d1 d2 = 0 and d2 d3 = 0."""
        for k in (2, 3):
            prod = self.boundary_matrix(k - 1) @ self.boundary_matrix(k)
            if prod.count_nonzero():
                return False
        return True

    # ------------------------------------------------------------ serialization

    def to_dict(self):
        out = {
            "dim_embed": int(self.vertices.shape[1]),
            "vertices": self.vertices.tolist(),
            "tets": self.tets.tolist(),
            "orientations": self.orientations.tolist(),
        }
        if self.periodic:
            out["periodic"] = [1.0, 1.0, 1.0]
            out["lattice"] = {"period": self.period, "lifts": self.lifts.tolist()}
        if self.on_sphere:
            out["on_sphere"] = True
        if self.level:
            out["level"] = self.level
        return out

    @classmethod
    def from_dict(cls, data):
        vertices = np.asarray(data["vertices"], dtype=float)
        tets = np.asarray(data["tets"], dtype=np.int64)
        orientations = data.get("orientations")
        period = lifts = None
        if data.get("periodic") is not None:
            lattice = data.get("lattice")
            if lattice is not None:
                period = int(lattice["period"])
                lifts = np.asarray(lattice["lifts"], dtype=np.int64)
            else:
                period, lifts = _minimum_image_lifts(vertices, tets, data["periodic"])
        return cls(vertices, tets, orientations, period=period, lifts=lifts,
                   on_sphere=bool(data.get("on_sphere", False)),
                   level=int(data.get("level", 0)))


def _minimum_image_lifts(vertices, tets, box):
    """Reconstruct lattice lifts from coordinates by the minimum-image rule."""
    box = np.asarray(box, dtype=float)
    frac = vertices / box
    # smallest common lattice scale that makes every coordinate integral
    for period in range(1, 4097):
        scaled = frac * period
        if np.allclose(scaled, np.round(scaled), atol=1e-9):
            break
    else:
        raise ValueError("periodic vertex coordinates are not on a rational lattice")
    grid = np.round(frac * period).astype(np.int64) % period
    base = grid[tets[:, :1]]
    disp = grid[tets] - base
    disp -= period * np.round(disp / period).astype(np.int64)
    return period, base + disp


def _subsets(points, k):
    """All (k)-point sub-tuples of a sorted tuple, preserving order."""
    from itertools import combinations
    return [list(c) for c in combinations(points, k)]


# ---------------------------------------------------------------- builders

def _simplex4_vertices():
    beta = (math.sqrt(5.0) - 1.0) / 8.0
    alpha = -math.sqrt(5.0) / 2.0
    verts = np.full((5, 4), beta)
    for i in range(4):
        verts[i, i] += alpha
    verts[4] = 0.5
    return verts


def build_s3(level: int = 0) -> SimplicialComplex3:
    """Triangulated unit 3-sphere in R^4 with ``5 * 8**level`` tetrahedra.

    The boundary of the regular 4-simplex is edge-subdivided ``level`` times
    and every vertex is projected radially to the sphere.  The orientation is
    chosen so that the identification of S^3 with SU(2) by unit quaternions
    has degree +1 (equivalently ``det[v0, v1, v2, v3] < 0`` for every
    positively oriented tet).
    """
    if level < 0:
        raise ValueError("level must be non-negative")
    if level > MAX_S3_LEVEL:
        raise ResourceLimit(f"S^3 level {level} exceeds the limit {MAX_S3_LEVEL}")
    verts = _simplex4_vertices()
    tets = []
    orient = []
    for drop in range(5):
        tet = [i for i in range(5) if i != drop]
        tets.append(tet)
        orient.append(-1 if drop % 2 else 1)
    tets = np.array(tets)
    orient = np.array(orient)
    dets = np.linalg.det(verts[tets])
    # the induced boundary orientation is consistent, so one global sign fixes it
    if np.all(orient * dets > 0):
        orient = -orient
    assert np.all(orient * dets < 0)
    c = SimplicialComplex3(verts, tets, orient, on_sphere=True)
    for _ in range(level):
        c = subdivide(c)
    return c


def build_t3(n: int) -> SimplicialComplex3:
    """Periodic ``n x n x n`` grid on the unit cube, six Kuhn tets per cube."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if n > MAX_T3_SIZE:
        raise ResourceLimit(f"T^3 size {n} exceeds the limit {MAX_T3_SIZE}")
    from itertools import permutations
    idx = np.arange(n**3).reshape(n, n, n)
    grid = np.stack(np.meshgrid(np.arange(n), np.arange(n), np.arange(n),
                                indexing="ij"), axis=-1).reshape(-1, 3)
    verts = grid / n
    tets, orient, lifts = [], [], []
    eye = np.eye(3, dtype=np.int64)
    for corner in grid:
        for perm in permutations(range(3)):
            pts = [corner.copy()]
            for axis in perm:
                pts.append(pts[-1] + eye[axis])
            pts = np.array(pts)
            tets.append([idx[tuple(p % n)] for p in pts])
            lifts.append(pts)
            orient.append(_parity(perm))
    return SimplicialComplex3(verts, np.array(tets), np.array(orient),
                              period=n, lifts=np.array(lifts))


# Bey's edge subdivision; local vertices 0..3 are corners, (i, j) midpoints.
_CHILDREN = (
    (0, (0, 1), (0, 2), (0, 3)),
    ((0, 1), 1, (1, 2), (1, 3)),
    ((0, 2), (1, 2), 2, (2, 3)),
    ((0, 3), (1, 3), (2, 3), 3),
    ((0, 1), (0, 2), (0, 3), (1, 3)),
    ((0, 1), (0, 2), (1, 2), (1, 3)),
    ((0, 2), (0, 3), (1, 3), (2, 3)),
    ((0, 2), (1, 2), (1, 3), (2, 3)),
)


def _child_signs():
    signs = []
    for child in _CHILDREN:
        rows = []
        for node in child:
            b = np.zeros(4)
            if isinstance(node, tuple):
                b[list(node)] = 0.5
            else:
                b[node] = 1.0
            rows.append(b)
        signs.append(int(np.sign(np.linalg.det(np.array(rows)))))
    return signs


_CHILD_SIGNS = _child_signs()


def subdivide(c: SimplicialComplex3) -> SimplicialComplex3:
    """Edge subdivision: every tetrahedron splits into eight.

    New vertices sit at edge midpoints (re-projected to the sphere for S^3
    meshes).  ``parent_vertices`` on the result records, for every vertex,
    the pair of coarse vertices it interpolates (a repeated index for the
    coarse vertices themselves); see :func:`homotopykit.maps.resample`.
    """
    if 8 * c.n_tets > MAX_TETS:
        raise ResourceLimit(f"subdivision would produce {8 * c.n_tets} tets")
    periodic = c.periodic
    n_old = c.n_vertices
    edge_vertex = {}
    new_coords = []
    parents = [(i, i) for i in range(n_old)]
    if periodic:
        P2 = 2 * c.period
        vertex_at = {}
        for t in range(c.n_tets):
            for p, v in zip(2 * c.lifts[t], c.tets[t]):
                vertex_at[tuple(int(x) % P2 for x in p)] = int(v)

    tets, orient, lifts = [], [], []
    for t in range(c.n_tets):
        vs = [int(v) for v in c.tets[t]]
        local = {}
        local_lift = {}
        for i in range(4):
            local[i] = vs[i]
            if periodic:
                local_lift[i] = 2 * c.lifts[t, i]
        for i in range(4):
            for j in range(i + 1, 4):
                if periodic:
                    mid = (2 * c.lifts[t, i] + 2 * c.lifts[t, j]) // 2
                    key = tuple(int(x) % P2 for x in mid)
                    local_lift[(i, j)] = mid
                    if key not in vertex_at:
                        vertex_at[key] = n_old + len(new_coords)
                        new_coords.append(np.array(key) / P2)
                        parents.append((vs[i], vs[j]))
                    local[(i, j)] = vertex_at[key]
                else:
                    key = (min(vs[i], vs[j]), max(vs[i], vs[j]))
                    if key not in edge_vertex:
                        edge_vertex[key] = n_old + len(new_coords)
                        mid = 0.5 * (c.vertices[vs[i]] + c.vertices[vs[j]])
                        if c.on_sphere:
                            mid = mid / np.linalg.norm(mid)
                        new_coords.append(mid)
                        parents.append(key)
                    local[(i, j)] = edge_vertex[key]
        for child, sign in zip(_CHILDREN, _CHILD_SIGNS):
            tets.append([local[node] for node in child])
            orient.append(int(c.orientations[t]) * sign)
            if periodic:
                lifts.append([local_lift[node] for node in child])
    if new_coords:
        verts = np.vstack([c.vertices, np.array(new_coords)])
    else:
        verts = c.vertices.copy()
    if periodic:
        out = SimplicialComplex3(verts, np.array(tets), np.array(orient),
                                 period=2 * c.period, lifts=np.array(lifts),
                                 level=c.level + 1)
    else:
        out = SimplicialComplex3(verts, np.array(tets), np.array(orient),
                                 on_sphere=c.on_sphere, level=c.level + 1)
    out.parent_vertices = np.array(parents, dtype=np.int64)
    return out


def integrate_3form(c: SimplicialComplex3, density) -> float:
    """Integral of a 3-cochain given as one value per tetrahedron.

    Orientation signs are expected to be folded into ``density`` already.
    ``math.fsum`` gives a correctly rounded, order-independent sum.
    """
    density = np.asarray(density, dtype=float).ravel()
    if density.shape[0] != c.n_tets:
        raise SizeMismatch(f"{density.shape[0]} densities for {c.n_tets} tets")
    return math.fsum(density.tolist())

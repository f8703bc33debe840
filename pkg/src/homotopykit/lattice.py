"""Integer lattices in Z^m: Hermite normal form, membership, coset reduction."""

from __future__ import annotations

import numpy as np

__all__ = ["hermite_normal_form", "Lattice"]


def hermite_normal_form(vectors, dim=None):
    """Row-style Hermite normal form of the integer span of ``vectors``.

    Returns a list of basis rows in echelon form: pivots strictly move right,
    pivot entries are positive, and entries above a pivot lie in
    ``[0, pivot)``.  Zero rows are dropped.
    """
    rows = [[int(x) for x in v] for v in vectors]
    if dim is None:
        dim = len(rows[0]) if rows else 0
    if any(len(r) != dim for r in rows):
        raise ValueError("all generators need the same length")
    basis = []
    col = 0
    while rows and col < dim:
        live = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        # Euclid on column `col` across the live rows
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            p = live[0]
            nxt = [p]
            for r in live[1:]:
                q = r[col] // p[col]
                r = [a - q * b for a, b in zip(r, p)]
                (nxt if r[col] else rest).append(r)
            live = nxt
        if live:
            p = live[0]
            if p[col] < 0:
                p = [-a for a in p]
            basis.append(p)
        rows = [r for r in rest if any(r)]
        col += 1
    # reduce entries above pivots
    for i in range(len(basis)):
        piv = _pivot(basis[i])
        for j in range(i):
            q = basis[j][piv] // basis[i][piv]
            if q:
                basis[j] = [a - q * b for a, b in zip(basis[j], basis[i])]
    return basis


def _pivot(row):
    return next(i for i, x in enumerate(row) if x)


class Lattice:
    """Sublattice of Z^dim given by an HNF basis."""

    def __init__(self, generators, dim):
        self.dim = int(dim)
        self.basis = hermite_normal_form(generators, self.dim) if len(generators) else []

    @property
    def rank(self):
        return len(self.basis)

    @property
    def is_zero(self):
        return not self.basis

    def reduce(self, v):
        """Canonical coset representative of ``v`` modulo the lattice."""
        v = [int(x) for x in v]
        if len(v) != self.dim:
            raise ValueError(f"expected a vector of length {self.dim}")
        for row in self.basis:
            p = _pivot(row)
            q = v[p] // row[p]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return v

    def contains(self, v) -> bool:
        return not any(self.reduce(v))

    def as_array(self):
        return np.array(self.basis, dtype=np.int64).reshape(len(self.basis), self.dim)

    def to_dict(self):
        return {"dim": self.dim, "basis": [list(r) for r in self.basis]}

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.dim == other.dim and self.basis == other.basis

    def __repr__(self):
        return f"Lattice(dim={self.dim}, basis={self.basis})"

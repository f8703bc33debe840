"""Independent reference implementations and frozen reference values.

The oracles avoid the library's own code paths: polar factors come from
``scipy.linalg.polar``, exponentials from ``scipy.linalg.expm``, ranks over
prime fields from plain Gaussian elimination, and the torus degree from
signed solid angles on a fine planar grid.
"""

import math
from itertools import combinations

import numpy as np
from scipy.linalg import expm, polar

# Frozen values of the polar scheme on the level-3 S^3 mesh (2560 tets).
# Regression guards only; the topological truth is the nearest integer.
FROZEN_LEVEL3_POWER_RAW = {
    -2: -2.0006675536677014,
    -1: -1.000008712792551,
    1: 1.000008712792551,
    2: 2.0006675536677014,
    3: 3.009494688900506,
}
FROZEN_LEVEL3_FIRST_ORDER_RAW = {1: 0.9742506958885842, 2: 1.8820072903672134}
FROZEN_LEVEL3_WHITEHEAD = {1: 0.9897306159468849, 2: 1.9350136983969746}
# uncalibrated integrals of tr((u^-1 du)^3) for the generator, levels 1..3;
# the continuum value is 24 pi^2
FROZEN_GENERATOR_INTEGRALS = [245.7208648197895, 237.00619584697546, 236.87311410089777]
FROZEN_MESH_IDS = {0: "b44b775d60ef2374", 1: "0f6ae95188c39196",
                   2: "b98e63a3617c4b34", 3: "9ba895192abc0258"}


def polar_su(A):
    """SVD-free polar factor with the principal determinant root removed."""
    U, _ = polar(A)
    n = A.shape[0]
    return U * np.exp(-1j * np.angle(np.linalg.det(U)) / n)


def random_skew_traceless(rng, n, scale=1.0):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    X = X - X.conj().T
    X -= np.trace(X) / n * np.eye(n)
    return scale * X / np.linalg.norm(X, 2)


def exp_oracle(X):
    return expm(X)


def rank_mod_p(M, p):
    """Rank of an integer matrix over GF(p) by Gaussian elimination."""
    A = [[int(x) % p for x in row] for row in np.asarray(M, dtype=object)]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], p - 2, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        r += 1
    return r


def determinantal_divisors(M):
    """Elementary divisors from gcds of k x k minors (small matrices only)."""
    M = np.asarray(M, dtype=object)
    m, n = M.shape
    out, prev = [], 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in combinations(range(m), k):
            for cs in combinations(range(n), k):
                sub = np.array([[int(M[i, j]) for j in cs] for i in rs], dtype=object)
                g = math.gcd(g, _det_int(sub))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def _det_int(A):
    """Exact integer determinant by fraction-free Bareiss elimination."""
    A = [[int(x) for x in row] for row in A]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


def solid_angle_degree(nfun, m=200):
    """Degree of a map T^2 -> S^2 from signed solid angles of grid triangles.

    ``nfun(x, y)`` returns unit vectors.  Each grid square is split into two
    triangles; the signed solid angle of a spherical triangle follows
    Van Oosterom and Strackee.
    """
    t = np.arange(m + 1) / m
    X, Y = np.meshgrid(t, t, indexing="ij")
    N = nfun(X, Y)
    a, b, c, d = N[:-1, :-1], N[1:, :-1], N[1:, 1:], N[:-1, 1:]
    total = 0.0
    for p, q, r in ((a, b, c), (a, c, d)):
        num = np.einsum("...i,...i->...", p, np.cross(q, r))
        den = 1 + np.einsum("...i,...i->...", p, q) + np.einsum("...i,...i->...", q, r) \
            + np.einsum("...i,...i->...", r, p)
        total += np.sum(2 * np.arctan2(num, den))
    return total / (4 * np.pi)


def quaternion_rotation(axis, angle):
    """SU(2) matrix of the rotation by ``angle`` about a unit ``axis``."""
    sig = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
    axis = np.asarray(axis, dtype=float)
    return math.cos(angle / 2) * np.eye(2) - 1j * math.sin(angle / 2) * np.einsum("a,aij->ij", axis, sig)


def bloch_projector(n):
    sig = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
    P = 0.5 * (np.eye(2) + np.einsum("a,aij->ij", n, sig))
    return np.stack([P, np.eye(2) - P])

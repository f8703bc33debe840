"""Analytic test maps with known topological invariants."""

from __future__ import annotations

import numpy as np

from .lie import GroupSpec, embed_su2, expm_skew, quaternion_power
from .maps import CosetMap, GroupMap, hopf_projection
from .mesh import SimplicialComplex3

__all__ = [
    "quaternion_power_map",
    "embedded_power_map",
    "hopf_map",
    "gell_mann_basis",
    "random_gauge_map",
    "torus_bloch_vector",
    "torus_degree_map",
    "diagonal_torus_map",
]

PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def _require_sphere(mesh):
    r = np.linalg.norm(mesh.vertices, axis=1) if mesh.vertices.shape[1] == 4 else None
    if r is None or np.max(np.abs(r - 1.0)) > 1e-9:
        raise ValueError("mesh vertices must lie on the unit sphere in R^4")


def quaternion_power_map(mesh: SimplicialComplex3, k: int) -> GroupMap:
    """``(a, b, c, d) -> (a + bi + cj + dk)^k`` as an SU(2)-valued map.

    ``k = 1`` is the identification S^3 = SU(2); its degree is +1 for the
    orientation produced by :func:`homotopykit.mesh.build_s3`.
    """
    _require_sphere(mesh)
    return GroupMap(mesh, quaternion_power(mesh.vertices, int(k)), GroupSpec((2,)), check=False)


def embedded_power_map(mesh: SimplicialComplex3, k: int, n: int) -> GroupMap:
    """``quaternion_power_map`` placed in the top-left 2x2 block of SU(n)."""
    u = quaternion_power_map(mesh, k)
    return GroupMap(mesh, embed_su2(u.values[0], n), GroupSpec((n,)), check=False)


def hopf_map(mesh: SimplicialComplex3, k: int = 1) -> CosetMap:
    """``hopf_projection(quaternion_power_map(mesh, k))``; Hopf invariant k."""
    return hopf_projection(quaternion_power_map(mesh, k))


def gell_mann_basis(n: int):
    """Traceless Hermitian basis of su(n); the Pauli matrices for n = 2."""
    if n == 2:
        return PAULI.copy()
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = m[j, i] = 1
            out.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[i, j], m[j, i] = -1j, 1j
            out.append(m)
    for d in range(1, n):
        m = np.zeros((n, n), dtype=complex)
        m[np.arange(d), np.arange(d)] = 1
        m[d, d] = -d
        out.append(m * np.sqrt(2.0 / (d * (d + 1))))
    return np.array(out)


def random_gauge_map(mesh: SimplicialComplex3, rng, n: int = 2, amplitude: float = 0.5,
                     coefficients=None) -> GroupMap:
    """Smooth nullhomotopic map ``x -> exp(i sum_a f_a(x) T_a)``.

    Each ``f_a`` is affine in the embedding coordinates with standard normal
    coefficients scaled by ``amplitude``; ``T_a`` runs over
    :func:`gell_mann_basis`.  The map extends over the ball, so its degree
    is zero.

    Parameters
    ----------
    rng : numpy Generator or int seed
    coefficients : (n^2 - 1, d + 1) array, optional
        Overrides the random draw; column 0 holds the constant terms.
    """
    basis = gell_mann_basis(n)
    X = mesh.vertices
    if coefficients is None:
        rng = np.random.default_rng(rng)
        coefficients = rng.normal(size=(len(basis), X.shape[1] + 1)) * amplitude
    coefficients = np.asarray(coefficients, dtype=float)
    f = coefficients[:, 0][None, :] + X @ coefficients[:, 1:].T
    H = np.einsum("va,aij->vij", f, basis)
    return GroupMap(mesh, expm_skew(1j * H), GroupSpec((n,)), check=False)


def torus_bloch_vector(x, y, d: int):
    """Unit Bloch vector of a degree-``d`` map T^2 -> S^2.

    ``n ~ (sin 2 pi d x, sin 2 pi y, 1 + cos 2 pi d x + cos 2 pi y)``, never zero
    since the third component is odd-valued wherever the first two vanish.
    ``d = 0`` gives a constant map.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if d == 0:
        n = np.zeros(x.shape + (3,))
        n[..., 2] = 1.0
        return n
    a = 2 * np.pi * d * x
    b = 2 * np.pi * y
    n = np.stack([np.sin(a), np.sin(b), 1 + np.cos(a) + np.cos(b)], axis=-1)
    # orientation: the raw vector has degree -sign(d); flip to get +d
    n[..., 2] *= -1
    return n / np.linalg.norm(n, axis=-1, keepdims=True)


def _bloch_projectors(n):
    P = 0.5 * (np.eye(2) + np.einsum("...a,aij->...ij", n, PAULI))
    return np.stack([P, np.eye(2) - P], axis=-3)


def torus_degree_map(mesh: SimplicialComplex3, d: int) -> CosetMap:
    """T^3 -> S^2 pulled back from a degree-``d`` map of the xy-torus.

    The flux of the first projector through the xy-torus is ``+d``.
    """
    if not mesh.periodic:
        raise ValueError("torus fixtures need a periodic mesh")
    X = mesh.vertices
    n = torus_bloch_vector(X[:, 0], X[:, 1], int(d))
    return CosetMap(mesh, _bloch_projectors(n), GroupSpec((2,)), check=False)


def diagonal_torus_map(mesh: SimplicialComplex3, n: int, rng=None, amplitude: float = 1.0) -> GroupMap:
    """Smooth map into the maximal torus of SU(n) (diagonal, det 1).

    Phases are affine in the coordinates on S^3 meshes and trigonometric
    (hence periodic) on torus meshes.
    """
    rng = np.random.default_rng(rng)
    X = mesh.vertices
    if mesh.periodic:
        X = np.concatenate([np.sin(2 * np.pi * X), np.cos(2 * np.pi * X)], axis=1)
    coef = rng.normal(size=(n - 1, X.shape[1] + 1)) * amplitude
    ang = coef[:, 0][None, :] + X @ coef[:, 1:].T
    phases = np.concatenate([ang, -ang.sum(axis=1, keepdims=True)], axis=1)
    vals = np.zeros((len(X), n, n), dtype=complex)
    vals[:, np.arange(n), np.arange(n)] = np.exp(1j * phases)
    return GroupMap(mesh, vals, GroupSpec((n,)), check=False)

"""Numerical kernels for SU(N): projection, logarithm, Wess-Zumino density.

All functions accept stacks of matrices with shape ``(..., N, N)``.

Two discretizations of the integral of ``tr((u^-1 du)^3)`` over one
tetrahedron are provided:

``"first_order"``
    Edge logarithms ``a_i = log(u_0^-1 u_i)`` from the first vertex and the
    fully antisymmetrized triple product ``(1/6) sum_s sgn(s) tr(a_s1 a_s2 a_s3)``.
    Cheap, but neighbouring tets interpolate differently across a shared
    face, so mesh sums carry an O(h^2) error.
``"polar"``
    Exact integral (up to a degree-5 quadrature) of the polar projection of
    the linear interpolant ``sum_i t_i u_i``.  The interpolant restricted to a
    face only sees that face's vertices, so the mesh sum is the integral of a
    continuous map and is integral up to quadrature error.  Default.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.special import roots_jacobi

from .errors import BranchCut, SingularInput

__all__ = [
    "GroupSpec",
    "nominal_constant",
    "dagger",
    "project_unitary",
    "principal_log",
    "expm_skew",
    "is_special_unitary",
    "quaternion_matrix",
    "quaternion_power",
    "embed_su2",
    "wz_tet",
    "wz_tet_values",
    "calibration_for",
    "SCHEMES",
]

SCHEMES = ("polar", "first_order")

SINGULAR_TOL = 1e-12
BRANCH_TOL = 1e-6
UNITARY_TOL = 1e-10


def nominal_constant(n: int) -> float:
    """Nominal normalizing constant for SU(n): -1 / (96 pi^2 n)."""
    return -1.0 / (96.0 * math.pi**2 * n)


@dataclass(frozen=True)
class GroupSpec:
    """A product of special unitary groups SU(N_1) x ... x SU(N_k).

    ``calibration`` left as ``None`` means "self-calibrate on first use":
    see :func:`calibration_for`.
    """

    factors: tuple
    wz_constants: tuple = None
    calibration: tuple = None
    scheme: str = "polar"

    def __post_init__(self):
        factors = tuple(int(n) for n in self.factors)
        if not factors:
            raise ValueError("a group needs at least one factor")
        if any(n < 2 for n in factors):
            raise ValueError("every factor must be SU(N) with N >= 2")
        object.__setattr__(self, "factors", factors)
        consts = self.wz_constants
        if consts is None:
            consts = tuple(nominal_constant(n) for n in factors)
        consts = tuple(float(c) for c in consts)
        if len(consts) != len(factors):
            raise ValueError("one WZ constant per factor required")
        if not all(math.isfinite(c) and c != 0 for c in consts):
            raise ValueError("WZ constants must be finite and nonzero")
        object.__setattr__(self, "wz_constants", consts)
        if self.calibration is not None:
            cal = tuple(float(c) for c in self.calibration)
            if len(cal) != len(factors):
                raise ValueError("one calibration multiplier per factor required")
            object.__setattr__(self, "calibration", cal)
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")

    @classmethod
    def su(cls, *ns, **kw):
        return cls(tuple(ns), **kw)

    def calibrations(self):
        """Per-factor calibration multipliers, computing them if needed."""
        if self.calibration is not None:
            return self.calibration
        return tuple(calibration_for(n, self.scheme) for n in self.factors)

    def effective_constants(self):
        return tuple(c * k for c, k in zip(self.wz_constants, self.calibrations()))

    def to_dict(self):
        return {"factors": list(self.factors)}


def dagger(U):
    return np.conj(np.swapaxes(U, -1, -2))


def _eye_like(U):
    return np.broadcast_to(np.eye(U.shape[-1], dtype=complex), U.shape)


def project_unitary(A):
    """Nearest SU(N) element: polar factor with the determinant phase removed.

    The phase is divided out with the principal N-th root of the determinant.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[-1]
    W, s, Vh = np.linalg.svd(A)
    if np.any(s[..., -1] <= SINGULAR_TOL):
        raise SingularInput("matrix is numerically singular; no polar factor")
    U = W @ Vh
    phase = np.angle(np.linalg.det(U))
    return U * np.exp(-1j * phase / n)[..., None, None]


def is_special_unitary(U, tol=UNITARY_TOL) -> bool:
    U = np.asarray(U)
    if U.size == 0:
        return True
    err = np.linalg.norm(dagger(U) @ U - _eye_like(U), axis=(-2, -1))
    det_err = np.abs(np.linalg.det(U) - 1.0)
    return bool(np.all(err <= tol) and np.all(det_err <= tol))


def expm_skew(X):
    """Matrix exponential of skew-Hermitian matrices via a Hermitian eigensolve."""
    X = np.asarray(X, dtype=complex)
    H = 1j * X
    H = 0.5 * (H + dagger(H))
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w)[..., None, :]) @ dagger(V)


def _log_su2(U):
    A = 0.5 * (U - dagger(U))
    A = A - 0.5 * np.trace(A, axis1=-2, axis2=-1)[..., None, None] * np.eye(2)
    s = np.linalg.norm(A, axis=(-2, -1)) / math.sqrt(2.0)
    c = 0.5 * np.real(np.trace(U, axis1=-2, axis2=-1))
    theta = np.arctan2(s, c)
    if np.any(theta > math.pi - BRANCH_TOL):
        bad = np.flatnonzero(np.ravel(theta > math.pi - BRANCH_TOL))
        raise BranchCut("eigenvalue within tolerance of -1", where=bad)
    safe = np.where(s > 0, s, 1.0)
    factor = np.where(s > 1e-300, theta / safe, 1.0)
    return factor[..., None, None] * A


def _log_general(U):
    n = U.shape[-1]
    lam, V = np.linalg.eig(U)
    phases = np.angle(lam)
    near = np.abs(np.abs(phases) - math.pi) < BRANCH_TOL
    if np.any(near):
        bad = np.flatnonzero(np.ravel(np.any(near, axis=-1)))
        raise BranchCut("eigenvalue within tolerance of -1", where=bad)
    total = phases.sum(axis=-1)
    if np.any(np.abs(total) > 1e-8):
        # principal phases sum to a nonzero multiple of 2*pi: no traceless
        # principal logarithm exists
        bad = np.flatnonzero(np.ravel(np.abs(total) > 1e-8))
        raise BranchCut("principal eigenphases do not sum to zero", where=bad)
    L = (V * (1j * phases)[..., None, :]) @ np.linalg.inv(V)
    L = 0.5 * (L - dagger(L))
    tr = np.trace(L, axis1=-2, axis2=-1)
    return L - (tr / n)[..., None, None] * np.eye(n)


def principal_log(U):
    """Traceless skew-Hermitian principal logarithm of SU(N) matrices.

    Raises
    ------
    BranchCut
        If an eigenvalue lies within 1e-6 (in angle) of -1, or if the
        principal eigenphases of an N >= 3 matrix do not sum to zero.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape[-1] == 2:
        return _log_su2(U)
    return _log_general(U)


# ------------------------------------------------------------ test-map kernels

def quaternion_matrix(x):
    """Unit quaternions ``a + bi + cj + dk`` (rows of ``x``) as SU(2) matrices."""
    x = np.asarray(x, dtype=float)
    a, b, c, d = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    U = np.empty(x.shape[:-1] + (2, 2), dtype=complex)
    U[..., 0, 0] = a + 1j * b
    U[..., 0, 1] = c + 1j * d
    U[..., 1, 0] = -c + 1j * d
    U[..., 1, 1] = a - 1j * b
    return U


def quaternion_power(x, k: int):
    """``q ** k`` for unit quaternions, via the polar form ``cos(k t) + sin(k t) n``."""
    x = np.asarray(x, dtype=float)
    x = x / np.linalg.norm(x, axis=-1, keepdims=True)
    a = np.clip(x[..., 0], -1.0, 1.0)
    vec = x[..., 1:]
    vnorm = np.linalg.norm(vec, axis=-1)
    theta = np.arctan2(vnorm, a)
    safe = np.where(vnorm > 0, vnorm, 1.0)
    axis = np.where((vnorm > 0)[..., None], vec / safe[..., None], 0.0)
    out = np.empty_like(x)
    out[..., 0] = np.cos(k * theta)
    out[..., 1:] = np.sin(k * theta)[..., None] * axis
    return quaternion_matrix(out)


def embed_su2(U2, n: int):
    """Place SU(2) matrices in the top-left block of SU(n)."""
    U2 = np.asarray(U2, dtype=complex)
    out = np.zeros(U2.shape[:-2] + (n, n), dtype=complex)
    out[..., :2, :2] = U2
    for i in range(2, n):
        out[..., i, i] = 1.0
    return out


# ------------------------------------------------------------ WZ densities

_PERMS = [(p, 1 if sum(p[i] > p[j] for i in range(3) for j in range(i + 1, 3)) % 2 == 0 else -1)
          for p in permutations(range(3))]


def _antisymmetrized_trace(a1, a2, a3):
    """(1/6) sum over permutations s of sgn(s) Re tr(a_s1 a_s2 a_s3)."""
    a = (a1, a2, a3)
    total = 0.0
    for p, sign in _PERMS:
        total = total + sign * np.trace(a[p[0]] @ a[p[1]] @ a[p[2]], axis1=-2, axis2=-1)
    return np.real(total) / 6.0


def _tet_rule(n=3):
    """Conical-product (Duffy) rule on the reference tet; weights sum to 1/6."""
    x1, w1 = roots_jacobi(n, 2, 0)
    x2, w2 = roots_jacobi(n, 1, 0)
    x3, w3 = roots_jacobi(n, 0, 0)
    x1, w1 = (x1 + 1) / 2, w1 / 8
    x2, w2 = (x2 + 1) / 2, w2 / 4
    x3, w3 = (x3 + 1) / 2, w3 / 2
    pts, ws = [], []
    for a, wa in zip(x1, w1):
        for b, wb in zip(x2, w2):
            for c, wc in zip(x3, w3):
                t1 = a
                t2 = (1 - a) * b
                t3 = (1 - a) * (1 - b) * c
                pts.append((1 - t1 - t2 - t3, t1, t2, t3))
                ws.append(wa * wb * wc)
    return np.array(pts), np.array(ws)


_RULE = _tet_rule(3)
_CHUNK = 4096


def _first_order(tv):
    u0 = tv[:, 0]
    inv0 = dagger(u0)
    try:
        a = [principal_log(inv0 @ tv[:, i]) for i in (1, 2, 3)]
    except BranchCut as err:
        raise BranchCut(str(err), where=err.where) from None
    return _antisymmetrized_trace(*a)


def _polar(tv):
    pts, ws = _RULE
    n = tv.shape[-1]
    L = np.einsum("qi,tiab->tqab", pts, tv)
    if n == 2:
        # real combinations of SU(2) matrices are scaled unit quaternions:
        # L^dag L = det(L) I, so the polar factor is L / sqrt(det L)
        s2 = np.real(np.linalg.det(L))
        _check_polar(s2)
        s = np.sqrt(s2)
        u = L / s[..., None, None]
        ud = dagger(u)
        om = []
        for j in (1, 2, 3):
            M = ud @ (tv[:, j] - tv[:, 0])[:, None]
            om.append((M - dagger(M)) / (2 * s[..., None, None]))
    else:
        S = dagger(L) @ L
        s2, W = np.linalg.eigh(S)
        _check_polar(s2[..., 0])
        s = np.sqrt(s2)
        Wd = dagger(W)
        u = L @ (W / s[..., None, :]) @ Wd
        ud = dagger(u)
        om = []
        denom = s[..., :, None] + s[..., None, :]
        for j in (1, 2, 3):
            M = ud @ (tv[:, j] - tv[:, 0])[:, None]
            om.append(Wd @ (M - dagger(M)) @ W / denom)
    # integral over the reference tet of the full antisymmetrization
    # sum_s sgn(s) tr(om_s1 om_s2 om_s3) = 3 tr(om_1 [om_2, om_3])
    comm = om[1] @ om[2] - om[2] @ om[1]
    val = 3.0 * np.real(np.trace(om[0] @ comm, axis1=-2, axis2=-1))
    return val @ ws


def _check_polar(smin2):
    low = smin2 <= BRANCH_TOL
    if np.any(low):
        bad = np.flatnonzero(np.any(low.reshape(len(low), -1), axis=1))
        raise BranchCut("interpolant passes near a singular matrix", where=bad)


def wz_tet_values(tet_values, orientations=None, scheme="polar"):
    """Uncalibrated integral of ``tr((u^-1 du)^3)`` over each tetrahedron.

    Parameters
    ----------
    tet_values : (T, 4, N, N) complex array
        Group values at the four vertices of each tet, in tet order.
    orientations : (T,) array of +-1, optional
    scheme : {"polar", "first_order"}

    The ``first_order`` value is ``(1/6) sum_s sgn(s) Re tr(a_s1 a_s2 a_s3)``,
    which equals the reference-tet integral of the cubed linearized
    Maurer-Cartan form.  No normalizing constant is applied.
    """
    tv = np.asarray(tet_values, dtype=complex)
    if tv.ndim != 4 or tv.shape[1] != 4:
        raise ValueError("tet_values must have shape (T, 4, N, N)")
    kernel = {"polar": _polar, "first_order": _first_order}[scheme]
    out = np.empty(len(tv))
    for start in range(0, len(tv), _CHUNK):
        stop = start + _CHUNK
        try:
            out[start:stop] = kernel(tv[start:stop])
        except BranchCut as err:
            where = None if err.where is None else np.asarray(err.where) + start
            raise BranchCut(str(err), where=where) from None
    if orientations is not None:
        out = out * np.asarray(orientations)
    return out


def wz_tet(u0, u1, u2, u3, orientation=1, factor=0, group=None, scheme="first_order"):
    """Discrete WZ 3-form on one oriented tetrahedron.

    Returns ``orientation * calibration * c * I`` where ``I`` is the
    tet integral of ``tr((u^-1 du)^3)`` under ``scheme`` and ``c`` the
    factor's normalizing constant.
    """
    tv = np.stack([np.asarray(u, dtype=complex) for u in (u0, u1, u2, u3)])[None]
    if group is None:
        group = GroupSpec((tv.shape[-1],), scheme=scheme)
    c = group.wz_constants[factor]
    cal = group.calibrations()[factor] if group.scheme == scheme else \
        calibration_for(group.factors[factor], scheme)
    return float(orientation * cal * c * wz_tet_values(tv, scheme=scheme)[0])


# ------------------------------------------------------------ calibration

_CAL_LOCK = threading.Lock()
_CAL_CACHE = {}
_CAL_LEVELS = {"polar": (1, 2, 3), "first_order": (3, 4, 5)}


def _generator_integral(n, level, scheme):
    from .mesh import build_s3
    c = build_s3(level)
    vals = quaternion_power(c.vertices, 1)
    if n > 2:
        vals = embed_su2(vals, n)
    dens = wz_tet_values(vals[c.tets], c.orientations, scheme)
    return math.fsum(dens.tolist())


def richardson(values, ratio=2.0):
    """Extrapolate a sequence on meshes refined by ``ratio`` each step.

    Returns ``(limit, order)``; the order is estimated from the last three
    values and clamped to [1, 8].
    """
    i1, i2, i3 = values[-3:]
    d1, d2 = i2 - i1, i3 - i2
    if abs(d2) < 1e-12 or d1 == 0 or d1 * d2 <= 0:
        return i3, float("nan")
    order = min(max(math.log(abs(d1 / d2), ratio), 1.0), 8.0)
    return i3 + d2 / (ratio**order - 1.0), order


def calibration_info(n, scheme="polar"):
    """Calibration record for SU(n): multiplier, extrapolated integral, order.

    The generator is the unit-quaternion identification S^3 = SU(2), embedded
    in the top-left block for n > 2.  The multiplier makes the calibrated
    integral exactly 1 at the extrapolated limit.
    """
    key = (int(n), scheme)
    with _CAL_LOCK:
        if key in _CAL_CACHE:
            return _CAL_CACHE[key]
    levels = _CAL_LEVELS[scheme]
    ints = [_generator_integral(n, lv, scheme) for lv in levels]
    limit, order = richardson(ints)
    const = nominal_constant(n)
    info = {
        "N": int(n),
        "scheme": scheme,
        "levels": list(levels),
        "integrals": ints,
        "limit": limit,
        "order": order,
        "nominal_constant": const,
        "calibration": 1.0 / (const * limit),
        # trace-normalization constant implied by the calibration
        "calibrated_constant": 1.0 / limit,
        "reference_constant": 1.0 / (24.0 * math.pi**2),
    }
    with _CAL_LOCK:
        _CAL_CACHE.setdefault(key, info)
        return _CAL_CACHE[key]


def calibration_for(n, scheme="polar") -> float:
    return calibration_info(n, scheme)["calibration"]

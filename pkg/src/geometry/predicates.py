"""Exact-sign orientation and insphere predicates.

Input coordinates are doubles, which are exact rationals. Each predicate first
evaluates its determinant in floating point together with a forward error
bound (Shewchuk's static filter for the unexpanded form); when the bound does
not certify the sign, the same expression is re-evaluated over
``fractions.Fraction`` and the exact sign is returned.

Sign conventions:
  * ``orient3d(a, b, c, d)`` is the sign of det[b - a; c - a; d - a], so the
    unit frame (0,0,0), (1,0,0), (0,1,0), (0,0,1) is POSITIVE.
  * ``insphere(a, b, c, d, e)`` is POSITIVE when e lies strictly inside the
    circumsphere of a positively oriented (a, b, c, d); the sign flips with
    the orientation of (a, b, c, d).

Degenerate (zero) insphere results are resolved by ``insphere_perturbed``,
which lifts every point by a symbolic amount whose magnitude is ordered by
its vertex index (higher index dominates). The perturbed sign is an
alternating function of the five (point, index) pairs, so every caller in one
run sees one consistent perturbed point set.
"""

import logging
from enum import IntEnum
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from src.errors import InvalidParameterError

logger = logging.getLogger(__name__)

Point3 = Tuple[float, float, float]

_EPS = 2.0 ** -53
O3D_ERRBOUND = (7.0 + 56.0 * _EPS) * _EPS
ISP_ERRBOUND = (16.0 + 224.0 * _EPS) * _EPS


class Sign(IntEnum):
    """Sign of a determinant."""
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


def _sign_of(value) -> int:
    return (value > 0) - (value < 0)


# --- determinant kernels ----------------------------------------------------
# The kernels work on floats, Fractions and numpy arrays alike; they return
# Shewchuk's determinant (orientation sign opposite to ours) and its permanent.

def _orient3d_kernel(ax, ay, az, bx, by, bz, cx, cy, cz, dx, dy, dz):
    adx = ax - dx
    bdx = bx - dx
    cdx = cx - dx
    ady = ay - dy
    bdy = by - dy
    cdy = cy - dy
    adz = az - dz
    bdz = bz - dz
    cdz = cz - dz

    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    cdxady = cdx * ady
    adxcdy = adx * cdy
    adxbdy = adx * bdy
    bdxady = bdx * ady

    det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady)
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * abs(adz)
                 + (abs(cdxady) + abs(adxcdy)) * abs(bdz)
                 + (abs(adxbdy) + abs(bdxady)) * abs(cdz))
    return det, permanent


def _insphere_kernel(ax, ay, az, bx, by, bz, cx, cy, cz, dx, dy, dz, ex, ey, ez):
    aex = ax - ex
    bex = bx - ex
    cex = cx - ex
    dex = dx - ex
    aey = ay - ey
    bey = by - ey
    cey = cy - ey
    dey = dy - ey
    aez = az - ez
    bez = bz - ez
    cez = cz - ez
    dez = dz - ez

    aexbey = aex * bey
    bexaey = bex * aey
    bexcey = bex * cey
    cexbey = cex * bey
    cexdey = cex * dey
    dexcey = dex * cey
    dexaey = dex * aey
    aexdey = aex * dey
    aexcey = aex * cey
    cexaey = cex * aey
    bexdey = bex * dey
    dexbey = dex * bey

    ab = aexbey - bexaey
    bc = bexcey - cexbey
    cd = cexdey - dexcey
    da = dexaey - aexdey
    ac = aexcey - cexaey
    bd = bexdey - dexbey

    abc = aez * bc - bez * ac + cez * ab
    bcd = bez * cd - cez * bd + dez * bc
    cda = cez * da + dez * ac + aez * cd
    dab = dez * ab + aez * bd + bez * da

    alift = aex * aex + aey * aey + aez * aez
    blift = bex * bex + bey * bey + bez * bez
    clift = cex * cex + cey * cey + cez * cez
    dlift = dex * dex + dey * dey + dez * dez

    det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd)

    aezp = abs(aez)
    bezp = abs(bez)
    cezp = abs(cez)
    dezp = abs(dez)
    aexbeyp = abs(aexbey)
    bexaeyp = abs(bexaey)
    bexceyp = abs(bexcey)
    cexbeyp = abs(cexbey)
    cexdeyp = abs(cexdey)
    dexceyp = abs(dexcey)
    dexaeyp = abs(dexaey)
    aexdeyp = abs(aexdey)
    aexceyp = abs(aexcey)
    cexaeyp = abs(cexaey)
    bexdeyp = abs(bexdey)
    dexbeyp = abs(dexbey)
    permanent = (((cexdeyp + dexceyp) * bezp
                  + (dexbeyp + bexdeyp) * cezp
                  + (bexceyp + cexbeyp) * dezp) * alift
                 + ((dexaeyp + aexdeyp) * cezp
                    + (aexceyp + cexaeyp) * dezp
                    + (cexdeyp + dexceyp) * aezp) * blift
                 + ((aexbeyp + bexaeyp) * dezp
                    + (bexdeyp + dexbeyp) * aezp
                    + (dexaeyp + aexdeyp) * bezp) * clift
                 + ((bexceyp + cexbeyp) * aezp
                    + (cexaeyp + aexceyp) * bezp
                    + (aexbeyp + bexaeyp) * cezp) * dlift)
    return det, permanent


def _exact(*coords) -> Tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in coords)


# --- scalar predicates ------------------------------------------------------

def orient3d_raw(ax, ay, az, bx, by, bz, cx, cy, cz, dx, dy, dz) -> int:
    """orient3d on unpacked float coordinates; returns -1, 0 or 1."""
    det, permanent = _orient3d_kernel(ax, ay, az, bx, by, bz, cx, cy, cz, dx, dy, dz)
    errbound = O3D_ERRBOUND * permanent
    if det > errbound:
        return -1
    if -det > errbound:
        return 1
    det, _ = _orient3d_kernel(*_exact(ax, ay, az, bx, by, bz, cx, cy, cz, dx, dy, dz))
    return -_sign_of(det)


def insphere_raw(ax, ay, az, bx, by, bz, cx, cy, cz, dx, dy, dz, ex, ey, ez) -> int:
    """insphere on unpacked float coordinates; returns -1, 0 or 1."""
    det, permanent = _insphere_kernel(ax, ay, az, bx, by, bz, cx, cy, cz, dx, dy, dz, ex, ey, ez)
    errbound = ISP_ERRBOUND * permanent
    if det > errbound:
        return -1
    if -det > errbound:
        return 1
    logger.debug("insphere: exact fallback")
    det, _ = _insphere_kernel(*_exact(ax, ay, az, bx, by, bz, cx, cy, cz, dx, dy, dz, ex, ey, ez))
    return -_sign_of(det)


def orient3d(a: Point3, b: Point3, c: Point3, d: Point3) -> Sign:
    """Exact sign of det[b - a; c - a; d - a].

    POSITIVE iff d lies on the positive side of plane(a, b, c).
    """
    return Sign(orient3d_raw(*a, *b, *c, *d))


def insphere(a: Point3, b: Point3, c: Point3, d: Point3, e: Point3) -> Sign:
    """Exact sign of the lifted 5x5 insphere determinant.

    POSITIVE means e is strictly inside the circumsphere of a positively
    oriented (a, b, c, d).
    """
    return Sign(insphere_raw(*a, *b, *c, *d, *e))


def perturbation_sign(points: Sequence[Point3], ids: Sequence[int]) -> int:
    """Sign of the leading perturbation term for a zero insphere determinant.

    Lifting point v by delta_v changes insphere(a, b, c, d, e) at rate
    orient3d(tet with v replaced by e) for v in (a, b, c, d) and at rate
    -orient3d(a, b, c, d) for v = e. The vertex with the highest index has
    the dominant lift; the first nonzero rate decides.
    """
    a, b, c, d, e = points
    tet = [a, b, c, d]
    for k in sorted(range(5), key=lambda k: ids[k], reverse=True):
        if k == 4:
            o = -orient3d_raw(*a, *b, *c, *d)
        else:
            q = list(tet)
            q[k] = e
            o = orient3d_raw(*q[0], *q[1], *q[2], *q[3])
        if o:
            return o
    # Five coplanar points: a flat tetrahedron bounds no ball
    return -1


def insphere_perturbed(a: Point3, b: Point3, c: Point3, d: Point3, e: Point3,
                       ids: Sequence[int]) -> Sign:
    """insphere with ties broken by symbolic perturbation; never ZERO.

    Args:
        a, b, c, d, e: The five points
        ids: Their five pairwise distinct global vertex indices

    Returns:
        The insphere sign when nonzero, else the perturbed sign
    """
    if len(set(ids)) != 5:
        raise ValueError("insphere_perturbed needs five distinct vertex indices")
    s = insphere_raw(*a, *b, *c, *d, *e)
    if s:
        return Sign(s)
    return Sign(perturbation_sign((a, b, c, d, e), ids))


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _sub(u, v):
    return (u[0] - v[0], u[1] - v[1], u[2] - v[2])


def incircle_coplanar(a: Point3, b: Point3, c: Point3, p: Point3) -> Sign:
    """Exact in-circle test for p coplanar with triangle (a, b, c).

    POSITIVE iff p is strictly inside the circumcircle of (a, b, c),
    independent of the triangle's orientation. Evaluated as insphere against
    the apex a + (b - a) x (c - a), whose sphere meets the plane in the
    circumcircle.
    """
    fa, fb, fc, fp = (_exact(*q) for q in (a, b, c, p))
    n = _cross(_sub(fb, fa), _sub(fc, fa))
    apex = (fa[0] + n[0], fa[1] + n[1], fa[2] + n[2])
    det, _ = _insphere_kernel(*fa, *fb, *fc, *apex, *fp)
    return Sign(-_sign_of(det))


def coplanar_orientation(a: Point3, b: Point3, c: Point3, normal) -> int:
    """Exact sign of ((b - a) x (c - a)) . normal."""
    fa, fb, fc = (_exact(*q) for q in (a, b, c))
    return _sign_of(_dot(_cross(_sub(fb, fa), _sub(fc, fa)), normal))


def incircle_coplanar_perturbed(a: Point3, b: Point3, c: Point3, p: Point3,
                                ids: Sequence[int]) -> Sign:
    """Coplanar in-circle with the same index-ordered perturbation; never ZERO.

    Args:
        a, b, c: Triangle vertices
        p: Query point in the triangle's plane
        ids: Vertex indices of (a, b, c, p)
    """
    s = incircle_coplanar(a, b, c, p)
    if s:
        return s
    fa, fb, fc = (_exact(*q) for q in (a, b, c))
    normal = _cross(_sub(fb, fa), _sub(fc, fa))
    tri = [a, b, c]
    for k in sorted(range(4), key=lambda k: ids[k], reverse=True):
        if k == 3:
            return Sign.NEGATIVE
        q = list(tri)
        q[k] = p
        o = coplanar_orientation(q[0], q[1], q[2], normal)
        if o:
            return Sign(o)
    return Sign.NEGATIVE


# --- vectorised predicates --------------------------------------------------

def orient3d_batch(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Vectorised orient3d over (m, 3) arrays; returns int8 signs."""
    det, permanent = _orient3d_kernel(a[:, 0], a[:, 1], a[:, 2], b[:, 0], b[:, 1], b[:, 2],
                                      c[:, 0], c[:, 1], c[:, 2], d[:, 0], d[:, 1], d[:, 2])
    errbound = O3D_ERRBOUND * permanent
    signs = np.zeros(det.shape, dtype=np.int8)
    signs[det > errbound] = -1
    signs[-det > errbound] = 1
    for k in np.flatnonzero(np.abs(det) <= errbound):
        signs[k] = orient3d_raw(*a[k], *b[k], *c[k], *d[k])
    return signs


def insphere_filtered(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray,
                      e: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Floating-point stage of insphere over broadcast (..., 3) arrays.

    Returns:
        (signs, uncertain) where uncertain marks entries the filter cannot certify;
        their sign is left at zero
    """
    a, b, c, d, e = np.broadcast_arrays(a, b, c, d, e)
    det, permanent = _insphere_kernel(a[..., 0], a[..., 1], a[..., 2], b[..., 0], b[..., 1], b[..., 2],
                                      c[..., 0], c[..., 1], c[..., 2], d[..., 0], d[..., 1], d[..., 2],
                                      e[..., 0], e[..., 1], e[..., 2])
    errbound = ISP_ERRBOUND * permanent
    signs = np.zeros(det.shape, dtype=np.int8)
    signs[det > errbound] = -1
    signs[-det > errbound] = 1
    return signs, np.abs(det) <= errbound


def insphere_batch(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray,
                   e: np.ndarray) -> np.ndarray:
    """Vectorised insphere; arguments broadcast like numpy arrays of shape (..., 3).

    Returns:
        int8 array of signs; uncertain entries are resolved exactly
    """
    a, b, c, d, e = np.broadcast_arrays(a, b, c, d, e)
    signs, uncertain = insphere_filtered(a, b, c, d, e)
    for idx in map(tuple, np.argwhere(uncertain)):
        signs[idx] = insphere_raw(*a[idx], *b[idx], *c[idx], *d[idx], *e[idx])
    return signs


# --- pitch identity ---------------------------------------------------------

def _exact_det(rows) -> Fraction:
    """Determinant of a square matrix of Fractions by fraction-exact elimination."""
    m = [list(row) for row in rows]
    size = len(m)
    det = Fraction(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, size):
            factor = m[r][col] / m[col][col]
            if factor:
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return det


def verify_pitch_identity(t: Sequence[float], alpha: float,
                          rel_tol: float = 1e-9) -> Tuple[float, float, bool]:
    """Compare the pitched helix insphere determinant with alpha^3 times the reduced one.

    Rows of the full matrix are (1, alpha t, cos t, sin t, alpha^2 t^2 + cos^2 t + sin^2 t);
    rows of the reduced matrix are (1, t, cos t, sin t, t^2). Entries are taken
    from the doubles of alpha, t, cos t and sin t and both determinants are
    evaluated exactly, so the only slack left is cos^2 + sin^2 rounding away from 1.

    Args:
        t: Five helix parameters
        alpha: Pitch, > 0
        rel_tol: Relative tolerance on the identity

    Returns:
        (full_det, reduced_det, ratio_ok)
    """
    if not alpha > 0 or not np.isfinite(alpha):
        raise InvalidParameterError(f"pitch alpha must be finite and > 0, got {alpha}")
    t = np.asarray(t, dtype=float)
    if t.shape != (5,) or not np.all(np.isfinite(t)):
        raise InvalidParameterError("t must be five finite reals")

    a = Fraction(float(alpha))
    full, reduced = [], []
    for ti, ci, si in zip(t.tolist(), np.cos(t).tolist(), np.sin(t).tolist()):
        ft, fc, fs = Fraction(ti), Fraction(ci), Fraction(si)
        full.append([Fraction(1), a * ft, fc, fs, (a * ft) ** 2 + fc ** 2 + fs ** 2])
        reduced.append([Fraction(1), ft, fc, fs, ft ** 2])
    full_exact = _exact_det(full)
    reduced_exact = _exact_det(reduced)

    scaled = a ** 3 * reduced_exact
    ratio_ok = abs(full_exact - scaled) <= Fraction(rel_tol) * max(abs(full_exact), abs(scaled))
    return float(full_exact), float(reduced_exact), bool(ratio_ok)

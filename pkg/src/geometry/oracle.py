"""Brute-force empty-sphere oracle for small clouds.

Enumerates every quadruple (every triple for planar clouds) and keeps those
whose circumsphere holds no other point under the same perturbed predicates
the incremental engine uses. A quadruple is first tested against the point
nearest its floating-point circumcentre; only a certified inside answer
discards it there, everything else goes through the full empty-sphere check.
"""

import logging
from fractions import Fraction
from itertools import combinations, islice

import numpy as np
from scipy.spatial import cKDTree

from src.errors import DegenerateCloudError, OracleLimitError
from src.geometry.cloud import PointCloud
from src.geometry.predicates import (
    incircle_coplanar_perturbed,
    insphere_filtered,
    orient3d_batch,
    perturbation_sign,
    insphere_raw,
)

logger = logging.getLogger(__name__)

ORACLE_MAX_POINTS = 128
_CHUNK = 8192
_BLOCK = 512

_TET_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _chunks(iterable, size: int):
    it = iter(iterable)
    while True:
        block = list(islice(it, size))
        if not block:
            return
        yield np.array(block, dtype=np.int64)


def _edges_from(simplices: list, pairs) -> np.ndarray:
    if not simplices:
        return np.empty((0, 2), dtype=np.int64)
    s = np.concatenate(simplices)
    edges = np.concatenate([s[:, [i, j]] for i, j in pairs])
    return np.unique(np.sort(edges, axis=1), axis=0)


def oracle_edges(cloud: PointCloud, max_points: int = ORACLE_MAX_POINTS) -> set:
    """Delaunay edges by exhaustive empty-sphere search.

    Args:
        cloud: Between 4 and max_points points, not all coplanar
        max_points: Size guard

    Returns:
        Set of (i, j) index pairs with i < j

    Raises:
        OracleLimitError: If the cloud exceeds max_points
        DegenerateCloudError: If the cloud is too small or coplanar
    """
    n = len(cloud)
    if n > max_points:
        raise OracleLimitError(f"oracle accepts at most {max_points} points, got {n}")
    if n < 4:
        raise DegenerateCloudError(f"oracle needs at least 4 points, got {n}", dimension=min(n - 1, 2))

    pts = cloud.points
    tree = cKDTree(pts) if n > 4 else None
    kept = []
    live = pruned = 0
    for quads in _chunks(combinations(range(n), 4), _CHUNK):
        a, b, c, d = (pts[quads[:, k]] for k in range(4))
        orient = orient3d_batch(a, b, c, d)
        quads = quads[orient != 0]
        flip = orient[orient != 0] < 0
        # Positively oriented copies so POSITIVE insphere means strictly inside
        quads[flip] = quads[flip][:, [1, 0, 2, 3]]
        if len(quads) == 0:
            continue
        live += len(quads)
        if tree is not None:
            blocked = _nearest_inside(pts, tree, quads)
            pruned += int(blocked.sum())
            quads = quads[~blocked]
        for block in np.array_split(quads, max(1, len(quads) // _BLOCK)):
            kept.append(block[_empty_spheres(pts, block)])

    if live == 0:
        raise DegenerateCloudError("all points are coplanar", dimension=2)

    edges = _edges_from(kept, _TET_PAIRS)
    logger.debug("oracle: %d points, %d live quadruples (%d pruned), %d Delaunay tets, %d edges",
                 n, live, pruned, sum(len(q) for q in kept), len(edges))
    return {(int(i), int(j)) for i, j in edges}


def _circumcentres(pts: np.ndarray, quads: np.ndarray) -> np.ndarray:
    a, b, c, d = (pts[quads[:, k]] for k in range(4))
    u, v, w = b - a, c - a, d - a
    vw, wu, uv = np.cross(v, w), np.cross(w, u), np.cross(u, v)
    num = (np.einsum("ij,ij->i", u, u)[:, None] * vw
           + np.einsum("ij,ij->i", v, v)[:, None] * wu
           + np.einsum("ij,ij->i", w, w)[:, None] * uv)
    with np.errstate(divide="ignore", invalid="ignore"):
        return a + num / (2.0 * np.einsum("ij,ij->i", u, vw))[:, None]


def _nearest_inside(pts: np.ndarray, tree: cKDTree, quads: np.ndarray) -> np.ndarray:
    """Mask of quads with a certified-inside point among those nearest their circumcentre."""
    blocked = np.zeros(len(quads), dtype=bool)
    centres = _circumcentres(pts, quads)
    finite = np.flatnonzero(np.all(np.isfinite(centres), axis=1))
    if len(finite) == 0:
        return blocked

    _, near = tree.query(centres[finite], k=5)
    # First of the five nearest that is not a vertex of the quad
    foreign = ~np.any(near[:, :, None] == quads[finite][:, None, :], axis=2)
    candidate = near[np.arange(len(finite)), np.argmax(foreign, axis=1)]

    q = quads[finite]
    a, b, c, d = (pts[q[:, k]] for k in range(4))
    signs, _ = insphere_filtered(a, b, c, d, pts[candidate])
    blocked[finite] = signs > 0
    return blocked


def _empty_spheres(pts: np.ndarray, quads: np.ndarray) -> np.ndarray:
    """Mask of quads whose perturbed circumsphere contains no other point."""
    if len(quads) == 0:
        return np.zeros(0, dtype=bool)
    a, b, c, d = (pts[quads[:, k]][:, None, :] for k in range(4))
    signs, uncertain = insphere_filtered(a, b, c, d, pts[None, :, :])

    own = np.zeros(signs.shape, dtype=bool)
    rows = np.arange(len(quads))[:, None]
    own[rows, quads] = True
    signs[own] = -1
    uncertain &= ~own

    keep = ~np.any(signs > 0, axis=1)
    for q in np.flatnonzero(keep & np.any(uncertain, axis=1)):
        for e in np.flatnonzero(uncertain[q]):
            ids = (*quads[q].tolist(), int(e))
            verts = [tuple(pts[i]) for i in ids]
            s = insphere_raw(*verts[0], *verts[1], *verts[2], *verts[3], *verts[4])
            if (s if s else perturbation_sign(verts, ids)) > 0:
                keep[q] = False
                break
    return keep


def _collinear(a, b, c) -> bool:
    fa, fb, fc = ([Fraction(float(x)) for x in p] for p in (a, b, c))
    u = [y - x for x, y in zip(fa, fb)]
    v = [y - x for x, y in zip(fa, fc)]
    return not any((u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]))


def planar_edges(cloud: PointCloud, max_points: int = ORACLE_MAX_POINTS) -> np.ndarray:
    """Delaunay edges of a coplanar, non-collinear cloud by exhaustive empty-circle search.

    Returns:
        (E, 2) sorted unique index pairs
    """
    n = len(cloud)
    if n > max_points:
        raise OracleLimitError(f"planar oracle accepts at most {max_points} points, got {n}")

    pts = cloud.points
    kept = []
    for tris in _chunks(combinations(range(n), 3), _CHUNK):
        a, b, c = (pts[tris[:, k]] for k in range(3))
        u, v = b - a, c - a
        w = np.cross(u, v)
        ww = np.einsum("ij,ij->i", w, w)
        uu = np.einsum("ij,ij->i", u, u)
        vv = np.einsum("ij,ij->i", v, v)
        live = ww > 1e-12 * uu * vv
        for t in np.flatnonzero(~live):
            live[t] = not _collinear(*(pts[k] for k in tris[t]))
        tris, a, u, v, w, ww, uu, vv = (x[live] for x in (tris, a, u, v, w, ww, uu, vv))
        if len(tris) == 0:
            continue

        centre = a + (vv[:, None] * np.cross(w, u) + uu[:, None] * np.cross(v, w)) / (2.0 * ww[:, None])
        r2 = np.einsum("ij,ij->i", a - centre, a - centre)
        d2 = np.sum((pts[None, :, :] - centre[:, None, :]) ** 2, axis=2)

        band = 1e-9 * r2[:, None]
        inside = d2 < r2[:, None] - band
        uncertain = np.abs(d2 - r2[:, None]) <= band
        own = np.zeros(d2.shape, dtype=bool)
        own[np.arange(len(tris))[:, None], tris] = True
        inside &= ~own
        uncertain &= ~own

        for t, e in np.argwhere(uncertain & ~inside):
            i, j, k = tris[t].tolist()
            s = incircle_coplanar_perturbed(tuple(pts[i]), tuple(pts[j]), tuple(pts[k]),
                                            tuple(pts[e]), (i, j, k, int(e)))
            inside[t, e] = s > 0
        kept.append(tris[~np.any(inside, axis=1)])

    return _edges_from(kept, ((0, 1), (0, 2), (1, 2)))

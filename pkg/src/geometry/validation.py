"""Structural and Delaunay checks for a finished triangulation.

Checks run cheapest first and stop at the first violation. Failed checks are
reported, never raised.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from src.geometry.complexity import edge_array, triangle_array
from src.geometry.delaunay import GHOST, Triangulation, hull_faces
from src.geometry.predicates import (
    insphere_batch,
    insphere_filtered,
    insphere_perturbed,
    orient3d_batch,
    orient3d_raw,
    perturbation_sign,
    insphere_raw,
)

logger = logging.getLogger(__name__)

VALIDATION_GATE = 20000
VALIDATION_SAMPLES = 1000

_FACES = np.array([(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)])


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate(); kind names the failed check, or "ok"."""

    ok: bool
    kind: str = "ok"
    message: str = ""
    sampled: bool = False
    sphere_tests: int = 0

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "kind": self.kind,
            "message": self.message,
            "sampled": self.sampled,
            "sphere_tests": self.sphere_tests,
        }


def _fail(kind: str, message: str) -> ValidationReport:
    logger.warning("validation failed (%s): %s", kind, message)
    return ValidationReport(ok=False, kind=kind, message=message)


def check_links(tets: np.ndarray, nbrs: np.ndarray) -> Optional[str]:
    """Neighbour links are mutual and agree on the shared face."""
    T = len(tets)
    if T == 0:
        return "triangulation has no tetrahedra"
    if nbrs.min() < 0 or nbrs.max() >= T:
        return "neighbour index out of range"
    ghosts_per_tet = np.sum(tets == GHOST, axis=1)
    if np.any(ghosts_per_tet > 1):
        return f"tet {int(np.flatnonzero(ghosts_per_tet > 1)[0])} has more than one ghost vertex"

    back = nbrs[nbrs] == np.arange(T)[:, None, None]
    has_back = back.any(axis=2)
    if not has_back.all():
        t, i = map(int, np.argwhere(~has_back)[0])
        return f"tet {t} links to {int(nbrs[t, i])} across face {i} but the link is not mutual"

    faces = np.sort(tets[:, _FACES], axis=2)
    j = back.argmax(axis=2)
    mirrored = faces[nbrs, j]
    same = np.all(faces == mirrored, axis=2)
    if not same.all():
        t, i = map(int, np.argwhere(~same)[0])
        return f"tets {t} and {int(nbrs[t, i])} are linked but do not share face {faces[t, i].tolist()}"
    return None


def check_orientation(tri: Triangulation) -> Optional[str]:
    """Every finite tet is positively oriented."""
    pts = tri.cloud.points
    finite = np.flatnonzero(~tri.ghost_mask)
    tets = tri.tets[finite]
    signs = orient3d_batch(*(pts[tets[:, k]] for k in range(4)))
    bad = np.flatnonzero(signs <= 0)
    if len(bad):
        t = int(finite[bad[0]])
        return f"tet {t} {tri.tets[t].tolist()} is not positively oriented (sign {int(signs[bad[0]])})"
    return None


def check_euler(tri: Triangulation) -> Optional[str]:
    """V - E + F - T = 1 over finite simplices and V - E + F = 2 on the hull."""
    used = np.unique(tri.finite_tets)
    if len(used) != tri.n_vertices:
        return f"{tri.n_vertices - len(used)} vertices are missing from the complex"

    V = tri.n_vertices
    E = len(edge_array(tri))
    F = len(triangle_array(tri))
    T = len(tri.finite_tets)
    if V - E + F - T != 1:
        return f"V - E + F - T = {V} - {E} + {F} - {T} = {V - E + F - T}, expected 1"

    hull = hull_faces(tri)
    Vh = len(np.unique(hull))
    Eh = len(np.unique(np.sort(hull[:, [[0, 1], [1, 2], [0, 2]]].reshape(-1, 2), axis=1), axis=0))
    Fh = len(hull)
    if Vh - Eh + Fh != 2:
        return f"hull V - E + F = {Vh} - {Eh} + {Fh} = {Vh - Eh + Fh}, expected 2"
    return None


def check_hull(tri: Triangulation) -> Optional[str]:
    """Ghost tets face outwards and the hull is locally convex."""
    P = tri.cloud.points
    tets, nbrs = tri.tets, tri.neighbors
    for g in np.flatnonzero(tri.ghost_mask):
        row = tets[g].tolist()
        j = row.index(GHOST)
        for i in range(4):
            other = tets[nbrs[g, i]].tolist()
            shared = set(row) - {row[i]}
            apex = [v for v in other if v not in shared]
            if len(apex) != 1 or apex[0] == GHOST:
                continue
            q = [P[v] if v != GHOST else None for v in row]
            q[j] = P[apex[0]]
            if orient3d_raw(*q[0], *q[1], *q[2], *q[3]) > 0:
                return f"hull facet of ghost tet {int(g)} is not convex towards vertex {apex[0]}"
    return None


def _circumcentres(pts: np.ndarray, tets: np.ndarray):
    a = pts[tets[:, 0]]
    M = np.stack([pts[tets[:, k]] - a for k in (1, 2, 3)], axis=1)
    rhs = 0.5 * np.sum(M * M, axis=2)
    det = np.linalg.det(M)
    scale = np.prod(np.linalg.norm(M, axis=2), axis=1)
    well = np.abs(det) > 1e-10 * scale

    centres = np.full((len(tets), 3), np.nan)
    if well.any():
        centres[well] = a[well] + np.linalg.solve(M[well], rhs[well][..., None])[..., 0]
    radii = np.linalg.norm(centres - a, axis=1)
    well &= np.isfinite(radii)
    return centres, radii, well


def _resolve(pts, tets, cand_t, cand_v, signs, uncertain) -> np.ndarray:
    for k in np.flatnonzero(uncertain):
        ids = (*tets[cand_t[k]].tolist(), int(cand_v[k]))
        verts = [tuple(pts[i]) for i in ids]
        s = insphere_raw(*verts[0], *verts[1], *verts[2], *verts[3], *verts[4])
        signs[k] = s if s else perturbation_sign(verts, ids)
    return signs


def check_empty_spheres(tri: Triangulation) -> tuple[Optional[str], int]:
    """Direct scan: no vertex lies strictly inside a finite tet's circumsphere."""
    pts = tri.cloud.points
    tets = tri.finite_tets.astype(np.int64)
    centres, radii, well = _circumcentres(pts, tets)
    tree = cKDTree(pts)

    slack = 1e-7 * radii + 1e-12 * (1.0 + np.abs(centres).max(axis=1))
    idx = np.flatnonzero(well)
    hits = tree.query_ball_point(centres[idx], radii[idx] + slack[idx]) if len(idx) else []
    lengths = np.fromiter((len(h) for h in hits), dtype=np.int64, count=len(hits))
    cand_t = np.repeat(idx, lengths)
    cand_v = np.fromiter((v for h in hits for v in h), dtype=np.int64, count=int(lengths.sum()))

    own = np.any(tets[cand_t] == cand_v[:, None], axis=1)
    cand_t, cand_v = cand_t[~own], cand_v[~own]
    tests = len(cand_t)

    if tests:
        signs, uncertain = insphere_filtered(*(pts[tets[cand_t, k]] for k in range(4)), pts[cand_v])
        signs = _resolve(pts, tets, cand_t, cand_v, signs, uncertain)
        bad = np.flatnonzero(signs > 0)
        if len(bad):
            t, v = int(cand_t[bad[0]]), int(cand_v[bad[0]])
            return f"vertex {v} lies inside the circumsphere of tet {tets[t].tolist()}", tests

    for t in np.flatnonzero(~well):
        tet = tets[t]
        signs = insphere_batch(*(pts[tet[k]][None, :] for k in range(4)), pts)
        signs[tet] = -1
        for v in np.flatnonzero(signs == 0):
            signs[v] = insphere_perturbed(*(tuple(pts[i]) for i in tet), tuple(pts[v]),
                                          (*tet.tolist(), int(v)))
        tests += len(pts) - 4
        if np.any(signs > 0):
            v = int(np.flatnonzero(signs > 0)[0])
            return f"vertex {v} lies inside the circumsphere of tet {tet.tolist()}", tests
    return None, tests


def check_empty_spheres_sampled(tri: Triangulation, samples: int, seed: int) -> tuple[Optional[str], int]:
    """Seeded random (vertex, tet) pairs for triangulations above the scan gate."""
    pts = tri.cloud.points
    tets = tri.finite_tets
    rng = np.random.default_rng(seed)
    tested = 0
    for t, v in zip(rng.integers(len(tets), size=samples), rng.integers(len(pts), size=samples)):
        tet = tets[t].tolist()
        if int(v) in tet:
            continue
        s = insphere_perturbed(*(tuple(pts[i]) for i in tet), tuple(pts[v]), (*tet, int(v)))
        tested += 1
        if s > 0:
            return f"vertex {int(v)} lies inside the circumsphere of tet {tet}", tested
    return None, tested


def validate(tri: Triangulation, gate: int = VALIDATION_GATE, samples: int = VALIDATION_SAMPLES,
             seed: int = 0) -> ValidationReport:
    """Check every triangulation invariant; report the first violation.

    Args:
        tri: Triangulation to check
        gate: Largest vertex count for the full empty-sphere scan
        samples: Random (vertex, tet) pairs checked above the gate
        seed: Seed for the sampled check

    Returns:
        ValidationReport with ok set when every check passes
    """
    if tri.is_degenerate:
        return ValidationReport(ok=True, kind="degenerate",
                                message=f"{tri.dimension}-dimensional cloud; edges only")

    problem = check_links(tri.tets, tri.neighbors)
    if problem:
        return _fail("links", problem)
    for kind, check in (("orientation", check_orientation), ("euler", check_euler), ("hull", check_hull)):
        problem = check(tri)
        if problem:
            return _fail(kind, problem)

    sampled = tri.n_vertices > gate
    if sampled:
        problem, tests = check_empty_spheres_sampled(tri, samples, seed)
    else:
        problem, tests = check_empty_spheres(tri)
    if problem:
        report = _fail("delaunay", problem)
        return ValidationReport(ok=False, kind=report.kind, message=report.message,
                                sampled=sampled, sphere_tests=tests)

    logger.info("validated %d tets (%d sphere tests%s)", len(tri.tets), tests, ", sampled" if sampled else "")
    return ValidationReport(ok=True, sampled=sampled, sphere_tests=tests)

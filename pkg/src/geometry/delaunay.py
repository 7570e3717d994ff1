"""Incremental 3D Delaunay triangulation.

Bowyer-Watson insertion with a ghost vertex closing the convex hull: every
hull facet is the base of a ghost tetrahedron whose fourth vertex is GHOST,
so the complex is a closed 3-manifold and point location never falls off the
hull. Ties in the empty-sphere test are broken by symbolic perturbation on
global vertex indices, so the result does not depend on insertion order.

Tetrahedron storage is index based. Tet t has vertices tets[t][0..3] and
neighbors[t][i] is the tet across the face opposite tets[t][i].
"""

import logging
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from src.errors import BudgetExceededError, DegenerateCloudError, OracleLimitError
from src.geometry.cloud import PointCloud
from src.geometry.predicates import (
    incircle_coplanar_perturbed,
    insphere_raw,
    orient3d_raw,
    perturbation_sign,
)

logger = logging.getLogger(__name__)

GHOST = -1

# Deadline checks are amortised over this many insertions
_DEADLINE_STRIDE = 64


@dataclass(frozen=True, eq=False)
class Triangulation:
    """Tetrahedral complex over a point cloud, immutable after construction.

    Attributes:
        cloud: The triangulated points
        tets: (T, 4) int32 vertex indices; GHOST marks hull tets
        neighbors: (T, 4) int32; neighbors[t, i] is across the face opposite tets[t, i]
        dimension: Affine dimension of the cloud (3 for a proper complex)
        degenerate_edges: (E, 2) edges of a lower-dimensional cloud, else None
    """

    cloud: PointCloud
    tets: np.ndarray
    neighbors: np.ndarray
    dimension: int = 3
    degenerate_edges: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("tets", "neighbors"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.int32).reshape(-1, 4)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_vertices(self) -> int:
        return len(self.cloud)

    @property
    def is_degenerate(self) -> bool:
        return self.dimension < 3

    @property
    def ghost_mask(self) -> np.ndarray:
        return np.any(self.tets == GHOST, axis=1)

    @property
    def finite_tets(self) -> np.ndarray:
        return self.tets[~self.ghost_mask]


def hull_faces(tri: Triangulation) -> np.ndarray:
    """Hull triangles, counterclockwise seen from outside.

    Returns:
        (F, 3) int array; empty for lower-dimensional clouds
    """
    if tri.is_degenerate:
        return np.empty((0, 3), dtype=np.int64)
    ghosts = tri.tets[tri.ghost_mask]
    faces = []
    for row in ghosts:
        j = int(np.flatnonzero(row == GHOST)[0])
        face = [int(v) for k, v in enumerate(row) if k != j]
        # Moving the ghost slot to the end takes 3 - j transpositions
        if (3 - j) % 2:
            face[0], face[1] = face[1], face[0]
        faces.append(face)
    return np.array(faces, dtype=np.int64).reshape(-1, 3)


def affine_frame(points: np.ndarray, order) -> tuple:
    """Pick the first affinely independent points along an insertion order.

    Returns:
        (dimension, frame) where frame lists up to four point indices
    """
    a = order[0]
    if len(order) == 1:
        return 0, [a]
    b = order[1]
    pa, pb = points[a], points[b]
    ab = [Fraction(float(x)) - Fraction(float(y)) for x, y in zip(pb, pa)]

    c = None
    for k in order[2:]:
        ac = [Fraction(float(x)) - Fraction(float(y)) for x, y in zip(points[k], pa)]
        cross = (ab[1] * ac[2] - ab[2] * ac[1], ab[2] * ac[0] - ab[0] * ac[2], ab[0] * ac[1] - ab[1] * ac[0])
        if any(cross):
            c = k
            break
    if c is None:
        return 1, [a, b]

    pc = points[c]
    for k in order[2:]:
        if k == c:
            continue
        if orient3d_raw(*pa, *pb, *pc, *points[k]) != 0:
            return 3, [a, b, c, k]
    return 2, [a, b, c]


class _Builder:
    """Mutable Bowyer-Watson state; discarded once the Triangulation is frozen."""

    def __init__(self, points: np.ndarray, seed: int, deadline: Optional[float]):
        self.P = [tuple(row) for row in points.tolist()]
        self.rng = random.Random(seed)
        self.deadline = deadline
        self.tv: list[list[int]] = []
        self.tn: list[list[int]] = []
        self.dead: list[bool] = []
        self.free: list[int] = []
        self.last = 0
        self.cavity_total = 0

    # --- storage ----------------------------------------------------------

    def _new_tet(self, verts: list[int]) -> int:
        if self.free:
            t = self.free.pop()
            self.tv[t] = verts
            self.tn[t] = [-1, -1, -1, -1]
            self.dead[t] = False
            return t
        self.tv.append(verts)
        self.tn.append([-1, -1, -1, -1])
        self.dead.append(False)
        return len(self.tv) - 1

    def _kill(self, t: int):
        self.dead[t] = True
        self.free.append(t)

    def _link_among(self, new_tets: list[int]):
        """Connect the faces shared between freshly created tets."""
        pending: dict[tuple, tuple] = {}
        for t in new_tets:
            verts = self.tv[t]
            for i in range(4):
                if self.tn[t][i] != -1:
                    continue
                key = tuple(sorted(verts[:i] + verts[i + 1:]))
                other = pending.pop(key, None)
                if other is None:
                    pending[key] = (t, i)
                else:
                    u, j = other
                    self.tn[t][i] = u
                    self.tn[u][j] = t
        if pending:
            raise RuntimeError(f"cavity left {len(pending)} unmatched faces")

    # --- construction -----------------------------------------------------

    def seed_tet(self, frame: list[int]):
        a, b, c, d = frame
        P = self.P
        if orient3d_raw(*P[a], *P[b], *P[c], *P[d]) < 0:
            a, b = b, a
        base = [a, b, c, d]
        t0 = self._new_tet(base)
        ghosts = []
        for i in range(4):
            verts = list(base)
            verts[i] = GHOST
            # Swap two finite vertices so that GHOST -> q is positive beyond the facet
            others = [k for k in range(4) if k != i]
            verts[others[0]], verts[others[1]] = verts[others[1]], verts[others[0]]
            g = self._new_tet(verts)
            self.tn[t0][i] = g
            self.tn[g][i] = t0
            ghosts.append(g)
        self._link_among(ghosts)
        self.last = t0

    def _orient_with(self, verts: list[int], i: int, p: tuple) -> int:
        P = self.P
        q = [P[v] for v in verts]
        q[i] = p
        return orient3d_raw(*q[0], *q[1], *q[2], *q[3])

    def locate(self, p: tuple) -> int:
        """Visibility walk from the last created tet to a tet in conflict with p."""
        t = self.last
        if self.dead[t]:
            t = next(k for k in range(len(self.dead)) if not self.dead[k])
        verts = self.tv[t]
        if GHOST in verts:
            t = self.tn[t][verts.index(GHOST)]

        steps = 0
        while True:
            verts = self.tv[t]
            if GHOST in verts:
                return t
            offset = self.rng.randrange(4)
            for k in range(4):
                i = (offset + k) & 3
                if self._orient_with(verts, i, p) < 0:
                    t = self.tn[t][i]
                    break
            else:
                if steps > 1000:
                    logger.debug("long walk: %d steps", steps)
                return t
            steps += 1

    def in_conflict(self, t: int, p: tuple, pid: int) -> bool:
        verts = self.tv[t]
        P = self.P
        if GHOST in verts:
            j = verts.index(GHOST)
            o = self._orient_with(verts, j, p)
            if o:
                return o > 0
            face = [v for v in verts if v != GHOST]
            sign = incircle_coplanar_perturbed(P[face[0]], P[face[1]], P[face[2]], p,
                                               (face[0], face[1], face[2], pid))
            return sign > 0

        a, b, c, d = verts
        s = insphere_raw(*P[a], *P[b], *P[c], *P[d], *p)
        if s == 0:
            s = perturbation_sign((P[a], P[b], P[c], P[d], p), (a, b, c, d, pid))
        return s > 0

    def insert(self, pid: int):
        p = self.P[pid]
        start = self.locate(p)

        cavity = [start]
        in_cavity = {start}
        outside: set = set()
        boundary = []
        stack = [start]
        while stack:
            t = stack.pop()
            for i in range(4):
                u = self.tn[t][i]
                if u in in_cavity:
                    continue
                if u not in outside and self.in_conflict(u, p, pid):
                    in_cavity.add(u)
                    cavity.append(u)
                    stack.append(u)
                else:
                    outside.add(u)
                    boundary.append((t, i, u, self.tn[u].index(t)))

        self.cavity_total += len(cavity)
        logger.debug("insert %d: cavity %d, boundary %d", pid, len(cavity), len(boundary))

        # Cavity slots are released only after the new tets have read them
        created = []
        for t, i, u, j in boundary:
            verts = list(self.tv[t])
            verts[i] = pid
            nt = self._new_tet(verts)
            self.tn[nt][i] = u
            self.tn[u][j] = nt
            created.append(nt)
        for t in cavity:
            self._kill(t)
        self._link_among(created)
        self.last = created[-1]

    def run(self, order: list[int]):
        for count, pid in enumerate(order, start=1):
            if self.deadline is not None and count % _DEADLINE_STRIDE == 0 and time.monotonic() > self.deadline:
                raise BudgetExceededError(f"triangulation exceeded its time budget after {count} insertions")
            self.insert(pid)

    def freeze(self) -> tuple[np.ndarray, np.ndarray]:
        alive = [t for t in range(len(self.tv)) if not self.dead[t]]
        remap = {t: k for k, t in enumerate(alive)}
        tets = np.array([self.tv[t] for t in alive], dtype=np.int32)
        nbrs = np.array([[remap[u] for u in self.tn[t]] for t in alive], dtype=np.int32)
        return tets, nbrs


def _lower_dimensional_edges(cloud: PointCloud, dimension: int, max_points: int) -> np.ndarray:
    pts = cloud.points
    if dimension == 0:
        return np.empty((0, 2), dtype=np.int64)
    if dimension == 1:
        order = np.lexsort(pts.T[::-1])
        edges = np.column_stack([order[:-1], order[1:]])
        return np.sort(edges, axis=1)

    from src.geometry.oracle import planar_edges
    try:
        return planar_edges(cloud, max_points=max_points)
    except OracleLimitError as e:
        raise DegenerateCloudError(f"coplanar cloud of {len(cloud)} points exceeds the planar oracle: {e}",
                                   dimension=2) from e


def triangulate(cloud: PointCloud, seed: int = 0, deadline: Optional[float] = None,
                max_planar_points: int = 128) -> Triangulation:
    """Delaunay triangulation of a point cloud.

    Args:
        cloud: Points to triangulate (distinctness is enforced by PointCloud)
        seed: Seed for the insertion-order shuffle and walk randomisation
        deadline: Optional time.monotonic() value after which to abort
        max_planar_points: Size guard for the coplanar fallback

    Returns:
        Triangulation; lower-dimensional clouds come back flagged with
        dimension < 3 and their edges in degenerate_edges

    Raises:
        BudgetExceededError: If the deadline passes mid-run
        DegenerateCloudError: For coplanar clouds beyond max_planar_points
    """
    n = len(cloud)
    order = list(range(n))
    random.Random(seed).shuffle(order)

    dimension, frame = affine_frame(cloud.points, order)
    if dimension < 3:
        logger.info("cloud of %d points is %d-dimensional; reporting degenerate complex", n, dimension)
        edges = _lower_dimensional_edges(cloud, dimension, max_planar_points)
        empty = np.empty((0, 4), dtype=np.int32)
        return Triangulation(cloud, empty, empty, dimension=dimension, degenerate_edges=edges)

    started = time.monotonic()
    builder = _Builder(cloud.points, seed, deadline)
    builder.seed_tet(frame)
    in_frame = set(frame)
    builder.run([k for k in order if k not in in_frame])
    tets, nbrs = builder.freeze()

    logger.info("triangulated %d points: %d tets (%d ghost) in %.2fs, mean cavity %.1f",
                n, len(tets), int(np.any(tets == GHOST, axis=1).sum()),
                time.monotonic() - started, builder.cavity_total / max(n - 4, 1))
    return Triangulation(cloud, tets, nbrs)

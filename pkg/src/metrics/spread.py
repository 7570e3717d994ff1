"""Closest pair, diameter and spread of a point cloud."""

import logging
import math
import random
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import cdist, pdist

from src.errors import InvalidParameterError
from src.geometry.cloud import PointCloud

logger = logging.getLogger(__name__)

_OFFSETS = [(dx, dy, dz) for dx in (-1, 0, 1) for dy in (-1, 0, 1) for dz in (-1, 0, 1)]
_BRUTE_FORCE_LIMIT = 2000


@dataclass(frozen=True)
class SpreadReport:
    """Closest pair, diameter and their ratio.

    packing_ratio is spread / n^(1/3); a set of n points in 3D cannot have
    spread below a constant times n^(1/3), so this is reported, not asserted.
    """

    n: int
    closest_pair: tuple
    closest_distance: float
    diameter_pair: tuple
    diameter: float

    @property
    def spread(self) -> float:
        return self.diameter / self.closest_distance

    @property
    def packing_ratio(self) -> float:
        return self.spread / self.n ** (1.0 / 3.0)

    @property
    def normalisation(self) -> float:
        """Scale factor that makes the closest pair distance 2."""
        return 2.0 / self.closest_distance

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "closest_pair": list(self.closest_pair),
            "closest_distance": self.closest_distance,
            "diameter_pair": list(self.diameter_pair),
            "diameter": self.diameter,
            "spread": self.spread,
            "packing_ratio": self.packing_ratio,
        }


def _cell(p, size: float) -> tuple:
    return (math.floor(p[0] / size), math.floor(p[1] / size), math.floor(p[2] / size))


def closest_pair(points: np.ndarray, seed: int = 0) -> tuple[tuple, float]:
    """Closest pair by randomised incremental grid hashing.

    Points are inserted in a seeded random order into a grid whose cell size
    is the current best distance; a closer pair rebuilds the grid. Expected
    linear time.

    Returns:
        ((i, j), distance) with i < j
    """
    n = len(points)
    if n < 2:
        raise InvalidParameterError("closest pair needs at least two points")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    P = points.tolist()

    def dist2(i, j):
        a, b = P[i], P[j]
        return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2

    best = (order[0], order[1])
    best2 = dist2(*best)
    size = math.sqrt(best2)

    def rebuild(upto: int) -> dict:
        grid: dict = {}
        for k in order[:upto]:
            grid.setdefault(_cell(P[k], size), []).append(k)
        return grid

    grid = rebuild(2)
    for pos in range(2, n):
        k = order[pos]
        cx, cy, cz = _cell(P[k], size)
        improved = False
        for dx, dy, dz in _OFFSETS:
            for other in grid.get((cx + dx, cy + dy, cz + dz), ()):
                d2 = dist2(k, other)
                if d2 < best2:
                    best2, best, improved = d2, (other, k), True
        if improved:
            size = math.sqrt(best2)
            grid = rebuild(pos + 1)
        else:
            grid.setdefault((cx, cy, cz), []).append(k)

    i, j = sorted(best)
    return (i, j), math.sqrt(best2)


def _farthest_pair(points: np.ndarray, candidates: np.ndarray, block: int = 1024) -> tuple[tuple, float]:
    sub = points[candidates]
    best, pair = -1.0, (0, 1)
    for start in range(0, len(sub), block):
        d = cdist(sub[start:start + block], sub)
        r, c = np.unravel_index(int(np.argmax(d)), d.shape)
        if d[r, c] > best:
            best, pair = float(d[r, c]), (start + int(r), int(c))
    i, j = sorted((int(candidates[pair[0]]), int(candidates[pair[1]])))
    return (i, j), best


def diameter(points: np.ndarray, hull_vertices: Optional[np.ndarray] = None) -> tuple[tuple, float]:
    """Farthest pair, searched over convex hull vertices.

    Args:
        points: (n, 3) coordinates
        hull_vertices: Hull vertex indices if already known (e.g. from a triangulation)
    """
    if hull_vertices is None:
        try:
            hull_vertices = ConvexHull(points).vertices
        except (QhullError, ValueError):
            logger.debug("qhull rejected the cloud; diameter by brute force")
            hull_vertices = np.arange(len(points))
    candidates = np.unique(np.asarray(hull_vertices, dtype=np.int64))
    if len(candidates) < 2:
        candidates = np.arange(len(points))
    return _farthest_pair(points, candidates)


def spread(cloud: PointCloud, hull_vertices: Optional[np.ndarray] = None) -> SpreadReport:
    """Spread of a cloud with at least two points."""
    if len(cloud) < 2:
        raise InvalidParameterError("spread needs at least two points")
    cp, cd = closest_pair(cloud.points)
    dp, dd = diameter(cloud.points, hull_vertices)
    report = SpreadReport(len(cloud), cp, cd, dp, dd)
    logger.debug("spread of %d points: %.6g", len(cloud), report.spread)
    return report


def brute_force_spread(points: np.ndarray) -> float:
    """O(n^2) spread for cross-checking small clouds."""
    if len(points) > _BRUTE_FORCE_LIMIT:
        raise InvalidParameterError(f"brute force spread is limited to {_BRUTE_FORCE_LIMIT} points")
    d = pdist(points)
    return float(d.max() / d.min())

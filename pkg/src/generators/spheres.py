"""Unit-sphere samples: golden-section spirals and rows of spheres."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.transform import Rotation

from src.errors import InvalidParameterError
from src.geometry.cloud import PointCloud, Provenance
from src.metrics.surfaces import sphere_union

logger = logging.getLogger(__name__)

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
MIN_PER_SPHERE = 32
TOP_POLE = np.array([0.0, 0.0, 1.0])


def sphere_spiral(count: int, rotation: Optional[Rotation] = None) -> np.ndarray:
    """Evenly spread points on the unit sphere along a golden-section spiral.

    Args:
        count: Number of points; a single point is placed at the pole (0, 0, 1)
        rotation: Optional rigid rotation applied to the whole spiral

    Returns:
        (count, 3) array of unit vectors
    """
    if count < 1:
        raise InvalidParameterError(f"spiral needs at least one point, got {count}")
    if count == 1:
        return np.array([[0.0, 0.0, 1.0]])

    k = np.arange(count)
    dz = 2.0 / count
    z = 1.0 - dz / 2.0 - k * dz
    r = np.sqrt(1.0 - z * z)
    longitude = k * GOLDEN_ANGLE
    pts = np.column_stack([np.cos(longitude) * r, np.sin(longitude) * r, z])
    if rotation is not None:
        pts = rotation.apply(pts)
    return pts


@dataclass(frozen=True)
class BallRowParams:
    """Two perpendicular rows of unit spheres, one above and one below the xy-plane.

    Centres are p_i = (i k, 0, k^2) and q_j = (0, j k, -k^2) for
    |i|, |j| <= floor(k / 4).
    """

    k: int

    def __post_init__(self):
        if self.k < 4:
            raise InvalidParameterError(f"ball rows need k >= 4, got {self.k}")

    @property
    def half_width(self) -> int:
        return self.k // 4

    @property
    def row_size(self) -> int:
        return 2 * self.half_width + 1

    def upper_centres(self) -> np.ndarray:
        i = np.arange(-self.half_width, self.half_width + 1)
        return np.column_stack([i * self.k, np.zeros_like(i), np.full_like(i, self.k ** 2)]).astype(float)

    def lower_centres(self) -> np.ndarray:
        j = np.arange(-self.half_width, self.half_width + 1)
        return np.column_stack([np.zeros_like(j), j * self.k, np.full_like(j, -self.k ** 2)]).astype(float)

    def centres(self) -> np.ndarray:
        return np.vstack([self.upper_centres(), self.lower_centres()])

    @property
    def cross_pairs(self) -> int:
        return self.row_size ** 2


def gen_sphere_spiral(count: int, seed: Optional[int] = None) -> PointCloud:
    """Spiral sample of a single unit sphere at the origin, optionally rotated by seed."""
    rotation = Rotation.random(random_state=np.random.default_rng(seed)) if seed is not None else None
    pts = sphere_spiral(count, rotation)
    return PointCloud(pts, Provenance("sphere", {"count": count}, seed), sphere_union([(0.0, 0.0, 0.0)]))


def gen_ball_rows(k: int, per_sphere: int, seed: int = 0) -> PointCloud:
    """Spiral samples of every sphere in two ball rows.

    Points of sphere s occupy indices s * per_sphere .. (s + 1) * per_sphere - 1,
    upper row first. Each sphere's spiral gets its own seeded rotation.
    """
    params = BallRowParams(k)
    if k < 8:
        raise InvalidParameterError(f"ball rows need k >= 8, got {k}")
    if per_sphere < 1:
        raise InvalidParameterError(f"per_sphere must be >= 1, got {per_sphere}")
    undersampled = per_sphere < MIN_PER_SPHERE
    if undersampled:
        logger.warning("per_sphere = %d is below %d; the cloud is not a dense sample", per_sphere, MIN_PER_SPHERE)

    rng = np.random.default_rng(seed)
    centres = params.centres()
    blocks = []
    for centre in centres:
        if per_sphere == 1:
            # Top of every sphere, upper and lower rows alike
            blocks.append(centre[None, :] + TOP_POLE)
            continue
        rotation = Rotation.random(random_state=rng)
        blocks.append(centre + sphere_spiral(per_sphere, rotation))

    prov = Provenance("ball_rows", {"k": k, "per_sphere": per_sphere, "row_size": params.row_size,
                                    "undersampled": undersampled}, seed)
    return PointCloud(np.vstack(blocks), prov, sphere_union(centres))


def gen_random_ball_rows(k: int, n: int, seed: int = 0) -> PointCloud:
    """n independent area-uniform points on the union of the ball-row spheres."""
    params = BallRowParams(k)
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    if n < 10 * k:
        logger.warning("n = %d is below 10k = %d; no coverage is expected", n, 10 * k)

    rng = np.random.default_rng(seed)
    centres = params.centres()
    # Equal areas: choose spheres uniformly, directions from normalised Gaussians
    owner = rng.integers(len(centres), size=n)
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1)[:, None]

    prov = Provenance("random_ball_rows", {"k": k, "n": n, "row_size": params.row_size}, seed)
    return PointCloud(centres[owner] + d, prov, sphere_union(centres))


def sphere_owner(cloud: PointCloud) -> np.ndarray:
    """Index of the sphere each point of a ball-row cloud lies on."""
    centres = np.asarray(cloud.surface.params["centres"], dtype=float)
    d = np.linalg.norm(cloud.points[:, None, :] - centres[None, :, :], axis=2)
    return np.argmin(d, axis=1)

"""Point cloud container with generator provenance."""

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, Optional

import numpy as np

from src.errors import DuplicatePointError

if TYPE_CHECKING:
    from src.metrics.surfaces import SurfaceModel


@dataclass(frozen=True)
class Provenance:
    """Generator name, the exact parameters emitted, and the RNG seed."""

    generator: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return {"generator": self.generator, "params": dict(self.params), "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict) -> "Provenance":
        return cls(
            generator=str(data.get("generator", "unknown")),
            params=dict(data.get("params", {})),
            seed=data.get("seed"),
        )


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Ordered 3D points, immutable after construction.

    Attributes:
        points: (n, 3) float64 array, read-only
        provenance: Where the points came from
        surface: Analytic surface the points sample, if any
    """

    points: np.ndarray
    provenance: Provenance = field(default_factory=lambda: Provenance("external"))
    surface: Optional["SurfaceModel"] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must have shape (n, 3), got {pts.shape}")
        if len(pts) < 1:
            raise ValueError("a point cloud needs at least one point")
        if not np.all(np.isfinite(pts)):
            bad = int(np.flatnonzero(~np.isfinite(pts).all(axis=1))[0])
            raise ValueError(f"point {bad} has a non-finite coordinate")

        pair = find_duplicate(pts)
        if pair is not None:
            raise DuplicatePointError(*pair)

        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n(self) -> int:
        return len(self.points)

    def with_points(self, points: np.ndarray, generator: Optional[str] = None, **params) -> "PointCloud":
        """Derive a cloud with new coordinates, extending the provenance record."""
        prov = Provenance(
            generator=generator or self.provenance.generator,
            params={**self.provenance.params, **params},
            seed=self.provenance.seed,
        )
        return PointCloud(points, prov, self.surface)


def find_duplicate(points: np.ndarray) -> Optional[tuple]:
    """Return the first pair (i, j), i < j, of identical rows, or None."""
    order = np.lexsort(points.T[::-1])
    ordered = points[order]
    same = np.all(ordered[1:] == ordered[:-1], axis=1)
    if not same.any():
        return None
    k = int(np.flatnonzero(same)[0])
    i, j = sorted((int(order[k]), int(order[k + 1])))
    return i, j

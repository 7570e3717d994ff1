"""Analytic surfaces with known local feature size.

Every surface here is a union of capsules (a unit ball swept along a segment)
or unit spheres whose interior medial axis is the core segment or centre and
whose exterior medial axis stays farther than 1 from the surface, so the
local feature size is identically 1.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.errors import InvalidParameterError

KINDS = ("cylinder_capped", "sausage_pair", "sphere_union")


@dataclass(frozen=True)
class Patch:
    """One analytic piece: an open cylinder, a hemisphere or a full sphere.

    Attributes:
        shape: "cylinder", "hemisphere" or "sphere"
        centre: Cylinder start point, or sphere/hemisphere centre
        axis: Unit cylinder axis, or hemisphere pole direction
        length: Cylinder length (unused otherwise)
    """

    shape: str
    centre: tuple
    axis: tuple = (1.0, 0.0, 0.0)
    length: float = 0.0

    @property
    def area(self) -> float:
        if self.shape == "cylinder":
            return 2.0 * np.pi * self.length
        if self.shape == "hemisphere":
            return 2.0 * np.pi
        return 4.0 * np.pi

    def frame(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Orthonormal (axis, u, v)."""
        e = np.asarray(self.axis, dtype=float)
        helper = np.array([0.0, 0.0, 1.0]) if abs(e[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        u = np.cross(e, helper)
        u /= np.linalg.norm(u)
        return e, u, np.cross(e, u)

    def point(self, s: float, theta: float) -> np.ndarray:
        """Parametrised point; s is axial length or polar angle from the axis."""
        e, u, v = self.frame()
        c = np.asarray(self.centre, dtype=float)
        ring = np.cos(theta) * u + np.sin(theta) * v
        if self.shape == "cylinder":
            return c + s * e + ring
        return c + np.cos(s) * e + np.sin(s) * ring

    def area_element(self, s: float) -> float:
        return 1.0 if self.shape == "cylinder" else float(np.sin(s))

    def domain(self) -> tuple[float, float]:
        """Range of s; theta always spans [0, 2 pi)."""
        if self.shape == "cylinder":
            return 0.0, self.length
        if self.shape == "hemisphere":
            return 0.0, np.pi / 2
        return 0.0, np.pi

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Area-uniform points on the patch."""
        c = np.asarray(self.centre, dtype=float)
        if self.shape == "cylinder":
            e, u, v = self.frame()
            s = rng.uniform(0.0, self.length, size=count)
            theta = rng.uniform(0.0, 2.0 * np.pi, size=count)
            return c + s[:, None] * e + np.cos(theta)[:, None] * u + np.sin(theta)[:, None] * v
        d = rng.normal(size=(count, 3))
        d /= np.linalg.norm(d, axis=1)[:, None]
        if self.shape == "hemisphere":
            e = np.asarray(self.axis, dtype=float)
            along = d @ e
            d[along < 0] -= 2.0 * along[along < 0, None] * e
        return c + d


def _capsule(start, end) -> list[Patch]:
    start, end = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
    length = float(np.linalg.norm(end - start))
    e = tuple((end - start) / length)
    back = tuple(-x for x in e)
    return [
        Patch("cylinder", tuple(start), e, length),
        Patch("hemisphere", tuple(start), back),
        Patch("hemisphere", tuple(end), e),
    ]


def _segment_distance(x: np.ndarray, start, end) -> np.ndarray:
    a, b = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
    ab = b - a
    s = np.clip(((x - a) @ ab) / (ab @ ab), 0.0, 1.0)
    return np.linalg.norm(x - (a + s[:, None] * ab), axis=1)


@dataclass(frozen=True)
class SurfaceModel:
    """A closed analytic surface identified by kind and parameters.

    Kinds:
        cylinder_capped: params x0, x1; unit capsule along the x axis
        sausage_pair: params w, d; capsules over (-w,0,d+1)-(w,0,d+1) and (0,-w,-d-1)-(0,w,-d-1)
        sphere_union: params centres; disjoint unit spheres
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"no local feature size model for surface kind '{self.kind}'")

    def segments(self) -> list[tuple]:
        """Core segments of the capsules (empty for sphere unions)."""
        p = self.params
        if self.kind == "cylinder_capped":
            return [((p["x0"], 0.0, 0.0), (p["x1"], 0.0, 0.0))]
        if self.kind == "sausage_pair":
            w, d = p["w"], p["d"]
            return [((-w, 0.0, d + 1.0), (w, 0.0, d + 1.0)),
                    ((0.0, -w, -d - 1.0), (0.0, w, -d - 1.0))]
        return []

    def patches(self) -> list[Patch]:
        if self.kind == "sphere_union":
            return [Patch("sphere", tuple(map(float, c))) for c in self.params["centres"]]
        return [patch for start, end in self.segments() for patch in _capsule(start, end)]

    @property
    def area(self) -> float:
        return float(sum(patch.area for patch in self.patches()))

    def lfs(self, x: np.ndarray) -> np.ndarray:
        """Local feature size at surface points x (identically 1)."""
        return np.ones(len(np.atleast_2d(x)))

    def distance(self, x: np.ndarray) -> np.ndarray:
        """Unsigned distance from points to the surface."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.kind == "sphere_union":
            centres = np.asarray(self.params["centres"], dtype=float)
            d = np.linalg.norm(x[:, None, :] - centres[None, :, :], axis=2)
            return np.min(np.abs(d - 1.0), axis=1)
        core = np.min([_segment_distance(x, a, b) for a, b in self.segments()], axis=0)
        return np.abs(core - 1.0)

    def sample(self, count: int, seed: Optional[int] = None) -> np.ndarray:
        """Area-uniform random points, patch chosen in proportion to its area."""
        rng = np.random.default_rng(seed)
        patches = self.patches()
        weights = np.array([p.area for p in patches])
        counts = rng.multinomial(count, weights / weights.sum())
        parts = [patch.sample(int(c), rng) for patch, c in zip(patches, counts) if c]
        return np.concatenate(parts) if parts else np.empty((0, 3))

    def to_dict(self) -> dict:
        params = {k: (np.asarray(v).tolist() if isinstance(v, (list, tuple, np.ndarray)) else v)
                  for k, v in self.params.items()}
        return {"kind": self.kind, "params": params}

    @classmethod
    def from_dict(cls, data: Optional[dict]) -> Optional["SurfaceModel"]:
        if not data:
            return None
        return cls(kind=data["kind"], params=dict(data.get("params", {})))


def capped_cylinder(x0: float, x1: float) -> SurfaceModel:
    return SurfaceModel("cylinder_capped", {"x0": float(x0), "x1": float(x1)})


def sausage_pair(w: float, d: float) -> SurfaceModel:
    return SurfaceModel("sausage_pair", {"w": float(w), "d": float(d)})


def sphere_union(centres) -> SurfaceModel:
    return SurfaceModel("sphere_union", {"centres": [tuple(map(float, c)) for c in centres]})

"""Point sets on helices: the sqrt(n) helix, spread-controlled helices,
single-turn springs and the mattress lattice of helices."""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.errors import InvalidParameterError
from src.geometry.cloud import PointCloud, Provenance
from src.generators.spheres import sphere_spiral
from src.metrics.surfaces import capped_cylinder

logger = logging.getLogger(__name__)

TURN_MARGIN = 1e-3
_RANGE_TOL = 1e-12


@dataclass(frozen=True)
class HelixParams:
    """Helix (pitch * s, cos s, sin s) sampled at s = t / angular_rate, x = t * axial_step.

    Attributes:
        n: Number of points, t = 1..n
        pitch: Axial stretch factor, > 0
        angular_rate: Points per radian
        axial_step: Axial advance per point
    """

    n: int
    pitch: float = 1.0
    angular_rate: float = 1.0
    axial_step: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParameterError(f"a helix needs n >= 2, got {self.n}")
        if not self.pitch > 0:
            raise InvalidParameterError(f"pitch must be > 0, got {self.pitch}")

    def points(self) -> np.ndarray:
        t = np.arange(1, self.n + 1, dtype=float)
        angle = t / self.angular_rate
        return np.column_stack([self.pitch * t * self.axial_step, np.cos(angle), np.sin(angle)])

    @property
    def points_per_turn(self) -> int:
        return math.floor(2.0 * math.pi * self.angular_rate)


@dataclass(frozen=True)
class MattressParams:
    """w x w lattice of parallel helices, each with w * r points.

    Helix (i, j) is (t / r, 4i + cos(t / sqrt r), 4j + sin(t / sqrt r)) for
    t = 1..w r, so neighbouring unit cylinders are 2 apart.
    """

    w: int
    r: int

    def __post_init__(self):
        if self.w < 1:
            raise InvalidParameterError(f"mattress width w must be >= 1, got {self.w}")
        if self.r < 1:
            raise InvalidParameterError(f"mattress parameter r must be >= 1, got {self.r}")

    @property
    def n(self) -> int:
        return self.w ** 3 * self.r

    @classmethod
    def for_spread(cls, n: int, spread: float) -> "MattressParams":
        """Round w = n / spread^2 and r = spread^6 / n^2 to the nearest integers."""
        w = int(round(n / spread ** 2))
        if w < 1:
            raise InvalidParameterError(f"n = {n}, spread = {spread} rounds the mattress width w to 0")
        r = max(1, int(round(spread ** 6 / n ** 2)))
        return cls(w, r)

    def points(self) -> np.ndarray:
        t = np.arange(1, self.w * self.r + 1, dtype=float)
        angle = t / math.sqrt(self.r)
        strand = np.column_stack([t / self.r, np.cos(angle), np.sin(angle)])
        i, j = np.meshgrid(np.arange(self.w), np.arange(self.w), indexing="ij")
        offsets = np.column_stack([np.zeros(i.size), 4.0 * i.ravel(), 4.0 * j.ravel()])
        return (offsets[:, None, :] + strand[None, :, :]).reshape(-1, 3)


def _check_n(n: int, minimum: int = 2):
    if n < minimum:
        raise InvalidParameterError(f"n must be >= {minimum}, got {n}")
    if n < 8:
        logger.warning("n = %d is below 8; helix constructions are meant for n >= 8", n)


def _caps(n: int) -> np.ndarray:
    """Hemispherical caps at x = 1/n and x = 1 at the helix's turn spacing."""
    per_cap = max(4, int(round(n / (2.0 * math.pi))))
    # Spiral axis turned onto the x axis
    ball = sphere_spiral(2 * per_cap)[:, [2, 0, 1]]
    left = ball[ball[:, 0] < 0] + np.array([1.0 / n, 0.0, 0.0])
    right = ball[ball[:, 0] > 0] + np.array([1.0, 0.0, 0.0])
    return np.vstack([left, right])


def gen_helix_spread(n: int, spread: float) -> PointCloud:
    """n points (t/n, cos(t/spread), sin(t/spread)), t = 1..n, for sqrt(n) <= spread <= n."""
    _check_n(n)
    lo, hi = math.sqrt(n), float(n)
    if not (lo * (1 - _RANGE_TOL) <= spread <= hi * (1 + _RANGE_TOL)):
        raise InvalidParameterError(f"spread must lie in [sqrt(n), n] = [{lo:.6g}, {hi:.6g}], got {spread}")

    params = HelixParams(n, angular_rate=spread, axial_step=1.0 / n)
    prov = Provenance("helix_spread", {"n": n, "spread": float(spread)}, None)
    return PointCloud(params.points(), prov)


def gen_helix_sqrt(n: int, caps: bool = False) -> PointCloud:
    """The helix set with spread about sqrt(n): (t/n, cos(t/sqrt n), sin(t/sqrt n)).

    Args:
        n: Number of helix points, >= 8
        caps: Add spiral-sampled hemispherical caps closing the cylinder
    """
    _check_n(n)
    pts = gen_helix_spread(n, math.sqrt(n)).points
    params = {"n": n, "caps": caps}
    surface = None
    if caps:
        extra = _caps(n)
        pts = np.vstack([pts, extra])
        params["cap_points"] = len(extra)
        surface = capped_cylinder(1.0 / n, 1.0)
    return PointCloud(pts, Provenance("helix", params, None), surface)


def gen_mattress(n: int, spread: float) -> PointCloud:
    """Lattice of helices for n^(1/3) <= spread <= sqrt(n)."""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    lo, hi = n ** (1.0 / 3.0), math.sqrt(n)
    if not (lo * (1 - 1e-9) <= spread <= hi * (1 + _RANGE_TOL)):
        raise InvalidParameterError(f"spread must lie in [n^(1/3), sqrt(n)] = [{lo:.6g}, {hi:.6g}], got {spread}")

    params = MattressParams.for_spread(n, spread)
    if params.n != n:
        logger.info("mattress rounded to w = %d, r = %d: %d points instead of %d",
                    params.w, params.r, params.n, n)
    prov = Provenance("mattress", {"n": params.n, "requested_n": n, "spread": float(spread),
                                   "w": params.w, "r": params.r}, None)
    return PointCloud(params.points(), prov)


def gen_helix_single_turn(n: int, spacing: str = "even", seed: int = 0) -> PointCloud:
    """n points h(t) = (t, cos t, sin t) with t inside (-pi, pi).

    Args:
        n: Number of points, >= 2
        spacing: "even" or "random" (seeded uniform draws)
        seed: RNG seed for random spacing
    """
    if n < 2:
        raise InvalidParameterError(f"n must be >= 2, got {n}")
    lo, hi = -math.pi + TURN_MARGIN, math.pi - TURN_MARGIN
    if spacing == "even":
        t = np.linspace(lo, hi, n)
        seed = None
    elif spacing == "random":
        t = np.sort(np.random.default_rng(seed).uniform(lo, hi, size=n))
    else:
        raise InvalidParameterError(f"spacing must be 'even' or 'random', got '{spacing}'")
    prov = Provenance("single_turn", {"n": n, "spacing": spacing}, seed)
    return PointCloud(gen_helix_pitch(t, 1.0).points, prov)


def gen_helix_pitch(ts: Sequence[float], alpha: float) -> PointCloud:
    """Points (alpha t, cos t, sin t) for explicit parameters t."""
    if not alpha > 0:
        raise InvalidParameterError(f"pitch alpha must be > 0, got {alpha}")
    t = np.asarray(ts, dtype=float)
    pts = np.column_stack([alpha * t, np.cos(t), np.sin(t)])
    return PointCloud(pts, Provenance("helix_pitch", {"n": len(t), "alpha": float(alpha)}, None))


def predicted_order(n: int, spread: float) -> float:
    """min(spread^3, n spread, n^2): the lower-bound complexity order."""
    return float(min(spread ** 3, n * spread, n ** 2))


def gen_lower_bound(n: int, spread: float) -> PointCloud:
    """Dispatch to the construction realising the lower bound for (n, spread).

    spread >= n: one helix turn (neighborly); sqrt(n) <= spread < n: spread
    helix; n^(1/3) <= spread < sqrt(n): mattress.
    """
    _check_n(n)
    if spread < n ** (1.0 / 3.0) * (1 - 1e-9):
        raise InvalidParameterError(f"spread must be >= n^(1/3) = {n ** (1.0 / 3.0):.6g}, got {spread}")

    if spread >= n:
        regime, cloud = "neighborly", gen_helix_single_turn(n)
    elif spread >= math.sqrt(n):
        regime, cloud = "helix", gen_helix_spread(n, spread)
    else:
        regime, cloud = "mattress", gen_mattress(n, spread)

    prov = Provenance("lower_bound", {"requested_n": n, **cloud.provenance.params, "spread": float(spread),
                                      "regime": regime, "predicted_order": predicted_order(n, spread)},
                      cloud.provenance.seed)
    return PointCloud(cloud.points, prov, cloud.surface)

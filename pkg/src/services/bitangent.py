"""Spheres tangent to the helix (alpha s, cos s, sin s) at s = -t and s = t.

Such a sphere touches the helix at exactly those two points when t < pi,
which makes every pair of points within less than one turn a Delaunay edge.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

from src.errors import InvalidParameterError

logger = logging.getLogger(__name__)

T_MARGIN = 1e-3
DEFAULT_SAMPLES = 100_000
TANGENCY_WINDOW = 1e-6
CENTRE_TOL = 1e-9
CONTACT_TOL = 1e-7
SOLVE_TOL = 1e-9


def _check_t(t: float):
    if not 0.0 < t < math.pi - T_MARGIN:
        raise InvalidParameterError(f"t must lie in (0, pi - {T_MARGIN}), got {t}")


@dataclass(frozen=True)
class BitangentSphere:
    """Sphere centred at (0, a, 0) tangent to the helix at h(-t) and h(t).

    Tangency at t forces a = -alpha^2 t / sin t; the radius follows from
    r^2 = alpha^2 t^2 + 1 - 2 a cos t + a^2.
    """

    t: float
    alpha: float = 1.0

    def __post_init__(self):
        _check_t(self.t)
        if not self.alpha > 0:
            raise InvalidParameterError(f"alpha must be > 0, got {self.alpha}")
        if self.centre_residual > CENTRE_TOL:
            raise InvalidParameterError(f"touch points are not on the sphere (residual {self.centre_residual:.3g})")
        if self.contact_residual > CONTACT_TOL:
            raise InvalidParameterError(f"sphere is not tangent at t (residual {self.contact_residual:.3g})")

    @property
    def a(self) -> float:
        return -self.alpha ** 2 * self.t / math.sin(self.t)

    @property
    def centre(self) -> np.ndarray:
        return np.array([0.0, self.a, 0.0])

    @property
    def radius(self) -> float:
        a, t = self.a, self.t
        return math.sqrt(self.alpha ** 2 * t ** 2 + 1.0 - 2.0 * a * math.cos(t) + a ** 2)

    def helix(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return np.stack([self.alpha * s, np.cos(s), np.sin(s)], axis=-1)

    @property
    def centre_residual(self) -> float:
        touch = self.helix([-self.t, self.t])
        return float(np.max(np.abs(np.linalg.norm(touch - self.centre, axis=1) - self.radius)))

    @property
    def contact_residual(self) -> float:
        """Derivative of the squared distance at s = t, relative to its terms."""
        value = self.alpha ** 2 * self.t + self.a * math.sin(self.t)
        return abs(value) / max(self.alpha ** 2 * self.t, 1.0)

    def solved_centre(self) -> np.ndarray:
        """Centre from the tangency and equal-distance conditions, solved numerically.

        Rows: (h(t) - c) . h'(t) = 0, (h(-t) - c) . h'(-t) = 0 and
        |h(t) - c|^2 = |h(-t) - c|^2, all linear in c.
        """
        t, alpha = self.t, self.alpha
        p, q = self.helix([t, -t])
        dp = np.array([alpha, -math.sin(t), math.cos(t)])
        dq = np.array([alpha, math.sin(t), math.cos(t)])
        lhs = np.vstack([dp, dq, 2.0 * (p - q)])
        rhs = np.array([p @ dp, q @ dq, p @ p - q @ q])
        return np.linalg.solve(lhs, rhs)

    @property
    def solve_residual(self) -> float:
        """Gap between the closed-form sphere and the numerically solved one, relative to the radius."""
        centre = self.solved_centre()
        radius = float(np.linalg.norm(self.helix(self.t) - centre))
        gap = max(float(np.linalg.norm(centre - self.centre)), abs(radius - self.radius))
        return gap / max(self.radius, 1.0)

    def excess(self, s) -> np.ndarray:
        """|h(s) - centre|^2 - r^2, factored to stay accurate near s = +/- t.

        Equals alpha^2 (s - t)(s + t) - (4 alpha^2 t / sin t) sin((s + t)/2) sin((s - t)/2).
        """
        s = np.asarray(s, dtype=float)
        t = self.t
        return (self.alpha ** 2 * (s - t) * (s + t)
                + 4.0 * self.a * np.sin((s + t) / 2.0) * np.sin((s - t) / 2.0))


@dataclass(frozen=True)
class BitangentReport:
    """Sampled check that a bitangent sphere meets the helix only at its touch points."""

    t: float
    alpha: float
    a: float
    radius: float
    samples: int
    min_excess: float
    centre_residual: float
    contact_residual: float
    solve_residual: float

    @property
    def ok(self) -> bool:
        return self.min_excess > 0.0 and self.solve_residual <= SOLVE_TOL

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "t": self.t,
            "alpha": self.alpha,
            "a": self.a,
            "radius": self.radius,
            "samples": self.samples,
            "min_excess": self.min_excess,
            "centre_residual": self.centre_residual,
            "contact_residual": self.contact_residual,
            "solve_residual": self.solve_residual,
        }


def verify_bitangent(t: float, s_samples: int = DEFAULT_SAMPLES, alpha: float = 1.0) -> BitangentReport:
    """Sample s in (-pi, pi) and check the helix stays strictly outside the sphere.

    Points within TANGENCY_WINDOW of +/- t are skipped.

    Args:
        t: Half the parameter gap between the touch points, 0 < t < pi - 1e-3
        s_samples: Number of samples of s
        alpha: Helix pitch

    Returns:
        BitangentReport; ok when every sampled excess is positive and the
        numerically solved centre agrees with the closed form
    """
    if s_samples < 2:
        raise InvalidParameterError(f"s_samples must be >= 2, got {s_samples}")
    sphere = BitangentSphere(t, alpha)
    s = np.linspace(-math.pi, math.pi, s_samples + 2)[1:-1]
    keep = (np.abs(s - t) > TANGENCY_WINDOW) & (np.abs(s + t) > TANGENCY_WINDOW)
    excess = sphere.excess(s[keep])

    report = BitangentReport(
        t=float(t),
        alpha=float(alpha),
        a=sphere.a,
        radius=sphere.radius,
        samples=int(keep.sum()),
        min_excess=float(excess.min()),
        centre_residual=sphere.centre_residual,
        contact_residual=sphere.contact_residual,
        solve_residual=sphere.solve_residual,
    )
    if report.min_excess <= 0.0:
        logger.warning("bitangent sphere at t = %g meets the helix (min excess %.3g)", t, report.min_excess)
    if report.solve_residual > SOLVE_TOL:
        logger.warning("bitangent sphere at t = %g disagrees with the solved centre (%.3g)", t, report.solve_residual)
    return report


def bitangent_radius_profile(ts: Sequence[float], alphas: Sequence[float] = (1.0,)) -> pd.DataFrame:
    """Radius of the bitangent sphere over a grid of t and alpha.

    Returns:
        DataFrame with columns t, alpha, a, radius
    """
    rows = []
    for alpha in alphas:
        for t in ts:
            sphere = BitangentSphere(float(t), float(alpha))
            rows.append({"t": sphere.t, "alpha": sphere.alpha, "a": sphere.a, "radius": sphere.radius})
    return pd.DataFrame(rows, columns=["t", "alpha", "a", "radius"])

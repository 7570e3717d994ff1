"""Neighbour counts in closest-pair-normalised units and complexity monitors.

All distances are rescaled so that the closest pair is 2 apart; under that
scaling a Delaunay vertex has O(r^2) neighbours within distance r, and the
edge count is at most a constant times spread^4.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from src.errors import InvalidParameterError
from src.geometry.complexity import ComplexityStats, edge_array
from src.geometry.delaunay import Triangulation
from src.metrics.spread import SpreadReport, closest_pair

logger = logging.getLogger(__name__)


def normalised_edge_lengths(tri: Triangulation, scale: Optional[float] = None) -> tuple[np.ndarray, np.ndarray]:
    """Edges and their lengths after scaling the closest pair to 2."""
    pts = tri.cloud.points
    if scale is None:
        _, d = closest_pair(pts)
        scale = 2.0 / d
    edges = edge_array(tri)
    lengths = np.linalg.norm(pts[edges[:, 0]] - pts[edges[:, 1]], axis=1) * scale
    return edges, lengths


def neighbors_within(tri: Triangulation, r: float, scale: Optional[float] = None) -> np.ndarray:
    """Per-vertex number of Delaunay neighbours at normalised distance at most r."""
    if not r > 0:
        raise InvalidParameterError(f"r must be > 0, got {r}")
    edges, lengths = normalised_edge_lengths(tri, scale)
    close = edges[lengths <= r]
    return np.bincount(close.ravel(), minlength=tri.n_vertices)


def far_reaching_count(tri: Triangulation, r: float, scale: Optional[float] = None) -> int:
    """Number of vertices whose longest Delaunay edge has normalised length >= r."""
    if not r > 0:
        raise InvalidParameterError(f"r must be > 0, got {r}")
    edges, lengths = normalised_edge_lengths(tri, scale)
    longest = np.zeros(tri.n_vertices)
    np.maximum.at(longest, edges[:, 0], lengths)
    np.maximum.at(longest, edges[:, 1], lengths)
    return int(np.count_nonzero(longest >= r))


@dataclass(frozen=True)
class DegreeLaw:
    """Max neighbours-within-r per radius and the fitted log-log slope."""

    radii: tuple
    max_counts: tuple
    slope: float

    def to_dict(self) -> dict:
        return {"radii": list(self.radii), "max_counts": list(self.max_counts), "slope": self.slope}


def degree_law(tri: Triangulation, radii: Sequence[float]) -> DegreeLaw:
    """Slope of log(max neighbours within r) against log r."""
    if len(radii) < 2:
        raise InvalidParameterError("degree law needs at least two radii")
    _, d = closest_pair(tri.cloud.points)
    scale = 2.0 / d
    edges, lengths = normalised_edge_lengths(tri, scale)
    counts = []
    for r in radii:
        close = edges[lengths <= r]
        counts.append(int(np.bincount(close.ravel(), minlength=tri.n_vertices).max()) if len(close) else 0)

    x = np.log(np.asarray(radii, dtype=float))
    y = np.asarray(counts, dtype=float)
    positive = y > 0
    if positive.sum() < 2:
        slope = 0.0
    else:
        slope = float(np.polyfit(x[positive], np.log(y[positive]), 1)[0])
    return DegreeLaw(tuple(float(r) for r in radii), tuple(counts), slope)


@dataclass(frozen=True)
class BoundReport:
    """Edge count against the spread-based and size-based bounds.

    within_delta4 is reported only (the upper bound's constant is not known);
    within_n2 is a hard property of any graph on n vertices.
    """

    n_vertices: int
    n_edges: int
    spread: float
    delta4: float
    predicted_order: float
    within_delta4: bool
    within_n2: bool

    @property
    def ok(self) -> bool:
        return self.within_n2

    def to_dict(self) -> dict:
        return {
            "n_vertices": self.n_vertices,
            "n_edges": self.n_edges,
            "spread": self.spread,
            "delta4": self.delta4,
            "predicted_order": self.predicted_order,
            "edges_over_order": self.n_edges / self.predicted_order if self.predicted_order else None,
            "within_delta4": self.within_delta4,
            "within_n2": self.within_n2,
            "ok": self.ok,
        }


def bound_monitor(stats: ComplexityStats, spread_report: SpreadReport) -> BoundReport:
    """Compare n_edges with spread^4, min(spread^3, n spread, n^2) and n^2.

    The spread is scale free, so it equals the spread of the cloud rescaled
    to closest pair 2.
    """
    n, e, delta = stats.n_vertices, stats.n_edges, spread_report.spread
    report = BoundReport(
        n_vertices=n,
        n_edges=e,
        spread=delta,
        delta4=delta ** 4,
        predicted_order=float(min(delta ** 3, n * delta, n ** 2)),
        within_delta4=e <= delta ** 4,
        within_n2=e <= n ** 2,
    )
    if not report.within_delta4:
        logger.warning("edge count %d exceeds spread^4 = %.4g", e, report.delta4)
    return report

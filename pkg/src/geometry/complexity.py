"""Edge, triangle and degree counts over the finite part of a triangulation."""

from dataclasses import dataclass, field

import numpy as np

from src.geometry.delaunay import Triangulation

_TET_EDGES = np.array([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
_TET_FACES = np.array([(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)])


@dataclass(frozen=True)
class ComplexityStats:
    """Size of a triangulation, counted over finite simplices."""

    n_vertices: int
    n_edges: int
    n_triangles: int
    n_tets: int
    degree_histogram: dict = field(default_factory=dict)
    max_edge_length: float = 0.0

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_triangles - self.n_tets

    def within_euler_bounds(self) -> bool:
        """Triangles at most 2e - 2n and tets at most e - n."""
        if self.n_tets == 0:
            return True
        return (self.n_triangles <= 2 * self.n_edges - 2 * self.n_vertices
                and self.n_tets <= self.n_edges - self.n_vertices)

    def to_dict(self) -> dict:
        return {
            "n_vertices": self.n_vertices,
            "n_edges": self.n_edges,
            "n_triangles": self.n_triangles,
            "n_tets": self.n_tets,
            "degree_histogram": {str(k): v for k, v in sorted(self.degree_histogram.items())},
            "max_edge_length": self.max_edge_length,
        }


def edge_array(tri: Triangulation) -> np.ndarray:
    """Sorted unique (E, 2) array of finite edges."""
    if tri.is_degenerate:
        edges = tri.degenerate_edges
        if edges is None or len(edges) == 0:
            return np.empty((0, 2), dtype=np.int64)
        return np.unique(np.sort(np.asarray(edges, dtype=np.int64), axis=1), axis=0)
    tets = tri.finite_tets.astype(np.int64)
    edges = tets[:, _TET_EDGES].reshape(-1, 2)
    return np.unique(np.sort(edges, axis=1), axis=0)


def edge_set(tri: Triangulation) -> set:
    """Unordered finite edges as a set of (i, j) pairs with i < j."""
    return {(int(i), int(j)) for i, j in edge_array(tri)}


def triangle_array(tri: Triangulation) -> np.ndarray:
    """Sorted unique (F, 3) array of finite triangles."""
    if tri.is_degenerate:
        return np.empty((0, 3), dtype=np.int64)
    tets = tri.finite_tets.astype(np.int64)
    faces = tets[:, _TET_FACES].reshape(-1, 3)
    return np.unique(np.sort(faces, axis=1), axis=0)


def degrees(tri: Triangulation, edges: np.ndarray = None) -> np.ndarray:
    """Per-vertex degree in the edge graph."""
    if edges is None:
        edges = edge_array(tri)
    return np.bincount(edges.ravel(), minlength=tri.n_vertices)


def stats(tri: Triangulation) -> ComplexityStats:
    """Count vertices, edges, triangles and tets; build the degree histogram."""
    edges = edge_array(tri)
    deg = degrees(tri, edges)
    values, counts = np.unique(deg, return_counts=True)

    max_len = 0.0
    if len(edges):
        pts = tri.cloud.points
        max_len = float(np.sqrt(np.max(np.sum((pts[edges[:, 0]] - pts[edges[:, 1]]) ** 2, axis=1))))

    return ComplexityStats(
        n_vertices=tri.n_vertices,
        n_edges=len(edges),
        n_triangles=len(triangle_array(tri)),
        n_tets=len(tri.finite_tets),
        degree_histogram={int(v): int(c) for v, c in zip(values, counts)},
        max_edge_length=max_len,
    )

"""Two skew seams of evenly spaced points.

p_i = (i eps, 0, d) and q_j = (0, j eps, -d) for |i|, |j| <= (m - 1) / 2:
the segments of nearest approach of two unit capsules lying along the x
and y directions. Every p_i q_j pair has an empty sphere tangent to both
seams, so the Delaunay graph contains the complete bipartite graph.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.errors import InvalidParameterError
from src.geometry.cloud import PointCloud, Provenance
from src.metrics.surfaces import sausage_pair

logger = logging.getLogger(__name__)

DEFAULT_EPS = 0.125


@dataclass(frozen=True)
class SeamParams:
    """Seam geometry for m points per seam at spacing eps.

    w = (m - 1) eps / 2 is the seam half-length, n = w / eps^2 the sample
    size of the underlying capsule surfaces and d = 4 w / eps = 4 n eps the
    seam offset from the xy-plane.
    """

    m: int
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not self.eps > 0:
            raise InvalidParameterError(f"eps must be > 0, got {self.eps}")
        if self.m < 3 or self.m % 2 == 0:
            raise InvalidParameterError(f"m must be odd and >= 3, got {self.m}")

    @property
    def half_count(self) -> int:
        return (self.m - 1) // 2

    @property
    def w_extent(self) -> float:
        return self.half_count * self.eps

    @property
    def n(self) -> float:
        return self.w_extent / self.eps ** 2

    @property
    def d(self) -> float:
        return 4.0 * self.w_extent / self.eps


def gen_seams(m: int, eps: float = DEFAULT_EPS) -> PointCloud:
    """2m seam points: p_0..p_{m-1} along x at z = d, then q_0..q_{m-1} along y at z = -d."""
    params = SeamParams(m, eps)
    steps = np.arange(-params.half_count, params.half_count + 1) * params.eps
    zeros = np.zeros(m)
    p = np.column_stack([steps, zeros, np.full(m, params.d)])
    q = np.column_stack([zeros, steps, np.full(m, -params.d)])

    prov = Provenance("seams", {"m": m, "eps": float(eps), "w": params.w_extent,
                                "d": params.d, "n": params.n}, None)
    logger.debug("seams: m = %d, w = %g, d = %g", m, params.w_extent, params.d)
    return PointCloud(np.vstack([p, q]), prov, sausage_pair(params.w_extent, params.d))


def seam_bipartite_edges(edges: set, m: int) -> int:
    """Count edges joining the two seams (indices < m versus >= m)."""
    return sum(1 for i, j in edges if (i < m) != (j < m))

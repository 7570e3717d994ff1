"""Sample measure and epsilon-sample quality on analytic surfaces."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.spatial import cKDTree

from src.errors import InvalidParameterError
from src.geometry.cloud import PointCloud
from src.metrics.surfaces import SurfaceModel

logger = logging.getLogger(__name__)

MIN_PROBES = 1000
DEFAULT_PROBES = 4096
QUADRATURE_REL_TOL = 1e-6


@dataclass(frozen=True)
class SampleReport:
    """How well a cloud samples a surface.

    Attributes:
        eps: Target sampling density
        eps_measured: Max over probes of nearest-sample distance / lfs
        sd2_min, sd2_max: Range of second-nearest-sample distance / lfs
        uniform_ok: eps / 4 <= sd2 <= eps at every probe
        parsimony_ratio: n eps^2 / mu(surface)
        probes: Number of probe points
    """

    eps: float
    eps_measured: float
    sd2_min: float
    sd2_max: float
    uniform_ok: bool
    parsimony_ratio: float
    probes: int

    @property
    def passes(self) -> bool:
        return self.eps_measured <= self.eps

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "eps_measured": self.eps_measured,
            "passes": self.passes,
            "sd2_range": [self.sd2_min, self.sd2_max],
            "uniform_ok": self.uniform_ok,
            "parsimony_ratio": self.parsimony_ratio,
            "probes": self.probes,
        }


def sample_measure(surface: Optional[SurfaceModel], method: str = "closed_form") -> float:
    """Integral of lfs^-2 over the surface.

    Args:
        surface: Analytic surface with an lfs model
        method: "closed_form" (area / lfs^2 for constant lfs) or "quadrature"

    Returns:
        The sample measure mu
    """
    if surface is None:
        raise InvalidParameterError("sample measure needs a surface with an lfs model")
    if method == "closed_form":
        return surface.area
    if method != "quadrature":
        raise InvalidParameterError(f"method must be 'closed_form' or 'quadrature', got '{method}'")

    total = 0.0
    for patch in surface.patches():
        lo, hi = patch.domain()

        def integrand(theta, s, patch=patch):
            x = patch.point(s, theta)
            return patch.area_element(s) / surface.lfs(x[None, :])[0] ** 2

        value, err = integrate.dblquad(integrand, lo, hi, 0.0, 2.0 * math.pi,
                                       epsabs=0.0, epsrel=QUADRATURE_REL_TOL)
        logger.debug("%s patch: mu = %.10g (+/- %.2g)", patch.shape, value, err)
        total += value
    return total


def check_sample(cloud: PointCloud, surface: SurfaceModel, eps: float,
                 probes: int = DEFAULT_PROBES, seed: int = 0) -> SampleReport:
    """Measure a cloud against the epsilon-sample definition with random surface probes.

    Args:
        cloud: Samples, tagged with the same surface
        surface: Analytic surface the cloud claims to sample
        eps: Target density
        probes: Number of area-uniform probe points, >= 1000
        seed: Probe RNG seed

    Returns:
        SampleReport; a failed density never raises
    """
    if cloud.surface is None or cloud.surface.to_dict() != surface.to_dict():
        raise InvalidParameterError("cloud is not tagged with the surface it is checked against")
    if probes < MIN_PROBES:
        raise InvalidParameterError(f"probes must be >= {MIN_PROBES}, got {probes}")
    if not eps > 0:
        raise InvalidParameterError(f"eps must be > 0, got {eps}")

    x = surface.sample(probes, seed)
    lfs = surface.lfs(x)
    tree = cKDTree(cloud.points)
    if len(cloud) >= 2:
        d, _ = tree.query(x, k=2)
        nearest, second = d[:, 0] / lfs, d[:, 1] / lfs
    else:
        d, _ = tree.query(x, k=1)
        nearest, second = d / lfs, np.full(len(x), np.inf)

    report = SampleReport(
        eps=float(eps),
        eps_measured=float(nearest.max()),
        sd2_min=float(second.min()),
        sd2_max=float(second.max()),
        uniform_ok=bool(second.min() >= eps / 4 and second.max() <= eps),
        parsimony_ratio=float(len(cloud) * eps ** 2 / sample_measure(surface)),
        probes=probes,
    )
    logger.info("sample check: eps measured %.4g against %.4g (%s)", report.eps_measured, eps,
                "pass" if report.passes else "fail")
    return report

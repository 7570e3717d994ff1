"""Scaling studies and checks of the helix, seam and ball-row constructions."""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

from config.settings import get_engine_settings
from src.errors import BudgetExceededError, InvalidParameterError
from src.geometry.cloud import PointCloud
from src.geometry.complexity import edge_array, edge_set, stats
from src.geometry.delaunay import triangulate
from src.geometry.oracle import ORACLE_MAX_POINTS, oracle_edges
from src.geometry.predicates import verify_pitch_identity
from src.generators.helix import gen_helix_pitch, gen_helix_single_turn, gen_helix_spread, gen_helix_sqrt, gen_mattress
from src.generators.seams import DEFAULT_EPS, gen_seams, seam_bipartite_edges
from src.generators.spheres import BallRowParams, gen_ball_rows, gen_random_ball_rows, sphere_owner
from src.metrics.neighbors import degree_law
from src.metrics.spread import spread
from src.services.fit import MIN_RECORDS, ScalingFit, ScalingRecord, records_frame

logger = logging.getLogger(__name__)

NEIGHBORLY_MAX_POINTS = 128
PITCH_MAX_POINTS = 4096
SEAM_MAX_M = 65
PITCH_IDENTITY_TOL = 1e-9
PITCH_DRAW_RANGE = (0.01, 100.0)


# --- scaling families --------------------------------------------------------

def _cross_row_edges(cloud: PointCloud, edges: np.ndarray) -> int:
    row_size = cloud.provenance.params["row_size"]
    upper = sphere_owner(cloud) < row_size
    return int(np.count_nonzero(upper[edges[:, 0]] != upper[edges[:, 1]]))


def _build_helix(size: int, seed: int, params: dict) -> PointCloud:
    return gen_helix_sqrt(size, caps=bool(params.get("caps", False)))


def _build_helix_spread(size: int, seed: int, params: dict) -> PointCloud:
    target = float(params.get("spread_fraction", 0.25)) * size
    return gen_helix_spread(size, min(max(target, math.sqrt(size)), float(size)))


def _build_mattress(size: int, seed: int, params: dict) -> PointCloud:
    if "spread" not in params:
        raise InvalidParameterError("mattress scaling needs a fixed 'spread' parameter")
    return gen_mattress(size, float(params["spread"]))


def _build_seams(size: int, seed: int, params: dict) -> PointCloud:
    return gen_seams(size, float(params.get("eps", DEFAULT_EPS)))


def _build_ball_rows(size: int, seed: int, params: dict) -> PointCloud:
    return gen_ball_rows(size, int(params.get("per_sphere", 32)), seed=seed)


def _build_random_ball_rows(size: int, seed: int, params: dict) -> PointCloud:
    return gen_random_ball_rows(size, int(params.get("per_k", 40)) * size, seed=seed)


def _build_single_turn(size: int, seed: int, params: dict) -> PointCloud:
    return gen_helix_single_turn(size, str(params.get("spacing", "even")), seed=seed)


@dataclass(frozen=True)
class ScalingFamily:
    """How one family turns a size into a cloud, an abscissa and a measured count."""

    name: str
    build: Callable[[int, int, dict], PointCloud]
    abscissa: Callable[[PointCloud], float]
    measure: Callable[[PointCloud, np.ndarray], int]


def _point_count(cloud: PointCloud) -> float:
    return float(cloud.provenance.params.get("n", len(cloud)))


def _edge_count(cloud: PointCloud, edges: np.ndarray) -> int:
    return len(edges)


SCALING_FAMILIES = {
    f.name: f for f in (
        ScalingFamily("helix", _build_helix, _point_count, _edge_count),
        ScalingFamily("helix_spread", _build_helix_spread, _point_count, _edge_count),
        ScalingFamily("mattress", _build_mattress, _point_count, _edge_count),
        ScalingFamily("seams", _build_seams, lambda c: float(c.provenance.params["m"]),
                      lambda c, e: seam_bipartite_edges({(int(i), int(j)) for i, j in e},
                                                        c.provenance.params["m"])),
        ScalingFamily("ball_rows", _build_ball_rows, lambda c: float(c.provenance.params["row_size"]),
                      _cross_row_edges),
        ScalingFamily("random_ball_rows", _build_random_ball_rows,
                      lambda c: float(c.provenance.params["row_size"]), _cross_row_edges),
        ScalingFamily("single_turn", _build_single_turn, _point_count, _edge_count),
    )
}


def _scaling_family(name: str) -> ScalingFamily:
    key = name.replace("-", "_")
    if key not in SCALING_FAMILIES:
        raise InvalidParameterError(f"unknown scaling family '{name}'; choose from {sorted(SCALING_FAMILIES)}")
    return SCALING_FAMILIES[key]


def _measure_size(family: str, size: int, seed: int, params: dict, deadline: Optional[float],
                  desk_cap: int) -> ScalingRecord:
    fam = _scaling_family(family)
    cloud = fam.build(size, seed, params)
    if len(cloud) > desk_cap:
        raise InvalidParameterError(f"{family} size {size} gives {len(cloud)} points, above the desk cap {desk_cap}")

    started = time.monotonic()
    tri = triangulate(cloud, seed=seed, deadline=deadline)
    elapsed = time.monotonic() - started

    counts = stats(tri)
    edges = edge_array(tri)
    euler_ok = counts.euler_characteristic == 1 and counts.within_euler_bounds()
    if not euler_ok:
        logger.warning("%s size %d breaks the Euler identity or the simplex bounds", family, size)
    record = ScalingRecord(
        abscissa=fam.abscissa(cloud),
        n=len(cloud),
        spread=spread(cloud).spread,
        n_edges=counts.n_edges,
        measure=fam.measure(cloud, edges),
        n_triangles=counts.n_triangles,
        n_tets=counts.n_tets,
        euler_ok=euler_ok,
        wall_time=elapsed,
    )
    logger.info("%s size %d: n = %d, edges = %d, measure = %d (%.2fs)",
                family, size, record.n, record.n_edges, record.measure, elapsed)
    return record


@dataclass(frozen=True)
class ScalingRun:
    """Outcome of run_scaling: the records, the fit if one was possible, and the abort flag."""

    family: str
    sizes: tuple
    seed: int
    params: dict
    records: tuple
    fit: Optional[ScalingFit]
    aborted: bool = False

    def frame(self, timings: bool = False):
        return records_frame(self.records, timings)

    def evaluate(self, tolerances: dict) -> dict:
        """Check the fit against claim tolerances.

        Recognised keys: slope with slope_tol, and min_edge_constant c with
        optional min_edge_exponent (default slope), requiring
        measure >= c * abscissa^exponent at every size.
        """
        checks: dict[str, Any] = {"complete": not self.aborted and self.fit is not None,
                                  "euler": all(r.euler_ok for r in self.records)}
        if self.fit is not None and "slope" in tolerances:
            tol = float(tolerances.get("slope_tol", 0.0))
            checks["slope"] = abs(self.fit.slope - float(tolerances["slope"])) <= tol
        if "min_edge_constant" in tolerances:
            c = float(tolerances["min_edge_constant"])
            exponent = float(tolerances.get("min_edge_exponent", tolerances.get("slope", 1.0)))
            checks["min_edges"] = all(r.measure >= c * r.abscissa ** exponent for r in self.records)
        checks["passed"] = all(checks.values())
        return checks

    def summary(self, tolerances: Optional[dict] = None) -> dict:
        tolerances = tolerances or {}
        return {
            "family": self.family,
            "sizes": list(self.sizes),
            "seed": self.seed,
            "params": dict(self.params),
            "aborted": self.aborted,
            "records": len(self.records),
            "fit": self.fit.to_dict() if self.fit else None,
            "tolerances": dict(tolerances),
            "checks": self.evaluate(tolerances),
        }


def run_scaling(family: str, sizes: Sequence[int], seed: int = 0, params: Optional[dict] = None,
                time_budget_s: Optional[float] = None, workers: int = 1,
                desk_cap: Optional[int] = None) -> ScalingRun:
    """Generate, triangulate and count every size, then fit a log-log slope.

    Args:
        family: One of SCALING_FAMILIES
        sizes: At least three distinct sizes (n, m or k depending on the family)
        seed: Generator and insertion-order seed
        params: Family parameters (spread_fraction, spread, eps, per_sphere, per_k, spacing, caps)
        time_budget_s: Wall-clock budget for the whole run
        workers: Process-pool size; 1 runs in this process
        desk_cap: Largest accepted cloud size

    Returns:
        ScalingRun; an exceeded budget sets aborted and keeps the finished records
    """
    settings = get_engine_settings()
    params = dict(params or {})
    budget = settings.time_budget_s if time_budget_s is None else time_budget_s
    desk_cap = settings.desk_cap if desk_cap is None else desk_cap
    fam = _scaling_family(family)

    sizes = sorted(int(s) for s in sizes)
    if len(sizes) < MIN_RECORDS:
        raise InvalidParameterError(f"run_scaling needs at least {MIN_RECORDS} sizes, got {len(sizes)}")
    if len(set(sizes)) != len(sizes):
        raise InvalidParameterError(f"sizes must be distinct, got {sizes}")
    if workers < 1:
        raise InvalidParameterError(f"workers must be >= 1, got {workers}")

    deadline = time.monotonic() + budget
    records: list[ScalingRecord] = []
    aborted = False
    if workers == 1:
        for size in sizes:
            try:
                records.append(_measure_size(fam.name, size, seed, params, deadline, desk_cap))
            except BudgetExceededError as e:
                logger.warning("scaling run aborted at size %d: %s", size, e)
                aborted = True
                break
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {size: pool.submit(_measure_size, fam.name, size, seed, params, deadline, desk_cap)
                       for size in sizes}
            for size, future in futures.items():
                try:
                    records.append(future.result())
                except BudgetExceededError as e:
                    logger.warning("scaling run aborted at size %d: %s", size, e)
                    aborted = True

    records.sort(key=lambda r: r.abscissa)
    fit = ScalingFit.from_records(records) if len(records) >= MIN_RECORDS else None
    if fit is not None:
        logger.info("%s scaling slope %.4f (residual %.3g) over %d sizes",
                    fam.name, fit.slope, fit.residual, len(records))
    return ScalingRun(fam.name, tuple(sizes), seed, params, tuple(records), fit, aborted)


# --- verifications -----------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    """Pass/fail of one check plus the numbers behind it."""

    check: str
    ok: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"check": self.check, "ok": self.ok, **self.details}


def verify_neighborly(cloud: PointCloud, seed: int = 0) -> VerificationReport:
    """True iff every pair of points is a Delaunay edge."""
    n = len(cloud)
    if n > NEIGHBORLY_MAX_POINTS:
        raise InvalidParameterError(f"neighborly check accepts at most {NEIGHBORLY_MAX_POINTS} points, got {n}")
    edges = len(edge_array(triangulate(cloud, seed=seed)))
    expected = n * (n - 1) // 2
    return VerificationReport("neighborly", edges == expected, {"n": n, "n_edges": edges, "expected": expected})


def verify_turn_neighbors(n: int, sample: int = 64, seed: int = 0) -> VerificationReport:
    """On the sqrt(n) helix, sampled points see every point less than one turn away.

    A turn holds floor(2 pi sqrt n) points, so index gaps below that must be edges.
    """
    cloud = gen_helix_sqrt(n)
    edges = edge_set(triangulate(cloud, seed=seed))
    turn = math.floor(2.0 * math.pi * math.sqrt(n))
    rng = np.random.default_rng(seed)
    vertices = rng.choice(n, size=min(sample, n), replace=False)
    missing = []
    for v in sorted(int(v) for v in vertices):
        for u in range(max(0, v - turn + 1), min(n, v + turn)):
            if u != v and (min(u, v), max(u, v)) not in edges:
                missing.append([min(u, v), max(u, v)])
    return VerificationReport("turn_neighbors", not missing,
                              {"n": n, "turn": turn, "sampled": len(vertices), "missing": missing[:20]})


def _pitch_parameters(n: int, seed: int) -> np.ndarray:
    # Same angular extent as the sqrt(n) helix
    return np.sort(np.random.default_rng(seed).uniform(0.0, math.sqrt(n), size=n))


def verify_pitch_invariance(n: int, alphas: Sequence[float], seed: int = 0) -> VerificationReport:
    """Triangulate (alpha t, cos t, sin t) for every alpha on shared seeded t; edge sets must agree."""
    if not 4 <= n <= PITCH_MAX_POINTS:
        raise InvalidParameterError(f"n must lie in [4, {PITCH_MAX_POINTS}], got {n}")
    if not alphas or any(not a > 0 for a in alphas):
        raise InvalidParameterError(f"alphas must be a non-empty list of positive reals, got {list(alphas)}")

    ts = _pitch_parameters(n, seed)
    reference, counts, differing = None, [], []
    for alpha in alphas:
        edges = edge_set(triangulate(gen_helix_pitch(ts, alpha), seed=seed))
        counts.append(len(edges))
        if reference is None:
            reference = edges
        elif edges != reference:
            differing.append(float(alpha))
    return VerificationReport("pitch_invariance", not differing,
                              {"n": n, "alphas": [float(a) for a in alphas], "edge_counts": counts,
                               "differing_alphas": differing})


def verify_pitch_identity_draws(draws: int = 1000, seed: int = 0) -> VerificationReport:
    """Check the pitched insphere determinant equals alpha^3 times the reduced one on random draws.

    t is uniform on (-pi, pi)^5 and alpha log-uniform over PITCH_DRAW_RANGE.
    """
    if draws < 1:
        raise InvalidParameterError(f"draws must be >= 1, got {draws}")
    rng = np.random.default_rng(seed)
    failures = []
    for _ in range(draws):
        t = rng.uniform(-math.pi, math.pi, size=5)
        alpha = float(np.exp(rng.uniform(*np.log(PITCH_DRAW_RANGE))))
        full, reduced, ok = verify_pitch_identity(t, alpha, rel_tol=PITCH_IDENTITY_TOL)
        if not ok:
            failures.append({"t": t.tolist(), "alpha": alpha, "full_det": full, "reduced_det": reduced})
    return VerificationReport("pitch_identity", not failures, {"draws": draws, "failures": failures[:10]})


def verify_axis_scaling(cloud: PointCloud, factors: Sequence[float], seed: int = 0) -> VerificationReport:
    """Scale x by each factor and report the factors that change the edge set.

    Invariance holds for points on one circular cylinder with axis parallel
    to x, such as a single helix. Clouds spread over several parallel
    cylinders, the mattress among them, are not invariant in general:
    mattress(512, 8) changes under both 0.5 and 2.
    """
    if not factors or any(not f > 0 for f in factors):
        raise InvalidParameterError(f"factors must be positive, got {list(factors)}")
    reference = edge_set(triangulate(cloud, seed=seed))
    differing = []
    for f in factors:
        scaled = cloud.with_points(cloud.points * np.array([f, 1.0, 1.0]), axis_scale=float(f))
        if edge_set(triangulate(scaled, seed=seed)) != reference:
            differing.append(float(f))
    return VerificationReport("axis_scaling", not differing,
                              {"n": len(cloud), "factors": [float(f) for f in factors],
                               "n_edges": len(reference), "differing_factors": differing})


def verify_seam_bipartite(m: int, eps: float = DEFAULT_EPS, seed: int = 0) -> VerificationReport:
    """True iff all m^2 pairs (p_i, q_j) are Delaunay edges of the seam set."""
    if m > SEAM_MAX_M:
        raise InvalidParameterError(f"m must be <= {SEAM_MAX_M}, got {m}")
    cloud = gen_seams(m, eps)
    count = seam_bipartite_edges(edge_set(triangulate(cloud, seed=seed)), m)
    return VerificationReport("seams", count == m * m, {"m": m, "eps": eps, "bipartite_edges": count,
                                                        "expected": m * m})


def verify_oracle(n: int, trials: int, seed: int = 0, n_min: Optional[int] = None) -> VerificationReport:
    """Compare triangulate with the brute-force oracle on seeded uniform random clouds.

    Each trial draws its size uniformly from [n_min, n]; n_min defaults to n.
    """
    n_min = n if n_min is None else n_min
    if not 4 <= n_min <= n <= ORACLE_MAX_POINTS:
        raise InvalidParameterError(f"need 4 <= n_min <= n <= {ORACLE_MAX_POINTS}, got n_min={n_min}, n={n}")
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    mismatched, sizes = [], []
    for trial in range(trials):
        size = int(rng.integers(n_min, n + 1))
        sizes.append(size)
        cloud = PointCloud(rng.uniform(size=(size, 3)))
        if edge_set(triangulate(cloud, seed=seed + trial)) != oracle_edges(cloud):
            logger.warning("oracle mismatch in trial %d (%d points)", trial, size)
            mismatched.append(trial)
    return VerificationReport("oracle", not mismatched, {"n": n, "n_min": n_min, "trials": trials, "seed": seed,
                                                         "sizes": sizes, "mismatched_trials": mismatched})


def verify_ball_rows(k: int, per_sphere: Optional[int] = None, n: Optional[int] = None, seed: int = 0,
                     randomized: bool = False, min_coverage: float = 1.0) -> VerificationReport:
    """Fraction of (upper sphere, lower sphere) pairs joined by at least one Delaunay edge.

    Args:
        k: Ball-row parameter
        per_sphere: Spiral points per sphere (deterministic rows)
        n: Total random points (randomized rows)
        seed: Rotation / sampling and insertion seed
        randomized: Sample the spheres uniformly at random instead of by spiral
        min_coverage: Coverage needed to pass
    """
    if randomized:
        if n is None:
            raise InvalidParameterError("randomized ball rows need n")
        cloud = gen_random_ball_rows(k, n, seed=seed)
    else:
        if per_sphere is None:
            raise InvalidParameterError("ball rows need per_sphere")
        cloud = gen_ball_rows(k, per_sphere, seed=seed)

    params = BallRowParams(k)
    edges = edge_array(triangulate(cloud, seed=seed))
    owner = sphere_owner(cloud)
    a, b = owner[edges[:, 0]], owner[edges[:, 1]]
    upper = np.minimum(a, b)
    lower = np.maximum(a, b)
    cross = (upper < params.row_size) & (lower >= params.row_size)
    pairs = {(int(u), int(v)) for u, v in zip(upper[cross], lower[cross])}
    coverage = len(pairs) / params.cross_pairs
    return VerificationReport("ball_rows", coverage >= min_coverage,
                              {"k": k, "n": len(cloud), "randomized": randomized, "row_size": params.row_size,
                               "cross_pairs": params.cross_pairs, "covered_pairs": len(pairs),
                               "cross_edges": int(cross.sum()), "coverage": coverage})


def verify_degree_law(n: int, radii: Sequence[float], max_slope: float = 2.3, seed: int = 0) -> VerificationReport:
    """Fit max neighbours within r against r on the sqrt(n) helix; slope must stay below max_slope."""
    law = degree_law(triangulate(gen_helix_sqrt(n), seed=seed), radii)
    return VerificationReport("degree_law", law.slope <= max_slope,
                              {"n": n, "max_slope": max_slope, **law.to_dict()})

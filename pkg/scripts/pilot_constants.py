#!/usr/bin/env python3
"""Measure the constants frozen in config/acceptance.yaml.

Prints each measured ratio next to the frozen threshold so a change in the
engine that moves a constant shows up before the acceptance tests fail.
"""

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import load_acceptance_config  # noqa: E402
from src.geometry.complexity import stats  # noqa: E402
from src.geometry.delaunay import triangulate  # noqa: E402
from src.generators.helix import gen_helix_spread, gen_mattress  # noqa: E402
from src.metrics.neighbors import far_reaching_count  # noqa: E402
from src.metrics.spread import spread  # noqa: E402
from src.services.experiments import run_scaling, verify_ball_rows, verify_degree_law  # noqa: E402


def helix_spread_constant(n: int = 2048, delta: float = 256.0) -> float:
    """n_edges / (n * spread) for the spread helix."""
    tri = triangulate(gen_helix_spread(n, delta))
    return stats(tri).n_edges / (n * delta)


def mattress_constant(n: int = 4096, delta: float = 32.0) -> tuple[float, float]:
    """n_edges / (n * sqrt r) for the mattress, and the largest far-reaching ratio."""
    cloud = gen_mattress(n, delta)
    tri = triangulate(cloud)
    r = cloud.provenance.params["r"]
    measured = spread(cloud).spread
    reach = max(far_reaching_count(tri, radius) * radius / measured ** 3 for radius in (4.0, 8.0, 16.0, 32.0))
    return stats(tri).n_edges / (len(cloud) * math.sqrt(r)), reach


def main():
    """Run each pilot measurement and print it against its frozen value."""
    claims = load_acceptance_config()
    print("Pilot constants")
    print("-" * 40)

    c = helix_spread_constant()
    print(f"helix_spread   n_edges / (n spread)   = {c:.3f}  (frozen >= {claims['helix_spread']['min_edge_constant']})")

    c_prime, reach = mattress_constant()
    print(f"mattress       n_edges / (n sqrt r)   = {c_prime:.3f}  (frozen >= {claims['mattress']['min_edge_constant']})")
    print(f"far_reaching   max count r / spread^3 = {reach:.3f}  (frozen <= {claims['far_reaching']['max_constant']})")

    law = verify_degree_law(4096, claims["degree_law"]["radii"], claims["degree_law"]["max_slope"])
    print(f"degree_law     slope                  = {law.details['slope']:.3f}  (frozen <= {claims['degree_law']['max_slope']})")

    rows = verify_ball_rows(16, n=40 * 16, seed=0, randomized=True)
    print(f"random rows    coverage               = {rows.details['coverage']:.3f}  "
          f"(frozen >= {claims['random_ball_rows']['min_coverage']})")

    helix = claims["helix_scaling"]
    run = run_scaling("helix", helix["sizes"], seed=0)
    low = min(r.measure / r.abscissa ** 1.5 for r in run.records)
    print(f"helix_scaling  slope                  = {run.fit.slope:.4f} (residual {run.fit.residual:.3g})")
    print(f"helix_scaling  min n_edges / n^1.5    = {low:.3f}  (frozen >= {helix['min_edge_constant']})")

    print("-" * 40)
    print("Pilot measurements completed.")


if __name__ == "__main__":
    main()

"""Tests for spread, sample quality and neighbour metrics."""

import itertools
import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from src.errors import InvalidParameterError
from src.geometry.cloud import PointCloud
from src.geometry.complexity import stats
from src.geometry.delaunay import triangulate
from src.generators.helix import gen_helix_sqrt, gen_mattress
from src.generators.seams import gen_seams
from src.generators.spheres import gen_sphere_spiral
from src.metrics.neighbors import bound_monitor, degree_law, far_reaching_count, neighbors_within
from src.metrics.sampling import check_sample, sample_measure
from src.metrics.spread import brute_force_spread, closest_pair, diameter, spread
from src.metrics.surfaces import SurfaceModel, capped_cylinder, sausage_pair, sphere_union


class TestSpread:
    """Tests for closest pair, diameter and spread."""

    def test_closest_pair_matches_brute_force(self):
        """Test grid hashing finds the true closest pair."""
        pts = np.random.default_rng(0).uniform(size=(500, 3))
        (i, j), d = closest_pair(pts)
        diffs = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
        np.fill_diagonal(diffs, np.inf)
        assert d == pytest.approx(diffs.min())
        assert diffs[i, j] == pytest.approx(d)
        assert i < j

    def test_cube_diameter(self):
        """Test the cube's diameter is its space diagonal."""
        pts = np.array(list(itertools.product([0.0, 1.0], repeat=3)))
        _, d = diameter(pts)
        assert d == pytest.approx(math.sqrt(3.0))

    def test_matches_brute_force(self):
        """Test spread agrees with the O(n^2) reference."""
        cloud = PointCloud(np.random.default_rng(1).uniform(size=(300, 3)))
        assert spread(cloud).spread == pytest.approx(brute_force_spread(cloud.points))

    def test_sqrt_helix_spread(self):
        """Test S_sqrt(n) has spread about sqrt(5) sqrt(n)."""
        n = 1024
        report = spread(gen_helix_sqrt(n))
        assert report.spread == pytest.approx(math.sqrt(5.0) * math.sqrt(n), rel=0.02)
        assert report.packing_ratio > 1.0

    def test_mattress_spread_is_order_spread(self):
        """Test the mattress spread is within a constant factor of the requested one."""
        report = spread(gen_mattress(4096, 16.0))
        assert 2.0 <= report.spread / 16.0 <= 6.0

    def test_normalisation(self):
        """Test the normalisation scales the closest pair to 2."""
        report = spread(PointCloud(np.array([[0, 0, 0], [0.5, 0, 0], [3, 0, 0]], dtype=float)))
        assert report.normalisation == pytest.approx(4.0)
        assert report.spread == pytest.approx(6.0)

    def test_single_point_rejected(self):
        """Test spread needs two points."""
        with pytest.raises(InvalidParameterError):
            spread(PointCloud(np.zeros((1, 3))))

    def test_invariant_under_permutation(self):
        """Test reordering the points leaves the spread unchanged."""
        pts = np.random.default_rng(4).uniform(size=(200, 3))
        perm = np.random.default_rng(5).permutation(200)
        assert spread(PointCloud(pts[perm])).spread == spread(PointCloud(pts)).spread

    def test_invariant_under_rigid_motion(self):
        """Test a rotation plus translation leaves the spread unchanged."""
        pts = np.random.default_rng(6).uniform(size=(200, 3))
        moved = Rotation.random(random_state=7).apply(pts) + np.array([3.0, -5.0, 11.0])
        assert spread(PointCloud(moved)).spread == pytest.approx(spread(PointCloud(pts)).spread, rel=1e-9)

    def test_integer_lattice(self):
        """Test the 10x10x10 lattice has spread 9 sqrt(3)."""
        pts = np.array(list(itertools.product(range(10), repeat=3)), dtype=float)
        assert spread(PointCloud(pts)).spread == pytest.approx(9.0 * math.sqrt(3.0))


class TestSurfaces:
    """Tests for analytic surfaces and the sample measure."""

    def test_sphere_union_measure(self):
        """Test k unit spheres have measure 4 pi k."""
        surface = sphere_union([(0, 0, 0), (5, 0, 0), (10, 0, 0)])
        assert sample_measure(surface) == pytest.approx(12.0 * math.pi)

    def test_capsule_measure(self):
        """Test a capsule has area 2 pi L + 4 pi."""
        assert sample_measure(capped_cylinder(0.0, 3.0)) == pytest.approx(6.0 * math.pi + 4.0 * math.pi)

    def test_sausage_pair_measure(self):
        """Test two capsules of length 2w."""
        assert sample_measure(sausage_pair(2.0, 10.0)) == pytest.approx(2.0 * (8.0 * math.pi + 4.0 * math.pi))

    def test_quadrature_agrees(self):
        """Test dblquad reproduces the closed form."""
        surface = sausage_pair(1.5, 6.0)
        assert sample_measure(surface, method="quadrature") == pytest.approx(sample_measure(surface), rel=1e-6)

    def test_samples_lie_on_surface(self):
        """Test area-uniform probes sit on the surface."""
        surface = sausage_pair(2.0, 10.0)
        x = surface.sample(2000, seed=0)
        assert np.allclose(surface.distance(x), 0.0, atol=1e-9)

    def test_round_trip_dict(self):
        """Test a surface survives to_dict / from_dict."""
        surface = capped_cylinder(0.25, 1.0)
        assert SurfaceModel.from_dict(surface.to_dict()).to_dict() == surface.to_dict()

    def test_unknown_kind(self):
        """Test unknown kinds raise."""
        with pytest.raises(InvalidParameterError):
            SurfaceModel("torus", {})

    def test_unknown_method(self):
        """Test unknown integration methods raise."""
        with pytest.raises(InvalidParameterError):
            sample_measure(sphere_union([(0, 0, 0)]), method="montecarlo")


class TestCheckSample:
    """Tests for check_sample."""

    @pytest.fixture
    def sphere(self):
        """A dense spiral sample of the unit sphere."""
        return gen_sphere_spiral(2000)

    def test_dense_sample_passes(self, sphere):
        """Test a 2000-point spiral is a 0.1-sample of the sphere."""
        report = check_sample(sphere, sphere.surface, 0.1, probes=2000, seed=1)
        assert report.passes
        assert report.eps_measured < 0.1

    def test_too_small_eps_fails_without_raising(self, sphere):
        """Test a failed density is reported, not raised."""
        report = check_sample(sphere, sphere.surface, 0.005, probes=2000, seed=1)
        assert not report.passes

    def test_parsimony_scales_with_eps_squared(self, sphere):
        """Test halving eps quarters the parsimony ratio."""
        a = check_sample(sphere, sphere.surface, 0.1, probes=1000)
        b = check_sample(sphere, sphere.surface, 0.05, probes=1000)
        assert a.parsimony_ratio / b.parsimony_ratio == pytest.approx(4.0)

    def test_deterministic_for_fixed_seed(self, sphere):
        """Test the same probe seed reproduces the report exactly."""
        a = check_sample(sphere, sphere.surface, 0.1, probes=1000, seed=3)
        b = check_sample(sphere, sphere.surface, 0.1, probes=1000, seed=3)
        assert a.to_dict() == b.to_dict()

    def test_probe_minimum(self, sphere):
        """Test fewer than 1000 probes are rejected."""
        with pytest.raises(InvalidParameterError):
            check_sample(sphere, sphere.surface, 0.1, probes=500)

    def test_surface_must_match(self, sphere):
        """Test the surface must be the one the cloud is tagged with."""
        with pytest.raises(InvalidParameterError):
            check_sample(sphere, sphere_union([(1.0, 0.0, 0.0)]), 0.1)

    def test_seam_cloud_is_not_a_sample(self):
        """Test the seams alone do not sample their sausages."""
        cloud = gen_seams(9)
        report = check_sample(cloud, cloud.surface, 0.125, probes=1000)
        assert not report.passes


class TestNeighbors:
    """Tests for normalised neighbour counts and bound monitors."""

    @pytest.fixture
    def helix_tri(self):
        """Triangulation of a 256-point sqrt helix."""
        return triangulate(gen_helix_sqrt(256))

    def test_neighbors_within_grows_with_r(self, helix_tri):
        """Test counts are monotone in r."""
        small = neighbors_within(helix_tri, 4.0)
        large = neighbors_within(helix_tri, 16.0)
        assert np.all(large >= small)
        assert small.max() >= 1

    def test_closest_pair_is_within_two(self, helix_tri):
        """Test the closest pair is a Delaunay edge of normalised length 2."""
        assert neighbors_within(helix_tri, 2.0 + 1e-9).sum() >= 2

    def test_far_reaching_decreases(self, helix_tri):
        """Test fewer vertices reach farther."""
        assert far_reaching_count(helix_tri, 4.0) >= far_reaching_count(helix_tri, 32.0)

    def test_rejects_non_positive_r(self, helix_tri):
        """Test r must be positive."""
        with pytest.raises(InvalidParameterError):
            neighbors_within(helix_tri, 0.0)

    def test_degree_law(self, helix_tri):
        """Test the fitted slope stays below quadratic growth."""
        law = degree_law(helix_tri, [4, 8, 16])
        assert len(law.max_counts) == 3
        assert law.slope <= 2.3

    def test_bound_monitor(self, helix_tri):
        """Test the hard n^2 bound holds and the report is complete."""
        report = bound_monitor(stats(helix_tri), spread(helix_tri.cloud))
        assert report.ok
        assert report.within_delta4
        assert report.to_dict()["edges_over_order"] > 0

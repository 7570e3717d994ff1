"""Tests for bitangent spheres of the helix."""

import math

import numpy as np
import pytest

from src.errors import InvalidParameterError
from src.services.bitangent import BitangentSphere, bitangent_radius_profile, verify_bitangent


class TestBitangentSphere:
    """Tests for BitangentSphere."""

    def test_closed_form(self):
        """Test a = -t / sin t at alpha = 1."""
        sphere = BitangentSphere(math.pi / 2)
        assert sphere.a == pytest.approx(-math.pi / 2)
        assert sphere.radius ** 2 == pytest.approx(math.pi ** 2 / 4 + 1 + math.pi ** 2 / 4)

    def test_touch_points_on_sphere(self):
        """Test both touch points are at distance r from the centre."""
        sphere = BitangentSphere(1.2, alpha=0.5)
        touch = sphere.helix([-1.2, 1.2])
        assert np.allclose(np.linalg.norm(touch - sphere.centre, axis=1), sphere.radius)

    def test_excess_vanishes_at_touch_points(self):
        """Test the factored excess is zero at +/- t and positive elsewhere."""
        sphere = BitangentSphere(1.0)
        assert sphere.excess([1.0, -1.0]) == pytest.approx([0.0, 0.0], abs=1e-15)
        assert np.all(sphere.excess([0.0, 2.0, -2.5]) > 0)

    def test_excess_matches_direct_distance(self):
        """Test the factored form equals |h(s) - c|^2 - r^2 away from the touch points."""
        sphere = BitangentSphere(0.8, alpha=2.0)
        s = np.array([-3.0, -0.2, 0.3, 2.5])
        direct = np.sum((sphere.helix(s) - sphere.centre) ** 2, axis=1) - sphere.radius ** 2
        assert np.allclose(sphere.excess(s), direct, rtol=1e-9, atol=1e-12)

    def test_radius_above_two_reported(self):
        """Test the radius at t = pi/4, alpha = 1 is about 2.10."""
        assert BitangentSphere(math.pi / 4).radius == pytest.approx(2.1027, abs=1e-3)

    @pytest.mark.parametrize("alpha", [0.05, 1.0, 20.0])
    def test_closed_form_matches_solved_centre(self, alpha):
        """Test the closed-form sphere agrees with a linear solve of the tangency conditions."""
        for t in np.linspace(0.01, math.pi - 0.01, 25):
            sphere = BitangentSphere(float(t), alpha=alpha)
            centre = sphere.solved_centre()
            assert centre[0] == pytest.approx(0.0, abs=1e-9 * max(sphere.radius, 1.0))
            assert centre[2] == pytest.approx(0.0, abs=1e-9 * max(sphere.radius, 1.0))
            assert sphere.solve_residual <= 1e-9

    def test_solved_centre_is_stationary_at_touch_points(self):
        """Test d/ds |h(s) - c|^2 vanishes at s = +/- t for the solved centre, by central differences."""
        sphere = BitangentSphere(1.3, alpha=0.7)
        centre = sphere.solved_centre()
        h = 1e-6
        for s in (1.3, -1.3):
            ahead, behind = sphere.helix([s + h, s - h]) - centre
            slope = (ahead @ ahead - behind @ behind) / (2 * h)
            assert slope == pytest.approx(0.0, abs=1e-6)

    @pytest.mark.parametrize("t", [0.0, -0.5, math.pi, math.pi - 1e-4])
    def test_rejects_t_out_of_range(self, t):
        """Test t must lie in (0, pi - 1e-3)."""
        with pytest.raises(InvalidParameterError):
            BitangentSphere(t)

    def test_rejects_bad_alpha(self):
        """Test alpha must be positive."""
        with pytest.raises(InvalidParameterError):
            BitangentSphere(1.0, alpha=0.0)


class TestVerifyBitangent:
    """Tests for verify_bitangent."""

    @pytest.mark.parametrize("t", [math.pi / 2, 0.1, 3.0])
    def test_passes(self, t):
        """Test the helix stays outside the sphere except at the touch points."""
        report = verify_bitangent(t)
        assert report.ok
        assert report.contact_residual <= 1e-7
        assert report.centre_residual <= 1e-9

    def test_grid_of_t(self):
        """Test 100 values of t across (0.01, pi - 0.01)."""
        for t in np.linspace(0.01, math.pi - 0.01, 100):
            report = verify_bitangent(float(t), s_samples=20000)
            assert report.ok, f"t = {t}"

    def test_pitched_helix(self):
        """Test the sphere stays tangent-only for other pitches."""
        assert verify_bitangent(1.0, s_samples=20000, alpha=0.3).ok
        assert verify_bitangent(1.0, s_samples=20000, alpha=4.0).ok

    def test_windows_are_skipped(self):
        """Test samples near +/- t are excluded from the count."""
        report = verify_bitangent(1.0, s_samples=1000)
        assert report.samples <= 1000

    def test_report_dict(self):
        """Test the report serialises its residuals."""
        d = verify_bitangent(1.0, s_samples=1000).to_dict()
        assert d["ok"] is True
        assert "contact_residual" in d
        assert d["solve_residual"] <= 1e-9


class TestRadiusProfile:
    """Tests for bitangent_radius_profile."""

    def test_profile_shape(self):
        """Test one row per (alpha, t)."""
        df = bitangent_radius_profile([0.1, 0.5, 1.0], alphas=[0.5, 1.0])
        assert len(df) == 6
        assert list(df.columns) == ["t", "alpha", "a", "radius"]

    def test_small_t_small_alpha_gives_small_radius(self):
        """Test radii shrink towards 1 as t and alpha shrink."""
        df = bitangent_radius_profile([0.05], alphas=[0.1])
        assert df["radius"].iloc[0] < 1.1

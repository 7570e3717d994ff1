"""Tests for scaling runs and construction checks."""

import math

import pytest

from src.errors import InvalidParameterError
from src.generators.helix import gen_helix_single_turn, gen_helix_sqrt, gen_mattress
from src.services.experiments import (
    SCALING_FAMILIES,
    run_scaling,
    verify_axis_scaling,
    verify_ball_rows,
    verify_degree_law,
    verify_neighborly,
    verify_oracle,
    verify_pitch_identity_draws,
    verify_pitch_invariance,
    verify_seam_bipartite,
    verify_turn_neighbors,
)


class TestRunScaling:
    """Tests for run_scaling."""

    def test_helix_slope(self):
        """Test small helix sizes already show super-linear growth near n^1.5."""
        run = run_scaling("helix", [128, 256, 512], seed=1)
        assert not run.aborted
        assert 1.35 <= run.fit.slope <= 1.9
        assert all(r.euler_ok for r in run.records)

    def test_seam_measure_is_exactly_quadratic(self):
        """Test the bipartite seam count is m^2 so the slope is 2."""
        run = run_scaling("seams", [3, 5, 9])
        assert [r.measure for r in run.records] == [9, 25, 81]
        assert run.fit.slope == pytest.approx(2.0)

    def test_single_turn_is_complete(self):
        """Test single-turn edge counts are n(n - 1)/2."""
        run = run_scaling("single_turn", [8, 12, 16])
        assert [r.measure for r in run.records] == [28, 66, 120]

    def test_records_sorted_and_deterministic(self):
        """Test records come back in abscissa order and repeat exactly."""
        a = run_scaling("seams", [9, 3, 5], seed=2)
        b = run_scaling("seams", [3, 5, 9], seed=2)
        assert [r.abscissa for r in a.records] == [3.0, 5.0, 9.0]
        assert a.frame().equals(b.frame())

    def test_workers_match_sequential(self):
        """Test a process pool gives the same records."""
        seq = run_scaling("seams", [3, 5, 7], workers=1)
        par = run_scaling("seams", [3, 5, 7], workers=2)
        assert seq.frame().equals(par.frame())

    def test_needs_three_sizes(self):
        """Test a single size is rejected."""
        with pytest.raises(InvalidParameterError):
            run_scaling("helix", [512])

    def test_rejects_duplicate_sizes(self):
        """Test repeated sizes are rejected."""
        with pytest.raises(InvalidParameterError):
            run_scaling("helix", [64, 64, 128])

    def test_rejects_unknown_family(self):
        """Test unknown families are rejected."""
        with pytest.raises(InvalidParameterError):
            run_scaling("torus", [8, 16, 32])

    def test_desk_cap(self):
        """Test clouds above the cap are refused."""
        with pytest.raises(InvalidParameterError):
            run_scaling("helix", [64, 128, 256], desk_cap=100)

    def test_budget_aborts_with_partial_records(self):
        """Test an exhausted budget sets aborted and skips the fit."""
        run = run_scaling("helix", [256, 512, 1024], time_budget_s=0.0)
        assert run.aborted
        assert run.fit is None
        assert not run.evaluate({"slope": 1.5, "slope_tol": 0.08})["passed"]

    def test_evaluate(self):
        """Test tolerance checks on slope and the minimum edge constant."""
        run = run_scaling("seams", [3, 5, 9])
        assert run.evaluate({"slope": 2.0, "slope_tol": 0.1, "min_edge_constant": 1.0})["passed"]
        assert not run.evaluate({"slope": 1.5, "slope_tol": 0.1})["passed"]
        assert not run.evaluate({"slope": 2.0, "slope_tol": 0.1, "min_edge_constant": 1.5})["passed"]

    def test_summary_is_serialisable(self):
        """Test the summary carries family, fit and checks."""
        summary = run_scaling("seams", [3, 5, 9]).summary({"slope": 2.0, "slope_tol": 0.1})
        assert summary["family"] == "seams"
        assert summary["fit"]["records"] == 3
        assert summary["checks"]["passed"]

    def test_families(self):
        """Test every documented family is available."""
        assert {"helix", "helix_spread", "mattress", "seams", "ball_rows", "random_ball_rows",
                "single_turn"} == set(SCALING_FAMILIES)


class TestNeighborly:
    """Tests for the single-turn neighborly check."""

    def test_eight_points(self):
        """Test n = 8 gives all 28 edges."""
        report = verify_neighborly(gen_helix_single_turn(8))
        assert report.ok
        assert report.details["n_edges"] == 28

    def test_sixty_four_points(self):
        """Test n = 64 gives all 2016 edges."""
        report = verify_neighborly(gen_helix_single_turn(64))
        assert report.ok
        assert report.details["n_edges"] == 2016

    def test_random_spacing(self):
        """Test random parameters within one turn are still neighborly."""
        assert verify_neighborly(gen_helix_single_turn(24, spacing="random", seed=3)).ok

    def test_size_limit(self):
        """Test clouds above 128 points are refused."""
        with pytest.raises(InvalidParameterError):
            verify_neighborly(gen_helix_single_turn(130))


class TestPitch:
    """Tests for pitch invariance and the pitch identity."""

    def test_single_alpha_is_trivial(self):
        """Test alphas = {1} passes."""
        assert verify_pitch_invariance(32, [1.0]).ok

    def test_invariance_small(self):
        """Test edge sets agree for alpha in {0.05, 1, 20}."""
        report = verify_pitch_invariance(96, [0.05, 1.0, 20.0], seed=2)
        assert report.ok
        assert len(set(report.details["edge_counts"])) == 1

    def test_rejects_bad_alpha(self):
        """Test non-positive alphas are refused."""
        with pytest.raises(InvalidParameterError):
            verify_pitch_invariance(32, [1.0, -1.0])

    def test_rejects_large_n(self):
        """Test n above 4096 is refused."""
        with pytest.raises(InvalidParameterError):
            verify_pitch_invariance(5000, [1.0])

    def test_identity_draws(self):
        """Test the determinant identity at 1e-9 on 1000 draws with alpha over (0.01, 100)."""
        report = verify_pitch_identity_draws(1000, seed=5)
        assert report.ok, report.details["failures"]
        assert report.details["draws"] == 1000


class TestAxisScaling:
    """Tests for axis scaling of cylinder clouds."""

    def test_helix_scaling_is_invariant(self):
        """Test scaling a single-cylinder cloud by powers of two keeps its edges."""
        assert verify_axis_scaling(gen_helix_sqrt(128), [0.5, 2.0]).ok

    @pytest.mark.parametrize("factors", [[0.5, 2.0], [0.05, 20.0]])
    def test_mattress_is_not_invariant(self, factors):
        """Test several parallel cylinders lose invariance: every factor changes the mattress edges."""
        report = verify_axis_scaling(gen_mattress(512, 8.0), factors)
        assert not report.ok
        assert report.details["n"] == 512
        assert report.details["differing_factors"] == factors

    def test_rejects_bad_factor(self):
        """Test non-positive factors are refused."""
        with pytest.raises(InvalidParameterError):
            verify_axis_scaling(gen_helix_sqrt(16), [0.0])


class TestSeamsAndRows:
    """Tests for the seam and ball-row checks."""

    @pytest.mark.parametrize("m", [3, 9, 33])
    def test_seams_bipartite(self, m):
        """Test every seam pair is an edge."""
        report = verify_seam_bipartite(m)
        assert report.ok
        assert report.details["bipartite_edges"] == m * m

    def test_seams_65(self):
        """Test m = 65 gives all 4225 seam pairs."""
        assert verify_seam_bipartite(65).details["bipartite_edges"] == 4225

    def test_seams_reject_large_m(self):
        """Test m above 65 is refused."""
        with pytest.raises(InvalidParameterError):
            verify_seam_bipartite(67)

    def test_ball_rows_report(self):
        """Test the coverage report of a small deterministic ball-row set."""
        report = verify_ball_rows(8, per_sphere=32, seed=0)
        assert report.details["cross_pairs"] == 25
        assert 0.0 <= report.details["coverage"] <= 1.0
        assert report.details["covered_pairs"] <= 25

    def test_ball_rows_need_size(self):
        """Test the sampling size argument matches the mode."""
        with pytest.raises(InvalidParameterError):
            verify_ball_rows(8)
        with pytest.raises(InvalidParameterError):
            verify_ball_rows(8, randomized=True)


class TestOtherChecks:
    """Tests for the oracle, degree-law and turn checks."""

    def test_oracle(self):
        """Test random clouds agree with the oracle."""
        report = verify_oracle(16, 3, seed=3)
        assert report.ok
        assert report.details["mismatched_trials"] == []

    def test_oracle_size_limit(self):
        """Test n above the oracle cap is refused."""
        with pytest.raises(InvalidParameterError):
            verify_oracle(200, 1)

    def test_oracle_sizes_vary(self):
        """Test each trial draws its size from [n_min, n]."""
        report = verify_oracle(14, 4, seed=2, n_min=8)
        assert report.ok
        assert len(report.details["sizes"]) == 4
        assert all(8 <= s <= 14 for s in report.details["sizes"])

    def test_oracle_rejects_inverted_range(self):
        """Test n_min above n is refused."""
        with pytest.raises(InvalidParameterError):
            verify_oracle(10, 1, n_min=12)

    def test_degree_law(self):
        """Test the degree-law report on a small helix."""
        report = verify_degree_law(256, [4, 8, 16])
        assert report.details["radii"] == [4.0, 8.0, 16.0]
        assert report.ok

    def test_turn_neighbors(self):
        """Test points less than one turn apart are adjacent on the sqrt helix."""
        report = verify_turn_neighbors(256, sample=16)
        assert report.ok
        assert report.details["turn"] == math.floor(2 * math.pi * 16)

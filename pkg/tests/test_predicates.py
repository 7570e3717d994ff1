"""Tests for exact predicates and symbolic perturbation."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from src.errors import InvalidParameterError
from src.geometry.predicates import (
    Sign,
    incircle_coplanar,
    incircle_coplanar_perturbed,
    insphere,
    insphere_batch,
    insphere_perturbed,
    orient3d,
    orient3d_batch,
    verify_pitch_identity,
)

O = (0.0, 0.0, 0.0)
X = (1.0, 0.0, 0.0)
Y = (0.0, 1.0, 0.0)
Z = (0.0, 0.0, 1.0)


class TestOrient3d:
    """Tests for orient3d."""

    def test_canonical_frame_is_positive(self):
        """Test the unit frame is positively oriented."""
        assert orient3d(O, X, Y, Z) == Sign.POSITIVE

    def test_swap_flips_sign(self):
        """Test exchanging two vertices negates the sign."""
        assert orient3d(X, O, Y, Z) == Sign.NEGATIVE

    def test_coplanar_is_zero(self):
        """Test four points in the plane z = 0."""
        assert orient3d(O, X, Y, (0.3, 0.7, 0.0)) == Sign.ZERO

    def test_near_degenerate_is_exact(self):
        """Test a point 1 ulp above a plane is not rounded onto it."""
        eps = math.ulp(1.0)
        assert orient3d(O, X, Y, (0.5, 0.5, eps)) == Sign.POSITIVE
        assert orient3d(O, X, Y, (0.5, 0.5, -eps)) == Sign.NEGATIVE

    def test_tiny_perturbation_of_large_coordinates(self):
        """Test exact evaluation where the float determinant cancels."""
        big = 2.0 ** 40
        a, b, c = (big, big, big), (big + 1, big, big), (big, big + 1, big)
        assert orient3d(a, b, c, (big, big, big)) == Sign.ZERO
        assert orient3d(a, b, c, (big + 0.5, big + 0.5, big + 1.0)) == Sign.POSITIVE

    def test_batch_matches_scalar(self):
        """Test orient3d_batch agrees with orient3d on random and coplanar rows."""
        rng = np.random.default_rng(1)
        pts = rng.uniform(size=(50, 4, 3))
        pts[:10, 3, 2] = 0.0
        pts[:10, :3, 2] = 0.0
        signs = orient3d_batch(pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3])
        for k in range(50):
            assert signs[k] == orient3d(*map(tuple, pts[k]))
        assert np.all(signs[:10] == 0)


class TestInsphere:
    """Tests for insphere and its perturbed form."""

    def test_inside_is_positive(self):
        """Test a point inside the circumsphere of a positive tet."""
        assert insphere(O, X, Y, Z, (0.25, 0.25, 0.25)) == Sign.POSITIVE

    def test_outside_is_negative(self):
        """Test a point far outside."""
        assert insphere(O, X, Y, Z, (2.0, 2.0, 2.0)) == Sign.NEGATIVE

    def test_cospherical_is_zero(self):
        """Test the opposite cube corner lies on the circumsphere."""
        assert insphere(O, X, Y, Z, (1.0, 1.0, 1.0)) == Sign.ZERO
        assert insphere(O, X, Y, Z, (1.0, 1.0, 0.0)) == Sign.ZERO

    def test_perturbed_is_never_zero(self):
        """Test ties are broken on cospherical input."""
        s = insphere_perturbed(O, X, Y, Z, (1.0, 1.0, 1.0), (0, 1, 2, 3, 4))
        assert s in (Sign.POSITIVE, Sign.NEGATIVE)

    def test_perturbed_keeps_nonzero_sign(self):
        """Test the perturbation only acts on exact ties."""
        assert insphere_perturbed(O, X, Y, Z, (0.25, 0.25, 0.25), (0, 1, 2, 3, 4)) == Sign.POSITIVE

    def test_perturbed_is_consistent_across_vertex_order(self):
        """Test an even permutation of the tet gives the same perturbed answer."""
        e = (1.0, 1.0, 1.0)
        first = insphere_perturbed(O, X, Y, Z, e, (0, 1, 2, 3, 4))
        rotated = insphere_perturbed(X, Y, O, Z, e, (1, 2, 0, 3, 4))
        assert first == rotated

    def test_perturbed_requires_distinct_ids(self):
        """Test repeated vertex ids are rejected."""
        with pytest.raises(ValueError):
            insphere_perturbed(O, X, Y, Z, (1.0, 1.0, 1.0), (0, 1, 2, 3, 3))

    def test_cube_corners_are_decided_consistently(self):
        """Test the eight cube corners: the two tets sharing a face disagree on each other's apex."""
        e = (1.0, 1.0, 1.0)
        f = (1.0, 1.0, 0.0)
        # e against tet (O, X, Y, Z) and f against the same tet: both cospherical
        s_e = insphere_perturbed(O, X, Y, Z, e, (0, 1, 2, 3, 7))
        s_f = insphere_perturbed(O, X, Y, Z, f, (0, 1, 2, 3, 6))
        assert s_e != Sign.ZERO and s_f != Sign.ZERO

    def test_batch_matches_scalar(self):
        """Test insphere_batch on random and cospherical rows."""
        rng = np.random.default_rng(2)
        a, b, c, d = (np.broadcast_to(np.array(p), (20, 3)) for p in (O, X, Y, Z))
        e = rng.uniform(-0.5, 1.5, size=(20, 3))
        e[0] = (1.0, 1.0, 1.0)
        signs = insphere_batch(a, b, c, d, e)
        for k in range(20):
            assert signs[k] == insphere(O, X, Y, Z, tuple(e[k]))
        assert signs[0] == 0


class TestIncircleCoplanar:
    """Tests for the coplanar in-circle test."""

    def test_inside_and_outside(self):
        """Test points inside and outside the circumcircle of a right triangle."""
        assert incircle_coplanar(O, X, Y, (0.4, 0.4, 0.0)) == Sign.POSITIVE
        assert incircle_coplanar(O, X, Y, (2.0, 2.0, 0.0)) == Sign.NEGATIVE

    def test_independent_of_orientation(self):
        """Test reversing the triangle does not change the answer."""
        p = (0.4, 0.4, 0.0)
        assert incircle_coplanar(O, Y, X, p) == incircle_coplanar(O, X, Y, p)

    def test_cocircular_is_zero_then_perturbed(self):
        """Test the fourth square corner is cocircular and gets a nonzero perturbed sign."""
        p = (1.0, 1.0, 0.0)
        assert incircle_coplanar(O, X, Y, p) == Sign.ZERO
        assert incircle_coplanar_perturbed(O, X, Y, p, (0, 1, 2, 3)) != Sign.ZERO

    def test_highest_index_query_is_outside(self):
        """Test a cocircular query with the largest index is pushed outside."""
        assert incircle_coplanar_perturbed(O, X, Y, (1.0, 1.0, 0.0), (0, 1, 2, 9)) == Sign.NEGATIVE


class TestPitchIdentity:
    """Tests for verify_pitch_identity."""

    @pytest.mark.parametrize("alpha", [0.05, 1.0, 3.0, 20.0])
    def test_identity_holds(self, alpha):
        """Test the full determinant is alpha^3 times the reduced one."""
        t = [0.1, 0.7, 1.3, 2.2, 2.9]
        full, reduced, ok = verify_pitch_identity(t, alpha)
        assert ok
        assert full == pytest.approx(alpha ** 3 * reduced, rel=1e-9)

    def test_alpha_one_is_identical(self):
        """Test alpha = 1 gives identical determinants up to rounding."""
        full, reduced, ok = verify_pitch_identity([-2.0, -1.0, 0.0, 1.0, 2.0], 1.0)
        assert ok
        assert full == pytest.approx(reduced, rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.01, 2.0, 100.0])
    def test_ratio_is_alpha_cubed(self, alpha):
        """Test full / reduced equals alpha^3 to well within 1e-9 at the ends of the pitch range."""
        full, reduced, ok = verify_pitch_identity([0.1, 0.5, 1.0, 2.0, 3.0], alpha)
        assert ok
        assert full / reduced == pytest.approx(alpha ** 3, rel=1e-10)

    def test_rejects_non_positive_alpha(self):
        """Test alpha <= 0 raises."""
        with pytest.raises(InvalidParameterError):
            verify_pitch_identity([0, 1, 2, 3, 4], 0.0)

    def test_rejects_wrong_length(self):
        """Test t must have five entries."""
        with pytest.raises(InvalidParameterError):
            verify_pitch_identity([0, 1, 2, 3], 1.0)


def _parity(perm) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def _exact_circumsphere(a, b, c, d):
    """Centre and squared radius in Fractions, by Cramer's rule on the bisector planes."""
    fa, fb, fc, fd = ([Fraction(x) for x in p] for p in (a, b, c, d))
    rows = [[2 * (q[k] - fa[k]) for k in range(3)] for q in (fb, fc, fd)]
    rhs = [sum(q[k] ** 2 - fa[k] ** 2 for k in range(3)) for q in (fb, fc, fd)]

    def det3(m):
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

    den = det3(rows)
    centre = []
    for col in range(3):
        m = [list(r) for r in rows]
        for i in range(3):
            m[i][col] = rhs[i]
        centre.append(det3(m) / den)
    r2 = sum((fa[k] - centre[k]) ** 2 for k in range(3))
    return centre, r2


class TestPredicateInvariants:
    """Algebraic properties the engine relies on."""

    def test_orient_antisymmetric_under_every_swap(self):
        """Test each of the six transpositions negates orient3d on random quadruples."""
        rng = np.random.default_rng(21)
        for quad in rng.uniform(-1.0, 1.0, size=(40, 4, 3)):
            pts = [tuple(p) for p in quad]
            base = orient3d(*pts)
            assert base != Sign.ZERO
            for i, j in itertools.combinations(range(4), 2):
                swapped = list(pts)
                swapped[i], swapped[j] = swapped[j], swapped[i]
                assert orient3d(*swapped) == -base

    def test_insphere_matches_exact_circumcentre_distance(self):
        """Test the sign against |e - centre|^2 versus r^2 computed in rationals."""
        rng = np.random.default_rng(22)
        checked = 0
        for coords in rng.integers(-6, 7, size=(200, 5, 3)):
            a, b, c, d, e = (tuple(float(x) for x in p) for p in coords)
            o = orient3d(a, b, c, d)
            if o == Sign.ZERO:
                continue
            if o == Sign.NEGATIVE:
                a, b = b, a
            centre, r2 = _exact_circumsphere(a, b, c, d)
            dist2 = sum((Fraction(e[k]) - centre[k]) ** 2 for k in range(3))
            expected = (r2 > dist2) - (r2 < dist2)
            assert insphere(a, b, c, d, e) == expected
            checked += 1
        assert checked > 100

    def test_perturbed_sign_follows_permutation_parity(self):
        """Test all 120 orderings of a cospherical quintuple, ids travelling with their points."""
        pts = [O, X, Y, Z, (1.0, 1.0, 1.0)]
        ids = [3, 0, 4, 1, 2]
        base = insphere_perturbed(*pts, ids)
        assert base != Sign.ZERO
        for perm in itertools.permutations(range(5)):
            s = insphere_perturbed(*(pts[k] for k in perm), [ids[k] for k in perm])
            assert s == _parity(perm) * base, perm

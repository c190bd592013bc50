"""
Unit Tests for the Packing Module

Tests packing specs, word balls, orbit enumeration, norm-ball counting and
the exceptional-set audit.
"""

import pytest
from fractions import Fraction


class TestPackingSpec:
    """Tests for PackingSpec validation."""

    def test_rejects_non_unit_determinant(self):
        """Test that a generator of det 2 is rejected."""
        from src.arithmetic.ring import Mat2, field_of
        from src.core.exceptions import ValidationError
        from src.packing.spec import BaseCircle, PackingSpec

        F = field_of(1)
        with pytest.raises(ValidationError):
            PackingSpec(F, (Mat2.of(F, [[2, 0], [0, 1]]),), Mat2.identity(F), (BaseCircle(Mat2.identity(F)),))

    def test_rejects_missing_bases(self):
        """Test that a packing needs a base circle."""
        from src.arithmetic.ring import Mat2, field_of
        from src.core.exceptions import ValidationError
        from src.packing.spec import PackingSpec

        F = field_of(1)
        with pytest.raises(ValidationError):
            PackingSpec(F, (), Mat2.identity(F), ())

    def test_sigma_by_discriminant(self, apollonian_spec, cuboct_spec):
        """Test that sigma is s/2 for Delta = 0 mod 4 and s otherwise."""
        from src.presets import kapollonian

        assert apollonian_spec.sigma == Fraction(1, 2)
        assert cuboct_spec.sigma == 3
        assert kapollonian(3).sigma == 1

    def test_circle_method_params_relations(self):
        """Test that N = T^2 X^2 is derived and mismatches are rejected."""
        from src.packing.spec import CircleMethodParams

        params = CircleMethodParams(T1=2, T2=3, X=5)
        assert params.T == 6
        assert params.N == 900
        with pytest.raises(ValueError):
            CircleMethodParams(T1=2, T2=3, X=5, T=7)


class TestWordBall:
    """Tests for word balls."""

    def test_radius_zero(self, apollonian_spec):
        """Test that radius 0 is the identity alone."""
        from src.packing.words import word_ball

        ball = word_ball(apollonian_spec.generators, 0)
        assert len(ball) == 1
        assert len(ball[0]) == 0

    def test_radius_one_distinct(self, apollonian_spec):
        """Test that radius 1 adds each distinct generator once."""
        from src.packing.words import word_ball

        ball = word_ball(apollonian_spec.generators, 1)
        assert len(ball) == 1 + len(apollonian_spec.generators)

    def test_budget(self, apollonian_spec):
        """Test that the budget stops a large ball."""
        from src.core.exceptions import BudgetExceeded
        from src.packing.words import word_ball

        with pytest.raises(BudgetExceeded):
            word_ball(apollonian_spec.generators, 6, budget=10)


class TestOrbit:
    """Tests for orbit enumeration and curvature sets."""

    def test_apollonian_matches_descartes_oracle(self, apollonian_spec):
        """Test that the orbit curvatures equal the Descartes-quadruple curvatures of the strip."""
        from src.packing.orbit import curvature_set
        from src.presets import descartes_strip_curvatures

        assert curvature_set(apollonian_spec, 100) == descartes_strip_curvatures(100)

    def test_apollonian_small_curvatures(self, apollonian_spec):
        """Test that the first strip curvatures are 0, 1, 4, 9, 12."""
        from src.packing.orbit import curvature_set

        assert curvature_set(apollonian_spec, 12) == [0, 1, 4, 9, 12]

    def test_orbit_is_certified_and_sorted(self, apollonian_spec):
        """Test that a small enumeration is certified, nonnegative and sorted by key."""
        from src.packing.orbit import enumerate_orbit

        orbit = enumerate_orbit(apollonian_spec, 40)
        assert orbit.certified
        assert orbit.complete_to == 40
        assert all(0 <= oc.curvature <= 40 for oc in orbit.circles)
        keys = [oc.key for oc in orbit.circles]
        assert keys == sorted(keys)

    def test_enumeration_is_deterministic(self, apollonian_spec):
        """Test that two runs give identical dictionaries."""
        from src.packing.orbit import enumerate_orbit

        assert enumerate_orbit(apollonian_spec, 30).to_dict() == enumerate_orbit(apollonian_spec, 30).to_dict()

    def test_kapollonian_curvatures_integral(self):
        """Test that every K-Apollonian preset has integral scaled curvatures with gcd 1."""
        from math import gcd
        from functools import reduce
        from src.packing.orbit import curvature_set
        from src.presets import kapollonian

        for d in (1, 2, 3):
            values = curvature_set(kapollonian(d), 60)
            assert reduce(gcd, values, 0) == 1

    @pytest.mark.slow
    def test_cuboctahedral_census(self, cuboct_spec):
        """Test that the curvatures missing from [1, 159] are 7, 9, 11 mod 12 plus 13 and 16."""
        from src.packing.orbit import curvature_set

        present = set(curvature_set(cuboct_spec, 159))
        missing = {n for n in range(1, 160) if n not in present}
        expected = {n for n in range(1, 160) if n % 12 in (7, 9, 11)} | {13, 16}
        assert missing == expected


class TestCounting:
    """Tests for the bump, Moebius weights and representation counts."""

    def test_bump_profile(self):
        """Test that psi vanishes at the ends and peaks at 15/8."""
        from src.packing.counting import bump

        assert bump(Fraction(1)) == 0
        assert bump(Fraction(2)) == 0
        assert bump(Fraction(3, 2)) == Fraction(15, 8)
        assert bump(Fraction(5, 2)) == 0

    def test_mobius(self):
        """Test the Moebius function on small values."""
        from src.packing.counting import mobius

        assert [mobius(u) for u in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]

    def test_truncated_mobius_complete(self):
        """Test that the truncated sum is [g == 1] once U > g."""
        from src.packing.counting import truncated_mobius

        for g in range(1, 40):
            assert truncated_mobius(g, g + 1) == (1 if g == 1 else 0)

    def test_sieved_counts_match(self, apollonian_spec):
        """Test that R_N^U = R_N once U > 2X."""
        from src.packing.counting import norm_ball_FT, representation_counts
        from src.packing.spec import CircleMethodParams

        params = CircleMethodParams(T1=2, T2=3, X=3)
        family = norm_ball_FT(apollonian_spec, params.T1, params.T2, word_radius=3)
        plain = representation_counts(apollonian_spec, params, family=family)
        sieved = representation_counts(apollonian_spec, params, U=2 * params.X + 1, family=family)
        assert plain == sieved

    def test_represented_values_are_curvatures(self, apollonian_spec):
        """Test that every n with R_N(n) > 0 lies in the curvature set."""
        from src.packing.counting import norm_ball_FT, representation_count, representation_counts
        from src.packing.orbit import curvature_set
        from src.packing.spec import CircleMethodParams

        params = CircleMethodParams(T1=2, T2=3, X=3)
        family = norm_ball_FT(apollonian_spec, params.T1, params.T2, word_radius=3)
        counts = representation_counts(apollonian_spec, params, family=family)
        positive = [n for n, r in counts.items() if r > 0]
        assert positive
        curvatures = set(curvature_set(apollonian_spec, max(positive)))
        assert all(n in curvatures for n in positive)
        n = positive[0]
        assert representation_count(apollonian_spec, params, n, family=family) == counts[n]

    def test_represented_value_outside_packing_fails(self, apollonian_spec):
        """Test that a positive count at 7, not a strip curvature, raises ValidationError."""
        from src.core.exceptions import ValidationError
        from src.packing.counting import check_represented_are_curvatures

        with pytest.raises(ValidationError):
            check_represented_are_curvatures(apollonian_spec, {4: Fraction(1), 7: Fraction(1, 3)})

    def test_class_histogram_total(self, apollonian_spec):
        """Test that the residue histogram counts every element once."""
        from src.packing.counting import class_histogram, norm_ball_FT

        family = norm_ball_FT(apollonian_spec, 2, 3, word_radius=3)
        histogram = class_histogram(apollonian_spec, 2, 3, 4, family=family)
        assert sum(histogram.values()) == len(family)
        assert all(0 <= r < 4 for r in histogram)


class TestExceptionalAudit:
    """Tests for the exceptional set audit."""

    def test_rejects_nonpositive_bound(self, apollonian_spec):
        """Test that N < 1 is rejected."""
        from src.core.exceptions import ValidationError
        from src.packing.audit import exceptional_audit

        with pytest.raises(ValidationError):
            exceptional_audit(apollonian_spec, 0)

    @pytest.mark.slow
    def test_cuboctahedral_exceptions(self, cuboct_spec):
        """Test that the exceptional set up to 159 is {13, 16}."""
        from src.packing.audit import exceptional_audit

        audit = exceptional_audit(cuboct_spec, 159)
        assert audit.exceptional == [13, 16]
        assert audit.admissible_count == audit.curvature_count + 2

"""
Unit Tests for the Forms Module

Tests shifted quadratic forms, primitive normalization, represented values
and column completion.
"""

import pytest
from fractions import Fraction


class TestBuildForm:
    """Tests for build_form and evaluate."""

    def test_identity_form(self):
        """Test that the identity gives f(a, c) = c^2."""
        from src.arithmetic.ring import Mat2, field_of
        from src.forms.shifted import build_form, evaluate

        F = field_of(1)
        f = build_form(Mat2.identity(F), Mat2.identity(F))
        assert f.key == (0, 0, 1, 0)
        assert evaluate(f, 3, 4) == 16

    def test_rejects_reflection(self):
        """Test that build_form needs a holomorphic product."""
        from src.arithmetic.ring import Mat2, field_of
        from src.core.exceptions import ValidationError
        from src.forms.shifted import build_form

        F = field_of(6)
        with pytest.raises(ValidationError):
            build_form(Mat2.identity(F), Mat2.of(F, [[-1, 0], [0, 1]], True))

    def test_discriminant_relation(self, rng):
        """Test that disc f = Delta * shift^2 along random words."""
        from src.forms.shifted import build_form
        from src.presets import kapollonian

        for d in (1, 2, 3):
            spec = kapollonian(d)
            for _ in range(30):
                g = spec.generators[rng.randrange(5)]
                for _ in range(rng.randint(0, 6)):
                    g = g @ spec.generators[rng.randrange(5)]
                f = build_form(spec.M, g)
                assert f.discriminant == spec.field.Delta * f.shift * f.shift

    def test_form_matches_circle_curvature(self, rng):
        """Test that f(a, c) is the curvature of g w on the base line over sqrt(-Delta)."""
        from src.forms.shifted import build_form, complete_column, evaluate
        from src.geometry.moebius import apply, base_line, curvature
        from src.presets import kapollonian

        for d in (1, 2, 3):
            spec = kapollonian(d)
            F = spec.field
            per_sqrt_d = Fraction(1, 2) if F.t == 0 else Fraction(1)
            for _ in range(40):
                g = spec.generators[rng.randrange(5)]
                for _ in range(rng.randint(0, 5)):
                    g = g @ spec.generators[rng.randrange(5)]
                a, c = rng.choice([(1, 1), (2, 3), (3, 2), (5, 7), (1, 4), (7, 3)])
                w = complete_column(a, c, F)
                f = build_form(spec.M, g)
                assert evaluate(f, a, c) == curvature(apply(spec.M @ g @ w, base_line(F))) * per_sqrt_d


class TestNormalize:
    """Tests for normalize_primitive."""

    def test_divides_out_content(self):
        """Test that (2, 4, 6, 8) with d1 = 2 becomes (1, 2, 3, 4) with scale 1/2."""
        from src.forms.shifted import ShiftedForm, normalize_primitive

        f, scale = normalize_primitive(ShiftedForm(Fraction(2), Fraction(4), Fraction(6), Fraction(8)), 2)
        assert f.key == (1, 2, 3, 4)
        assert scale == Fraction(1, 2)

    def test_clears_denominators(self):
        """Test that (1/4, 0, 1, 1/4) with d1 = 2 becomes (1, 0, 4, 1)."""
        from src.forms.shifted import ShiftedForm, normalize_primitive

        f, scale = normalize_primitive(ShiftedForm(Fraction(1, 4), Fraction(0), Fraction(1), Fraction(1, 4)), 2)
        assert f.key == (1, 0, 4, 1)
        assert scale == 4

    def test_content_must_divide(self):
        """Test that content 2 with d1 = 1 has no rational primitive scaling."""
        from src.core.exceptions import NotRationalScaling
        from src.forms.shifted import ShiftedForm, normalize_primitive

        with pytest.raises(NotRationalScaling):
            normalize_primitive(ShiftedForm(Fraction(2), Fraction(4), Fraction(6), Fraction(8)), 1)


class TestRepresentedValues:
    """Tests for represented_values."""

    def test_sum_of_two_squares(self):
        """Test that coprime a^2 + c^2 <= 10 gives {1, 2, 5, 10}."""
        from src.forms.shifted import ShiftedForm, represented_values

        f = ShiftedForm(Fraction(1), Fraction(0), Fraction(1), Fraction(0))
        assert represented_values(f, 1, 10) == {1, 2, 5, 10}

    def test_congruence_conditions(self):
        """Test that a = 1, c = 0 mod 2 leaves {1, 5}."""
        from src.forms.shifted import ShiftedForm, represented_values

        f = ShiftedForm(Fraction(1), Fraction(0), Fraction(1), Fraction(0))
        assert represented_values(f, 2, 10) == {1, 5}

    def test_witnesses(self):
        """Test that witnesses evaluate to their values."""
        from src.forms.shifted import ShiftedForm, evaluate, represented_values

        f = ShiftedForm(Fraction(2), Fraction(1), Fraction(3), Fraction(1))
        found = represented_values(f, 1, 60, witnesses=True)
        assert found
        for value, (a, c) in found.items():
            assert evaluate(f, a, c) == value

    def test_rank_one_distant_witness(self):
        """Test that (233a + 144c)^2 represents 1 although its only small witness is (-55, 89)."""
        from math import gcd

        from src.forms.shifted import ShiftedForm, evaluate, represented_values

        f = ShiftedForm(Fraction(233 * 233), Fraction(2 * 233 * 144), Fraction(144 * 144), Fraction(0))
        assert evaluate(f, -55, 89) == 1
        found = represented_values(f, 1, 1, witnesses=True)
        assert Fraction(1) in found
        a, c = found[Fraction(1)]
        assert evaluate(f, a, c) == 1
        assert gcd(a, c) == 1

    def test_rank_one_values(self):
        """Test that (3a + 5c)^2 + 2 with a odd, c even gives k^2 + 2 for every odd k."""
        from math import gcd

        from src.forms.shifted import ShiftedForm, evaluate, represented_values

        f = ShiftedForm(Fraction(9), Fraction(30), Fraction(25), Fraction(2))
        found = represented_values(f, 2, 300, witnesses=True)
        assert set(found) == {k * k + 2 for k in range(1, 18, 2)}
        for value, (a, c) in found.items():
            assert a % 2 == 1 and c % 2 == 0 and gcd(a, c) == 1
            assert evaluate(f, a, c) == value
        box = {
            evaluate(f, a, c)
            for a in range(-41, 42, 2)
            for c in range(-40, 41, 2)
            if gcd(a, c) == 1 and evaluate(f, a, c) <= 300
        }
        assert box <= set(found)

    def test_rank_one_zero_direction(self):
        """Test that (a + c)^2 reaches 0 only when (1, -1) meets the congruences."""
        from src.forms.shifted import ShiftedForm, represented_values

        f = ShiftedForm(Fraction(1), Fraction(2), Fraction(1), Fraction(0))
        assert represented_values(f, 1, 4) == {0, 1, 4}
        assert represented_values(f, 2, 4) == {1}


class TestColumns:
    """Tests for complete_column and gamma_L_column."""

    def test_complete_column(self):
        """Test that (2, 3) completes to a det 1 integral matrix."""
        from src.arithmetic.ring import field_of
        from src.forms.shifted import complete_column

        F = field_of(1)
        w = complete_column(2, 3, F)
        assert (w.A, w.C) == (F.elem(2), F.elem(3))
        assert w.det == F.one
        assert w.is_integral()

    def test_not_coprime(self):
        """Test that (4, 6) and (2, 0) raise NotCoprime."""
        from src.core.exceptions import NotCoprime
        from src.forms.shifted import complete_column

        with pytest.raises(NotCoprime):
            complete_column(4, 6)
        with pytest.raises(NotCoprime):
            complete_column(2, 0)

    def test_gamma_L_column(self):
        """Test that the Gamma(6) completion of (7, 6) is [[7, 36], [6, 31]]."""
        from src.arithmetic.ring import Mat2, field_of
        from src.forms.shifted import gamma_L_column

        F = field_of(1)
        w = gamma_L_column(1, 1, 6, F)
        assert w == Mat2.of(F, [[7, 36], [6, 31]])
        assert w.det == F.one


class TestFormFamily:
    """Tests for form_family."""

    def test_family_keys_distinct(self, apollonian_spec):
        """Test that family members have distinct coefficient keys."""
        from src.forms.shifted import form_family

        family = form_family(apollonian_spec, 2)
        keys = [f.key for f in family]
        assert len(keys) == len(set(keys))
        assert (0, 0, 1, 0) in keys

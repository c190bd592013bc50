"""
Unit Tests for the Moebius Module

Tests exact circle data, the extended Moebius action and curvature extraction.
"""

import pytest
from fractions import Fraction


class TestCircles:
    """Tests for circle constructors and keys."""

    def test_real_line_is_normalized(self):
        """Test that R-hat has curvature 0 and unit normalization."""
        from src.arithmetic.ring import field_of
        from src.geometry.moebius import curvature, real_line

        for d in (1, 2, 3, 6):
            line = real_line(field_of(d))
            assert curvature(line) == 0
            assert d * line.discriminant() == 1

    def test_unit_circle(self):
        """Test that the circle centred at 0 with beta 1 is |z| = 1."""
        from src.arithmetic.ring import field_of
        from src.geometry.moebius import circle_from_center, curvature

        F = field_of(1)
        c = circle_from_center(F, F.zero, Fraction(1))
        assert curvature(c) == 1
        assert c.center() == (0, 0)
        assert c.radius_float() == pytest.approx(1.0)

    def test_base_line_heights(self):
        """Test that the base line sits at sqrt(Delta)/2."""
        from src.arithmetic.ring import field_of
        from src.geometry.moebius import base_line

        assert base_line(field_of(1)).line_height() == 1
        assert base_line(field_of(3)).line_height() == Fraction(1, 2)

    def test_canonical_key_scale_invariant(self):
        """Test that positive rescaling keeps the key and reversal changes it."""
        from src.arithmetic.ring import field_of
        from src.geometry.moebius import Circle, canonical_key, circle_from_center

        F = field_of(2)
        c = circle_from_center(F, F.elem(Fraction(1, 3), 1), Fraction(3))
        beta, wa, wb, gamma = c.coords()
        scaled = Circle.from_coords(2, (beta * 5, wa * 5, wb * 5, gamma * 5), normalized=False)
        assert canonical_key(scaled) == canonical_key(c)
        assert canonical_key(c.reversed()) != canonical_key(c)


class TestCurvatureFormula:
    """Tests for 2 Im(conj(C) D) against the action on R-hat."""

    def test_identity_gives_zero(self):
        """Test that the identity has curvature 0."""
        from src.arithmetic.ring import Mat2, field_of
        from src.geometry.moebius import curvature_formula

        assert curvature_formula(Mat2.identity(field_of(1))) == 0

    def test_hand_example(self):
        """Test that [[1, 0], [i, 1]] sends R-hat to curvature -2."""
        from src.arithmetic.ring import Mat2, field_of
        from src.geometry.moebius import apply, curvature, curvature_formula, real_line

        F = field_of(1)
        g = Mat2.of(F, [[1, 0], [(0, 1), 1]])
        assert curvature_formula(g) == -2
        assert curvature(apply(g, real_line(F))) == -2

    def test_rejects_reflections(self):
        """Test that curvature_formula needs a holomorphic element."""
        from src.arithmetic.ring import Mat2, field_of
        from src.core.exceptions import ValidationError
        from src.geometry.moebius import curvature_formula

        with pytest.raises(ValidationError):
            curvature_formula(Mat2.of(field_of(1), [[-1, 0], [0, 1]], True))

    def test_formula_matches_action(self, rng):
        """Test that the action on R-hat reproduces 2 Im(conj(C) D) on random words."""
        from src.geometry.moebius import apply, curvature, curvature_formula, real_line
        from src.presets import kapollonian

        for d in (1, 2, 3):
            spec = kapollonian(d)
            gens = spec.generators
            for _ in range(100):
                g = gens[rng.randrange(len(gens))]
                for _ in range(rng.randint(1, 8)):
                    g = g @ gens[rng.randrange(len(gens))]
                assert curvature(apply(g, real_line(spec.field))) == curvature_formula(g)


class TestAction:
    """Tests for the extended Moebius action."""

    def test_reflection_fixes_real_line(self):
        """Test that z -> -conj(z) fixes R-hat with its orientation."""
        from src.arithmetic.ring import Mat2, field_of
        from src.geometry.moebius import apply, real_line

        F = field_of(1)
        a1 = Mat2.of(F, [[-1, 0], [0, 1]], True)
        assert apply(a1, real_line(F)) == real_line(F)

    def test_action_is_homomorphism(self, rng):
        """Test that apply(g h, C) = apply(g, apply(h, C)) with reflections mixed in."""
        from src.geometry.moebius import apply, base_line
        from src.presets import cuboct_reflections

        letters = list(cuboct_reflections().values())
        start = base_line(letters[0].field)
        for _ in range(50):
            g = letters[rng.randrange(len(letters))]
            h = letters[rng.randrange(len(letters))] @ letters[rng.randrange(len(letters))]
            assert apply(g @ h, start) == apply(g, apply(h, start))

    def test_action_matrix_agrees(self):
        """Test that the precomputed 4x4 action equals apply()."""
        from src.geometry.moebius import action_matrix, apply, apply_matrix, base_line
        from src.presets import cuboct_reflections

        letters = cuboct_reflections()
        start = base_line(letters["c3"].field)
        for g in letters.values():
            assert apply_matrix(action_matrix(g), start) == apply(g, start)

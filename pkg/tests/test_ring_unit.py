"""
Unit Tests for the Ring Module

Tests exact arithmetic in Q(sqrt(-d)), 2x2 matrices with reflection flags,
residue rings and the residue count closed forms.
"""

import pytest
from fractions import Fraction


class TestField:
    """Tests for Field construction and constants."""

    def test_discriminants(self):
        """Test that Delta and t follow d mod 4."""
        from src.arithmetic.ring import field_of

        assert field_of(1).Delta == -4
        assert field_of(2).Delta == -8
        assert field_of(3).Delta == -3
        assert field_of(6).Delta == -24
        assert field_of(3).t == 1
        assert field_of(6).t == 0

    def test_not_square_free_rejected(self):
        """Test that d = 4 raises ValidationError."""
        from src.arithmetic.ring import Field
        from src.core.exceptions import ValidationError

        with pytest.raises(ValidationError):
            Field(4)

    def test_omega_squared(self):
        """Test that omega^2 = t*omega - n."""
        from src.arithmetic.ring import field_of

        for d in (1, 2, 3, 5, 6, 7):
            F = field_of(d)
            w = F.omega
            assert w * w == w * F.t - F.n


class TestQuadElem:
    """Tests for exact field elements."""

    def test_norm_conj(self):
        """Test that norm_conj of 3 + 2i is (13, 3 - 2i)."""
        from src.arithmetic.ring import field_of, norm_conj

        F = field_of(1)
        nm, c = norm_conj(F.elem(3, 2))
        assert nm == 13
        assert c == F.elem(3, -2)

    def test_norm_multiplicative(self, rng):
        """Test that N(xy) = N(x)N(y) exactly on random pairs."""
        from src.arithmetic.ring import field_of

        for d in (1, 2, 3, 6):
            F = field_of(d)
            for _ in range(200):
                x = F.elem(Fraction(rng.randint(-20, 20), rng.randint(1, 6)), rng.randint(-20, 20))
                y = F.elem(rng.randint(-20, 20), Fraction(rng.randint(-20, 20), rng.randint(1, 6)))
                assert (x * y).norm() == x.norm() * y.norm()

    def test_inverse(self):
        """Test that x * x^-1 = 1."""
        from src.arithmetic.ring import field_of

        F = field_of(6)
        x = F.elem(Fraction(1, 3), 2)
        assert x * x.inverse() == F.one

    def test_ok_coords_half_integers(self):
        """Test that (1 + sqrt(-3))/2 has integral basis coordinates (0, 1)."""
        from src.arithmetic.ring import field_of

        F = field_of(3)
        assert F.omega.ok_coords() == (0, 1)
        assert F.omega.is_integral()


class TestMat2:
    """Tests for matrix products, inverses and projective keys."""

    def test_identity_frobenius(self):
        """Test that identity squared has frobenius^2 = 2."""
        from src.arithmetic.ring import Mat2, field_of, mat_ops

        F = field_of(1)
        ops = mat_ops(Mat2.identity(F), Mat2.identity(F))
        assert ops.product == Mat2.identity(F)
        assert ops.frobenius_sq == 2
        assert ops.frobenius == pytest.approx(2 ** 0.5)

    def test_st_product(self):
        """Test that S T = [[0, 1], [-1, -1]] for d = 1."""
        from src.arithmetic.ring import Mat2, field_of

        F = field_of(1)
        S = Mat2.of(F, [[0, 1], [-1, 0]])
        T = Mat2.of(F, [[1, 1], [0, 1]])
        assert S @ T == Mat2.of(F, [[0, 1], [-1, -1]])

    def test_reflection_composition(self):
        """Test that z -> -conj(z) after z -> -conj(z) + 6 is a holomorphic translation by -6."""
        from src.arithmetic.ring import Mat2, field_of

        F = field_of(6)
        a1 = Mat2.of(F, [[-1, 0], [0, 1]], True)
        a2 = Mat2.of(F, [[-1, 6], [0, 1]], True)
        product = a1 @ a2
        assert not product.conj_flag
        assert product.projectively_equal(Mat2.of(F, [[1, -6], [0, 1]]))

    def test_inverse_with_flag(self):
        """Test that m @ m.inverse() is the identity for an anti-holomorphic m."""
        from src.arithmetic.ring import Mat2, field_of

        F = field_of(6)
        s = F.sqrt_neg_d
        c3 = Mat2.of(F, [[s + 1, s * -3], [s * Fraction(1, 3), 1 - s]], True)
        assert c3 @ c3.inverse() == Mat2.identity(F)
        assert c3.inverse() @ c3 == Mat2.identity(F)

    def test_singular_inverse(self):
        """Test that inverting a singular matrix raises SingularMatrix."""
        from src.arithmetic.ring import Mat2, field_of
        from src.core.exceptions import SingularMatrix

        F = field_of(1)
        with pytest.raises(SingularMatrix):
            Mat2.of(F, [[1, 2], [2, 4]]).inverse()

    def test_projective_key_ignores_sign(self):
        """Test that m and -m share a projective key."""
        from src.arithmetic.ring import Mat2, field_of

        F = field_of(2)
        m = Mat2.of(F, [[-1, (0, 1)], [0, -1]])
        assert m.projectively_equal(-m)
        assert m.projective_key() == (-m).projective_key()


class TestReduction:
    """Tests for reduce_mod and denominators."""

    def test_trivial_modulus(self):
        """Test that every matrix is trivial mod 1."""
        from src.arithmetic.ring import Mat2, field_of, reduce_mod

        F = field_of(1)
        r = reduce_mod(Mat2.of(F, [[3, (1, 2)], [5, 7]]), 1)
        assert all(c == 0 for c in r.key()[:8])

    def test_unipotent_mod_two(self):
        """Test that [[1, 1], [0, 1]] mod 2 keeps its entries."""
        from src.arithmetic.ring import Mat2, field_of, reduce_mod

        F = field_of(1)
        r = reduce_mod(Mat2.of(F, [[1, 1], [0, 1]]), 2)
        assert r.key() == (1, 0, 1, 0, 0, 0, 1, 0, 0)

    def test_denominator_clash(self):
        """Test that an entry 1/2 cannot be reduced mod 4."""
        from src.arithmetic.ring import Mat2, field_of, reduce_mod
        from src.core.exceptions import DenominatorClash

        F = field_of(1)
        with pytest.raises(DenominatorClash):
            reduce_mod(Mat2.of(F, [[1, Fraction(1, 2)], [0, 1]]), 4)

    def test_reduction_is_homomorphism(self, rng):
        """Test that reduce(m1 m2) = reduce(m1) reduce(m2), flags included."""
        from src.arithmetic.ring import Mat2, field_of, reduce_mod

        for d in (1, 3, 6):
            F = field_of(d)
            for _ in range(60):
                def rand():
                    return Mat2.of(
                        F,
                        [[(rng.randint(-9, 9), rng.randint(-9, 9)) for _ in range(2)] for _ in range(2)],
                        rng.random() < 0.5,
                    )

                m1, m2 = rand(), rand()
                for q in (2, 5, 12):
                    assert reduce_mod(m1 @ m2, q).key() == (reduce_mod(m1, q) @ reduce_mod(m2, q)).key()

    def test_denominator_lcm(self):
        """Test that mixed denominators {2, 3} give 6 and integral generators give 1."""
        from src.arithmetic.ring import Mat2, denominator_lcm, field_of

        F = field_of(1)
        assert denominator_lcm([Mat2.identity(F)]) == 1
        m1 = Mat2.of(F, [[1, Fraction(1, 2)], [0, 1]])
        m2 = Mat2.of(F, [[1, 0], [Fraction(1, 3), 1]])
        assert denominator_lcm([m1, m2]) == 6


class TestResidueCounts:
    """Tests for P^1 and unit counts modulo odd primes."""

    def test_gaussian_inert_three(self):
        """Test that d = 1, p = 3 gives (10, 8)."""
        from src.arithmetic.ring import field_of, residue_counts

        assert residue_counts(field_of(1), 3) == (10, 8)

    def test_gaussian_split_five(self):
        """Test that d = 1, p = 5 gives (36, 16)."""
        from src.arithmetic.ring import field_of, residue_counts

        assert residue_counts(field_of(1), 5) == (36, 16)

    def test_d2_split_three(self):
        """Test that d = 2, p = 3 gives (16, 4)."""
        from src.arithmetic.ring import field_of, residue_counts

        assert residue_counts(field_of(2), 3) == (16, 4)

    def test_closed_forms_match_enumeration(self):
        """Test closed forms against enumeration for p <= 13 and d in {1, 2, 3, 5, 6}."""
        from src.arithmetic.ring import field_of, residue_counts, residue_counts_closed_form

        for d in (1, 2, 3, 5, 6):
            F = field_of(d)
            for p in (3, 5, 7, 11, 13):
                if d % p == 0:
                    continue
                assert residue_counts(F, p) == residue_counts_closed_form(F, p)

    def test_bad_primes(self):
        """Test that p = 2 and p | d raise BadPrime."""
        from src.arithmetic.ring import field_of, residue_counts
        from src.core.exceptions import BadPrime

        with pytest.raises(BadPrime):
            residue_counts(field_of(1), 2)
        with pytest.raises(BadPrime):
            residue_counts(field_of(6), 3)


class TestGroupOrders:
    """Tests for prime types and #SL2(O_K/q)."""

    def test_prime_types(self):
        """Test split, inert and ramified primes of Q(i)."""
        from src.arithmetic.ring import field_of, prime_type

        F = field_of(1)
        assert prime_type(F, 2) == "ramified"
        assert prime_type(F, 3) == "inert"
        assert prime_type(F, 5) == "split"

    def test_sl2_orders(self):
        """Test that #SL2(Z[i]/3) = 720 and #SL2(Z[i]/5) = 14400."""
        from src.arithmetic.ring import field_of, sl2_order

        F = field_of(1)
        assert sl2_order(F, 3) == 720
        assert sl2_order(F, 5) == 14400
        assert sl2_order(F, 15) == 720 * 14400

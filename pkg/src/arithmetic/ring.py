"""
Exact arithmetic over imaginary quadratic fields K = Q(sqrt(-d)).

Provides:
- Field: the field data (d, discriminant, integral basis 1, omega)
- QuadElem: exact elements a + b*sqrt(-d) with rational a, b
- Mat2: 2x2 matrices over K with the anti-holomorphic reflection flag
- ResidueRing / ResidueElem / ResidueMat: O_K/(q) in the basis (1, omega)
- reduce_mod, residue_counts, denominator_lcm, prime_type, sl2_order
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd, lcm, isqrt
from typing import Iterable, Tuple, Union

import numpy as np
from sympy import factorint, legendre_symbol

from src.config.logging import get_logger
from src.core.exceptions import BadPrime, DenominatorClash, SingularMatrix, ValidationError

logger = get_logger(__name__)

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class Field:
    """K = Q(sqrt(-d)) with its ring of integers Z[omega]."""
    d: int

    def __post_init__(self):
        if self.d <= 0:
            raise ValidationError(f"d must be positive, got {self.d}")
        if self.d > 1 and any(e > 1 for e in factorint(self.d).values()):
            raise ValidationError(f"d = {self.d} is not square-free", {"d": self.d})

    @property
    def Delta(self) -> int:
        return -self.d if self.d % 4 == 3 else -4 * self.d

    @property
    def t(self) -> int:
        # omega^2 = t*omega - n
        return 1 if self.d % 4 == 3 else 0

    @property
    def n(self) -> int:
        return (1 + self.d) // 4 if self.t else self.d

    def elem(self, a: Rational = 0, b: Rational = 0) -> "QuadElem":
        return QuadElem(self.d, Fraction(a), Fraction(b))

    @property
    def zero(self) -> "QuadElem":
        return self.elem(0)

    @property
    def one(self) -> "QuadElem":
        return self.elem(1)

    @property
    def sqrt_neg_d(self) -> "QuadElem":
        return self.elem(0, 1)

    @property
    def omega(self) -> "QuadElem":
        return self.elem(Fraction(1, 2), Fraction(1, 2)) if self.t else self.elem(0, 1)

    def from_ok(self, x0: Rational, x1: Rational) -> "QuadElem":
        """Element x0 + x1*omega."""
        if self.t:
            return self.elem(Fraction(x0) + Fraction(x1, 2), Fraction(x1, 2))
        return self.elem(x0, x1)

    def __str__(self) -> str:
        return f"Q(sqrt(-{self.d}))"


@dataclass(frozen=True)
class QuadElem:
    """a + b*sqrt(-d), exact."""
    d: int
    a: Fraction
    b: Fraction

    def _coerce(self, other) -> "QuadElem":
        if isinstance(other, QuadElem):
            if other.d != self.d:
                raise ValidationError(f"Mixed fields d={self.d} and d={other.d}")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(self.d, Fraction(other), Fraction(0))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElem(self.d, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(self.d, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElem(self.d, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElem(
            self.d,
            self.a * o.a - self.d * self.b * o.b,
            self.a * o.b + self.b * o.a,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def conj(self) -> "QuadElem":
        return QuadElem(self.d, self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a + self.d * self.b * self.b

    def inverse(self) -> "QuadElem":
        nm = self.norm()
        if nm == 0:
            raise SingularMatrix("Zero has no inverse")
        return QuadElem(self.d, self.a / nm, -self.b / nm)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def ok_coords(self) -> Tuple[Fraction, Fraction]:
        """Coordinates (x0, x1) in the integral basis (1, omega)."""
        if self.d % 4 == 3:
            return self.a - self.b, 2 * self.b
        return self.a, self.b

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.ok_coords())

    def complex(self) -> complex:
        return complex(float(self.a), float(self.b) * self.d ** 0.5)

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        root = f"√−{self.d}" if self.d != 1 else "i"
        if self.a == 0:
            return f"{self.b}{root}"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}{root}"


@lru_cache(maxsize=None)
def field_of(d: int) -> Field:
    return Field(d)


def norm_conj(x: QuadElem) -> Tuple[Fraction, QuadElem]:
    """Return (N(x), conj(x))."""
    return x.norm(), x.conj()


@dataclass(frozen=True)
class Mat2:
    """
    [[A, B], [C, D]] over K acting by z -> (Az + B)/(Cz + D), or on conj(z)
    when conj_flag is set.
    """
    A: QuadElem
    B: QuadElem
    C: QuadElem
    D: QuadElem
    conj_flag: bool = False

    @classmethod
    def of(cls, field: Field, rows, conj_flag: bool = False) -> "Mat2":
        """Build from nested rows whose entries are ints, Fractions, QuadElems or (a, b) pairs."""
        def cast(x):
            if isinstance(x, QuadElem):
                return x
            if isinstance(x, tuple):
                return field.elem(*x)
            return field.elem(x)

        (a, b), (c, d) = rows
        return cls(cast(a), cast(b), cast(c), cast(d), conj_flag)

    @classmethod
    def identity(cls, field: Field) -> "Mat2":
        return cls(field.one, field.zero, field.zero, field.one)

    @property
    def field(self) -> Field:
        return field_of(self.A.d)

    @property
    def entries(self) -> Tuple[QuadElem, QuadElem, QuadElem, QuadElem]:
        return (self.A, self.B, self.C, self.D)

    @property
    def det(self) -> QuadElem:
        return self.A * self.D - self.B * self.C

    def conj_entries(self) -> "Mat2":
        return Mat2(self.A.conj(), self.B.conj(), self.C.conj(), self.D.conj(), self.conj_flag)

    def _twist(self, flag: bool) -> "Mat2":
        return self.conj_entries() if flag else self

    def __matmul__(self, other: "Mat2") -> "Mat2":
        o = other._twist(self.conj_flag)
        return Mat2(
            self.A * o.A + self.B * o.C,
            self.A * o.B + self.B * o.D,
            self.C * o.A + self.D * o.C,
            self.C * o.B + self.D * o.D,
            self.conj_flag != other.conj_flag,
        )

    def inverse(self) -> "Mat2":
        det = self.det
        if det.is_zero():
            raise SingularMatrix(details={"matrix": str(self)})
        inv = det.inverse()
        m = Mat2(self.D * inv, -self.B * inv, -self.C * inv, self.A * inv, self.conj_flag)
        return m._twist(self.conj_flag)

    def adjugate(self) -> "Mat2":
        return Mat2(self.D, -self.B, -self.C, self.A, self.conj_flag)

    def scaled(self, s: QuadElem) -> "Mat2":
        return Mat2(self.A * s, self.B * s, self.C * s, self.D * s, self.conj_flag)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.A, -self.B, -self.C, -self.D, self.conj_flag)

    def power(self, k: int) -> "Mat2":
        base = self if k >= 0 else self.inverse()
        result = Mat2.identity(self.field)
        for _ in range(abs(k)):
            result = result @ base
        return result

    def frobenius_sq(self) -> Fraction:
        return sum((e.norm() for e in self.entries), Fraction(0))

    def frobenius(self) -> Tuple[Fraction, float]:
        """Exact sum of |entry|^2 and its float square root."""
        sq = self.frobenius_sq()
        return sq, float(sq) ** 0.5

    def coords(self) -> Tuple[Fraction, ...]:
        return tuple(c for e in self.entries for c in (e.a, e.b))

    def projective_key(self) -> Tuple:
        """Key identifying m with -m: leading nonzero coordinate made positive."""
        coords = self.coords()
        lead = next((c for c in coords if c != 0), Fraction(0))
        if lead < 0:
            coords = tuple(-c for c in coords)
        return coords + (self.conj_flag,)

    def projectively_equal(self, other: "Mat2") -> bool:
        return self.projective_key() == other.projective_key()

    def is_integral(self) -> bool:
        return all(e.is_integral() for e in self.entries)

    def __str__(self) -> str:
        flag = ", conj" if self.conj_flag else ""
        return f"[[{self.A}, {self.B}], [{self.C}, {self.D}]{flag}]"


@dataclass
class MatOps:
    """Product, inverse, determinant and Frobenius data of a pair."""
    product: Mat2
    inverse: Mat2  # of the product
    det: QuadElem
    frobenius_sq: Fraction
    frobenius: float


def mat_ops(m1: Mat2, m2: Mat2) -> MatOps:
    prod = m1 @ m2
    sq, fl = prod.frobenius()
    return MatOps(prod, prod.inverse(), prod.det, sq, fl)


class ResidueRing:
    """O_K/(q) with elements x0 + x1*omega, coordinates in [0, q)."""

    def __init__(self, field: Field, q: int):
        if q < 1:
            raise ValidationError(f"Modulus must be positive, got {q}")
        self.field = field
        self.q = q
        self.t = field.t
        self.n = field.n

    def reduce_rational(self, x: Fraction) -> int:
        den = x.denominator
        if gcd(den, self.q) != 1:
            raise DenominatorClash(den, self.q)
        if self.q == 1:
            return 0
        return x.numerator * pow(den, -1, self.q) % self.q

    def element(self, x: QuadElem) -> "ResidueElem":
        x0, x1 = x.ok_coords()
        return ResidueElem(self.field.d, self.q, self.reduce_rational(x0), self.reduce_rational(x1))

    def mul(self, x0, x1, y0, y1):
        """Product of x0 + x1*omega and y0 + y1*omega; works on ints and numpy arrays."""
        q = self.q
        r0 = (x0 * y0 - self.n * x1 * y1) % q
        r1 = (x0 * y1 + x1 * y0 + self.t * x1 * y1) % q
        return r0, r1

    def conj(self, x0, x1):
        q = self.q
        return (x0 + self.t * x1) % q, (-x1) % q

    def norm(self, x0, x1):
        return (x0 * x0 + self.t * x0 * x1 + self.n * x1 * x1) % self.q

    def grid(self) -> Tuple[np.ndarray, np.ndarray]:
        """All q^2 residues as coordinate arrays."""
        x0, x1 = np.meshgrid(np.arange(self.q, dtype=np.int64), np.arange(self.q, dtype=np.int64), indexing="ij")
        return x0.ravel(), x1.ravel()


@dataclass(frozen=True)
class ResidueElem:
    d: int
    q: int
    x0: int
    x1: int

    @property
    def ring(self) -> ResidueRing:
        return ResidueRing(field_of(self.d), self.q)

    def __add__(self, other: "ResidueElem") -> "ResidueElem":
        return ResidueElem(self.d, self.q, (self.x0 + other.x0) % self.q, (self.x1 + other.x1) % self.q)

    def __sub__(self, other: "ResidueElem") -> "ResidueElem":
        return ResidueElem(self.d, self.q, (self.x0 - other.x0) % self.q, (self.x1 - other.x1) % self.q)

    def __neg__(self) -> "ResidueElem":
        return ResidueElem(self.d, self.q, -self.x0 % self.q, -self.x1 % self.q)

    def __mul__(self, other: "ResidueElem") -> "ResidueElem":
        r0, r1 = self.ring.mul(self.x0, self.x1, other.x0, other.x1)
        return ResidueElem(self.d, self.q, r0, r1)

    def conj(self) -> "ResidueElem":
        r0, r1 = self.ring.conj(self.x0, self.x1)
        return ResidueElem(self.d, self.q, r0, r1)

    def norm(self) -> int:
        return self.ring.norm(self.x0, self.x1)

    def is_unit(self) -> bool:
        return gcd(self.norm(), self.q) == 1

    def inverse(self) -> "ResidueElem":
        nm = self.norm()
        if gcd(nm, self.q) != 1:
            raise SingularMatrix(f"{self} is not a unit modulo {self.q}")
        if self.q == 1:
            return self
        c = self.conj()
        k = pow(nm, -1, self.q)
        return ResidueElem(self.d, self.q, c.x0 * k % self.q, c.x1 * k % self.q)


@dataclass(frozen=True)
class ResidueMat:
    """Reduced matrix with its reflection flag."""
    A: ResidueElem
    B: ResidueElem
    C: ResidueElem
    D: ResidueElem
    conj_flag: bool = False

    @property
    def q(self) -> int:
        return self.A.q

    @property
    def entries(self) -> Tuple[ResidueElem, ...]:
        return (self.A, self.B, self.C, self.D)

    @property
    def det(self) -> ResidueElem:
        return self.A * self.D - self.B * self.C

    def _twist(self, flag: bool) -> "ResidueMat":
        if not flag:
            return self
        return ResidueMat(self.A.conj(), self.B.conj(), self.C.conj(), self.D.conj(), self.conj_flag)

    def __matmul__(self, other: "ResidueMat") -> "ResidueMat":
        o = other._twist(self.conj_flag)
        return ResidueMat(
            self.A * o.A + self.B * o.C,
            self.A * o.B + self.B * o.D,
            self.C * o.A + self.D * o.C,
            self.C * o.B + self.D * o.D,
            self.conj_flag != other.conj_flag,
        )

    def inverse(self) -> "ResidueMat":
        inv = self.det.inverse()
        m = ResidueMat(self.D * inv, -self.B * inv, -self.C * inv, self.A * inv, self.conj_flag)
        return m._twist(self.conj_flag)

    def key(self) -> Tuple[int, ...]:
        return tuple(c for e in self.entries for c in (e.x0, e.x1)) + (int(self.conj_flag),)


def reduce_mod(m: Mat2, q: int) -> ResidueMat:
    """Entry-wise reduction of m into O_K/(q)."""
    ring = ResidueRing(m.field, q)
    a, b, c, d = (ring.element(e) for e in m.entries)
    return ResidueMat(a, b, c, d, m.conj_flag)


def denominator_lcm(generators: Iterable[Mat2]) -> int:
    """Least q such that q times every entry lies in O_K."""
    dens = [c.denominator for g in generators for e in g.entries for c in e.ok_coords()]
    return reduce(lcm, dens, 1)


def prime_type(field: Field, p: int) -> str:
    """'split', 'inert' or 'ramified' for the rational prime p."""
    delta = field.Delta
    if p == 2:
        if delta % 2 == 0:
            return "ramified"
        return "split" if delta % 8 == 1 else "inert"
    symbol = legendre_symbol(delta % p, p) if delta % p else 0
    return {0: "ramified", 1: "split", -1: "inert"}[symbol]


def sl2_order(field: Field, q: int) -> int:
    """#SL2(O_K/(q)) in closed form."""
    order = 1
    for p, k in factorint(q).items():
        kind = prime_type(field, p)
        if kind == "split":
            order *= (p ** (3 * k - 2) * (p * p - 1)) ** 2
        elif kind == "inert":
            order *= p ** (6 * k - 4) * (p ** 4 - 1)
        else:
            order *= p ** (6 * k - 2) * (p * p - 1)
    return order


def _check_good_odd_prime(field: Field, p: int):
    if p % 2 == 0:
        raise BadPrime(p, "even")
    if field.d % p == 0:
        raise BadPrime(p, f"divides d = {field.d}")
    if p < 3 or any(p % k == 0 for k in range(3, isqrt(p) + 1, 2)):
        raise BadPrime(p, "not prime")


def residue_counts_closed_form(field: Field, p: int) -> Tuple[int, int]:
    _check_good_odd_prime(field, p)
    if prime_type(field, p) == "inert":
        return p * p + 1, p * p - 1
    return p * p + 2 * p + 1, p * p - 2 * p + 1


def residue_counts(field: Field, p: int) -> Tuple[int, int]:
    """
    (#P^1(O_K/p), #(O_K/p)^*) by exhaustive enumeration, checked against the
    split/inert closed forms.
    """
    closed = residue_counts_closed_form(field, p)
    ring = ResidueRing(field, p)
    x0, x1 = ring.grid()
    units = int(np.count_nonzero(ring.norm(x0, x1)))

    # (u, v) is unimodular iff {u, u*omega, v, v*omega} spans (Z/p)^2
    u0, v0 = np.meshgrid(x0, x0, indexing="ij")
    u1, v1 = np.meshgrid(x1, x1, indexing="ij")
    vectors = [(u0, u1), ring.mul(u0, u1, 0, 1), (v0, v1), ring.mul(v0, v1, 0, 1)]
    spans = np.zeros(u0.shape, dtype=bool)
    for i in range(4):
        for j in range(i + 1, 4):
            minor = (vectors[i][0] * vectors[j][1] - vectors[i][1] * vectors[j][0]) % p
            spans |= minor != 0
    p1 = int(np.count_nonzero(spans)) // units

    if (p1, units) != closed:
        raise ValidationError(
            "Residue counts disagree with the closed form",
            {"p": p, "enumerated": (p1, units), "closed": closed},
        )
    logger.debug("residue_counts", d=field.d, p=p, p1=p1, units=units)
    return p1, units

"""
Shifted binary quadratic forms attached to group elements.

For g = M*gamma with bottom row (C, D):

    f(a, c) = |C a + D c|^2 + 2 Im(conj(C) D) / sqrt(-Delta)

is the curvature of g w (R-hat + sqrt(Delta)/2), divided by sqrt(-Delta),
for any w with left column (a, c).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import reduce
from math import gcd, isqrt, lcm, prod
from typing import Dict, List, Optional, Set, Tuple

from sympy import primefactors

from src.arithmetic.ring import Field, Mat2, field_of
from src.config.logging import get_logger
from src.core.exceptions import NotCoprime, NotRationalScaling, ValidationError

logger = get_logger(__name__)


@dataclass(frozen=True)
class ShiftedForm:
    A2: Fraction
    B2: Fraction
    C2: Fraction
    shift: Fraction
    provenance: Optional[Mat2] = dc_field(default=None, compare=False, hash=False)
    word: Tuple[int, ...] = dc_field(default=(), compare=False, hash=False)

    @property
    def key(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.A2, self.B2, self.C2, self.shift)

    @property
    def discriminant(self) -> Fraction:
        return self.B2 * self.B2 - 4 * self.A2 * self.C2

    def __call__(self, a: int, c: int) -> Fraction:
        return evaluate(self, a, c)

    def scaled(self, factor: Fraction) -> "ShiftedForm":
        return ShiftedForm(
            self.A2 * factor, self.B2 * factor, self.C2 * factor, self.shift * factor,
            self.provenance, self.word,
        )

    def to_dict(self) -> Dict:
        return {
            "A2": str(self.A2),
            "B2": str(self.B2),
            "C2": str(self.C2),
            "shift": str(self.shift),
            "word": list(self.word),
        }


def build_form(M: Mat2, gamma: Mat2, word: Tuple[int, ...] = ()) -> ShiftedForm:
    g = M @ gamma
    if g.conj_flag:
        raise ValidationError("build_form needs a holomorphic M*gamma")
    C, D = g.C, g.D
    cd = C.conj() * D
    # 2 Im(conj(C) D) / sqrt(-Delta): sqrt(-Delta) is 2 sqrt(d) or sqrt(d)
    shift = cd.b if g.field.t == 0 else 2 * cd.b
    form = ShiftedForm(C.norm(), 2 * cd.a, D.norm(), shift, gamma, word)
    assert form.discriminant == g.field.Delta * shift * shift
    return form


def evaluate(f: ShiftedForm, a: int, c: int) -> Fraction:
    return f.A2 * a * a + f.B2 * a * c + f.C2 * c * c + f.shift


def _content(values) -> Fraction:
    den = reduce(lcm, (v.denominator for v in values), 1)
    num = reduce(gcd, (abs(int(v * den)) for v in values), 0)
    return Fraction(num, den)


def normalize_primitive(f: ShiftedForm, d1: int) -> Tuple[ShiftedForm, Fraction]:
    """
    Rescale f to a primitive integral form. Returns (form, scale) with
    form = scale * f; the content removed from d1^2 f divides d1^4.
    """
    if d1 < 1:
        raise ValidationError(f"d1 must be positive, got {d1}")
    lifted = [x * d1 * d1 for x in f.key]
    if any(x.denominator != 1 for x in lifted):
        raise NotRationalScaling(f"d1^2 f is not integral for d1 = {d1}", {"form": f.to_dict()})
    g = _content(lifted)
    if g == 0:
        raise NotRationalScaling("Zero form has no primitive scaling")
    if (d1 ** 4) % int(g) != 0:
        raise NotRationalScaling(f"content {g} does not divide {d1}^4", {"form": f.to_dict()})
    scale = Fraction(d1 * d1) / g
    return f.scaled(scale), scale


def _sqrt_floor(x: Fraction) -> int:
    if x < 0:
        return -1
    return isqrt(x.numerator * x.denominator) // x.denominator


def _residue_range(lo: Fraction, hi: Fraction, residue: int, modulus: int):
    start = lo.__ceil__()
    start += (residue - start) % modulus
    stop = hi.__floor__()
    return range(start, stop + 1, modulus)


def represented_values(
    f: ShiftedForm,
    L: int,
    N,
    factor: Fraction = Fraction(1),
    witnesses: bool = False,
):
    """
    { factor*f(a, c) <= N : a = 1 mod L, c = 0 mod L, gcd(a, c) = 1 }.

    With witnesses=True a dict value -> (a, c) is returned instead of a set.
    """
    if L < 1:
        raise ValidationError(f"L must be positive, got {L}")
    bound = Fraction(N) / Fraction(factor)
    radius = bound - f.shift
    found: Dict[Fraction, Tuple[int, int]] = {}

    def record(a, c):
        value = evaluate(f, a, c)
        if value <= bound and gcd(a, c) == 1:
            found.setdefault(value * factor, (a, c))

    if radius >= 0:
        disc = 4 * f.A2 * f.C2 - f.B2 * f.B2
        if disc > 0:
            c_max = _sqrt_floor(4 * f.A2 * radius / disc) + 1
            for c in _residue_range(Fraction(-c_max), Fraction(c_max), 0, L):
                # A2 a^2 + B2 c a + (C2 c^2 - radius) <= 0
                inner = f.B2 * f.B2 * c * c - 4 * f.A2 * (f.C2 * c * c - radius)
                if inner < 0:
                    continue
                root = _sqrt_floor(inner) + 1
                lo = (-f.B2 * c - root) / (2 * f.A2)
                hi = (-f.B2 * c + root) / (2 * f.A2)
                for a in _residue_range(lo, hi, 1 % L, L):
                    record(a, c)
        elif f.A2 == 0:
            # f = C2 c^2 + shift; a = 1 is always a coprime partner
            if f.C2 == 0:
                record(1, 0)
            else:
                c_max = _sqrt_floor(radius / f.C2)
                for c in _residue_range(Fraction(-c_max), Fraction(c_max), 0, L):
                    record(1, c)
        else:
            _degenerate_values(f, L, radius, record)

    if witnesses:
        return found
    return set(found)


def _degenerate_values(f: ShiftedForm, L: int, radius: Fraction, record):
    # f = (A2 / s^2) k^2 + shift with k = s a + p c and lam = p / s = B2 / (2 A2) in lowest terms
    lam = f.B2 / (2 * f.A2)
    p, s = lam.numerator, lam.denominator
    k_max = _sqrt_floor(radius * s * s / f.A2) + 1
    for k in range(-k_max, k_max + 1):
        if (k - s) % L:
            continue
        witness = _degenerate_witness(k, p, s, L)
        if witness is not None:
            record(*witness)


def _degenerate_witness(k: int, p: int, s: int, L: int) -> Optional[Tuple[int, int]]:
    """Coprime (a, c) with a = 1 mod L, c = 0 mod L and s a + p c = k, if one exists."""
    if k == 0:
        # the line s a + p c = 0 holds only the primitive pairs +-(p, -s)
        for a, c in ((p, -s), (-p, s)):
            if (a - 1) % L == 0 and c % L == 0 and gcd(a, c) == 1:
                return a, c
        return None
    target = (k - s) // L  # s x + p y = target with a = 1 + L x, c = L y
    y0 = (target * pow(p, -1, s)) % s if s > 1 else 0
    x0 = (target - p * y0) // s
    # stepping t moves (a, c) by L t (-p, s); a prime q | k excludes at most one class of t mod q
    for t in range(prod(primefactors(abs(k))) + 1):
        a, c = 1 + L * (x0 - p * t), L * (y0 + s * t)
        if gcd(a, c) == 1:
            return a, c
    return None


def complete_column(a: int, c: int, field: Optional[Field] = None) -> Mat2:
    """Integral matrix of det 1 with first column (a, c)."""
    if c == 0:
        if abs(a) != 1:
            raise NotCoprime(a, c)
        x, y = a, 0
    else:
        try:
            x = pow(a, -1, abs(c))
        except ValueError:
            raise NotCoprime(a, c)
        y = (1 - a * x) // c
    field = field or field_of(1)
    return Mat2.of(field, [[a, -y], [c, x]])


def form_family(spec, word_radius: int, budget: Optional[int] = None) -> List[ShiftedForm]:
    """Distinct forms of the holomorphic elements in the word ball, keyed by coefficients."""
    from src.packing.words import word_ball

    family: Dict[Tuple, ShiftedForm] = {}
    budget = budget or spec.budget
    for word in word_ball(spec.generators, word_radius, holomorphic_only=True, budget=budget, field=spec.field):
        form = build_form(spec.M, word.element, word.letters)
        family.setdefault(form.key, form)
    logger.info("form_family_built", label=spec.label, radius=word_radius, forms=len(family))
    return list(family.values())


def gamma_L_column(x: int, y: int, L: int, field: Optional[Field] = None) -> Mat2:
    """
    Element of Gamma(L) with first column (L x + 1, L y): complete_column,
    then a unipotent correction bringing the top-right entry to 0 mod L.
    """
    if L < 1:
        raise ValidationError(f"L must be positive, got {L}")
    field = field or field_of(1)
    w = complete_column(L * x + 1, L * y, field)
    k = int(-w.B.a) % L
    return w @ Mat2.of(field, [[1, k], [0, 1]])

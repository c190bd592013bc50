"""
Representation counts over the two-parameter norm-ball family.

The family F_T collects products gamma = gamma1 * gamma2 of holomorphic
group elements with

    T1/2 <= ||M gamma1|| <= T1,  T2/2 <= ||gamma2|| <= T2,  Im(conj(C) D) >= T/100

counted with multiplicity, where (C, D) is the bottom row of M gamma.
All norm comparisons are done on exact squared norms.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional

from sympy import divisors, factorint

from src.arithmetic.ring import Mat2
from src.config.logging import get_logger
from src.config.settings import get_settings
from src.core.exceptions import IntegralityError, ScaleTooLarge, ValidationError
from src.forms.shifted import ShiftedForm, build_form
from src.packing.orbit import curvature_set, resolve_scale
from src.packing.spec import CircleMethodParams, PackingSpec
from src.packing.words import Word, word_ball

logger = get_logger(__name__)

BUMP_CONSTANT = Fraction(15, 8)


def bump(x: Fraction) -> Fraction:
    """psi(x) = 15/8 (1 - (2x - 3)^2)^2 on [1, 2], zero elsewhere; integrates to 1."""
    x = Fraction(x)
    if x < 1 or x > 2:
        return Fraction(0)
    u = 2 * x - 3
    return BUMP_CONSTANT * (1 - u * u) ** 2


def bump_weight(a: int, X: int) -> int:
    """Integer numerator of psi(a/X): psi(a/X) = 15/8 * bump_weight(a, X) / X^4."""
    if a < X or a > 2 * X:
        return 0
    return (X * X - (2 * a - 3 * X) ** 2) ** 2


def mobius(u: int) -> int:
    exponents = factorint(u).values()
    if any(e > 1 for e in exponents):
        return 0
    return -1 if len(exponents) % 2 else 1


def truncated_mobius(g: int, U: int) -> int:
    """sum of mu(u) over divisors u < U of g; equals [g == 1] once U > g."""
    return sum(mobius(u) for u in divisors(g) if u < U)


@dataclass(frozen=True)
class FTElement:
    gamma: Mat2
    left: Word
    right: Word

    def form(self, spec: PackingSpec) -> ShiftedForm:
        return build_form(spec.M, self.gamma, self.left.letters + self.right.letters)


def _in_window(norm_sq: Fraction, T: int) -> bool:
    return Fraction(T * T, 4) <= norm_sq <= T * T


def norm_ball_FT(
    spec: PackingSpec,
    T1: int,
    T2: int,
    word_radius: Optional[int] = None,
    budget: Optional[int] = None,
) -> List[FTElement]:
    """
    The multiset F_T, drawing gamma1 and gamma2 from the holomorphic elements
    of the word ball of the given radius.
    """
    if T1 < 1 or T2 < 1:
        raise ValidationError(f"T1 and T2 must be positive, got {T1}, {T2}")
    settings = get_settings()
    word_radius = word_radius or settings.norm_ball_radius
    budget = budget or spec.budget or settings.budget

    ball = word_ball(spec.generators, word_radius, holomorphic_only=True, budget=budget, field=spec.field)
    lefts = [w for w in ball if _in_window((spec.M @ w.element).frobenius_sq(), T1)]
    rights = [w for w in ball if _in_window(w.element.frobenius_sq(), T2)]
    if len(lefts) * len(rights) > budget:
        raise ScaleTooLarge(len(lefts) * len(rights), budget)

    T = T1 * T2
    threshold = Fraction(T * T, 10 ** 4)
    d = spec.field.d
    family: List[FTElement] = []
    for left in lefts:
        for right in rights:
            gamma = left.element @ right.element
            g = spec.M @ gamma
            # Im(conj(C) D) = b*sqrt(d) >= T/100
            b = (g.C.conj() * g.D).b
            if b >= 0 and d * b * b >= threshold:
                family.append(FTElement(gamma, left, right))

    logger.info(
        "norm_ball_built",
        label=spec.label,
        T1=T1,
        T2=T2,
        lefts=len(lefts),
        rights=len(rights),
        size=len(family),
    )
    return family


def _scaled_form_factor(spec: PackingSpec) -> Fraction:
    return resolve_scale(spec).form_factor


def representation_counts(
    spec: PackingSpec,
    params: CircleMethodParams,
    U: Optional[int] = None,
    family: Optional[List[FTElement]] = None,
    word_radius: Optional[int] = None,
) -> Dict[int, Fraction]:
    """
    R_N(n) for every n in its support (or R_N^U(n) when U is given), in
    scaled-curvature units.

    The coprimality condition of R_N is replaced by the Moebius weight
    sum_{u | gcd(a, c), u < U} mu(u) for R_N^U; gcd(a, c) is prime to L
    because a = 1 mod L.
    """
    if family is None:
        family = norm_ball_FT(spec, params.T1, params.T2, word_radius=word_radius)
    factor = _scaled_form_factor(spec)
    X, L = params.X, spec.L
    a_values = [a for a in range(X, 2 * X + 1) if a % L == 1 % L]
    c_values = [c for c in range(X, 2 * X + 1) if c % L == 0]

    raw: Dict[Fraction, int] = {}
    for element in family:
        f = element.form(spec)
        for a in a_values:
            wa = bump_weight(a, X)
            if not wa:
                continue
            for c in c_values:
                wc = bump_weight(c, X)
                if not wc:
                    continue
                g = gcd(a, c)
                if U is None:
                    mu = 1 if g == 1 else 0
                else:
                    mu = truncated_mobius(g, U)
                if not mu:
                    continue
                value = factor * f(a, c)
                raw[value] = raw.get(value, 0) + mu * wa * wc

    norm = BUMP_CONSTANT ** 2 / Fraction(X) ** 8
    counts: Dict[int, Fraction] = {}
    for value, weight in raw.items():
        if weight == 0:
            continue
        if value.denominator != 1:
            raise IntegralityError(f"Scaled form value {value} is not an integer", {"label": spec.label})
        counts[int(value)] = weight * norm
    logger.info(
        "representation_counts",
        label=spec.label,
        N=params.N,
        U=U,
        family=len(family),
        support=len(counts),
    )
    return dict(sorted(counts.items()))


def representation_count(
    spec: PackingSpec,
    params: CircleMethodParams,
    n: int,
    U: Optional[int] = None,
    verify: bool = True,
    family: Optional[List[FTElement]] = None,
) -> Fraction:
    """
    R_N(n), or R_N^U(n) when U is given. Unless verify=False, every n of positive
    R_N is checked to be a curvature of the packing; the sieved R_N^U is not checked.
    """
    counts = representation_counts(spec, params, U=U, family=family)
    if verify and U is None:
        check_represented_are_curvatures(spec, counts)
    return counts.get(n, Fraction(0))


def check_represented_are_curvatures(spec: PackingSpec, counts: Dict[int, Fraction]) -> None:
    positive = [n for n, r in counts.items() if r > 0]
    if not positive:
        return
    curvatures = set(curvature_set(spec, max(positive)))
    missing = [n for n in positive if n not in curvatures]
    if missing:
        raise ValidationError(
            "Represented values missing from the curvature set",
            {"label": spec.label, "missing": missing[:20]},
        )


def l1_distance(first: Dict[int, Fraction], second: Dict[int, Fraction]) -> Fraction:
    keys = set(first) | set(second)
    return sum((abs(first.get(k, 0) - second.get(k, 0)) for k in keys), Fraction(0))


def class_histogram(
    spec: PackingSpec,
    T1: int,
    T2: int,
    q: int,
    family: Optional[Iterable[FTElement]] = None,
    word_radius: Optional[int] = None,
) -> Dict[int, int]:
    """Counts of gamma in F_T by the scaled shift 2 Im(conj(C) D)/sqrt(-Delta) mod q."""
    if q < 1:
        raise ValidationError(f"q must be positive, got {q}")
    if family is None:
        family = norm_ball_FT(spec, T1, T2, word_radius=word_radius)
    factor = _scaled_form_factor(spec)
    histogram: Counter = Counter()
    for element in family:
        shift = factor * element.form(spec).shift
        if shift.denominator != 1:
            raise IntegralityError(f"Scaled shift {shift} is not an integer", {"label": spec.label})
        histogram[int(shift) % q] += 1
    return dict(sorted(histogram.items()))

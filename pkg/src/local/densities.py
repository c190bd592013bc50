"""
Local curvature densities tau_q(r), the terms B_q(n) and singular series partial sums.

tau_q is the uniform pushforward of the row orbit modulo q (times the F1
denominator) through F1 mod q. The same distribution is also available by
counting over the congruence quotient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from sympy import factorint, isprime

from src.arithmetic.ring import Field, Mat2, ResidueRing, prime_type
from src.config.logging import get_logger
from src.config.settings import get_settings
from src.core.exceptions import BadPrime, ValidationError
from src.expsums.sums import ramanujan
from src.forms.shifted import gamma_L_column
from src.local.quotient import quotient_group
from src.local.rows import RowOrbit, _row_scale, row_modulus, row_orbit
from src.packing.orbit import resolve_scale
from src.packing.spec import PackingSpec

logger = get_logger(__name__)


@dataclass(frozen=True)
class LocalDensity:
    q: int
    r: int
    tau: Fraction

    def to_dict(self) -> Dict:
        return {
            "q": self.q,
            "r": self.r,
            "numerator": self.tau.numerator,
            "denominator": self.tau.denominator,
        }


@lru_cache(maxsize=4)
def _cached_row_orbit(spec: PackingSpec, modulus: int, budget: int) -> RowOrbit:
    return row_orbit(spec, modulus, budget)


def _direct_distribution(
    spec: PackingSpec, q: int, base: int, twist: Optional[Mat2], budget: int
) -> Tuple[Fraction, ...]:
    orbit = _cached_row_orbit(spec, row_modulus(spec, q), budget)
    states = orbit.states if twist is None else orbit.twisted(twist)
    values = orbit.curvatures_mod(q, base, states)
    counts = np.bincount(values, minlength=q)
    total = len(values)
    return tuple(Fraction(int(c), total) for c in counts)


@lru_cache(maxsize=256)
def curvature_distribution(
    spec: PackingSpec,
    q: int,
    base: int = 0,
    twist: Optional[Mat2] = None,
    budget: Optional[int] = None,
) -> Tuple[Fraction, ...]:
    """
    (tau_q(0), ..., tau_q(q - 1)) for the given base circle. A twist w (in the
    integral model) replaces h by h w before F1 is read off.
    """
    if q < 1:
        raise ValidationError(f"q must be positive, got {q}")
    spec = resolve_scale(spec)
    budget = budget or spec.budget or get_settings().budget
    m = row_modulus(spec, q)
    factors = factorint(q)
    if 2 * m ** 4 > budget and len(factors) > 1:
        logger.warning("density_crt_fallback", label=spec.label, q=q, modulus=m, budget=budget)
        parts = [
            (p ** k, curvature_distribution(spec, p ** k, base, twist, budget))
            for p, k in sorted(factors.items())
        ]
        dist = []
        for r in range(q):
            tau = Fraction(1)
            for pk, part in parts:
                tau *= part[r % pk]
            dist.append(tau)
        return tuple(dist)
    return _direct_distribution(spec, q, base, twist, budget)


def density_table(spec: PackingSpec, q: int, base: int = 0) -> List[LocalDensity]:
    dist = curvature_distribution(spec, q, base)
    return [LocalDensity(q, r, tau) for r, tau in enumerate(dist)]


def tau_empirical(spec: PackingSpec, q: int, r: int, base: int = 0) -> Fraction:
    """Proportion of the group modulo q whose curvature is r mod q."""
    return curvature_distribution(spec, q, base)[r % q]


def tau_via_quotient(
    spec: PackingSpec, q: int, r: int, base: int = 0, budget: Optional[int] = None
) -> Fraction:
    """tau_q(r) by counting directly over the elements of the congruence quotient."""
    spec = resolve_scale(spec)
    m = row_modulus(spec, q)
    group = quotient_group(spec, m, budget)
    ring = ResidueRing(spec.field, m)
    _, (c0, c1, d0, d1) = _row_scale(spec)
    X = group.elements
    # bottom row of W h: c * (A, B) + d * (C, D)
    states = np.empty((len(X), 5), dtype=np.int64)
    for out, (top, bottom) in enumerate(((0, 4), (2, 6))):
        p0, p1 = ring.mul(c0 % m, c1 % m, X[:, top], X[:, top + 1])
        s0, s1 = ring.mul(d0 % m, d1 % m, X[:, bottom], X[:, bottom + 1])
        states[:, 2 * out] = (p0 + s0) % m
        states[:, 2 * out + 1] = (p1 + s1) % m
    states[:, 4] = X[:, 8]
    values = RowOrbit(spec, m, states).curvatures_mod(q, base)
    return Fraction(int(np.count_nonzero(values == r % q)), len(values))


def tau_closed_form(field: Field, p: int, n_div: bool, split: Optional[bool] = None) -> Fraction:
    """tau_p(n) at an odd good prime; n_div says whether p | n."""
    if not isprime(p):
        raise BadPrime(p, "not prime")
    if p == 2:
        raise BadPrime(p, "even")
    kind = prime_type(field, p)
    if kind == "ramified":
        raise BadPrime(p, f"ramified in Q(sqrt(-{field.d}))")
    if split is None:
        split = kind == "split"
    if split:
        return Fraction(1, p + 1) if n_div else Fraction(p, p * p - 1)
    return Fraction(p + 1, p * p + 1) if n_div else Fraction(p, p * p + 1)


def b_q(spec: PackingSpec, q: int, n: int, base: int = 0, twist: Optional[Mat2] = None) -> Fraction:
    """B_q(n) = sum_r tau_q(r) c_q(r - n)."""
    dist = curvature_distribution(spec, q, base, twist)
    return sum((tau * ramanujan(q, r - n) for r, tau in enumerate(dist) if tau), Fraction(0))


def bp_identity_check(spec: PackingSpec, p: int, n: int, base: int = 0) -> Tuple[Fraction, Fraction]:
    """(B_p(n), p tau_p(n) - 1); the two agree."""
    return b_q(spec, p, n, base), p * tau_empirical(spec, p, n, base) - 1


@dataclass(frozen=True)
class EulerFactorCheck:
    p: int
    k: int
    n: int
    partial: Fraction  # 1 + B_p + ... + B_{p^k}
    expected: Fraction  # p^k tau_{p^k}(n)

    @property
    def holds(self) -> bool:
        return self.partial == self.expected


def euler_factor_check(spec: PackingSpec, p: int, k: int, n: int, base: int = 0) -> EulerFactorCheck:
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}")
    partial = 1 + sum((b_q(spec, p ** j, n, base) for j in range(1, k + 1)), Fraction(0))
    expected = p ** k * tau_empirical(spec, p ** k, n, base)
    check = EulerFactorCheck(p, k, n, partial, expected)
    if not check.holds:
        logger.warning("euler_factor_mismatch", label=spec.label, p=p, k=k, n=n)
    return check


@dataclass
class SingularSeries:
    n: int
    x: int
    y: int
    terms: Dict[int, Fraction]

    @property
    def value(self) -> Fraction:
        return sum(self.terms.values(), Fraction(0))

    def partial_sums(self) -> List[Tuple[int, Fraction]]:
        """(Q, sum_{q < Q} B_q) for every Q up to Q0."""
        running = Fraction(0)
        out = []
        for q in sorted(self.terms):
            running += self.terms[q]
            out.append((q + 1, running))
        return out

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "x": self.x,
            "y": self.y,
            "terms": {str(q): str(v) for q, v in self.terms.items()},
            "value": str(self.value),
        }


def column_twist(spec: PackingSpec, x: int, y: int) -> Mat2:
    """model^-1 w model for the Gamma(L) element w with first column (L x + 1, L y)."""
    w = gamma_L_column(x, y, spec.L, spec.field)
    model = spec.conjugator
    return model.inverse() @ w @ model


def singular_series(spec: PackingSpec, Q0: int, n: int, x: int, y: int) -> SingularSeries:
    """B_q(n) for q < Q0 with the form argument f(L x + 1, L y)."""
    if Q0 < 2:
        raise ValidationError(f"Q0 must be at least 2, got {Q0}")
    twist = column_twist(spec, x, y)
    terms = {q: b_q(spec, q, n, 0, twist) for q in range(1, Q0)}
    series = SingularSeries(n, x, y, terms)
    logger.info("singular_series", label=spec.label, Q0=Q0, n=n, value=str(series.value))
    return series


def singular_series_partial(spec: PackingSpec, Q0: int, n: int, x: int, y: int) -> Fraction:
    return singular_series(spec, Q0, n, x, y).value

"""
Ramanujan, Gauss, Kloosterman and binary quadratic exponential sums.

Closed forms are evaluated for odd moduli and checked against numpy brute
force; even moduli of the quadratic sum go through brute force only.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd
from typing import Dict, Optional, Tuple

import numpy as np
from sympy import factorint, isprime, legendre_symbol

from src.config.logging import get_logger
from src.core.exceptions import BadPrime, ValidationError
from src.monitoring.metrics import expsum_evaluations_total

logger = get_logger(__name__)

TWO_PI_I = 2j * np.pi


def e(x: Fraction) -> complex:
    """exp(2 pi i x) for rational x, reduced mod 1 before going to floats."""
    x = Fraction(x) % 1
    return cmath.exp(2j * cmath.pi * x.numerator / x.denominator)


def valuation(x: int, p: int, cap: int) -> int:
    """v_p(x) capped at `cap`; v_p(0) = cap."""
    x %= p ** cap
    if x == 0:
        return cap
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k


def _check_odd_prime(p: int):
    if p % 2 == 0:
        raise BadPrime(p, "even")
    if not isprime(p):
        raise BadPrime(p, "not prime")


@dataclass(frozen=True)
class QuadCase:
    """How the closed form of S(p^m, A, B, C, D, E) was reached."""
    p: int
    m: int
    k_g: int
    delta_g: int
    degenerate: bool
    upsilon: int
    chi: int
    path: str

    def to_dict(self) -> Dict:
        return {
            "p": self.p,
            "m": self.m,
            "k_g": self.k_g,
            "delta_g": self.delta_g,
            "degenerate": self.degenerate,
            "upsilon": self.upsilon,
            "chi": self.chi,
            "path": self.path,
        }


@dataclass(frozen=True)
class ExpSumValue:
    value: complex
    exact_magnitude_sq: Optional[Fraction] = None
    path: str = "closed_form"
    cases: Tuple[QuadCase, ...] = dc_field(default=())

    @property
    def re(self) -> float:
        return self.value.real

    @property
    def im(self) -> float:
        return self.value.imag

    def __abs__(self) -> float:
        return abs(self.value)

    @property
    def chi(self) -> int:
        """1 when the sum is nonzero, read from the exact case record when there is one."""
        if self.cases:
            return int(all(c.chi for c in self.cases))
        if self.exact_magnitude_sq is not None:
            return int(self.exact_magnitude_sq != 0)
        return int(abs(self.value) > 1e-9)

    def consistent(self, rel: float = 1e-9) -> bool:
        if self.exact_magnitude_sq is None:
            return True
        exact = float(self.exact_magnitude_sq)
        return abs(abs(self.value) ** 2 - exact) <= rel * max(1.0, exact)

    def to_dict(self) -> Dict:
        return {
            "re": self.re,
            "im": self.im,
            "exact_magnitude_sq": str(self.exact_magnitude_sq) if self.exact_magnitude_sq is not None else None,
            "path": self.path,
            "cases": [c.to_dict() for c in self.cases],
        }


def ramanujan(q: int, n: int) -> int:
    """c_q(n), multiplicative in q with the prime-power values 0, -p^(k-1), p^(k-1)(p-1)."""
    if q < 1:
        raise ValidationError(f"q must be positive, got {q}")
    expsum_evaluations_total.labels(kind="ramanujan", path="closed_form").inc()
    value = 1
    for p, k in factorint(q).items():
        pk = p ** k
        if n % pk == 0:
            value *= pk - pk // p
        elif n % (pk // p) == 0:
            value *= -(pk // p)
        else:
            return 0
    return value


def ramanujan_direct(q: int, n: int) -> complex:
    """Sum of e(rn/q) over residues r prime to q."""
    if q < 1:
        raise ValidationError(f"q must be positive, got {q}")
    expsum_evaluations_total.labels(kind="ramanujan", path="brute_force").inc()
    r = np.array([r for r in range(q) if gcd(r, q) == 1], dtype=np.int64)
    return complex(np.sum(np.exp(TWO_PI_I * ((r * n) % q) / q)))


def _quarter_turn(n: int) -> complex:
    # i^eps(n): 1 when n = 1 mod 4, i when n = 3 mod 4
    return 1 if n % 4 == 1 else 1j


def gauss_sum(p: int, m: int, a: int, b: int) -> ExpSumValue:
    """
    sum_{x mod p^m} e_{p^m}(a x^2 + b x) for an odd prime p.

    With k = v_p(a) < m the sum vanishes unless p^k | b; otherwise it is
    p^k * sqrt(p^j) * (a'/p)^j * i^eps(p^j) * e_{p^j}(-b'^2 / 4a'), j = m - k,
    a = p^k a', b = p^k b'.
    """
    _check_odd_prime(p)
    if m < 1:
        raise ValidationError(f"m must be positive, got {m}")
    expsum_evaluations_total.labels(kind="gauss", path="closed_form").inc()
    q = p ** m
    a, b = a % q, b % q
    if a == 0:
        value = q if b == 0 else 0
        return ExpSumValue(complex(value), Fraction(value * value))
    k = valuation(a, p, m)
    if b % p ** k:
        return ExpSumValue(0j, Fraction(0))
    j = m - k
    pj = p ** j
    a1 = (a // p ** k) % pj
    b1 = (b // p ** k) % pj
    symbol = legendre_symbol(a1 % p, p) ** j
    phase = e(Fraction(-b1 * b1 * pow(4 * a1, -1, pj), pj))
    magnitude = p ** k * np.sqrt(float(pj))
    value = magnitude * symbol * _quarter_turn(pj) * phase
    return ExpSumValue(complex(value), Fraction(p ** (k + m)))


def brute_gauss(p: int, m: int, a: int, b: int) -> complex:
    q = p ** m
    expsum_evaluations_total.labels(kind="gauss", path="brute_force").inc()
    x = np.arange(q, dtype=np.int64)
    phase = ((a % q) * x % q * x + (b % q) * x) % q
    return complex(np.sum(np.exp(TWO_PI_I * phase / q)))


def brute_quad(q: int, A: int, B: int, C: int, D: int, E: int) -> complex:
    """Double sum over x, y mod q by numpy pairwise summation."""
    if q < 1:
        raise ValidationError(f"q must be positive, got {q}")
    expsum_evaluations_total.labels(kind="quadratic", path="brute_force").inc()
    A, B, C, D, E = (v % q for v in (A, B, C, D, E))
    x, y = np.meshgrid(np.arange(q, dtype=np.int64), np.arange(q, dtype=np.int64), indexing="ij")
    phase = (A * (x * x % q) + B * (x * y % q) + C * (y * y % q) + D * x + E * y) % q
    return complex(np.sum(np.exp(TWO_PI_I * phase / q)))


def _upsilon(p: int, m: int, delta: int, degenerate: bool, unit: int) -> int:
    """
    0 or 1. A degenerate g is unit * (x + lam y)^2 modulo p after dividing out
    p^k_g, so it represents a nonzero residue exactly when unit does. Otherwise
    the symbol is (-delta / (delta, p^(2m - 2)) | p), with (0 | p) = 1.
    """
    if degenerate:
        return 0 if legendre_symbol(unit % p, p) == 1 else 1
    core = -delta // gcd(delta, p ** (2 * m - 2))
    if core % p == 0:
        return 0
    return 0 if legendre_symbol(core % p, p) == 1 else 1


def _quad_prime_power(p: int, m: int, A: int, B: int, C: int, D: int, E: int) -> ExpSumValue:
    q = p ** m
    A, B, C, D, E = (v % q for v in (A, B, C, D, E))
    delta = (B * B - 4 * A * C) % (q * q)
    k_g = min(valuation(v, p, m) for v in (A, B, C))

    if k_g == m:
        value = q * q if D == 0 and E == 0 else 0
        case = QuadCase(p, m, m, delta, False, 0, int(value != 0), "trivial")
        return ExpSumValue(complex(value), Fraction(value * value), "closed_form", (case,))

    path = "diagonal"
    if valuation(A, p, m) != k_g:
        if valuation(C, p, m) == k_g:
            A, C, D, E = C, A, E, D
            path = "swap"
        else:
            # y -> x + y makes the x^2 coefficient A + B + C, of valuation k_g
            A, B, C, D, E = (A + B + C) % q, (B + 2 * C) % q, C, (D + E) % q, E
            path = "shear"

    unit = (A // p ** k_g) % q
    lam = (B // p ** k_g) * pow(2 * unit, -1, q) % q
    C1 = (C - A * lam * lam) % q
    E1 = (E - D * lam) % q

    first = gauss_sum(p, m, A, D)
    second = gauss_sum(p, m, C1, E1)
    value = first.value * second.value
    magnitude_sq = first.exact_magnitude_sq * second.exact_magnitude_sq
    chi = int(magnitude_sq != 0)
    reduced_delta = delta // p ** k_g if delta else 0
    degenerate = reduced_delta % q == 0
    upsilon = _upsilon(p, m, delta, degenerate, unit)
    case = QuadCase(p, m, k_g, delta, degenerate, upsilon, chi, path)
    return ExpSumValue(value, magnitude_sq, "closed_form", (case,))


def quad_expsum(q: int, A: int, B: int, C: int, D: int, E: int) -> ExpSumValue:
    """
    S(q, A, B, C, D, E) = sum_{x, y mod q} e_q(A x^2 + B x y + C y^2 + D x + E y).

    Odd q is assembled from prime powers by CRT,
    S(q1 q2) = S(q1; q2 (A, B, C), D, E) * S(q2; q1 (A, B, C), D, E);
    even q is summed directly.
    """
    if q < 1:
        raise ValidationError(f"q must be positive, got {q}")
    if q == 1:
        return ExpSumValue(1 + 0j, Fraction(1))
    if q % 2 == 0:
        logger.debug("quad_expsum_even_modulus", q=q)
        return ExpSumValue(brute_quad(q, A, B, C, D, E), None, "brute_force")

    expsum_evaluations_total.labels(kind="quadratic", path="closed_form").inc()
    value = 1 + 0j
    magnitude_sq = Fraction(1)
    cases = []
    for p, m in sorted(factorint(q).items()):
        pm = p ** m
        rest = q // pm
        part = _quad_prime_power(p, m, rest * A, rest * B, rest * C, D, E)
        value *= part.value
        magnitude_sq *= part.exact_magnitude_sq
        cases.extend(part.cases)
    path = "closed_form" if len(cases) == 1 else "crt"
    return ExpSumValue(value, magnitude_sq, path, tuple(cases))


def kloosterman(a: int, b: int, p: int) -> ExpSumValue:
    """K(a, b; p) = sum_{x in (Z/p)^*} e_p(a x + b x^-1), by direct summation."""
    if p < 2:
        raise ValidationError(f"Modulus must be at least 2, got {p}")
    expsum_evaluations_total.labels(kind="kloosterman", path="brute_force").inc()
    x = np.array([x for x in range(1, p) if gcd(x, p) == 1], dtype=np.int64)
    inv = np.array([pow(int(v), -1, p) for v in x], dtype=np.int64)
    phase = ((a % p) * x + (b % p) * inv) % p
    return ExpSumValue(complex(np.sum(np.exp(TWO_PI_I * phase / p))), None, "brute_force")


def weil_bound(p: int) -> float:
    return 2.0 * float(np.sqrt(p))

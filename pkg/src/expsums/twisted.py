"""
Twisted sums over the shifted forms.

    S_gamma(q, u, r, xi, zeta) = q^-2 sum_{x0, y0 mod q} e_q(r f(L u x0 + u u*, L u y0) + x0 xi + y0 zeta)

S_gamma is evaluated in closed form by expanding the phase into a binary quadratic
polynomial in (x0, y0) and handing it to quad_expsum; the average
S = sum'_{r mod q} S_gamma * conj(S_gamma') is summed directly. Both come with
audits of the bounds they are expected to satisfy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, sqrt
from typing import Dict, Optional, Tuple

import numpy as np
from sympy import isprime

from src.config.logging import get_logger
from src.config.settings import get_settings
from src.core.exceptions import NotCoprime, ValidationError
from src.expsums.sums import TWO_PI_I, ExpSumValue, kloosterman, quad_expsum, weil_bound
from src.forms.shifted import ShiftedForm
from src.monitoring.metrics import expsum_evaluations_total

logger = get_logger(__name__)


@dataclass(frozen=True)
class BoundAudit:
    magnitude: float
    bound: float
    applicable: bool
    holds: bool

    def to_dict(self) -> Dict:
        return {
            "magnitude": self.magnitude,
            "bound": self.bound,
            "applicable": self.applicable,
            "holds": self.holds,
        }


@dataclass(frozen=True)
class AverageAudit:
    """
    Ratio of |S| to the shape of the bound for the applicable case; both
    carry implied constants, so the ratio is reported, never asserted.
    """
    case: str  # distinct_shifts, equal_shifts or diagonal
    magnitude: float
    scale: Optional[float]
    ratio: Optional[float]
    eps: float
    kloosterman: Optional[Dict] = None

    def to_dict(self) -> Dict:
        return {
            "case": self.case,
            "magnitude": self.magnitude,
            "scale": self.scale,
            "ratio": self.ratio,
            "eps": self.eps,
            "kloosterman": self.kloosterman,
        }


def _integral_coefficients(f: ShiftedForm) -> Tuple[int, int, int, int]:
    if any(c.denominator != 1 for c in f.key):
        raise ValidationError("Twisted sums need an integral form; normalize it first", {"form": f.to_dict()})
    return tuple(int(c) for c in f.key)


def _discriminant(f: ShiftedForm, Delta: Optional[int]) -> int:
    if Delta is not None:
        return Delta
    if f.provenance is not None:
        return f.provenance.field.Delta
    if f.shift == 0:
        raise ValidationError("Cannot read the field discriminant off a form with zero shift")
    ratio = f.discriminant / (f.shift * f.shift)
    return int(ratio)


def _unit_part(u: int, L: int) -> int:
    if L == 1:
        return 0
    if gcd(u, L) != 1:
        raise NotCoprime(u, L)
    return pow(u, -1, L)


def _twisted_sum(coeffs, q: int, u: int, r: int, xi: int, zeta: int, L: int) -> complex:
    A, B, C, shift = (c % q for c in coeffs)
    u_star = _unit_part(u, L)
    x0, y0 = np.meshgrid(np.arange(q, dtype=np.int64), np.arange(q, dtype=np.int64), indexing="ij")
    a = (L * u * x0 + u * u_star) % q
    c = (L * u * y0) % q
    f = (A * (a * a % q) + B * (a * c % q) + C * (c * c % q) + shift) % q
    phase = ((r % q) * f + (xi % q) * x0 + (zeta % q) * y0) % q
    expsum_evaluations_total.labels(kind="twisted", path="brute_force").inc()
    return complex(np.sum(np.exp(TWO_PI_I * phase / q))) / (q * q)


def twisted_coefficients(coeffs, q: int, u: int, r: int, xi: int, zeta: int, L: int) -> Tuple[int, ...]:
    """
    (A', B', C', D', E', K) mod q with
    r f(L u x0 + w, L u y0) + xi x0 + zeta y0 = A' x0^2 + B' x0 y0 + C' y0^2 + D' x0 + E' y0 + K,
    where w = u u* and u* inverts u mod L.
    """
    A, B, C, shift = coeffs
    w = u * _unit_part(u, L)
    m = L * u
    return (
        r * A * m * m % q,
        r * B * m * m % q,
        r * C * m * m % q,
        (2 * r * A * m * w + xi) % q,
        (r * B * m * w + zeta) % q,
        r * (A * w * w + shift) % q,
    )


def _twisted_closed(coeffs, q: int, u: int, r: int, xi: int, zeta: int, L: int) -> ExpSumValue:
    A, B, C, D, E, K = twisted_coefficients(coeffs, q, u, r, xi, zeta, L)
    inner = quad_expsum(q, A, B, C, D, E)
    expsum_evaluations_total.labels(kind="twisted", path=inner.path).inc()
    value = complex(np.exp(TWO_PI_I * K / q)) * inner.value / (q * q)
    magnitude_sq = None
    if inner.exact_magnitude_sq is not None:
        magnitude_sq = inner.exact_magnitude_sq / Fraction(q ** 4)
    return ExpSumValue(value, magnitude_sq, inner.path, inner.cases)


def s_gamma(
    f: ShiftedForm,
    q: int,
    u: int,
    r: int,
    xi: int,
    zeta: int,
    L: int,
    Delta: Optional[int] = None,
    closed: bool = True,
) -> Tuple[ExpSumValue, BoundAudit]:
    """
    S_gamma through quad_expsum, or by direct summation with closed=False. When
    gcd(r, q) = 1 the audit checks
    |S_gamma| <= sqrt|Delta| u^2 L^2 gcd(q, shift^2) / q, which carries no constant.
    """
    if q < 1 or u < 1 or L < 1:
        raise ValidationError(f"q, u and L must be positive, got {q}, {u}, {L}")
    coeffs = _integral_coefficients(f)
    if q == 1:
        result = ExpSumValue(1 + 0j, Fraction(1))
    elif closed:
        result = _twisted_closed(coeffs, q, u, r, xi, zeta, L)
    else:
        result = ExpSumValue(_twisted_sum(coeffs, q, u, r, xi, zeta, L), None, "brute_force")

    Delta = _discriminant(f, Delta)
    shift = coeffs[3]
    bound = sqrt(abs(Delta)) * u * u * L * L * gcd(q, shift * shift) / q
    applicable = gcd(r, q) == 1
    magnitude = abs(result)
    holds = (not applicable) or magnitude <= bound * (1 + 1e-9)
    if not holds:
        logger.error("twisted_sum_bound_violated", q=q, u=u, r=r, magnitude=magnitude, bound=bound)
    return result, BoundAudit(magnitude, bound, applicable, holds)


def _kloosterman_piece(
    f: ShiftedForm,
    g: ShiftedForm,
    p: int,
    u: int,
    L: int,
    Delta: int,
    xi: int,
    zeta: int,
    xi2: int,
    zeta2: int,
    magnitude: float,
) -> Optional[Dict]:
    """
    For a prime p prime to u L Delta d d', S = S1 * K(a, b; p) with |S1| = p^-2,
    a = d - d' and b = (f~(zeta, -xi)/d^2 - f~'(zeta', -xi')/d'^2) / (u^2 L^2 Delta).
    """
    (A, B, C, d), (A2, B2, C2, d2) = _integral_coefficients(f), _integral_coefficients(g)
    if not isprime(p) or any(v % p == 0 for v in (u, L, Delta, d, d2)):
        return None
    first = A * zeta * zeta - B * zeta * xi + C * xi * xi
    second = A2 * zeta2 * zeta2 - B2 * zeta2 * xi2 + C2 * xi2 * xi2
    scale = pow(u * u * L * L * Delta, -1, p)
    a = (d - d2) % p
    b = scale * (first * pow(d * d, -1, p) - second * pow(d2 * d2, -1, p)) % p
    piece = abs(kloosterman(a, b, p))
    weil = weil_bound(p)
    # K(0, 0; p) = p - 1 sits outside the bound
    if (a, b) != (0, 0) and piece > weil * (1 + 1e-9):
        raise ValidationError("Kloosterman sum above 2 sqrt(p)", {"p": p, "a": a, "b": b, "value": piece})
    return {
        "p": p,
        "a": a,
        "b": b,
        "magnitude": piece,
        "weil_bound": weil,
        "decomposition_matches": abs(magnitude * p * p - piece) <= 1e-6 * max(1.0, piece),
    }


def s_average(
    f: ShiftedForm,
    g: ShiftedForm,
    q: int,
    u: int,
    xi: int,
    zeta: int,
    xi2: int,
    zeta2: int,
    L: int,
    Delta: Optional[int] = None,
    eps: Optional[float] = None,
) -> Tuple[ExpSumValue, AverageAudit]:
    """
    sum over r mod q prime to q of S_gamma(r) * conj(S_gamma'(r)). At q = 1 the
    single residue r = 0 counts, giving 1.
    """
    if q < 1:
        raise ValidationError(f"q must be positive, got {q}")
    eps = get_settings().eps_audit if eps is None else eps
    cf, cg = _integral_coefficients(f), _integral_coefficients(g)
    Delta = _discriminant(f, Delta)

    total = 0j
    for r in range(q):
        if gcd(r, q) != 1:
            continue
        first = 1 + 0j if q == 1 else _twisted_sum(cf, q, u, r, xi, zeta, L)
        second = 1 + 0j if q == 1 else _twisted_sum(cg, q, u, r, xi2, zeta2, L)
        total += first * second.conjugate()

    d, d2 = cf[3], cg[3]
    value_f = cf[0] * zeta * zeta - cf[1] * zeta * xi + cf[2] * xi * xi + d
    value_g = cg[0] * zeta2 * zeta2 - cg[1] * zeta2 * xi2 + cg[2] * xi2 * xi2 + d2
    magnitude = abs(total)
    shape = u ** 4 * q ** (-1.25 + eps)
    if d != d2:
        case = "distinct_shifts"
        scale = shape * gcd(q, d - d2) ** 0.25 * gcd(q, d * d) ** 0.5 * gcd(q, d2 * d2) ** 0.5
    elif value_f != value_g:
        case = "equal_shifts"
        scale = shape * abs(value_f - value_g) ** 0.25 * gcd(q, d * d)
    else:
        case, scale = "diagonal", None
    ratio = magnitude / scale if scale else None

    piece = None
    if q > 2:
        piece = _kloosterman_piece(f, g, q, u, L, Delta, xi, zeta, xi2, zeta2, magnitude)
    audit = AverageAudit(case, magnitude, scale, ratio, eps, piece)
    logger.debug("twisted_average", q=q, case=case, magnitude=magnitude, ratio=ratio)
    return ExpSumValue(total, None, "brute_force"), audit

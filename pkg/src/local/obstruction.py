"""
Local obstruction modulus L0 and the admissible curvature classes.

For every candidate bad prime p the admissible sets A_k = {F1 mod p^k} are
computed up to a top level K. The level at which each A_{k+1} is the full
preimage of A_k from then on is the measured stabilization level k_p.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import reduce
from math import gcd, prod
from typing import Dict, FrozenSet, List, Optional

from sympy import factorint, primerange
from sympy.ntheory.modular import crt

from src.config.logging import get_logger
from src.config.settings import get_settings
from src.core.exceptions import BudgetExceeded, ValidationError
from src.local.rows import MAX_ROW_MODULUS, quadric_denominator, row_modulus, row_orbit
from src.monitoring.metrics import local_stage_duration_seconds, track_duration
from src.packing.orbit import enumerate_orbit, resolve_scale
from src.packing.spec import PackingSpec

logger = get_logger(__name__)

TOP_LEVEL = {2: 5, 3: 3}


@dataclass
class PrimeLevel:
    p: int
    k_p: int
    top_k: int
    stabilized: bool
    base_levels: List[int]
    sizes: List[List[int]]  # sizes[base][k] = |A_k|
    classes: List[List[FrozenSet[int]]] = dc_field(repr=False)  # classes[base][k]

    @property
    def level(self) -> int:
        return self.p ** self.k_p

    def admissible_mod(self, k: int) -> FrozenSet[int]:
        """Union over base circles of the classes mod p^k."""
        return frozenset().union(*(c[k] for c in self.classes))

    def to_dict(self) -> Dict:
        return {
            "p": self.p,
            "k_p": self.k_p,
            "level": self.level,
            "top_k": self.top_k,
            "stabilized": self.stabilized,
            "base_levels": self.base_levels,
            "sizes": self.sizes,
        }


@dataclass
class ObstructionReport:
    label: str
    levels: List[PrimeLevel]
    L0: int
    admissible_classes: FrozenSet[int]
    candidate_bad_primes: Dict[int, List[str]]
    crt_fallback: bool = False

    def is_admissible(self, n: int) -> bool:
        return n % self.L0 in self.admissible_classes

    def level_of(self, p: int) -> PrimeLevel:
        for level in self.levels:
            if level.p == p:
                return level
        raise ValidationError(f"{p} is not a candidate bad prime", {"candidates": sorted(self.candidate_bad_primes)})

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "L0": self.L0,
            "admissible_classes": sorted(self.admissible_classes),
            "candidate_bad_primes": {str(p): reasons for p, reasons in self.candidate_bad_primes.items()},
            "levels": [level.to_dict() for level in self.levels],
            "crt_fallback": self.crt_fallback,
        }


def candidate_bad_primes(spec: PackingSpec, p_max: int = 5) -> Dict[int, List[str]]:
    """Primes worth testing, each with the reasons it was included."""
    spec = resolve_scale(spec)
    reasons: Dict[int, List[str]] = {}

    def add(n: int, why: str):
        for p in factorint(abs(n)) if n else ():
            reasons.setdefault(p, []).append(why)

    add(2, "small")
    add(3, "small")
    add(spec.L, "congruence_level")
    curvatures = [abs(k) for k in enumerate_orbit(spec, 48).curvatures() if k]
    add(reduce(gcd, curvatures, 0), "curvature_gcd")
    add(spec.denominator_lcm(), "denominators")
    add(quadric_denominator(spec), "curvature_denominator")
    for p in primerange(2, p_max + 1):
        if p not in reasons:
            reasons[p] = ["tested"]
    return dict(sorted(reasons.items()))


def _estimate(spec: PackingSpec, q: int) -> int:
    return 2 * row_modulus(spec, q) ** 4


def _classes_per_base(spec: PackingSpec, p: int, K: int, budget: int) -> List[List[FrozenSet[int]]]:
    orbit = row_orbit(spec, row_modulus(spec, p ** K), budget)
    out = []
    for base in range(len(spec.bases)):
        per_k = []
        for k in range(K + 1):
            values = orbit.curvatures_mod(p ** k, base)
            per_k.append(frozenset(int(v) for v in set(values.tolist())))
        out.append(per_k)
    return out


def _stable_from(p: int, sizes: List[int]) -> int:
    """Least k with |A_{j+1}| = p |A_j| for every j in [k, K - 1]."""
    K = len(sizes) - 1
    k = K
    while k > 0 and sizes[k] == p * sizes[k - 1]:
        k -= 1
    return k


def _prime_level(spec: PackingSpec, p: int, k_max: Optional[int], budget: int) -> PrimeLevel:
    K = k_max if k_max is not None else TOP_LEVEL.get(p, 2)
    while K > 1 and (_estimate(spec, p ** K) > budget or row_modulus(spec, p ** K) > MAX_ROW_MODULUS):
        logger.warning("obstruction_level_lowered", label=spec.label, p=p, top_k=K - 1)
        K -= 1
    while True:
        try:
            classes = _classes_per_base(spec, p, K, budget)
            break
        except BudgetExceeded:
            if K <= 1:
                raise
            K -= 1
            logger.warning("obstruction_level_lowered", label=spec.label, p=p, top_k=K)

    sizes = [[len(c) for c in per_k] for per_k in classes]
    base_levels = [_stable_from(p, s) for s in sizes]
    k_p = max(base_levels)
    stabilized = k_p <= K - 1
    if not stabilized:
        logger.warning("no_stabilization", label=spec.label, p=p, top_k=K, sizes=sizes)
    return PrimeLevel(p, k_p, K, stabilized, base_levels, sizes, classes)


def _crt_classes(spec: PackingSpec, levels: List[PrimeLevel]) -> FrozenSet[int]:
    """Admissible classes mod L0 combined prime by prime within each base circle."""
    moduli = [lv.level for lv in levels if lv.k_p]
    admissible = set()
    for base in range(len(spec.bases)):
        choices: List[List[int]] = [[]]
        for lv in levels:
            if not lv.k_p:
                continue
            residues = sorted(lv.classes[base][lv.k_p])
            choices = [prev + [r] for prev in choices for r in residues]
        for residues in choices:
            value, _ = crt(moduli, residues)
            admissible.add(int(value))
    return frozenset(admissible)


@track_duration(local_stage_duration_seconds, stage="obstruction")
def obstruction_report(spec: PackingSpec, p_max: int = 5, k_max: Optional[int] = None) -> ObstructionReport:
    """L0 and the admissible classes modulo L0 for a packing."""
    if k_max is not None and k_max < 1:
        raise ValidationError(f"k_max must be positive, got {k_max}")
    spec = resolve_scale(spec)
    budget = spec.budget or get_settings().budget
    candidates = candidate_bad_primes(spec, p_max)
    levels = [_prime_level(spec, p, k_max, budget) for p in candidates]
    L0 = prod(lv.level for lv in levels)

    crt_fallback = False
    if L0 == 1:
        admissible = frozenset({0})
    elif _estimate(spec, L0) > budget or row_modulus(spec, L0) > MAX_ROW_MODULUS:
        crt_fallback = True
        logger.warning("obstruction_crt_fallback", label=spec.label, L0=L0)
        admissible = _crt_classes(spec, levels)
    else:
        orbit = row_orbit(spec, row_modulus(spec, L0), budget)
        admissible = frozenset(
            int(v) for base in range(len(spec.bases)) for v in set(orbit.curvatures_mod(L0, base).tolist())
        )

    report = ObstructionReport(spec.label, levels, L0, admissible, candidates, crt_fallback)
    logger.info(
        "obstruction_report",
        label=spec.label,
        L0=L0,
        admissible=len(admissible),
        primes=[lv.p for lv in levels],
    )
    return report

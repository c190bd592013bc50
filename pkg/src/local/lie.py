"""
Explicit strong-approximation audit: the exponent iota_p.

The Z-span of {g X g^-1 : g in a word ball, X in {H, R, L}} is a sublattice
of sl2(O_K), identified with Z^6 through the (1, omega) coordinates of the
entries A, B, C. The largest p-adic elementary divisor of the span bounds
iota_p from above; growing the ball can only lower the bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import lcm
from typing import Dict, List, Optional, Tuple

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import hermite_normal_form, invariant_factors

from src.arithmetic.ring import Mat2
from src.config.logging import get_logger
from src.config.settings import get_settings
from src.core.exceptions import RankDeficient, ValidationError
from src.expsums.sums import valuation
from src.monitoring.metrics import local_stage_duration_seconds, track_duration
from src.packing.spec import PackingSpec
from src.packing.words import word_ball

logger = get_logger(__name__)

BATCH = 64


@dataclass(frozen=True)
class IotaBound:
    p: int
    bound: int
    word_radius: int
    vectors: int
    invariant_factors: Tuple[int, ...]  # of the span scaled by `scale`
    scale: int

    def to_dict(self) -> Dict:
        return {
            "p": self.p,
            "bound": self.bound,
            "word_radius": self.word_radius,
            "vectors": self.vectors,
            "invariant_factors": [str(f) for f in self.invariant_factors],
            "scale": self.scale,
        }


def _basis_triple(field) -> Tuple[Mat2, ...]:
    H = Mat2.of(field, [[1, 0], [0, -1]])
    R = Mat2.of(field, [[0, 1], [0, 0]])
    L = Mat2.of(field, [[0, 0], [1, 0]])
    return H, R, L


def conjugate_vectors(spec: PackingSpec, word_radius: int) -> List[Tuple]:
    """Distinct sl2 coordinate vectors (A, B, C over (1, omega)) of g X g^-1."""
    generators = spec.integral_generators()
    ball = word_ball(generators, word_radius, budget=spec.budget, field=spec.field)
    triple = _basis_triple(spec.field)
    seen = set()
    vectors = []
    for word in ball:
        g = word.element
        g_inv = g.inverse()
        for X in triple:
            Y = g @ X @ g_inv
            v = tuple(c for e in (Y.A, Y.B, Y.C) for c in e.ok_coords())
            if v not in seen:
                seen.add(v)
                vectors.append(v)
    return vectors


def _bound_from(factors, p: int, shift: int) -> int:
    cap = 64 + shift
    return max(0, max(valuation(int(f), p, cap) for f in factors) - shift)


@track_duration(local_stage_duration_seconds, stage="iota")
def iota_bound(spec: PackingSpec, p: int, word_radius: int) -> IotaBound:
    if word_radius < 1:
        raise ValidationError(f"word_radius must be at least 1, got {word_radius}")
    if p < 2:
        raise ValidationError(f"p must be a prime, got {p}")

    vectors = conjugate_vectors(spec, word_radius)
    scale = reduce(lcm, (c.denominator for v in vectors for c in v), 1)
    columns = [[int(c * scale) for c in v] for v in vectors]
    shift = valuation(scale, p, 64)

    basis: Optional[Matrix] = None
    factors: Tuple[int, ...] = ()
    bound = None
    for start in range(0, len(columns), BATCH):
        block = Matrix(columns[start:start + BATCH]).T
        stacked = block if basis is None else Matrix.hstack(basis, block)
        basis = hermite_normal_form(stacked)
        if basis.cols < 6:
            continue
        factors = tuple(int(f) for f in invariant_factors(basis, domain=ZZ))
        bound = _bound_from(factors, p, shift)
        if bound == 0:
            logger.debug("iota_early_exit", label=spec.label, p=p, processed=start + BATCH)
            break

    rank = 0 if basis is None else basis.cols
    if rank < 6:
        raise RankDeficient(rank, {"label": spec.label, "word_radius": word_radius})
    result = IotaBound(p, bound, word_radius, len(vectors), factors, scale)
    logger.info("iota_bound", label=spec.label, p=p, bound=bound, word_radius=word_radius, vectors=len(vectors))
    return result


def iota(spec: PackingSpec, p: int, word_radius: Optional[int] = None) -> int:
    """Upper bound for iota_p from the word ball of the given radius."""
    radius = word_radius or get_settings().norm_ball_radius
    return iota_bound(spec, p, radius).bound

"""
Congruence quotients A/A(q) by breadth-first closure.

Residue matrices are stored as int64 rows of nine coordinates: the (1, omega)
coordinates of A, B, C, D followed by the reflection flag. Closure, keys and
generator permutations are all computed on whole arrays at once.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import gcd
from typing import Callable, List, Optional, Tuple

import numpy as np

from src.arithmetic.ring import Field, Mat2, ResidueRing, reduce_mod, sl2_order
from src.config.logging import get_logger
from src.config.settings import get_settings
from src.core.exceptions import BudgetExceeded, ValidationError
from src.monitoring.metrics import quotient_build_duration_seconds, quotient_size
from src.packing.spec import PackingSpec

logger = get_logger(__name__)

MAX_QUOTIENT_MODULUS = 200  # 2 * q^8 must fit in int64 keys


def orbit_closure(
    start: np.ndarray,
    act: Callable[[np.ndarray, int], np.ndarray],
    n_moves: int,
    encode: Callable[[np.ndarray], np.ndarray],
    budget: int,
    what: str,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Orbit of the start rows under the moves, as (rows, keys) sorted by key.
    Raises BudgetExceeded as soon as the orbit outgrows the budget.
    """
    visited = np.unique(encode(start))
    chunks = [start]
    frontier = start
    level = 0
    while len(frontier):
        candidates = np.concatenate([act(frontier, i) for i in range(n_moves)])
        keys, index = np.unique(encode(candidates), return_index=True)
        fresh = ~np.isin(keys, visited, assume_unique=True)
        frontier = candidates[index[fresh]]
        visited = np.union1d(visited, keys[fresh])
        if len(visited) > budget:
            raise BudgetExceeded(what, len(visited), budget)
        chunks.append(frontier)
        level += 1
        logger.debug("closure_level", what=what, level=level, frontier=len(frontier), size=len(visited))

    rows = np.concatenate(chunks)
    keys = encode(rows)
    order = np.argsort(keys, kind="stable")
    return rows[order], keys[order]


class MatrixRows:
    """Vectorized arithmetic on residue matrices stored as nine-column rows."""

    def __init__(self, ring: ResidueRing):
        self.ring = ring
        self.q = ring.q

    def row(self, m: Mat2) -> np.ndarray:
        r = reduce_mod(m, self.q)
        return np.array(r.key(), dtype=np.int64)

    def conj_row(self, row: np.ndarray) -> np.ndarray:
        out = row.copy()
        for j in range(4):
            out[..., 2 * j], out[..., 2 * j + 1] = self.ring.conj(row[..., 2 * j], row[..., 2 * j + 1])
        return out

    def _entry(self, X: np.ndarray, j: int):
        return X[:, 2 * j], X[:, 2 * j + 1]

    def _madd(self, x, y, z, w):
        # x*y + z*w
        p0, p1 = self.ring.mul(x[0], x[1], y[0], y[1])
        s0, s1 = self.ring.mul(z[0], z[1], w[0], w[1])
        return (p0 + s0) % self.q, (p1 + s1) % self.q

    def right_multiply(self, X: np.ndarray, g: np.ndarray, g_conj: np.ndarray) -> np.ndarray:
        """X @ g row by row; rows carrying the flag see conj(g)."""
        flag = X[:, 8]
        O = np.where(flag[:, None] == 1, g_conj[None, :8], g[None, :8])
        a, b, c, d = (self._entry(X, j) for j in range(4))
        oa, ob, oc, od = (self._entry(O, j) for j in range(4))
        out = np.empty_like(X)
        out[:, 0], out[:, 1] = self._madd(a, oa, b, oc)
        out[:, 2], out[:, 3] = self._madd(a, ob, b, od)
        out[:, 4], out[:, 5] = self._madd(c, oa, d, oc)
        out[:, 6], out[:, 7] = self._madd(c, ob, d, od)
        out[:, 8] = flag ^ g[8]
        return out

    def encode(self, X: np.ndarray) -> np.ndarray:
        key = np.zeros(len(X), dtype=np.int64)
        for j in range(8):
            key = key * self.q + X[:, j]
        return key * 2 + X[:, 8]

    def det(self, X: np.ndarray):
        a, b, c, d = (self._entry(X, j) for j in range(4))
        ad = self.ring.mul(a[0], a[1], d[0], d[1])
        bc = self.ring.mul(b[0], b[1], c[0], c[1])
        return (ad[0] - bc[0]) % self.q, (ad[1] - bc[1]) % self.q


@dataclass
class QuotientGroup:
    q: int
    label: str
    field: Field
    elements: np.ndarray  # (size, 9)
    keys: np.ndarray
    gen_maps: List[np.ndarray]
    generator_names: Tuple[str, ...]
    expected_order: int

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> int:
        if self.q == 1:
            return 0
        rows = MatrixRows(ResidueRing(self.field, self.q))
        return self.index_of(rows.row(Mat2.identity(self.field)))

    def index_of(self, row: np.ndarray) -> int:
        rows = MatrixRows(ResidueRing(self.field, self.q))
        key = rows.encode(np.asarray(row, dtype=np.int64)[None, :])[0]
        pos = int(np.searchsorted(self.keys, key))
        if pos >= len(self.keys) or self.keys[pos] != key:
            raise ValidationError("Matrix is not in the quotient", {"q": self.q})
        return pos

    @property
    def holomorphic_size(self) -> int:
        return int(np.count_nonzero(self.elements[:, 8] == 0))

    def inverse_maps(self) -> List[np.ndarray]:
        return [np.argsort(perm) for perm in self.gen_maps]

    def sl2_part(self) -> int:
        """Number of holomorphic elements of determinant 1."""
        if self.q == 1:
            return 1
        rows = MatrixRows(ResidueRing(self.field, self.q))
        d0, d1 = rows.det(self.elements)
        holo = self.elements[:, 8] == 0
        return int(np.count_nonzero(holo & (d0 == 1 % self.q) & (d1 == 0)))

    @property
    def surjective(self) -> bool:
        """Whether the determinant-1 part fills SL2(O_K/q)."""
        return self.sl2_part() == self.expected_order

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "label": self.label,
            "size": self.size,
            "sl2_order": self.expected_order,
            "surjective": self.surjective,
            "generators": list(self.generator_names),
        }


def quotient_group(spec: PackingSpec, q: int, budget: Optional[int] = None) -> QuotientGroup:
    """
    Closure of the integral-model generators modulo q. At q = 1 the quotient is
    trivial (the reflection flag is dropped).
    """
    if q < 1:
        raise ValidationError(f"q must be positive, got {q}")
    settings = get_settings()
    budget = budget or spec.budget or settings.budget
    field = spec.field
    expected = sl2_order(field, q)

    if q == 1:
        zero = np.zeros((1, 9), dtype=np.int64)
        maps = [np.zeros(1, dtype=np.int64) for _ in spec.generators]
        return QuotientGroup(1, spec.label, field, zero, np.zeros(1, dtype=np.int64), maps, spec.names, 1)

    if q > MAX_QUOTIENT_MODULUS:
        raise BudgetExceeded(f"Quotient modulo {q}", expected, budget)
    flagged = any(g.conj_flag for g in spec.generators)
    estimate = expected * (2 if flagged else 1)
    if estimate > budget:
        raise BudgetExceeded(f"Quotient modulo {q}", estimate, budget)

    rows = MatrixRows(ResidueRing(field, q))
    gens = [rows.row(g) for g in spec.integral_generators()]
    gens_conj = [rows.conj_row(g) for g in gens]

    def act(X: np.ndarray, i: int) -> np.ndarray:
        return rows.right_multiply(X, gens[i], gens_conj[i])

    start = time.time()
    identity = rows.row(Mat2.identity(field))[None, :]
    elements, keys = orbit_closure(identity, act, len(gens), rows.encode, budget, f"Quotient modulo {q}")

    gen_maps = []
    for i in range(len(gens)):
        image = rows.encode(act(elements, i))
        pos = np.searchsorted(keys, image)
        pos = np.minimum(pos, len(keys) - 1)
        if not np.array_equal(keys[pos], image) or len(np.unique(pos)) != len(pos):
            raise ValidationError("Generator does not permute the quotient", {"q": q, "generator": i})
        gen_maps.append(pos.astype(np.int64))

    elapsed = time.time() - start
    quotient_build_duration_seconds.labels(label=spec.label).observe(elapsed)
    quotient_size.labels(label=spec.label, modulus=str(q)).set(len(elements))
    group = QuotientGroup(q, spec.label, field, elements, keys, gen_maps, spec.names, expected)
    logger.info(
        "quotient_built",
        label=spec.label,
        q=q,
        size=group.size,
        sl2_order=expected,
        seconds=round(elapsed, 3),
    )
    return group


@dataclass
class MultiplicativityCheck:
    q1: int
    q2: int
    size_q1: int
    size_q2: int
    size_product: int

    @property
    def holds(self) -> bool:
        return self.size_product == self.size_q1 * self.size_q2

    def to_dict(self) -> dict:
        return {
            "q1": self.q1,
            "q2": self.q2,
            "sizes": [self.size_q1, self.size_q2, self.size_product],
            "holds": self.holds,
        }


def multiplicativity_check(spec: PackingSpec, q1: int, q2: int, budget: Optional[int] = None) -> MultiplicativityCheck:
    """|A/A(q1 q2)| against |A/A(q1)| * |A/A(q2)| for coprime moduli."""
    if gcd(q1, q2) != 1:
        raise ValidationError(f"Moduli {q1} and {q2} are not coprime")
    # reflections contribute one factor of 2 per quotient, so compare holomorphic parts
    sizes = [quotient_group(spec, q, budget).holomorphic_size for q in (q1, q2, q1 * q2)]
    check = MultiplicativityCheck(q1, q2, *sizes)
    if not check.holds:
        logger.warning("quotient_not_multiplicative", label=spec.label, q1=q1, q2=q2, sizes=sizes)
    return check

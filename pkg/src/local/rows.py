"""
Bottom-row orbits and the curvature polynomial F1.

For h in the integral model, the scaled curvature of h(C_i) depends only on
the bottom row rho of W*h (W = M * model) and on the reflection flag of h:

    F1 = s_i * (-1)^(f + f_i) * sigma * 2 * Im_b(conj(u) v),   (u, v) = rho * P_{i,f}

with P_{i,f} = conj^f(model^-1 k_i t). Written in the integer coordinates
x = (x0, x1, y0, y1) of e_W * rho over (1, omega), F1 = Q(x) / e for an
integral quadratic form Q. Rows are tracked modulo q * e_q, where e_q is the
part of e supported on the primes of q; that determines F1 modulo q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import lcm
from typing import Optional, Sequence, Tuple

import numpy as np
from sympy import factorint

from src.arithmetic.ring import Mat2, ResidueRing, reduce_mod
from src.config.logging import get_logger
from src.config.settings import get_settings
from src.core.exceptions import IntegralityError, ValidationError
from src.local.quotient import orbit_closure
from src.monitoring.metrics import row_orbit_states_total
from src.packing.spec import PackingSpec

logger = get_logger(__name__)

MAX_ROW_MODULUS = 40_000  # 2 * m^4 must fit in int64 keys


@dataclass(frozen=True)
class CurvatureQuadric:
    """F1 = Q(x) / denominator with Q(x) = sum_{i <= j} coefficients[i][j] x_i x_j."""
    coefficients: Tuple[Tuple[int, ...], ...]
    denominator: int

    def evaluate(self, x: Sequence[int]) -> Fraction:
        total = sum(
            self.coefficients[i][j] * x[i] * x[j] for i in range(4) for j in range(i, 4)
        )
        return Fraction(total, self.denominator)

    def numerator_mod(self, X: np.ndarray, modulus: int) -> np.ndarray:
        """Q(x) mod modulus for every row of X (columns x0, x1, y0, y1)."""
        out = np.zeros(len(X), dtype=np.int64)
        for i in range(4):
            for j in range(i, 4):
                c = self.coefficients[i][j] % modulus
                if c:
                    out = (out + (c * X[:, i] % modulus) * X[:, j]) % modulus
        return out


def _translation(spec: PackingSpec) -> Mat2:
    """t with t(R-hat) = R-hat + sqrt(Delta)/2."""
    field = spec.field
    shift = field.elem(0, 1) if field.t == 0 else field.elem(0, Fraction(1, 2))
    return Mat2(field.one, shift, field.zero, field.one)


def _row_scale(spec: PackingSpec) -> Tuple[int, Tuple[int, int, int, int]]:
    """(e_W, integer coordinates of e_W * bottom row of M * model)."""
    W = spec.M @ spec.conjugator
    coords = [c for e in (W.C, W.D) for c in e.ok_coords()]
    e_w = reduce(lcm, (c.denominator for c in coords), 1)
    return e_w, tuple(int(c * e_w) for c in coords)


def _raw_value(spec: PackingSpec, base: int, flag: int, x: Sequence[int], e_w: int) -> Fraction:
    field = spec.field
    b = spec.bases[base]
    P0 = spec.conjugator.inverse() @ b.transform @ _translation(spec)
    P = P0.conj_entries() if flag else P0
    rho1 = field.from_ok(Fraction(x[0], e_w), Fraction(x[1], e_w))
    rho2 = field.from_ok(Fraction(x[2], e_w), Fraction(x[3], e_w))
    u = rho1 * P.A + rho2 * P.C
    v = rho1 * P.B + rho2 * P.D
    sign = -1 if (flag ^ int(b.transform.conj_flag)) else 1
    return b.orientation * sign * spec.sigma * 2 * (u.conj() * v).b


@lru_cache(maxsize=256)
def curvature_quadric(spec: PackingSpec, base: int, flag: int) -> CurvatureQuadric:
    """Integral quadratic form of F1 for base circle `base` and reflection flag `flag`."""
    if spec.sigma is None:
        raise ValidationError("curvature_quadric needs a spec with a resolved scale")
    if not 0 <= base < len(spec.bases):
        raise ValidationError(f"No base circle {base}", {"bases": len(spec.bases)})
    e_w, _ = _row_scale(spec)
    unit = [[1 if k == i else 0 for k in range(4)] for i in range(4)]
    value = lambda x: _raw_value(spec, base, flag, x, e_w)  # noqa: E731

    coeffs = [[Fraction(0)] * 4 for _ in range(4)]
    diag = [value(unit[i]) for i in range(4)]
    for i in range(4):
        coeffs[i][i] = diag[i]
        for j in range(i + 1, 4):
            both = [unit[i][k] + unit[j][k] for k in range(4)]
            coeffs[i][j] = value(both) - diag[i] - diag[j]

    denominator = reduce(lcm, (c.denominator for row in coeffs for c in row), 1)
    integral = tuple(tuple(int(c * denominator) for c in row) for row in coeffs)
    return CurvatureQuadric(integral, denominator)


def quadric_denominator(spec: PackingSpec, bases: Optional[Sequence[int]] = None) -> int:
    bases = range(len(spec.bases)) if bases is None else bases
    return reduce(lcm, (curvature_quadric(spec, i, f).denominator for i in bases for f in (0, 1)), 1)


def _part_on(e: int, q: int) -> int:
    """Largest divisor of e supported on the primes of q."""
    part = 1
    for p, k in factorint(e).items():
        if q % p == 0:
            part *= p ** k
    return part


def row_modulus(spec: PackingSpec, q: int) -> int:
    return q * _part_on(quadric_denominator(spec), q)


@dataclass
class RowOrbit:
    """Orbit of (e_W * rho mod m, flag) under the integral generators; columns x0, x1, y0, y1, flag."""
    spec: PackingSpec
    modulus: int
    states: np.ndarray

    @property
    def size(self) -> int:
        return len(self.states)

    def twisted(self, w: Mat2) -> np.ndarray:
        """States moved by a fixed holomorphic integral-model matrix w."""
        ring = ResidueRing(self.spec.field, self.modulus)
        r = reduce_mod(w, self.modulus)
        g = [(e.x0, e.x1) for e in r.entries]
        gc = [ring.conj(*e) for e in g]
        return _act_rows(ring, self.states, g, gc, 0)

    def curvatures_mod(self, q: int, base: int = 0, states: Optional[np.ndarray] = None) -> np.ndarray:
        """F1 mod q of every state for the given base circle."""
        if self.modulus % q:
            raise ValidationError(f"Row modulus {self.modulus} does not cover q = {q}")
        states = self.states if states is None else states
        values = np.zeros(len(states), dtype=np.int64)
        for flag in (0, 1):
            mask = states[:, 4] == flag
            if not mask.any():
                continue
            quadric = curvature_quadric(self.spec, base, flag)
            e_q = _part_on(quadric.denominator, q)
            rest = quadric.denominator // e_q
            top = q * e_q
            if self.modulus % top:
                raise ValidationError(f"Row modulus {self.modulus} does not cover {top}")
            num = quadric.numerator_mod(states[mask], top)
            if np.any(num % e_q):
                raise IntegralityError(
                    "Curvature polynomial is not integral on the row orbit",
                    {"label": self.spec.label, "q": q, "base": base},
                )
            inv = pow(rest, -1, q) if q > 1 else 0
            values[mask] = (num // e_q) * inv % q if q > 1 else 0
        return values


def _act_rows(ring: ResidueRing, X: np.ndarray, g, g_conj, g_flag: int) -> np.ndarray:
    """(rho, f) -> (rho * conj^f(G), f xor flag(G))."""
    flag = X[:, 4]
    out = np.empty_like(X)
    picks = []
    for k in range(4):
        e0 = np.where(flag == 1, g_conj[k][0], g[k][0])
        e1 = np.where(flag == 1, g_conj[k][1], g[k][1])
        picks.append((e0, e1))
    ga, gb, gc, gd = picks
    x = (X[:, 0], X[:, 1])
    y = (X[:, 2], X[:, 3])
    q = ring.q
    p0, p1 = ring.mul(x[0], x[1], ga[0], ga[1])
    s0, s1 = ring.mul(y[0], y[1], gc[0], gc[1])
    out[:, 0], out[:, 1] = (p0 + s0) % q, (p1 + s1) % q
    p0, p1 = ring.mul(x[0], x[1], gb[0], gb[1])
    s0, s1 = ring.mul(y[0], y[1], gd[0], gd[1])
    out[:, 2], out[:, 3] = (p0 + s0) % q, (p1 + s1) % q
    out[:, 4] = flag ^ g_flag
    return out


def row_orbit(spec: PackingSpec, modulus: int, budget: Optional[int] = None) -> RowOrbit:
    """Breadth-first orbit of the starting bottom row modulo `modulus`."""
    if modulus < 1:
        raise ValidationError(f"Modulus must be positive, got {modulus}")
    if modulus > MAX_ROW_MODULUS:
        raise ValidationError(f"Row modulus {modulus} is too large")
    budget = budget or spec.budget or get_settings().budget
    ring = ResidueRing(spec.field, modulus)
    _, start_coords = _row_scale(spec)

    moves = []
    for G in spec.integral_generators():
        r = reduce_mod(G, modulus)
        g = [(e.x0, e.x1) for e in r.entries]
        moves.append((g, [ring.conj(*e) for e in g], int(G.conj_flag)))

    def act(X: np.ndarray, i: int) -> np.ndarray:
        g, gc, gf = moves[i]
        return _act_rows(ring, X, g, gc, gf)

    def encode(X: np.ndarray) -> np.ndarray:
        key = np.zeros(len(X), dtype=np.int64)
        for j in range(4):
            key = key * modulus + X[:, j]
        return key * 2 + X[:, 4]

    start = np.array([[c % modulus for c in start_coords] + [0]], dtype=np.int64)
    states, _ = orbit_closure(start, act, len(moves), encode, budget, f"Row orbit modulo {modulus}")
    row_orbit_states_total.labels(label=spec.label).inc(len(states))
    logger.info("row_orbit_built", label=spec.label, modulus=modulus, states=len(states))
    return RowOrbit(spec, modulus, states)


def check_against_circle(spec: PackingSpec, h: Mat2, base: int = 0) -> Tuple[Fraction, Fraction]:
    """
    (F1 through the quadric, sigma * curvature of h(C_i) computed geometrically)
    for an integral-model element h; the two agree.
    """
    from src.geometry.moebius import apply

    e_w, _ = _row_scale(spec)
    row = spec.M @ spec.conjugator @ h
    x = [int(c * e_w) for e in (row.C, row.D) for c in e.ok_coords()]
    quadric = curvature_quadric(spec, base, int(h.conj_flag))
    g = spec.M @ spec.conjugator @ h @ spec.conjugator.inverse()
    circle = apply(g, spec.bases[base].circle(spec.field))
    return quadric.evaluate(x), spec.sigma * circle.beta

"""
Circles and lines as exact Hermitian forms, and the extended Moebius action.

A circle is stored as H = sqrt(d) * [[beta, omega], [conj(omega), gamma]]
with beta, gamma rational and omega in K, i.e. the real locus of

    b|z|^2 + conj(w) z + w conj(z) + c = 0,   b = sqrt(d) beta, w = sqrt(d) omega, c = sqrt(d) gamma.

The interior is where the form is negative. A normalized circle has
d * (N(omega) - beta*gamma) = 1, so its signed curvature is b = beta*sqrt(d).
All curvatures below are returned as the rational coefficient of sqrt(d).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, isqrt, lcm
from typing import Optional, Tuple

from src.arithmetic.ring import Field, Mat2, QuadElem, field_of
from src.core.exceptions import ValidationError


@dataclass(frozen=True)
class Circle:
    d: int
    beta: Fraction
    omega: QuadElem
    gamma: Fraction
    normalized: bool = True

    @property
    def field(self) -> Field:
        return field_of(self.d)

    def discriminant(self) -> Fraction:
        """N(omega) - beta*gamma; positive for a real circle."""
        return self.omega.norm() - self.beta * self.gamma

    def coords(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.beta, self.omega.a, self.omega.b, self.gamma)

    @classmethod
    def from_coords(cls, d: int, coords, normalized: bool = True) -> "Circle":
        beta, wa, wb, gamma = coords
        return cls(d, beta, QuadElem(d, wa, wb), gamma, normalized)

    def is_line(self) -> bool:
        return self.beta == 0

    def is_horizontal_line(self) -> bool:
        return self.beta == 0 and self.omega.a == 0

    def reversed(self) -> "Circle":
        return Circle(self.d, -self.beta, -self.omega, -self.gamma, self.normalized)

    def center(self) -> Optional[Tuple[Fraction, Fraction]]:
        """Centre as (x, y/sqrt(d)); None for lines."""
        if self.beta == 0:
            return None
        c = -self.omega / self.beta
        return c.a, c.b

    def center_float(self) -> Optional[Tuple[float, float]]:
        ctr = self.center()
        if ctr is None:
            return None
        return float(ctr[0]), float(ctr[1]) * self.d ** 0.5

    def radius_float(self) -> Optional[float]:
        if self.beta == 0:
            return None
        return 1.0 / (abs(float(self.beta)) * self.d ** 0.5)

    def x_anchor(self) -> Optional[Fraction]:
        """Real part of the centre, or the x-intercept of a non-horizontal line."""
        if self.beta != 0:
            return -self.omega.a / self.beta
        if self.omega.a != 0:
            return -self.gamma / (2 * self.omega.a)
        return None

    def line_height(self) -> Optional[Fraction]:
        """Height (in units of sqrt(d)) of a horizontal line."""
        if not self.is_horizontal_line():
            return None
        return self.gamma / (-2 * self.d * self.omega.b)


def real_line(field: Field) -> Circle:
    """R-hat with interior the upper half-plane."""
    return Circle(field.d, Fraction(0), field.elem(0, Fraction(-1, field.d)), Fraction(0))


def horizontal_line(field: Field, height: Fraction, interior_above: bool = True) -> Circle:
    """Line Im z = height*sqrt(d)."""
    line = Circle(field.d, Fraction(0), field.elem(0, Fraction(-1, field.d)), 2 * Fraction(height))
    return line if interior_above else line.reversed()


def base_line(field: Field) -> Circle:
    """R-hat + sqrt(Delta)/2, interior above."""
    return horizontal_line(field, Fraction(1) if field.t == 0 else Fraction(1, 2))


def circle_from_center(field: Field, center: QuadElem, beta: Fraction) -> Circle:
    """Normalized circle with centre in K and curvature beta*sqrt(d)."""
    beta = Fraction(beta)
    if beta == 0:
        raise ValidationError("Use a line constructor for curvature 0")
    omega = -center * beta
    gamma = (omega.norm() - Fraction(1, field.d)) / beta
    return Circle(field.d, beta, omega, gamma)


def curvature_formula(g: Mat2) -> Fraction:
    """2 Im(conj(C) D) of a holomorphic g, as the coefficient of sqrt(d)."""
    if g.conj_flag:
        raise ValidationError("curvature_formula needs a holomorphic element")
    value = 2 * (g.C.conj() * g.D).b
    if g.is_integral():
        # integral g lands in sqrt(-Delta)*Z
        step = 2 if g.field.t == 0 else 1
        assert (value / step).denominator == 1, f"curvature {value} off the sqrt(-Delta) lattice"
    return value


def _hol_image(beta: Fraction, omega: QuadElem, gamma: Fraction, G: Mat2):
    # H' = G^* H G with G = [[p, r], [s, u]]
    p, r, s, u = G.A, G.B, G.C, G.D
    pb, sb, rb = p.conj(), s.conj(), r.conj()
    beta2 = beta * p.norm() + gamma * s.norm() + 2 * (pb * omega * s).a
    omega2 = pb * r * beta + sb * u * gamma + omega * pb * u + omega.conj() * sb * r
    gamma2 = beta * r.norm() + gamma * u.norm() + 2 * (rb * omega * u).a
    return beta2, omega2, gamma2


def _det_scale(g: Mat2) -> Fraction:
    nm = g.det.norm()
    root = Fraction(isqrt(nm.numerator), isqrt(nm.denominator))
    if root * root != nm:
        raise ValidationError("Moebius action needs |det| rational", {"det": str(g.det)})
    return root


def apply(g: Mat2, c: Circle) -> Circle:
    """Image of c under g; orientation follows the transformation law."""
    G = g.adjugate()
    omega = c.omega.conj() if g.conj_flag else c.omega
    beta2, omega2, gamma2 = _hol_image(c.beta, omega, c.gamma, G)
    scale = _det_scale(g)
    if scale != 1:
        beta2, omega2, gamma2 = beta2 / scale, omega2 / scale, gamma2 / scale
    image = Circle(c.d, beta2, omega2, gamma2, c.normalized)
    assert image.discriminant() > 0, "degenerate image"
    return image


def action_matrix(g: Mat2) -> Tuple[Tuple[Fraction, ...], ...]:
    """
    The Q-linear map (beta, omega.a, omega.b, gamma) -> image coordinates,
    as a 4x4 tuple of rows.
    """
    field = g.field
    basis = [
        (Fraction(1), field.zero, Fraction(0)),
        (Fraction(0), field.one, Fraction(0)),
        (Fraction(0), field.sqrt_neg_d, Fraction(0)),
        (Fraction(0), field.zero, Fraction(1)),
    ]
    G = g.adjugate()
    scale = _det_scale(g)
    cols = []
    for beta, omega, gamma in basis:
        if g.conj_flag:
            omega = omega.conj()
        b2, w2, c2 = _hol_image(beta, omega, gamma, G)
        cols.append((b2 / scale, w2.a / scale, w2.b / scale, c2 / scale))
    return tuple(tuple(cols[j][i] for j in range(4)) for i in range(4))


def apply_matrix(matrix, c: Circle) -> Circle:
    """apply() through a precomputed action_matrix."""
    v = c.coords()
    out = tuple(sum((row[j] * v[j] for j in range(4) if v[j]), Fraction(0)) for row in matrix)
    return Circle.from_coords(c.d, out, c.normalized)


def curvature(c: Circle) -> Fraction:
    """Signed curvature of a normalized circle, as the coefficient of sqrt(d)."""
    if not c.normalized:
        raise ValidationError("curvature needs a normalized circle")
    return c.beta


def canonical_key(c: Circle) -> Tuple[int, int, int, int]:
    """Primitive integer quadruple; scale-invariant for positive scalings, orientation-sensitive."""
    coords = c.coords()
    den = reduce(lcm, (x.denominator for x in coords), 1)
    ints = [int(x * den) for x in coords]
    g = reduce(gcd, (abs(x) for x in ints), 0) or 1
    return tuple(x // g for x in ints)

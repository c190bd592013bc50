"""
Packing specifications and circle-method parameters.

A PackingSpec bundles:
- the field and the group generators (closed under listed inverses)
- M, the element shifting the group before curvatures are read off
- the base circles C_i = s_i * k_i(R-hat + sqrt(Delta)/2)
- the congruence level L, the integral scaling and an optional translation period
- model, the conjugator to the integral model used for congruence quotients
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field as PydanticField, field_validator, model_validator

from src.arithmetic.ring import Field, Mat2, denominator_lcm
from src.core.exceptions import ValidationError
from src.geometry.moebius import Circle, apply, base_line


@dataclass(frozen=True)
class BaseCircle:
    """C_i = orientation * transform(R-hat + sqrt(Delta)/2)."""
    transform: Mat2
    orientation: int = 1  # +1 keeps the transported orientation

    def circle(self, field: Field) -> Circle:
        c = apply(self.transform, base_line(field))
        return c if self.orientation > 0 else c.reversed()


@dataclass(frozen=True)
class PackingSpec:
    field: Field
    generators: Tuple[Mat2, ...]
    M: Mat2
    bases: Tuple[BaseCircle, ...]
    L: int = 1
    scale: Optional[Fraction] = None  # s with scaled curvature = s*kappa/sqrt(-Delta); None = auto
    label: str = "custom"
    period: Optional[Fraction] = None
    model: Optional[Mat2] = None
    generator_names: Tuple[str, ...] = dc_field(default=())
    budget: Optional[int] = None
    word_cap: Optional[int] = None

    def __post_init__(self):
        if self.L < 1:
            raise ValidationError(f"L must be positive, got {self.L}")
        if not self.bases:
            raise ValidationError("A packing needs at least one base circle")
        for i, g in enumerate(self.generators):
            if g.det.norm() != 1:
                raise ValidationError(
                    f"Generator {i} has det {g.det}, expected a unit",
                    {"generator": i, "det": str(g.det)},
                )
            if g.field != self.field:
                raise ValidationError(f"Generator {i} lives over another field")
        if self.M.conj_flag:
            raise ValidationError("M must be holomorphic")
        if self.scale is not None and self.scale <= 0:
            raise ValidationError("scale must be positive")
        if self.period is not None and self.period <= 0:
            raise ValidationError("period must be positive")

    @property
    def names(self) -> Tuple[str, ...]:
        if self.generator_names:
            return self.generator_names
        return tuple(f"g{i}" for i in range(len(self.generators)))

    @property
    def conjugator(self) -> Mat2:
        return self.model if self.model is not None else Mat2.identity(self.field)

    @property
    def sigma(self) -> Optional[Fraction]:
        """Multiplier turning beta (the sqrt(d) coefficient) into the scaled curvature."""
        if self.scale is None:
            return None
        return self.scale / 2 if self.field.t == 0 else self.scale

    def scale_for_sigma(self, sigma: Fraction) -> Fraction:
        """The config scale s whose beta multiplier is sigma."""
        return sigma * 2 if self.field.t == 0 else sigma

    @property
    def form_factor(self) -> Optional[Fraction]:
        """Scaled curvature per unit of the shifted form f-tilde."""
        if self.scale is None:
            return None
        return self.scale

    def denominator_lcm(self) -> int:
        return denominator_lcm(self.generators)

    def integral_generators(self) -> Tuple[Mat2, ...]:
        """Generators conjugated into the integral model: model^-1 g model."""
        m = self.conjugator
        inv = m.inverse()
        return tuple(inv @ g @ m for g in self.generators)

    def base_circles(self) -> Tuple[Circle, ...]:
        return tuple(b.circle(self.field) for b in self.bases)

    def packing_generators(self) -> Tuple[Mat2, ...]:
        """Generators of M A M^-1, the group acting on the packing M A C_i."""
        inv = self.M.inverse()
        return tuple(self.M @ g @ inv for g in self.generators)

    def packing_circles(self) -> Tuple[Circle, ...]:
        return tuple(apply(self.M, c) for c in self.base_circles())

    def with_scale(self, scale: Fraction) -> "PackingSpec":
        return replace(self, scale=Fraction(scale))


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10 ** 9)
    raise ValueError(f"Cannot read {value!r} as a rational")


class CircleMethodParams(BaseModel):
    """Growing parameters N = T^2 X^2, T = T1*T2; J, K0, H are carried for reporting."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    T1: int = PydanticField(ge=1)
    T2: int = PydanticField(ge=1)
    X: int = PydanticField(ge=1)
    T: Optional[int] = None
    N: Optional[int] = None
    U: int = PydanticField(default=1, ge=1)
    Q0: int = PydanticField(default=2, ge=1)
    nu: Fraction = Fraction(1, 100)
    bump: str = "quartic"
    J: Optional[int] = None
    K0: Optional[int] = None
    H: Optional[int] = None

    @field_validator("nu", mode="before")
    @classmethod
    def _read_nu(cls, v):
        nu = _to_fraction(v)
        if nu <= 0:
            raise ValueError("nu must be positive")
        return nu

    @field_validator("bump")
    @classmethod
    def _known_bump(cls, v):
        if v != "quartic":
            raise ValueError(f"Unknown bump {v!r}")
        return v

    @model_validator(mode="after")
    def _growing_relations(self):
        if self.T is None:
            self.T = self.T1 * self.T2
        if self.N is None:
            self.N = self.T ** 2 * self.X ** 2
        if self.T != self.T1 * self.T2:
            raise ValueError(f"T = {self.T} but T1*T2 = {self.T1 * self.T2}")
        if self.N != self.T ** 2 * self.X ** 2:
            raise ValueError(f"N = {self.N} but T^2 X^2 = {self.T ** 2 * self.X ** 2}")
        return self

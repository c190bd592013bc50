"""
Pydantic schema for packing config files (schema version 1).

Rationals are JSON ints or "p/q" strings; a field entry is the pair [a, b]
meaning a + b*sqrt(-d).
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationError as PydanticValidationError, field_validator

from src.arithmetic.ring import Mat2, QuadElem, field_of
from src.config.logging import get_logger
from src.core.exceptions import KleinpackException, ParseError, ValidationError
from src.packing.spec import BaseCircle, PackingSpec

logger = get_logger(__name__)

SCHEMA_VERSION = 1

Rational = Union[int, str]
Entry = List[Rational]
MatrixRows = List[List[Entry]]


def _rational(value: Rational) -> Fraction:
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    try:
        return Fraction(value.strip())
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {value!r}")


def _dump_rational(x: Fraction) -> Rational:
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _check_rows(rows: MatrixRows) -> MatrixRows:
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise ValueError("a matrix is two rows of two entries")
    for row in rows:
        for entry in row:
            if len(entry) != 2:
                raise ValueError("an entry is a pair [a, b] for a + b*sqrt(-d)")
            for x in entry:
                _rational(x)
    return rows


class GeneratorConfig(BaseModel):
    """One generator: matrix rows and the reflection flag."""
    matrix: MatrixRows
    conj: bool = False
    name: Optional[str] = None

    @field_validator("matrix")
    @classmethod
    def _rows(cls, v):
        return _check_rows(v)


class BaseConfig(BaseModel):
    """A base circle orientation * transform(selector line)."""
    selector: Literal["default", "real_line"] = "default"
    transform: Optional[MatrixRows] = None
    conj: bool = False
    orientation: Literal[1, -1] = 1

    @field_validator("transform")
    @classmethod
    def _rows(cls, v):
        return v if v is None else _check_rows(v)


class BudgetConfig(BaseModel):
    budget: Optional[int] = Field(default=None, ge=1)
    word_cap: Optional[int] = Field(default=None, ge=1)


class PackingConfig(BaseModel):
    """On-disk form of a PackingSpec."""
    schema_version: Literal[1] = Field(default=SCHEMA_VERSION, alias="schema")
    d: int = Field(ge=1)
    generators: List[GeneratorConfig] = Field(default_factory=list)
    M: Optional[MatrixRows] = None
    model: Optional[MatrixRows] = None
    bases: List[BaseConfig] = Field(default_factory=lambda: [BaseConfig()])
    L: int = Field(default=1, ge=1)
    scale: Rational = "auto"
    period: Optional[Rational] = None
    label: str = "custom"
    budgets: BudgetConfig = Field(default_factory=BudgetConfig)

    model_config = {"populate_by_name": True}

    @field_validator("scale")
    @classmethod
    def _scale(cls, v):
        if v != "auto":
            _rational(v)
        return v

    @field_validator("period")
    @classmethod
    def _period(cls, v):
        if v is not None:
            _rational(v)
        return v

    @field_validator("M", "model")
    @classmethod
    def _matrices(cls, v):
        return v if v is None else _check_rows(v)


def _matrix(d: int, rows: MatrixRows, conj: bool = False) -> Mat2:
    field = field_of(d)
    return Mat2.of(
        field,
        [[field.elem(_rational(a), _rational(b)) for a, b in row] for row in rows],
        conj,
    )


def _dump_matrix(m: Mat2) -> MatrixRows:
    def pair(x: QuadElem) -> Entry:
        return [_dump_rational(x.a), _dump_rational(x.b)]

    return [[pair(m.A), pair(m.B)], [pair(m.C), pair(m.D)]]


def _real_line_shift(d: int) -> Mat2:
    """Translation carrying R-hat + sqrt(Delta)/2 back to R-hat."""
    field = field_of(d)
    height = field.sqrt_neg_d if field.t == 0 else field.sqrt_neg_d * Fraction(1, 2)
    return Mat2.of(field, [[1, -height], [0, 1]])


def to_spec(config: PackingConfig) -> PackingSpec:
    field = field_of(config.d)
    identity = Mat2.identity(field)
    bases = []
    for b in config.bases:
        transform = _matrix(config.d, b.transform, b.conj) if b.transform else identity
        if b.selector == "real_line":
            transform = transform @ _real_line_shift(config.d)
        bases.append(BaseCircle(transform, b.orientation))
    names = tuple(g.name or f"g{i}" for i, g in enumerate(config.generators))
    return PackingSpec(
        field=field,
        generators=tuple(_matrix(config.d, g.matrix, g.conj) for g in config.generators),
        M=_matrix(config.d, config.M) if config.M else identity,
        bases=tuple(bases),
        L=config.L,
        scale=None if config.scale == "auto" else _rational(config.scale),
        label=config.label,
        period=None if config.period is None else _rational(config.period),
        model=_matrix(config.d, config.model) if config.model else None,
        generator_names=names if any(g.name for g in config.generators) else (),
        budget=config.budgets.budget,
        word_cap=config.budgets.word_cap,
    )


def from_spec(spec: PackingSpec) -> PackingConfig:
    names = spec.generator_names
    return PackingConfig(
        schema=SCHEMA_VERSION,
        d=spec.field.d,
        generators=[
            GeneratorConfig(matrix=_dump_matrix(g), conj=g.conj_flag, name=names[i] if names else None)
            for i, g in enumerate(spec.generators)
        ],
        M=_dump_matrix(spec.M),
        model=_dump_matrix(spec.model) if spec.model is not None else None,
        bases=[
            BaseConfig(transform=_dump_matrix(b.transform), conj=b.transform.conj_flag, orientation=b.orientation)
            for b in spec.bases
        ],
        L=spec.L,
        scale="auto" if spec.scale is None else _dump_rational(spec.scale),
        period=None if spec.period is None else _dump_rational(spec.period),
        label=spec.label,
        budgets=BudgetConfig(budget=spec.budget, word_cap=spec.word_cap),
    )


def parse_config(text: str, source: str = "<string>") -> PackingSpec:
    """Parse config text; JSON errors carry line and column, schema errors the field path."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: {exc.msg}", exc.lineno, exc.colno) from exc
    try:
        config = PackingConfig.model_validate(raw)
    except PydanticValidationError as exc:
        first = exc.errors()[0]
        field_path = ".".join(str(p) for p in first["loc"])
        raise ParseError(
            f"{source}: {field_path}: {first['msg']}",
            details={"errors": [{"loc": list(map(str, e["loc"])), "msg": e["msg"]} for e in exc.errors()]},
        ) from exc
    try:
        spec = to_spec(config)
    except KleinpackException:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"{source}: {exc}") from exc
    logger.info("config_loaded", source=source, label=spec.label, generators=len(spec.generators))
    return spec


def load_config(path: Union[str, Path]) -> PackingSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"Cannot read {path}: {exc.strerror}") from exc
    return parse_config(text, str(path))


def dump_config(spec: PackingSpec) -> str:
    data = from_spec(spec).model_dump(by_alias=True, exclude_none=True)
    return json.dumps(data, indent=2, sort_keys=True) + "\n"

"""
Built-in packings and the exact identities their generator data must satisfy.

- kapollonian(d): <S, T, V0> with V0 = V S T^-1 S V, on R-hat + sqrt(Delta)/2
- cuboctahedral(): the fourteen reflections of the cuboctahedral packing over Q(sqrt(-6))
- apollonian(): kapollonian(1)
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Set, Tuple

from src.arithmetic.ring import Field, Mat2, field_of
from src.config.logging import get_logger
from src.core.exceptions import PresetCorrupted, ValidationError
from src.geometry.moebius import Circle, apply, base_line, canonical_key
from src.packing.spec import BaseCircle, PackingSpec

logger = get_logger(__name__)

PRESETS = ("apollonian", "kapollonian", "cuboctahedral")
CUBOCT_BASES = 12
CUBOCT_BASE_CURVATURES = (0, 0, 1, 2, 2, 3, 3, 4, 4, 5, 6, 6)


def tau(field: Field) -> "QuadElem":  # noqa: F821
    """sqrt(-d) when Delta = 0 mod 4, (1 + sqrt(-d))/2 otherwise."""
    return field.omega


def unipotents(field: Field) -> Tuple[Mat2, Mat2]:
    """L = [[1, 1], [0, 1]] and R = [[1, 0], [1, 1]]."""
    return Mat2.of(field, [[1, 1], [0, 1]]), Mat2.of(field, [[1, 0], [1, 1]])


def kapollonian_matrices(field: Field) -> Dict[str, Mat2]:
    t = tau(field)
    return {
        "S": Mat2.of(field, [[0, 1], [-1, 0]]),
        "T": Mat2.of(field, [[1, 1], [0, 1]]),
        "V": Mat2.of(field, [[-1, t], [0, 1]]),
        "V0": Mat2.of(field, [[t - 1, -(t * t)], [1, -t - 1]]),
    }


@lru_cache(maxsize=16)
def kapollonian(d: int, L: int = 2) -> PackingSpec:
    field = field_of(d)
    m = kapollonian_matrices(field)
    S, T, V0 = m["S"], m["T"], m["V0"]
    generators = (S, T, T.inverse(), V0, V0.inverse())
    return PackingSpec(
        field=field,
        generators=generators,
        M=Mat2.identity(field),
        bases=(BaseCircle(Mat2.identity(field)),),
        L=L,
        scale=Fraction(1),
        label=f"kapollonian({d})",
        period=Fraction(1),
        generator_names=("S", "T", "T^-1", "V0", "V0^-1"),
    )


def apollonian() -> PackingSpec:
    from dataclasses import replace

    return replace(kapollonian(1), label="apollonian")


def cuboct_field() -> Field:
    return field_of(6)


def cuboct_reflections(field: Optional[Field] = None) -> Dict[str, Mat2]:
    """a1..a4 and c1..c3, all anti-holomorphic."""
    field = field or cuboct_field()
    s = field.sqrt_neg_d
    return {
        "a1": Mat2.of(field, [[-1, 0], [0, 1]], True),
        "a2": Mat2.of(field, [[-1, 6], [0, 1]], True),
        "a3": Mat2.of(field, [[1, 0], [1, -1]], True),
        "a4": Mat2.of(field, [[5, -12], [2, -5]], True),
        "c1": Mat2.of(field, [[1, s], [0, 1]], True),
        "c2": Mat2.of(field, [[1, 0], [s * Fraction(-1, 6), 1]], True),
        # mirror |z - 3 - sqrt(-6)/2| = sqrt(6)/2, tangent to R-hat at 3 and to R-hat + sqrt(-6)
        # at 3 + sqrt(-6); with c1 and c2 it generates a finite (2, 3, 3) reflection group
        "c3": Mat2.of(field, [[1 - s, s * 3], [s * Fraction(-1, 3), 1 + s]], True),
    }


# each word is read left to right as a product of a's and c's
CUBOCT_WORDS = (
    "a1",
    "a2",
    "a3",
    "a4",
    "c1 a3 c1",
    "c1 a4 c1",
    "c2 a4 c2",
    "c3 a3 c3",
    "c1 c3 a3 c3 c1",
    "c3 a1 c3",
    "c3 c2 a4 c2 c3",
    "c2 c3 a3 c3 c2",
    "c2 c3 a1 c3 c2",
    "c1 c2 c3 a1 c3 c2 c1",
)


def _word(letters: Dict[str, Mat2], word: str) -> Mat2:
    parts = word.split()
    result = letters[parts[0]]
    for name in parts[1:]:
        result = result @ letters[name]
    return result


def _symmetry_bases(field: Field, symmetries: List[Mat2], cap: int = 24) -> Tuple[BaseCircle, ...]:
    """
    Orbit of R-hat + sqrt(Delta)/2 under the symmetries, each image oriented to
    curvature >= 0. The symmetries generate a group of order cap, which bounds the orbit.
    """
    start = base_line(field)
    seen: Set[Tuple] = {canonical_key(start)}
    bases = [BaseCircle(Mat2.identity(field))]
    frontier: List[Mat2] = [Mat2.identity(field)]
    while frontier:
        nxt = []
        for k in frontier:
            for c in symmetries:
                k2 = c @ k
                image: Circle = apply(k2, start)
                orientation = -1 if image.beta < 0 else 1
                key = canonical_key(image if orientation > 0 else image.reversed())
                if key in seen:
                    continue
                seen.add(key)
                bases.append(BaseCircle(k2, orientation))
                nxt.append(k2)
        if len(bases) > cap:
            raise PresetCorrupted([f"symmetry orbit exceeds {cap} circles"])
        frontier = nxt
    return tuple(bases)


@lru_cache(maxsize=1)
def cuboctahedral() -> PackingSpec:
    field = cuboct_field()
    letters = cuboct_reflections(field)
    generators = tuple(_word(letters, w) for w in CUBOCT_WORDS)
    bases = _symmetry_bases(field, [letters["c1"], letters["c2"], letters["c3"]])
    return PackingSpec(
        field=field,
        generators=generators,
        M=Mat2.identity(field),
        bases=bases,
        L=6,
        scale=Fraction(6),
        label="cuboctahedral",
        period=Fraction(6),
        model=Mat2.of(field, [[field.sqrt_neg_d, 0], [0, 1]]),
        generator_names=tuple(w.replace(" ", "") for w in CUBOCT_WORDS),
    )


def preset(name: str, d: Optional[int] = None) -> PackingSpec:
    if name == "apollonian":
        return apollonian()
    if name == "kapollonian":
        return kapollonian(d or 1)
    if name == "cuboctahedral":
        return cuboctahedral()
    raise ValidationError(f"Unknown preset {name!r}", {"presets": list(PRESETS)})


def cuboct_identity_checks(letters: Optional[Dict[str, Mat2]] = None) -> Dict[str, bool]:
    """The four words in a1..a4 that produce the generators of Gamma(6)."""
    letters = letters or cuboct_reflections()
    field = letters["a1"].field
    a1, a2, a3, a4 = (letters[k] for k in ("a1", "a2", "a3", "a4"))
    L, R = unipotents(field)
    A12, A13, A14 = a1 @ a2, a1 @ a3, a1 @ a4
    return {
        "(a1a2)^-1 = L^6": A12.inverse().projectively_equal(L.power(6)),
        "(a1a3)^-6 = R^6": A13.power(-6).projectively_equal(R.power(6)),
        "(a1a4)^-1(a1a3)^4 = L^2R^3L^-2R^-3": (A14.inverse() @ A13.power(4)).projectively_equal(
            L.power(2) @ R.power(3) @ L.power(-2) @ R.power(-3)
        ),
        "(a1a2)^-1a1a4(a1a3)^2 = L^3R^2L^-3R^-2": (A12.inverse() @ a1 @ a4 @ A13.power(2)).projectively_equal(
            L.power(3) @ R.power(2) @ L.power(-3) @ R.power(-2)
        ),
    }


def kapollonian_identity_check(field: Field) -> bool:
    """V S T^-1 S V equals the closed form of V0."""
    m = kapollonian_matrices(field)
    S, T, V = m["S"], m["T"], m["V"]
    return V @ S @ T.inverse() @ S @ V == m["V0"]


def cuboct_symmetry_checks(letters: Optional[Dict[str, Mat2]] = None) -> Dict[str, bool]:
    """Coxeter relations of c1, c2, c3: (c1c3)^2 = (c1c2)^3 = (c2c3)^3 = 1."""
    letters = letters or cuboct_reflections()
    identity = Mat2.identity(letters["c1"].field)
    c1, c2, c3 = (letters[k] for k in ("c1", "c2", "c3"))
    return {
        "(c1c3)^2 = 1": (c1 @ c3).power(2).projectively_equal(identity),
        "(c1c2)^3 = 1": (c1 @ c2).power(3).projectively_equal(identity),
        "(c2c3)^3 = 1": (c2 @ c3).power(3).projectively_equal(identity),
    }


def cuboct_base_curvatures(spec: PackingSpec) -> List[int]:
    """Sorted scaled curvatures of the base circles."""
    return sorted(int(spec.sigma * c.beta) for c in spec.packing_circles())


@dataclass
class PresetVerification:
    checks: Dict[str, bool] = dc_field(default_factory=dict)

    @property
    def failures(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict:
        return {"passed": self.passed, "checks": self.checks}


def verify_presets(ds: Tuple[int, ...] = (1, 2, 3), strict: bool = True) -> PresetVerification:
    """Exact identity checks on the preset data; any failure raises PresetCorrupted when strict."""
    report = PresetVerification()
    report.checks.update(cuboct_identity_checks())
    spec = cuboctahedral()
    letters = cuboct_reflections(spec.field)
    listed = set(spec.generators)
    report.checks["a1..a4 among the fourteen reflections"] = all(
        letters[k] in listed for k in ("a1", "a2", "a3", "a4")
    )
    report.checks["fourteen reflections"] = len(spec.generators) == 14 and all(g.conj_flag for g in spec.generators)
    report.checks[f"{CUBOCT_BASES} cuboctahedral base circles"] = len(spec.bases) == CUBOCT_BASES
    report.checks["cuboctahedral base curvatures"] = cuboct_base_curvatures(spec) == list(CUBOCT_BASE_CURVATURES)
    report.checks.update(cuboct_symmetry_checks(letters))
    for d in ds:
        report.checks[f"V0 = VST^-1SV (d = {d})"] = kapollonian_identity_check(field_of(d))
    logger.info("presets_verified", passed=report.passed, failures=report.failures)
    if strict and not report.passed:
        raise PresetCorrupted(report.failures)
    return report


def descartes_strip_curvatures(kmax: int) -> List[int]:
    """
    Curvatures <= kmax of the Apollonian strip packing with root quadruple
    (0, 0, 1, 1), by swapping a_i -> 2(a_j + a_k + a_l) - a_i upward.
    """
    if kmax < 0:
        raise ValidationError(f"kmax must be nonnegative, got {kmax}")
    root = (0, 0, 1, 1)
    found = {k for k in root if k <= kmax}
    seen = {root}
    stack = [root]
    while stack:
        quad = stack.pop()
        total = sum(quad)
        top = max(quad)
        for i, a in enumerate(quad):
            new = 2 * (total - a) - a
            if new < top or new > kmax:
                continue
            child = tuple(sorted(quad[:i] + (new,) + quad[i + 1:]))
            if child in seen:
                continue
            seen.add(child)
            found.add(new)
            stack.append(child)
    return sorted(found)

"""
Orbit enumeration of a packing below a curvature bound.

Breadth-first search from the base circles. When the PackingSpec carries a
translation period P, circles are reduced so that their centre (or the
x-intercept of a non-horizontal line) lies in [0, P), and generators that
move infinity are applied to all translates whose image can still fall
under the bound. A branch is pruned when the image curvature exceeds both
the bound and the parent's curvature.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import floor, gcd, lcm
from typing import Dict, Iterator, List, Optional, Tuple

from src.config.logging import get_logger
from src.config.settings import get_settings
from src.core.exceptions import IntegralityError
from src.geometry.moebius import Circle, action_matrix, apply_matrix, canonical_key
from src.monitoring.metrics import orbit_circles_total, orbit_enumeration_duration_seconds
from src.packing.spec import PackingSpec

logger = get_logger(__name__)


@dataclass(frozen=True)
class OrbitCircle:
    key: Tuple[int, int, int, int]
    circle: Circle
    curvature: int  # scaled
    depth: int

    def to_dict(self) -> Dict:
        ctr = self.circle.center_float()
        return {
            "key": list(self.key),
            "curvature": self.curvature,
            "center": list(ctr) if ctr else None,
            "radius": self.circle.radius_float(),
            "depth": self.depth,
        }


@dataclass
class OrbitResult:
    circles: List[OrbitCircle]
    complete_to: Optional[int]
    word_cap: int
    certified: bool
    depth_reached: int
    sigma: Fraction
    period: Optional[Fraction] = None
    label: str = ""
    incomplete_scans: int = 0

    def curvatures(self) -> List[int]:
        return sorted({c.curvature for c in self.circles})

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "complete_to": self.complete_to,
            "certified": self.certified,
            "word_cap": self.word_cap,
            "depth_reached": self.depth_reached,
            "sigma": str(self.sigma),
            "period": str(self.period) if self.period is not None else None,
            "circles": [c.to_dict() for c in self.circles],
        }


def translate(c: Circle, t: Fraction) -> Circle:
    """c moved by the real translation z -> z + t."""
    if t == 0:
        return c
    beta, wa, wb, gamma = c.coords()
    return Circle.from_coords(
        c.d,
        (beta, wa - beta * t, wb, gamma - 2 * t * wa + beta * t * t),
        c.normalized,
    )


def reduce_by_period(c: Circle, period: Optional[Fraction]) -> Circle:
    if period is None:
        return c
    x = c.x_anchor()
    if x is None:
        return c
    k = floor(x / period)
    return translate(c, -k * period)


class _Enumerator:
    def __init__(
        self,
        spec: PackingSpec,
        sigma: Fraction,
        kappa_max: int,
        max_translates: int,
        check_integral: bool = True,
    ):
        self.spec = spec
        self.sigma = sigma
        self.kappa_max = kappa_max
        self.period = spec.period
        self.max_translates = max_translates
        self.moves = [(action_matrix(g), not g.C.is_zero()) for g in spec.packing_generators()]
        self.incomplete_scans = 0
        self.check_integral = check_integral

    def scaled(self, c: Circle) -> Fraction:
        return self.sigma * c.beta

    def images(self, c: Circle, matrix, moves_infinity: bool, bound: Fraction) -> Iterator[Circle]:
        yield apply_matrix(matrix, c)
        if self.period is None or not moves_infinity or c.is_horizontal_line():
            return
        for direction in (1, -1):
            previous = abs(self.scaled(apply_matrix(matrix, c)))
            for m in range(1, self.max_translates + 1):
                image = apply_matrix(matrix, translate(c, direction * m * self.period))
                k = abs(self.scaled(image))
                yield image
                if k > bound and k >= previous:
                    break
                previous = k
            else:
                self.incomplete_scans += 1

    def run(self, depth_limit: int) -> Tuple[Dict[Tuple, OrbitCircle], int, bool]:
        visited: Dict[Tuple, OrbitCircle] = {}
        frontier: List[Circle] = []
        for base in self.spec.packing_circles():
            base = reduce_by_period(base, self.period)
            key = canonical_key(base)
            if key not in visited:
                visited[key] = OrbitCircle(key, base, self._integral(base), 0)
                frontier.append(base)

        depth = 0
        while frontier and depth < depth_limit:
            nxt: List[Circle] = []
            for parent in frontier:
                parent_k = abs(self.scaled(parent))
                bound = max(Fraction(self.kappa_max), parent_k)
                for matrix, moves_infinity in self.moves:
                    for image in self.images(parent, matrix, moves_infinity, bound):
                        k = abs(self.scaled(image))
                        if k > self.kappa_max and k > parent_k:
                            continue
                        image = reduce_by_period(image, self.period)
                        key = canonical_key(image)
                        if key in visited:
                            continue
                        visited[key] = OrbitCircle(key, image, self._integral(image), depth + 1)
                        nxt.append(image)
            depth += 1
            frontier = sorted(nxt, key=canonical_key)
            logger.debug("orbit_level", depth=depth, frontier=len(frontier), visited=len(visited))
        return visited, depth, not frontier

    def _integral(self, c: Circle) -> int:
        k = self.scaled(c)
        if not self.check_integral:
            return 0
        if k.denominator != 1:
            raise IntegralityError(
                f"Scaled curvature {k} is not an integer",
                {"label": self.spec.label, "circle": [str(x) for x in c.coords()]},
            )
        return int(k)


def detect_sigma(spec: PackingSpec, sample_size: Optional[int] = None) -> Fraction:
    """Smallest beta multiplier making a sample of orbit curvatures coprime integers."""
    sample_size = sample_size or get_settings().sample_size
    betas: List[Fraction] = []
    bound = 8
    for _ in range(12):
        # raw enumeration with beta itself as the "scaled" curvature
        enum = _Enumerator(spec, Fraction(1), bound, get_settings().max_translates, check_integral=False)
        visited, _, _ = enum.run(get_settings().word_cap)
        betas = [oc.circle.beta for oc in visited.values() if oc.circle.beta != 0]
        if len(betas) >= sample_size:
            break
        bound *= 2
    if not betas:
        return Fraction(1)
    den = reduce(lcm, (b.denominator for b in betas), 1)
    num = reduce(gcd, (abs(int(b * den)) for b in betas), 0)
    sigma = Fraction(den, num)
    logger.info("scale_detected", label=spec.label, sigma=str(sigma), sample=len(betas))
    return sigma


def enumerate_orbit(
    spec: PackingSpec,
    kappa_max: int,
    word_cap: Optional[int] = None,
) -> OrbitResult:
    """
    Every orbit circle with scaled |curvature| <= kappa_max, sorted by key.
    The result is certified when exploring two more levels past word_cap
    finds nothing new below the bound.
    """
    settings = get_settings()
    word_cap = word_cap or spec.word_cap or settings.word_cap
    sigma = spec.sigma if spec.sigma is not None else detect_sigma(spec)

    with orbit_enumeration_duration_seconds.labels(label=spec.label).time():
        enum = _Enumerator(spec, sigma, kappa_max, settings.max_translates)
        visited, depth, exhausted = enum.run(word_cap + 2)

    reported = [oc for oc in visited.values() if abs(oc.curvature) <= kappa_max]
    late = [oc for oc in reported if oc.depth > word_cap]
    certified = (exhausted or not late) and enum.incomplete_scans == 0
    if not certified:
        logger.warning(
            "orbit_not_certified",
            label=spec.label,
            word_cap=word_cap,
            late_circles=len(late),
            incomplete_scans=enum.incomplete_scans,
        )

    circles = sorted(reported, key=lambda oc: oc.key)
    orbit_circles_total.labels(label=spec.label).inc(len(circles))
    logger.info(
        "orbit_enumerated",
        label=spec.label,
        kappa_max=kappa_max,
        circles=len(circles),
        depth=depth,
        certified=certified,
    )
    return OrbitResult(
        circles=circles,
        complete_to=kappa_max if certified else None,
        word_cap=word_cap,
        certified=certified,
        depth_reached=depth,
        sigma=sigma,
        period=spec.period,
        label=spec.label,
        incomplete_scans=enum.incomplete_scans,
    )


def curvature_set(spec: PackingSpec, N: int, word_cap: Optional[int] = None) -> List[int]:
    """Distinct scaled curvatures in [0, N]."""
    orbit = enumerate_orbit(spec, N, word_cap)
    if not orbit.certified:
        logger.warning("curvature_set_uncertified", label=spec.label, N=N)
    return [k for k in orbit.curvatures() if 0 <= k <= N]


def resolve_scale(spec: PackingSpec) -> PackingSpec:
    """The packing with an explicit scale, detecting it from the orbit when unset."""
    if spec.scale is not None:
        return spec
    return spec.with_scale(spec.scale_for_sigma(detect_sigma(spec)))

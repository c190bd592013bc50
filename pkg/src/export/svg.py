"""
SVG rendering of an enumerated orbit inside the strip [x0, x1] x [0, height].

Output is a pure function of its inputs: elements are ordered by
(curvature, key) and every number is printed with fixed precision.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from src.config.logging import get_logger
from src.geometry.moebius import Circle
from src.packing.orbit import OrbitCircle, OrbitResult, translate

logger = get_logger(__name__)

MIN_LABEL_RADIUS_PX = 6.0


@dataclass(frozen=True)
class Viewport:
    x0: float = 0.0
    x1: float = 1.0
    height: float = 1.0
    scale: float = 400.0  # pixels per unit

    @property
    def width_px(self) -> float:
        return (self.x1 - self.x0) * self.scale

    @property
    def height_px(self) -> float:
        return self.height * self.scale

    def px(self, x: float, y: float) -> Tuple[float, float]:
        return (x - self.x0) * self.scale, (self.height - y) * self.scale


def _fmt(x: float) -> str:
    text = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def _line_endpoints(c: Circle, view: Viewport) -> Optional[Tuple[float, float, float, float]]:
    """Clip the line u x + v y = -gamma/2 to the viewport strip."""
    u, v = float(c.omega.a), float(c.omega.b) * c.d ** 0.5
    rhs = -float(c.gamma) / 2
    if abs(u) < 1e-15:
        y = rhs / v
        return (view.x0, y, view.x1, y) if 0 <= y <= view.height else None
    xa, xb = rhs / u, (rhs - v * view.height) / u
    if max(xa, xb) < view.x0 or min(xa, xb) > view.x1:
        return None
    return (xa, 0.0, xb, view.height)


def _in_view(c: Circle, view: Viewport) -> bool:
    if c.is_line():
        return _line_endpoints(c, view) is not None
    (x, y), r = c.center_float(), c.radius_float()
    return view.x0 <= x <= view.x1 and y - r <= view.height


def viewport_circles(orbit: OrbitResult, view: Viewport) -> List[OrbitCircle]:
    """Orbit circles (with period translates) whose centre or line meets the viewport."""
    found = {}
    period = orbit.period
    for oc in orbit.circles:
        shifts = [0]
        if period is not None and not oc.circle.is_horizontal_line():
            lo = int((Fraction(view.x0) / period).__floor__()) - 1
            hi = int((Fraction(view.x1) / period).__ceil__()) + 1
            shifts = range(lo, hi + 1)
        for m in shifts:
            c = translate(oc.circle, m * period) if m else oc.circle
            if _in_view(c, view):
                found[(oc.key, m)] = OrbitCircle(oc.key, c, oc.curvature, oc.depth)
    return [found[k] for k in sorted(found, key=lambda k: (abs(found[k].curvature), k))]


def render_svg(
    orbit: OrbitResult,
    x0: float = 0.0,
    x1: float = 1.0,
    height: float = 1.0,
    labels: bool = False,
    scale: float = 400.0,
) -> str:
    view = Viewport(x0, x1, height, scale)
    circles = viewport_circles(orbit, view)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(view.width_px)}" '
        f'height="{_fmt(view.height_px)}" viewBox="0 0 {_fmt(view.width_px)} {_fmt(view.height_px)}">',
        f"<title>{orbit.label}</title>",
        '<g fill="none" stroke="black" stroke-width="0.5">',
    ]
    text = []
    for oc in circles:
        c = oc.circle
        if c.is_line():
            xa, ya, xb, yb = _line_endpoints(c, view)
            (pa, qa), (pb, qb) = view.px(xa, ya), view.px(xb, yb)
            out.append(
                f'<line x1="{_fmt(pa)}" y1="{_fmt(qa)}" x2="{_fmt(pb)}" y2="{_fmt(qb)}" '
                f'data-curvature="{oc.curvature}"/>'
            )
            continue
        (x, y), r = c.center_float(), c.radius_float()
        cx, cy = view.px(x, y)
        out.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r * scale)}" data-curvature="{oc.curvature}"/>'
        )
        if labels and r * scale >= MIN_LABEL_RADIUS_PX:
            size = min(r * scale, 24.0)
            text.append(
                f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" font-size="{_fmt(size)}" '
                f'text-anchor="middle" dominant-baseline="central">{oc.curvature}</text>'
            )
    out.append("</g>")
    if text:
        out.append('<g fill="black" font-family="sans-serif">')
        out.extend(text)
        out.append("</g>")
    out.append("</svg>")
    logger.info("svg_rendered", label=orbit.label, elements=len(circles), labels=len(text))
    return "\n".join(out) + "\n"

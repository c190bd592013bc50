from .moebius import (
    Circle,
    real_line,
    horizontal_line,
    base_line,
    circle_from_center,
    curvature_formula,
    apply,
    action_matrix,
    apply_matrix,
    curvature,
    canonical_key,
)

__all__ = [
    "Circle",
    "real_line",
    "horizontal_line",
    "base_line",
    "circle_from_center",
    "curvature_formula",
    "apply",
    "action_matrix",
    "apply_matrix",
    "curvature",
    "canonical_key",
]

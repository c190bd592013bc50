"""Built-in packings: Apollonian, K-Apollonian and cuboctahedral."""

from src.presets.catalog import (
    PRESETS,
    PresetVerification,
    apollonian,
    cuboct_base_curvatures,
    cuboct_identity_checks,
    cuboct_reflections,
    cuboct_symmetry_checks,
    cuboctahedral,
    descartes_strip_curvatures,
    kapollonian,
    preset,
    verify_presets,
)

__all__ = [
    "PRESETS",
    "PresetVerification",
    "apollonian",
    "cuboct_base_curvatures",
    "cuboct_identity_checks",
    "cuboct_reflections",
    "cuboct_symmetry_checks",
    "cuboctahedral",
    "descartes_strip_curvatures",
    "kapollonian",
    "preset",
    "verify_presets",
]

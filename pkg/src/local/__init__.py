"""Congruence quotients, local densities, the obstruction modulus and the iota audit."""

from src.local.densities import (
    EulerFactorCheck,
    LocalDensity,
    SingularSeries,
    b_q,
    bp_identity_check,
    curvature_distribution,
    density_table,
    euler_factor_check,
    singular_series,
    singular_series_partial,
    tau_closed_form,
    tau_empirical,
    tau_via_quotient,
)
from src.local.lie import IotaBound, iota, iota_bound
from src.local.obstruction import ObstructionReport, PrimeLevel, candidate_bad_primes, obstruction_report
from src.local.quotient import MultiplicativityCheck, QuotientGroup, multiplicativity_check, quotient_group
from src.local.rows import CurvatureQuadric, RowOrbit, curvature_quadric, row_modulus, row_orbit

__all__ = [
    "QuotientGroup",
    "quotient_group",
    "MultiplicativityCheck",
    "multiplicativity_check",
    "CurvatureQuadric",
    "RowOrbit",
    "curvature_quadric",
    "row_modulus",
    "row_orbit",
    "LocalDensity",
    "EulerFactorCheck",
    "SingularSeries",
    "curvature_distribution",
    "density_table",
    "tau_empirical",
    "tau_via_quotient",
    "tau_closed_form",
    "b_q",
    "bp_identity_check",
    "euler_factor_check",
    "singular_series",
    "singular_series_partial",
    "ObstructionReport",
    "PrimeLevel",
    "candidate_bad_primes",
    "obstruction_report",
    "IotaBound",
    "iota",
    "iota_bound",
]

"""Exponential sums: closed forms, brute-force oracles and bound audits."""

from src.expsums.sums import (
    ExpSumValue,
    QuadCase,
    brute_gauss,
    brute_quad,
    gauss_sum,
    kloosterman,
    quad_expsum,
    ramanujan,
    ramanujan_direct,
)
from src.expsums.twisted import AverageAudit, BoundAudit, s_average, s_gamma

__all__ = [
    "ExpSumValue",
    "QuadCase",
    "ramanujan",
    "ramanujan_direct",
    "gauss_sum",
    "brute_gauss",
    "quad_expsum",
    "brute_quad",
    "kloosterman",
    "s_gamma",
    "s_average",
    "BoundAudit",
    "AverageAudit",
]

"""Cayley graphs of congruence quotients and combinatorial spectral gaps."""

from src.spectral.cayley import (
    CayleyGraph,
    CheegerAudit,
    GapScan,
    SpectrumReport,
    cayley_graph,
    cheeger_audit,
    eigenvalue_histogram,
    gap_scan,
    spectrum,
)

__all__ = [
    "CayleyGraph",
    "CheegerAudit",
    "GapScan",
    "SpectrumReport",
    "cayley_graph",
    "cheeger_audit",
    "eigenvalue_histogram",
    "gap_scan",
    "spectrum",
]

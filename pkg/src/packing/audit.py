"""Admissible integers missing from the curvature set (the exceptional set)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from src.config.logging import get_logger
from src.core.exceptions import ValidationError
from src.local.obstruction import ObstructionReport, obstruction_report
from src.packing.orbit import curvature_set
from src.packing.spec import PackingSpec

logger = get_logger(__name__)


@dataclass
class ExceptionalAudit:
    N: int
    admissible_count: int
    curvature_count: int
    exceptional: List[int]
    L0: int

    @property
    def relative_density(self) -> Fraction:
        """Share of the admissible positives up to N that are not curvatures."""
        if not self.admissible_count:
            return Fraction(0)
        return Fraction(len(self.exceptional), self.admissible_count)

    @property
    def curvature_density(self) -> Fraction:
        """#K(N) / N, the empirical constant c."""
        return Fraction(self.curvature_count, self.N)

    def to_dict(self) -> Dict:
        return {
            "N": self.N,
            "L0": self.L0,
            "admissible_count": self.admissible_count,
            "curvature_count": self.curvature_count,
            "exceptional_count": len(self.exceptional),
            "exceptional": self.exceptional,
            "relative_density": float(self.relative_density),
            "curvature_density": float(self.curvature_density),
        }


def exceptional_audit(
    spec: PackingSpec,
    N: int,
    report: Optional[ObstructionReport] = None,
    word_cap: Optional[int] = None,
) -> ExceptionalAudit:
    if N < 1:
        raise ValidationError(f"N must be positive, got {N}")
    report = report or obstruction_report(spec)
    curvatures = {k for k in curvature_set(spec, N, word_cap) if k > 0}
    admissible = [n for n in range(1, N + 1) if report.is_admissible(n)]
    exceptional = [n for n in admissible if n not in curvatures]
    unexpected = sorted(k for k in curvatures if not report.is_admissible(k))
    if unexpected:
        # a curvature outside the admissible classes means L0 was under-measured
        raise ValidationError(
            "Curvatures found outside the admissible classes",
            {"label": spec.label, "L0": report.L0, "curvatures": unexpected[:20]},
        )
    audit = ExceptionalAudit(N, len(admissible), len(curvatures), exceptional, report.L0)
    logger.info(
        "exceptional_audit",
        label=spec.label,
        N=N,
        admissible=audit.admissible_count,
        curvatures=audit.curvature_count,
        exceptional=len(exceptional),
    )
    return audit


def exceptional_trend(
    spec: PackingSpec,
    Ns: Sequence[int],
    report: Optional[ObstructionReport] = None,
    word_cap: Optional[int] = None,
) -> Tuple[List[ExceptionalAudit], bool]:
    """Audits at increasing N and whether the relative exceptional density decreases."""
    report = report or obstruction_report(spec)
    audits = [exceptional_audit(spec, N, report, word_cap) for N in sorted(Ns)]
    densities = [a.relative_density for a in audits]
    monotone = all(later <= earlier for earlier, later in zip(densities, densities[1:]))
    if not monotone:
        logger.warning(
            "exceptional_density_not_decreasing",
            label=spec.label,
            densities=[float(d) for d in densities],
        )
    return audits, monotone

"""
Cayley graphs of congruence quotients and their averaging-operator spectra.

T = A / |S| for the adjacency multigraph A of a symmetric generating multiset
S; lambda'_0 = 1 and the combinatorial gap is 1 - lambda'_1.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import eigsh

from src.config.logging import get_logger
from src.config.settings import get_settings
from src.core.exceptions import CheegerViolation, NotGenerating, ValidationError
from src.local.quotient import QuotientGroup, quotient_group
from src.monitoring.metrics import eigensolve_duration_seconds
from src.packing.spec import PackingSpec

logger = get_logger(__name__)

RESIDUAL_TOL = 1e-8


@dataclass
class CayleyGraph:
    """Regular multigraph: vertex i is joined to perm[i] for every perm in the multiset."""
    n: int
    permutations: List[np.ndarray]
    q: int = 0
    label: str = ""

    def __post_init__(self):
        for perm in self.permutations:
            if len(perm) != self.n or len(np.unique(perm)) != self.n:
                raise ValidationError("Generator map is not a permutation of the vertices")

    @classmethod
    def from_permutations(cls, permutations: Sequence[Sequence[int]], q: int = 0, label: str = "") -> "CayleyGraph":
        perms = [np.asarray(p, dtype=np.int64) for p in permutations]
        if not perms:
            raise ValidationError("Empty generating multiset")
        return cls(len(perms[0]), perms, q, label)

    @property
    def valence(self) -> int:
        return len(self.permutations)

    def adjacency(self) -> sp.csr_matrix:
        rows = np.concatenate([np.arange(self.n)] * self.valence)
        cols = np.concatenate(self.permutations)
        data = np.ones(len(rows), dtype=np.int64)
        # duplicate entries are summed, keeping multi-edges and loops
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def averaging_operator(self) -> sp.csr_matrix:
        return (self.adjacency() / self.valence).tocsr()

    def is_symmetric(self) -> bool:
        A = self.adjacency()
        return (A != A.T).nnz == 0

    def components(self) -> int:
        count, _ = connected_components(self.adjacency(), directed=False)
        return int(count)


def cayley_graph(group: QuotientGroup, symmetrize: bool = True) -> CayleyGraph:
    """
    Cayley graph of a quotient on its generator maps; with symmetrize the
    inverse maps are added, so S-bar = S + S^-1 as a multiset.
    """
    perms = list(group.gen_maps)
    if symmetrize:
        perms += group.inverse_maps()
    graph = CayleyGraph(group.size, perms, group.q, group.label)
    if not graph.is_symmetric():
        raise ValidationError("Generating multiset is not symmetric", {"q": group.q})
    components = graph.components()
    if components != 1:
        raise NotGenerating(components, {"q": group.q, "label": group.label})
    return graph


@dataclass
class SpectrumReport:
    q: int
    label: str
    eigenvalues: List[float]  # descending; only the top two for the iterative solver
    solver: str
    residual: float

    @property
    def lambda0(self) -> float:
        return self.eigenvalues[0]

    @property
    def lambda1(self) -> Optional[float]:
        return self.eigenvalues[1] if len(self.eigenvalues) > 1 else None

    @property
    def gap(self) -> Optional[float]:
        return None if self.lambda1 is None else 1.0 - self.lambda1

    def to_dict(self) -> Dict:
        return {
            "q": self.q,
            "label": self.label,
            "lambda0": self.lambda0,
            "lambda1": self.lambda1,
            "gap": self.gap,
            "solver": self.solver,
            "residual": self.residual,
            "eigenvalues": self.eigenvalues,
        }


def _dense(T: sp.csr_matrix) -> Tuple[np.ndarray, float]:
    dense = T.toarray().astype(np.float64)
    values, vectors = scipy.linalg.eigh(dense)
    residual = float(np.max(np.linalg.norm(dense @ vectors - vectors * values, axis=0)))
    return values[::-1], residual


def _iterative(T: sp.csr_matrix) -> Tuple[np.ndarray, float]:
    values, vectors = eigsh(T.astype(np.float64), k=2, which="LA", tol=1e-12)
    order = np.argsort(values)[::-1]
    values, vectors = values[order], vectors[:, order]
    residual = float(np.max(np.linalg.norm(T @ vectors - vectors * values, axis=0)))
    return values, residual


def spectrum(graph: CayleyGraph, solver: str = "auto") -> SpectrumReport:
    """Eigenvalues of the averaging operator, full (dense) or the top two (iterative)."""
    if solver not in ("auto", "dense", "iterative"):
        raise ValidationError(f"Unknown solver {solver!r}")
    if solver == "auto":
        solver = "dense" if graph.n <= get_settings().dense_solver_limit else "iterative"
    if solver == "iterative" and graph.n < 4:
        solver = "dense"

    T = graph.averaging_operator()
    with eigensolve_duration_seconds.labels(solver=solver).time():
        values, residual = _dense(T) if solver == "dense" else _iterative(T)

    if residual > RESIDUAL_TOL:
        logger.warning("eigensolve_residual_high", q=graph.q, solver=solver, residual=residual)
    if abs(values[0] - 1.0) > 1e-9 or np.any(np.abs(values) > 1 + 1e-9):
        raise ValidationError(
            "Averaging operator spectrum outside [-1, 1] or top eigenvalue not 1",
            {"q": graph.q, "top": float(values[0])},
        )
    report = SpectrumReport(graph.q, graph.label, [float(v) for v in values], solver, residual)
    logger.info("spectrum_computed", q=graph.q, n=graph.n, solver=solver, gap=report.gap)
    return report


@dataclass
class CheegerAudit:
    h: Fraction  # boundary edges / (valence * |A|), minimized over |A| <= n/2
    gap: float
    lower: float  # h^2 / (2 M^2)
    upper: float  # 2 M h
    exact: bool
    holds: bool

    def to_dict(self) -> Dict:
        return {
            "h": str(self.h),
            "gap": self.gap,
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "holds": self.holds,
        }


def _edge_weights(graph: CayleyGraph) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    A = graph.adjacency().tocoo()
    return A.row, A.col, A.data


def _exact_expansion(graph: CayleyGraph) -> Fraction:
    n, M = graph.n, graph.valence
    if n == 1:
        return Fraction(0)
    rows, cols, weights = _edge_weights(graph)
    masks = np.arange(1, 2 ** n, dtype=np.int64)
    sizes = np.zeros(len(masks), dtype=np.int64)
    for i in range(n):
        sizes += (masks >> i) & 1
    keep = sizes <= n // 2
    masks, sizes = masks[keep], sizes[keep]
    boundary = np.zeros(len(masks), dtype=np.int64)
    for i, j, w in zip(rows, cols, weights):
        if i == j:
            continue
        boundary += w * (((masks >> i) & 1) & (1 - ((masks >> j) & 1)))
    best = min((Fraction(int(b), M * int(s)) for b, s in zip(boundary, sizes)))
    return best


def _sweep_expansion(graph: CayleyGraph) -> Fraction:
    """Best prefix cut along the second eigenvector."""
    T = graph.averaging_operator().astype(np.float64)
    if graph.n <= get_settings().dense_solver_limit:
        _, vectors = scipy.linalg.eigh(T.toarray())
        fiedler = vectors[:, -2]
    else:
        values, vectors = eigsh(T, k=2, which="LA", tol=1e-10)
        fiedler = vectors[:, int(np.argmin(values))]
    order = np.argsort(fiedler, kind="stable")
    A = graph.adjacency().tocsr()
    inside = np.zeros(graph.n, dtype=bool)
    boundary = 0
    best: Optional[Fraction] = None
    for size, v in enumerate(order[: graph.n // 2], start=1):
        row = A.getrow(v)
        nbrs, weights = row.indices, row.data
        to_inside = int(weights[inside[nbrs] & (nbrs != v)].sum())
        to_outside = int(weights[~inside[nbrs] & (nbrs != v)].sum())
        # v's edges into S stop being boundary; its edges out become boundary
        boundary += to_outside - to_inside
        inside[v] = True
        ratio = Fraction(boundary, graph.valence * size)
        if best is None or ratio < best:
            best = ratio
    return best if best is not None else Fraction(0)


def cheeger_audit(graph: CayleyGraph, report: Optional[SpectrumReport] = None) -> CheegerAudit:
    """
    Check h^2/(2 M^2) <= 1 - lambda'_1 <= 2 M h. Exact subset search up to the
    configured size, a sweep cut (flagged approximate) beyond it.
    """
    report = report or spectrum(graph)
    if report.gap is None:
        raise ValidationError("The trivial graph has no spectral gap")
    M = graph.valence
    exact = graph.n <= get_settings().cheeger_exact_limit
    h = _exact_expansion(graph) if exact else _sweep_expansion(graph)
    hf = float(h)
    lower, upper = hf * hf / (2 * M * M), 2 * M * hf
    holds = lower <= report.gap + 1e-9 and report.gap <= upper + 1e-9
    audit = CheegerAudit(h, report.gap, lower, upper, exact, holds)
    if not exact:
        logger.warning("cheeger_approximate", q=graph.q, n=graph.n, h=str(h))
    elif not holds:
        raise CheegerViolation("Cheeger sandwich violated", audit.to_dict())
    return audit


@dataclass
class GapScan:
    label: str
    reports: List[SpectrumReport]
    floor: float
    monotonicity_violations: List[Tuple[int, int]] = dc_field(default_factory=list)

    @property
    def min_gap(self) -> Optional[float]:
        gaps = [r.gap for r in self.reports if r.gap is not None]
        return min(gaps) if gaps else None

    @property
    def floor_met(self) -> bool:
        return self.min_gap is None or self.min_gap >= self.floor

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "floor": self.floor,
            "min_gap": self.min_gap,
            "floor_met": self.floor_met,
            "monotonicity_violations": [list(v) for v in self.monotonicity_violations],
            "reports": [r.to_dict() for r in self.reports],
        }


def gap_scan(
    spec: PackingSpec,
    q_list: Sequence[int],
    budget: Optional[int] = None,
    floor: Optional[float] = None,
) -> GapScan:
    """Spectral gap of the quotient Cayley graph for each q > 1."""
    floor = get_settings().gap_floor if floor is None else floor
    reports: List[SpectrumReport] = []
    for q in sorted(set(q_list)):
        if q == 1:
            logger.debug("gap_scan_skip_trivial", label=spec.label)
            continue
        graph = cayley_graph(quotient_group(spec, q, budget))
        reports.append(spectrum(graph))

    by_q = {r.q: r for r in reports}
    violations = []
    for q, r in by_q.items():
        for q2, r2 in by_q.items():
            if q2 != q and q % q2 == 0 and r.lambda1 < r2.lambda1 - 1e-9:
                violations.append((q, q2))
    if violations:
        logger.warning("gap_monotonicity_violated", label=spec.label, pairs=violations)

    scan = GapScan(spec.label, reports, floor, sorted(violations))
    if not scan.floor_met:
        logger.warning("gap_below_floor", label=spec.label, min_gap=scan.min_gap, floor=floor)
    return scan


def eigenvalue_histogram(report: SpectrumReport, bins: int = 20) -> List[Tuple[float, float, int]]:
    """(lo, hi, count) over [-1, 1]."""
    counts, edges = np.histogram(report.eigenvalues, bins=bins, range=(-1.0, 1.0))
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins)]

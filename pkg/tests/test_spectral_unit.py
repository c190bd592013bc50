"""
Unit Tests for the Spectral Module

Tests Cayley multigraphs, averaging-operator spectra, Cheeger audits and gap scans.
"""

import pytest
from fractions import Fraction


def _cycle(n):
    forward = [(i + 1) % n for i in range(n)]
    backward = [(i - 1) % n for i in range(n)]
    return forward, backward


class TestCayleyGraph:
    """Tests for CayleyGraph construction."""

    def test_rejects_non_permutation(self):
        """Test that a map hitting a vertex twice is rejected."""
        from src.core.exceptions import ValidationError
        from src.spectral.cayley import CayleyGraph

        with pytest.raises(ValidationError):
            CayleyGraph.from_permutations([[0, 0, 1]])

    def test_rejects_empty_multiset(self):
        """Test that an empty generating multiset is rejected."""
        from src.core.exceptions import ValidationError
        from src.spectral.cayley import CayleyGraph

        with pytest.raises(ValidationError):
            CayleyGraph.from_permutations([])

    def test_multi_edges_are_kept(self):
        """Test that a repeated generator doubles the edge weight."""
        from src.spectral.cayley import CayleyGraph

        graph = CayleyGraph.from_permutations([[1, 0], [1, 0]])
        assert graph.valence == 2
        assert graph.adjacency().toarray().tolist() == [[0, 2], [2, 0]]
        assert graph.is_symmetric()

    def test_disconnected_quotient(self, gaussian_field):
        """Test that a generating set with two orbits raises NotGenerating."""
        import numpy as np
        from src.core.exceptions import NotGenerating
        from src.local.quotient import QuotientGroup
        from src.spectral.cayley import cayley_graph

        group = QuotientGroup(
            q=2,
            label="split",
            field=gaussian_field,
            elements=np.zeros((4, 9), dtype=np.int64),
            keys=np.arange(4, dtype=np.int64),
            gen_maps=[np.array([1, 0, 3, 2])],
            generator_names=("g",),
            expected_order=4,
        )
        with pytest.raises(NotGenerating):
            cayley_graph(group)


class TestSpectrum:
    """Tests for the averaging-operator spectrum."""

    def test_two_vertices(self):
        """Test that the 2-vertex graph has eigenvalues 1, -1."""
        from src.spectral.cayley import CayleyGraph, spectrum

        report = spectrum(CayleyGraph.from_permutations([[1, 0], [1, 0]]))
        assert report.lambda0 == pytest.approx(1.0)
        assert report.lambda1 == pytest.approx(-1.0)
        assert report.gap == pytest.approx(2.0)

    def test_cycle(self):
        """Test that the 6-cycle has lambda_1 = cos(pi / 3)."""
        from src.spectral.cayley import CayleyGraph, spectrum

        report = spectrum(CayleyGraph.from_permutations(_cycle(6)))
        assert report.lambda1 == pytest.approx(0.5)
        assert report.residual < 1e-8

    def test_iterative_matches_dense(self):
        """Test that the iterative solver finds the same top two eigenvalues."""
        from src.spectral.cayley import CayleyGraph, spectrum

        graph = CayleyGraph.from_permutations(_cycle(30))
        dense = spectrum(graph, "dense")
        iterative = spectrum(graph, "iterative")
        assert iterative.eigenvalues[:2] == pytest.approx(dense.eigenvalues[:2], abs=1e-8)

    def test_unknown_solver(self):
        """Test that an unknown solver name is rejected."""
        from src.core.exceptions import ValidationError
        from src.spectral.cayley import CayleyGraph, spectrum

        with pytest.raises(ValidationError):
            spectrum(CayleyGraph.from_permutations(_cycle(4)), "power")

    def test_quotient_graph(self, apollonian_quotient_mod3):
        """Test that the mod 3 Cayley graph has top eigenvalue 1 and a positive gap."""
        from src.spectral.cayley import cayley_graph, eigenvalue_histogram, spectrum

        graph = cayley_graph(apollonian_quotient_mod3)
        assert graph.n == 120
        assert graph.valence == 2 * len(apollonian_quotient_mod3.gen_maps)
        report = spectrum(graph)
        assert report.lambda0 == pytest.approx(1.0)
        assert report.gap > 0
        histogram = eigenvalue_histogram(report, bins=10)
        assert sum(count for _, _, count in histogram) == 120


class TestCheeger:
    """Tests for the Cheeger sandwich."""

    def test_two_vertices(self):
        """Test that h = 1 on the 2-vertex graph."""
        from src.spectral.cayley import CayleyGraph, cheeger_audit

        audit = cheeger_audit(CayleyGraph.from_permutations([[1, 0], [1, 0]]))
        assert audit.h == 1
        assert audit.exact
        assert audit.holds

    def test_cycle(self):
        """Test that h = 1/3 on the 6-cycle and the sandwich holds."""
        from src.spectral.cayley import CayleyGraph, cheeger_audit

        audit = cheeger_audit(CayleyGraph.from_permutations(_cycle(6)))
        assert audit.h == Fraction(1, 3)
        assert audit.lower <= audit.gap <= audit.upper

    def test_sweep_is_flagged_approximate(self):
        """Test that graphs above the exact limit use a flagged sweep cut."""
        from src.spectral.cayley import CayleyGraph, cheeger_audit

        audit = cheeger_audit(CayleyGraph.from_permutations(_cycle(40)))
        assert not audit.exact
        assert audit.h > 0

    def test_trivial_graph(self):
        """Test that a single vertex has no gap to audit."""
        from src.core.exceptions import ValidationError
        from src.spectral.cayley import CayleyGraph, cheeger_audit

        with pytest.raises(ValidationError):
            cheeger_audit(CayleyGraph.from_permutations([[0], [0]]))


class TestGapScan:
    """Tests for gap scans over several moduli."""

    def test_skips_trivial_modulus(self, apollonian_spec):
        """Test that q = 1 is skipped."""
        from src.spectral.cayley import gap_scan

        scan = gap_scan(apollonian_spec, [1])
        assert scan.reports == []
        assert scan.min_gap is None
        assert scan.floor_met

    @pytest.mark.slow
    def test_kapollonian_scan(self, kapp2_spec):
        """Test that gaps stay positive and lifted spectra respect divisibility."""
        from src.spectral.cayley import gap_scan

        scan = gap_scan(kapp2_spec, [2, 3, 4])
        assert [r.q for r in scan.reports] == [2, 3, 4]
        assert scan.min_gap > 0
        assert scan.monotonicity_violations == []

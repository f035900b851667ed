from functools import reduce

import numpy as np
import numpy.testing as npt
import pytest

from trotteropt.linalg import kron, spectral_norm
from trotteropt.model import (
    ChainInstance,
    LocalTerm,
    Pauli,
    TermKind,
    TermOrdering,
    embed,
    hamiltonian,
    merged_gate_count,
    ordered_terms,
    pauli,
    term_matrix,
    terms_commute,
    unmerged_gate_count,
)


class TestPauli:
    def test_x(self):
        npt.assert_array_equal(pauli(Pauli.X), [[0, 1], [1, 0]])

    def test_y(self):
        npt.assert_array_equal(pauli(Pauli.Y), [[0, -1j], [1j, 0]])

    def test_z(self):
        npt.assert_array_equal(pauli(Pauli.Z), [[1, 0], [0, -1]])


class TestEmbed:
    def test_single_qubit(self):
        npt.assert_array_equal(embed(pauli(Pauli.X), 1, 1), pauli(Pauli.X))

    def test_second_of_two(self):
        npt.assert_array_equal(
            embed(pauli(Pauli.Z), 2, 2), np.diag([1, -1, 1, -1]).astype(complex)
        )

    @pytest.mark.parametrize("site", [1, 2, 3])
    def test_identity_embeds_to_identity(self, site):
        npt.assert_array_equal(embed(np.eye(2), site, 3), np.eye(8))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            embed(pauli(Pauli.X), 4, 3)
        with pytest.raises(ValueError):
            embed(np.eye(4), 3, 3)  # two-qubit operator needs site < n

    def test_commutation_of_embedded_paulis(self):
        n = 3
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                for p in Pauli:
                    for q in Pauli:
                        a = embed(pauli(p), i, n)
                        b = embed(pauli(q), j, n)
                        norm = spectral_norm(a @ b - b @ a)
                        if i == j and p != q:
                            assert norm >= 1.0
                        else:
                            assert norm <= 1e-12


class TestTermMatrix:
    def test_zero_field_is_zero(self):
        npt.assert_array_equal(term_matrix(LocalTerm(TermKind.Z, 1, 0.0), 3), np.zeros((8, 8)))

    def test_interior_coupling(self):
        x = pauli(Pauli.X)
        expected = reduce(kron, [x, x, np.eye(2)])
        npt.assert_array_equal(term_matrix(LocalTerm(TermKind.XX, 1), 3), expected)

    def test_wraparound_coupling(self):
        x = pauli(Pauli.X)
        expected = reduce(kron, [x, np.eye(2), x])
        npt.assert_array_equal(term_matrix(LocalTerm(TermKind.XX, 3), 3), expected)

    def test_field_coefficient(self):
        m = term_matrix(LocalTerm(TermKind.Z, 2, -0.375), 3)
        npt.assert_array_equal(m, -0.375 * embed(pauli(Pauli.Z), 2, 3))


class TestChainInstance:
    def test_rejects_small_chains(self):
        with pytest.raises(ValueError):
            ChainInstance(2, (0.0, 0.0), 1.0)

    def test_rejects_out_of_range_disorder(self):
        with pytest.raises(ValueError):
            ChainInstance(3, (0.0, 1.5, 0.0), 1.0)

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            ChainInstance(3, (0.0, 0.0), 1.0)

    def test_default_time_is_2n(self):
        rng = np.random.default_rng(0)
        inst = ChainInstance.random(5, rng)
        assert inst.t == 10.0
        assert all(abs(x) <= 1 for x in inst.v)

    def test_term_census(self):
        inst = ChainInstance.random(4, np.random.default_rng(1))
        terms = inst.terms()
        assert len(terms) == 4 * inst.n
        for kind in TermKind:
            assert sum(1 for t in terms if t.kind == kind) == inst.n
        for t in terms:
            if t.kind is TermKind.Z:
                assert t.coefficient == inst.v[t.site - 1]
            else:
                assert t.coefficient == 1.0


class TestHamiltonian:
    def test_traceless_at_zero_disorder(self):
        h = hamiltonian(ChainInstance(3, (0.0, 0.0, 0.0), 1.0))
        assert abs(np.trace(h)) == 0.0

    def test_hermitian(self):
        inst = ChainInstance.random(3, np.random.default_rng(2))
        h = hamiltonian(inst)
        assert np.max(np.abs(h - h.conj().T)) <= 1e-12

    def test_all_up_diagonal_entry(self):
        # On |000> every ZZ bond contributes +1 and every field v_j; with
        # v = (1,1,1) that is 3 + 3 = 6.
        h = hamiltonian(ChainInstance(3, (1.0, 1.0, 1.0), 1.0))
        assert h[0, 0] == pytest.approx(6.0, abs=0)

    def test_ordering_independent(self):
        # Dyadic disorder makes every partial sum exact, so the permuted sum
        # reproduces the canonical one bit for bit.
        inst = ChainInstance(4, (0.5, -0.25, 0.125, -0.5), 1.0)
        h = hamiltonian(inst)
        rng = np.random.default_rng(3)
        for _ in range(5):
            perm = rng.permutation(16)
            total = np.zeros_like(h)
            for term in ordered_terms(inst, TermOrdering.explicit(perm)):
                total += term_matrix(term, inst.n)
            npt.assert_array_equal(total, h)

    def test_ordering_independent_generic_disorder(self):
        inst = ChainInstance.random(4, np.random.default_rng(4))
        h = hamiltonian(inst)
        total = np.zeros_like(h)
        for term in ordered_terms(inst, TermOrdering.grouped()):
            total += term_matrix(term, inst.n)
        assert spectral_norm(total - h) <= 1e-13 * spectral_norm(h)


class TestOrderedTerms:
    def test_canonical_reading_order(self):
        inst = ChainInstance(3, (0.1, 0.2, 0.3), 1.0)
        kinds = [t.kind for t in ordered_terms(inst, TermOrdering.canonical())]
        assert kinds == [TermKind.XX, TermKind.YY, TermKind.ZZ, TermKind.Z] * 3
        sites = [t.site for t in ordered_terms(inst, TermOrdering.canonical())]
        assert sites == [1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3]

    def test_grouped_order(self):
        inst = ChainInstance(3, (0.1, 0.2, 0.3), 1.0)
        terms = ordered_terms(inst, TermOrdering.grouped())
        kinds = [t.kind for t in terms]
        assert kinds == [TermKind.XX] * 3 + [TermKind.YY] * 3 + [TermKind.ZZ] * 3 + [TermKind.Z] * 3
        assert [t.site for t in terms] == [1, 2, 3] * 4

    def test_identity_permutation_is_canonical(self):
        inst = ChainInstance(3, (0.1, 0.2, 0.3), 1.0)
        assert ordered_terms(inst, TermOrdering.explicit(range(12))) == ordered_terms(
            inst, TermOrdering.canonical()
        )

    def test_malformed_permutation(self):
        inst = ChainInstance(3, (0.1, 0.2, 0.3), 1.0)
        with pytest.raises(ValueError):
            ordered_terms(inst, TermOrdering.explicit([0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]))
        with pytest.raises(ValueError):
            ordered_terms(inst, TermOrdering.explicit(range(11)))


class TestTermsCommute:
    def test_disjoint_terms_commute(self):
        assert terms_commute(LocalTerm(TermKind.XX, 1), LocalTerm(TermKind.Z, 3), 4)

    def test_same_bond_different_kind_commute(self):
        # X1X2 vs Y1Y2 anticommute on both shared sites: even, so commute.
        assert terms_commute(LocalTerm(TermKind.XX, 1), LocalTerm(TermKind.YY, 1), 4)

    def test_single_overlap_anticommutes(self):
        assert not terms_commute(LocalTerm(TermKind.XX, 1), LocalTerm(TermKind.YY, 2), 4)
        assert not terms_commute(LocalTerm(TermKind.XX, 1), LocalTerm(TermKind.Z, 1), 4)

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_matrix_commutator(self, seed):
        rng = np.random.default_rng(seed)
        inst = ChainInstance.random(3, rng)
        terms = inst.terms()
        idx = rng.integers(0, len(terms), size=(12, 2))
        for i, j in idx:
            a = term_matrix(terms[i], 3)
            b = term_matrix(terms[j], 3)
            norm = spectral_norm(a @ b - b @ a)
            if terms_commute(terms[i], terms[j], 3):
                assert norm <= 1e-12
            else:
                # Zero-coefficient fields commute with everything numerically.
                scale = spectral_norm(a) * spectral_norm(b)
                assert norm > 0.5 * scale or scale == 0


class TestGateCounts:
    def test_unmerged_formula(self):
        inst = ChainInstance(5, (0.0,) * 5, 1.0)
        assert unmerged_gate_count(inst, 2, 125) == 25000
        assert unmerged_gate_count(inst, 1, 1) == 40

    def test_grouped_matches_closed_form(self):
        inst = ChainInstance(5, (0.1, 0.2, 0.3, 0.4, 0.5), 1.0)
        m = 125 * 5  # r * 5^(k-1)
        assert merged_gate_count(inst, TermOrdering.grouped(), 2, 125) == (5 * m + 1) * 5

    def test_single_block_grouped_is_6n(self):
        inst = ChainInstance(3, (0.1, 0.2, 0.3), 1.0)
        assert merged_gate_count(inst, TermOrdering.grouped(), 1, 1) == 6 * 3

    @pytest.mark.parametrize("n", [3, 4, 5])
    @pytest.mark.parametrize("k,r", [(1, 4), (2, 2), (2, 5)])
    def test_ordering_hierarchy(self, n, k, r):
        inst = ChainInstance.random(n, np.random.default_rng(n))
        grouped = merged_gate_count(inst, TermOrdering.grouped(), k, r)
        canonical = merged_gate_count(inst, TermOrdering.canonical(), k, r)
        assert grouped <= canonical <= unmerged_gate_count(inst, k, r)

    def test_random_permutation_between_bounds(self):
        inst = ChainInstance.random(4, np.random.default_rng(9))
        rng = np.random.default_rng(10)
        grouped = merged_gate_count(inst, TermOrdering.grouped(), 2, 3)
        for _ in range(5):
            ordering = TermOrdering.explicit(rng.permutation(16))
            count = merged_gate_count(inst, ordering, 2, 3)
            assert grouped <= count <= unmerged_gate_count(inst, 2, 3)

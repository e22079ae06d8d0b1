"""
Tests for the GF(2) linear algebra layer.

Dense numpy arithmetic mod 2 is the oracle for products and ranks; the weight
searches are checked against brute force on small matrices.
"""

import numpy as np
import pytest

from gaugemeas.errors import DimensionMismatchError, NoSolutionError
from gaugemeas.f2la import (
    BitMatrix, BitVec, WeightResult, XorBasis, annihilator, block_diag, coset_min_weight,
    gray_code_span, hstack, image_basis, inverse, kernel_basis, min_weight_search,
    multiply, rank, solve,
)


def random_matrix(rng, rows, cols, density=0.4):
    return BitMatrix.from_dense((rng.random((rows, cols)) < density).astype(np.uint8))


class TestBitVec:

    def test_support_is_sorted_and_deduplicated(self):
        v = BitVec(6, (4, 1, 4))
        assert v.support == (1, 4)
        assert v.weight == 2

    def test_out_of_range_support_rejected(self):
        with pytest.raises(DimensionMismatchError):
            BitVec(3, (3,))

    def test_addition_is_xor(self):
        a = BitVec(5, (0, 2, 3))
        b = BitVec(5, (2, 4))
        assert (a + b).support == (0, 3, 4)
        assert (a + a).weight == 0

    def test_length_mismatch_raises(self):
        with pytest.raises(DimensionMismatchError):
            BitVec(3, (0,)) + BitVec(4, (0,))

    def test_dot_and_int_conversions(self):
        a = BitVec(4, (0, 1, 3))
        b = BitVec(4, (1, 3))
        assert a.dot(b) == 0
        assert a.to_int() == 0b1011
        assert BitVec.from_int(4, 0b1011) == a
        assert BitVec.from_array(a.to_array()) == a

    def test_restrict_renumbers(self):
        v = BitVec(6, (1, 4, 5))
        assert v.restrict([4, 0, 5]).support == (0, 2)


class TestBitMatrix:

    def test_dense_round_trip(self):
        dense = np.array([[1, 0, 1], [0, 1, 1]], dtype=np.uint8)
        m = BitMatrix.from_dense(dense)
        assert m.shape == (2, 3)
        np.testing.assert_array_equal(m.to_dense(), dense)

    def test_product_matches_numpy(self):
        rng = np.random.default_rng(3)
        a = random_matrix(rng, 5, 7)
        b = random_matrix(rng, 7, 4)
        expected = (a.to_dense().astype(int) @ b.to_dense().astype(int)) % 2
        np.testing.assert_array_equal(multiply(a, b).to_dense(), expected)
        np.testing.assert_array_equal((a @ b).to_dense(), expected)

    def test_apply_matches_numpy(self):
        rng = np.random.default_rng(4)
        m = random_matrix(rng, 6, 5)
        v = BitVec(5, (0, 3, 4))
        expected = (m.to_dense().astype(int) @ v.to_array().astype(int)) % 2
        np.testing.assert_array_equal(m.apply(v).to_array(), expected)

    def test_shape_mismatch_raises(self):
        with pytest.raises(DimensionMismatchError):
            multiply(BitMatrix.zeros(2, 3), BitMatrix.zeros(2, 3))

    def test_transpose_and_rows(self):
        m = BitMatrix(2, 3, [(0,), (1,), (0, 1)])
        assert m.T.shape == (3, 2)
        assert m.row(0).support == (0, 2)
        assert m.row_supports() == [(0, 2), (1, 2)]
        assert m.max_row_weight == 2
        assert m.max_col_weight == 2

    def test_stacking(self):
        a = BitMatrix.identity(2)
        b = BitMatrix(2, 1, [(0, 1)])
        assert hstack([a, b]).shape == (2, 3)
        d = block_diag([a, b])
        assert d.shape == (4, 3)
        assert d.column(2).support == (2, 3)

    def test_json_round_trip(self):
        m = BitMatrix(3, 2, [(0, 2), (1,)])
        assert BitMatrix.from_json(m.to_json()) == m


class TestSolvers:

    def test_rank_of_identity_and_zero(self):
        assert rank(BitMatrix.identity(5)) == 5
        assert rank(BitMatrix.zeros(3, 4)) == 0

    def test_rank_nullity(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            m = random_matrix(rng, 6, 9)
            kernel = kernel_basis(m)
            assert rank(m) + len(kernel) == 9
            for k in kernel:
                assert m.apply(k).weight == 0

    def test_image_basis_is_independent(self):
        rng = np.random.default_rng(12)
        m = random_matrix(rng, 7, 10)
        basis = image_basis(m)
        assert len(basis) == rank(m)
        assert rank(BitMatrix.from_columns(7, basis)) == len(basis)

    def test_solve_round_trip(self):
        rng = np.random.default_rng(5)
        m = random_matrix(rng, 6, 8)
        y0 = BitVec(8, (1, 2, 6))
        x = m.apply(y0)
        y = solve(m, x)
        assert m.apply(y) == x

    def test_solve_outside_image(self):
        m = BitMatrix(2, 1, [(0, 1)])
        with pytest.raises(NoSolutionError):
            solve(m, BitVec(2, (0,)))

    def test_inverse(self):
        m = BitMatrix.from_dense(np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]], dtype=np.uint8))
        assert multiply(m, inverse(m)) == BitMatrix.identity(3)

    def test_singular_inverse_raises(self):
        with pytest.raises(NoSolutionError):
            inverse(BitMatrix(2, 2, [(0,), (0,)]))

    def test_annihilator(self):
        vs = [BitVec(4, (0, 1)), BitVec(4, (1, 2))]
        ann = annihilator(vs, 4)
        assert len(ann) == 2
        for u in ann:
            assert all(u.dot(v) == 0 for v in vs)


class TestXorBasis:

    def test_span_membership(self):
        basis = XorBasis([0b011, 0b110])
        assert len(basis) == 2
        assert basis.contains(0b101)
        assert not basis.contains(0b001)
        assert not basis.add(0b101)
        assert basis.add(0b001)


class TestWeightSearch:

    def test_gray_code_visits_whole_span(self):
        gens = [0b0011, 0b0110, 0b1000]
        seen = list(gray_code_span(gens))
        assert len(seen) == 8
        assert len(set(seen)) == 8
        assert seen[0] == 0

    def test_min_weight_search_finds_lightest(self):
        signatures = [0b01, 0b10, 0b11, 0b01]
        assert min_weight_search(signatures, [0b11], 3) == (2,)
        assert min_weight_search(signatures, [0], 3) == ()
        assert min_weight_search([0b01], [0b10], 3) is None

    def test_coset_min_weight_matches_brute_force(self):
        rng = np.random.default_rng(8)
        for _ in range(5):
            m = random_matrix(rng, 8, 3)
            v = BitVec(8, tuple(np.flatnonzero(rng.random(8) < 0.5)))
            best = min(
                (v + m.apply(BitVec.from_int(3, c))).weight for c in range(8))
            result = coset_min_weight(m, v, budget=8)
            assert result.is_exact
            assert result.value == best
            assert result.witness.weight == best

    def test_meet_in_the_middle_path(self, monkeypatch):
        from gaugemeas import settings
        monkeypatch.setattr(settings, 'EXHAUSTIVE_BITS', 0)
        # image is the even-weight subspace, so every odd vector sits one flip away
        m = BitMatrix(5, 4, [(i, i + 1) for i in range(4)])
        result = coset_min_weight(m, BitVec(5, (0, 1, 2)), budget=3)
        assert result.is_exact
        assert result.value == 1

    def test_budget_exhaustion_reports_unknown(self, monkeypatch):
        from gaugemeas import settings
        monkeypatch.setattr(settings, 'EXHAUSTIVE_BITS', 0)
        m = BitMatrix(6, 1, [(0,)])
        result = coset_min_weight(m, BitVec(6, tuple(range(6))), budget=2)
        assert result.is_unknown
        assert result.value == 3

    def test_weight_result_json(self):
        assert WeightResult.infinite().to_json() == {'status': 'infinite', 'value': None}
        assert WeightResult.exact(2, BitVec(3, (0, 2))).to_json()['witness'] == [0, 2]

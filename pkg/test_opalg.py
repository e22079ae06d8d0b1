"""
Tests for the phased CSS operator algebra.

Every algebraic identity is cross-checked against dense matrices, with qubit q
as bit q of the basis index.
"""

import itertools

import numpy as np
import pytest

from gaugemeas.errors import DimensionMismatchError, OperatorSizeError
from gaugemeas.f2la import BitVec
from gaugemeas.opalg import (
    OMEGA_POWERS, PhasedCssOperator, commutator, commutes, conjugate_by_CCZ,
    conjugate_by_cnot, conjugate_by_T, dagger, from_text, is_hermitian_involution,
    multiply, product, to_matrix, to_signed_pauli, xs_site,
)

N = 3


def random_operator(rng, n=N):
    pairs = list(itertools.combinations(range(n), 2))
    return PhasedCssOperator(
        n,
        phase=int(rng.integers(8)),
        xpart=BitVec(n, tuple(q for q in range(n) if rng.random() < 0.5)),
        linear=tuple((q, int(rng.integers(4))) for q in range(n)),
        quad=frozenset(p for p in pairs if rng.random() < 0.5),
    )


def single_qubit_dense(n, qubit, diagonal):
    """Diagonal gate on one qubit as a dense matrix"""
    idx = np.arange(1 << n)
    return np.diag(np.asarray(diagonal)[(idx >> qubit) & 1])


def cnot_dense(n, control, target):
    idx = np.arange(1 << n)
    m = np.zeros((1 << n, 1 << n), dtype=complex)
    m[idx ^ (((idx >> control) & 1) << target), idx] = 1
    return m


def ccz_dense(n, triple):
    idx = np.arange(1 << n)
    bits = np.ones_like(idx)
    for q in triple:
        bits &= (idx >> q) & 1
    return np.diag(np.where(bits, -1, 1).astype(complex))


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


class TestNormalForm:

    def test_construction_canonicalizes(self):
        op = PhasedCssOperator(3, phase=9, linear=((0, 1), (0, 3), (1, 6)), quad=[(2, 0), (0, 2)])
        assert op.phase == 1
        assert op.linear == ((1, 2),)
        assert op.quad == frozenset()

    def test_register_bounds(self):
        with pytest.raises(DimensionMismatchError):
            PhasedCssOperator.z(2, [2])
        with pytest.raises(ValueError):
            PhasedCssOperator.cz(3, 1, 1)

    def test_pauli_queries(self):
        op = multiply(PhasedCssOperator.x(4, [0, 1]), PhasedCssOperator.z(4, [1, 3]))
        assert op.is_pauli()
        assert op.support == (0, 1, 3)
        assert op.z_support == (1, 3)
        assert not PhasedCssOperator.cz(4, 0, 1).is_pauli()
        assert PhasedCssOperator.z(4, [2]).is_z_type()

    def test_text_round_trip(self, rng):
        for _ in range(10):
            op = random_operator(rng, 4)
            assert from_text(4, op.to_text()) == op

    def test_bad_text_is_rejected(self):
        with pytest.raises(ValueError):
            from_text(2, "w^0 Q{1}")

    def test_embed_and_restrict(self):
        op = multiply(PhasedCssOperator.x(2, [1]), PhasedCssOperator.cz(2, 0, 1))
        big = op.embed(5, {0: 3, 1: 4})
        assert big.x_support == (4,)
        assert big.quad == frozenset({(3, 4)})
        assert big.restrict([3, 4]) == op
        with pytest.raises(DimensionMismatchError):
            big.restrict([4])


class TestDenseOracle:

    def test_basic_matrices(self):
        x = to_matrix(PhasedCssOperator.x(1, [0]))
        z = to_matrix(PhasedCssOperator.z(1, [0]))
        s = to_matrix(PhasedCssOperator.s(1, 0))
        np.testing.assert_allclose(x, [[0, 1], [1, 0]])
        np.testing.assert_allclose(z, [[1, 0], [0, -1]])
        np.testing.assert_allclose(s, [[1, 0], [0, 1j]])
        np.testing.assert_allclose(to_matrix(PhasedCssOperator.cz(2, 0, 1)),
                                   np.diag([1, 1, 1, -1]))

    def test_product_matches_matrices(self, rng):
        for _ in range(25):
            a, b = random_operator(rng), random_operator(rng)
            np.testing.assert_allclose(to_matrix(multiply(a, b)), to_matrix(a) @ to_matrix(b),
                                       atol=1e-12)

    def test_dagger_matches_conjugate_transpose(self, rng):
        for _ in range(25):
            a = random_operator(rng)
            np.testing.assert_allclose(to_matrix(dagger(a)), to_matrix(a).conj().T, atol=1e-12)

    def test_commutator_matches_matrices(self, rng):
        for _ in range(10):
            a, b = random_operator(rng), random_operator(rng)
            ma, mb = to_matrix(a), to_matrix(b)
            expected = ma @ mb @ ma.conj().T @ mb.conj().T
            np.testing.assert_allclose(to_matrix(commutator(a, b)), expected, atol=1e-12)

    def test_commutes_agrees_with_matrices(self, rng):
        for _ in range(20):
            a, b = random_operator(rng), random_operator(rng)
            ma, mb = to_matrix(a), to_matrix(b)
            assert commutes(a, b) == np.allclose(ma @ mb, mb @ ma)

    def test_oracle_ceiling(self):
        with pytest.raises(OperatorSizeError):
            to_matrix(PhasedCssOperator.identity(5), max_qubits=4)


class TestConjugation:

    @pytest.mark.parametrize('sign', [+1, -1])
    def test_t_conjugation(self, rng, sign):
        t = single_qubit_dense(N, 1, [1, OMEGA_POWERS[1] if sign > 0 else OMEGA_POWERS[7]])
        for _ in range(10):
            a = random_operator(rng)
            expected = t @ to_matrix(a) @ t.conj().T
            np.testing.assert_allclose(to_matrix(conjugate_by_T(a, 1, sign)), expected, atol=1e-12)

    def test_xs_site_is_hermitian_involution(self):
        for sign in (+1, -1):
            assert is_hermitian_involution(xs_site(2, 0, sign))

    def test_ccz_conjugation(self, rng):
        ccz = ccz_dense(4, (0, 2, 3))
        for _ in range(15):
            a = random_operator(rng, 4)
            expected = ccz @ to_matrix(a) @ ccz
            np.testing.assert_allclose(to_matrix(conjugate_by_CCZ(a, (0, 2, 3))), expected,
                                       atol=1e-12)

    @pytest.mark.parametrize('control,target', [(0, 1), (2, 0), (1, 2)])
    def test_cnot_conjugation(self, rng, control, target):
        cx = cnot_dense(N, control, target)
        for _ in range(15):
            a = random_operator(rng)
            expected = cx @ to_matrix(a) @ cx
            np.testing.assert_allclose(to_matrix(conjugate_by_cnot(a, control, target)), expected,
                                       atol=1e-12)

    def test_cnot_rejects_repeated_qubit(self):
        with pytest.raises(DimensionMismatchError):
            conjugate_by_cnot(PhasedCssOperator.identity(2), 1, 1)


class TestPauliForms:

    def test_signed_pauli_of_y(self):
        # Y = i X Z
        y = PhasedCssOperator(1, phase=2, xpart=BitVec(1, (0,)), linear=((0, 2),))
        x, z, sign = to_signed_pauli(y)
        assert x.tolist() == [True]
        assert z.tolist() == [True]
        assert sign == 1
        np.testing.assert_allclose(to_matrix(y), [[0, -1j], [1j, 0]])

    def test_non_hermitian_pauli_is_rejected(self):
        with pytest.raises(ValueError):
            to_signed_pauli(multiply(PhasedCssOperator.x(1, [0]), PhasedCssOperator.z(1, [0])))

    def test_empty_product_needs_size(self):
        assert product([], n=3).is_identity()
        with pytest.raises(ValueError):
            product([])

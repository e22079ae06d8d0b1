"""Tests for CSS codes built from chain complexes."""

import pytest

from gaugemeas.chain_complex import ChainComplex
from gaugemeas.css_code import (
    code_distance, commutation_violations, from_complex, ldpc_profile, logical_basis,
    normalized_logicals,
)
from gaugemeas.errors import ChainComplexError, DimensionMismatchError
from gaugemeas.examples import iceberg_422, torus_2d
from gaugemeas.f2la import BitMatrix, BitVec


@pytest.fixture
def toric():
    return from_complex(torus_2d(3, 3), 1, "toric-3")


@pytest.fixture
def iceberg():
    return from_complex(iceberg_422(), 1, "iceberg")


class TestParameters:

    def test_toric_code_parameters(self, toric):
        assert toric.n == 18
        assert toric.k == 2
        assert len(toric.x_checks) == 9
        assert len(toric.z_checks) == 9

    def test_toric_distance(self, toric):
        dist = code_distance(toric)
        assert dist.d_x.value == 3
        assert dist.d_z.value == 3
        assert dist.d.value == 3

    def test_iceberg_parameters(self, iceberg):
        assert (iceberg.n, iceberg.k) == (4, 2)
        assert code_distance(iceberg).d.value == 2

    def test_ldpc_profile(self, toric, iceberg):
        assert ldpc_profile(toric) == (4, 4)
        assert ldpc_profile(iceberg).max_check_weight == 4
        assert ldpc_profile(iceberg).max_qubit_degree == 2

    def test_checks_commute(self, toric):
        assert commutation_violations(toric) == []


class TestConstruction:

    def test_invalid_complex_is_rejected(self):
        one = BitMatrix(1, 1, [(0,)])
        with pytest.raises(ChainComplexError):
            from_complex(ChainComplex((1, 1, 1), (one, one)))

    def test_qubit_grade_out_of_range(self):
        with pytest.raises(DimensionMismatchError):
            from_complex(torus_2d(2, 2), 3)

    def test_check_operators_are_offset(self, iceberg):
        xs, zs = iceberg.check_operators(10, offset=4)
        assert xs[0].xpart.support == (4, 5, 6, 7)
        assert zs[0].n == 10


class TestLogicals:

    def test_pairing_is_identity(self, toric):
        xs, zs = normalized_logicals(toric)
        assert len(xs) == len(zs) == 2
        for a, x in enumerate(xs):
            for b, z in enumerate(zs):
                assert x.dot(z) == (1 if a == b else 0)

    def test_logicals_commute_with_checks(self, toric):
        for x in logical_basis(toric, 'X'):
            assert all(x.dot(z) == 0 for z in toric.z_checks)
        for z in logical_basis(toric, 'z'):
            assert all(z.dot(x) == 0 for x in toric.x_checks)

    def test_supplied_z_basis_is_kept(self, iceberg):
        zs = [BitVec(4, (0, 1)), BitVec(4, (0, 2))]
        xs, kept = normalized_logicals(iceberg, zs)
        assert kept == zs
        for a, x in enumerate(xs):
            for b, z in enumerate(zs):
                assert x.dot(z) == (1 if a == b else 0)

    def test_supplied_z_basis_must_be_cycles(self, iceberg):
        with pytest.raises(DimensionMismatchError):
            normalized_logicals(iceberg, [BitVec(4, (0,)), BitVec(4, (0, 2))])

    def test_unknown_logical_type(self, iceberg):
        with pytest.raises(ValueError):
            logical_basis(iceberg, 'Y')

    def test_json_payload(self, iceberg):
        payload = iceberg.to_json()
        assert payload['n'] == 4
        assert payload['k'] == 2
        assert payload['x_checks'] == [[0, 1, 2, 3]]

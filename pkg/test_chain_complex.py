"""Tests for chain complexes: validation, (co)homology and Cheeger constants."""

from fractions import Fraction

import pytest

from gaugemeas.chain_complex import (
    COHOMOLOGY, HOMOLOGY, ChainComplex, betti, cheeger, cohomology_basis,
    extend_with_cycle_space, homology_basis, homology_distance, pad_to_grade,
    require_valid, validate,
)
from gaugemeas.errors import ChainComplexError, DimensionMismatchError
from gaugemeas.examples import torus_2d
from gaugemeas.f2la import BitMatrix


def ring(n):
    """Cycle graph on n vertices: edge i joins i and i+1"""
    return ChainComplex((n, n), (BitMatrix(n, n, [(i, (i + 1) % n) for i in range(n)]),))


class TestValidation:

    def test_ring_is_valid(self):
        report = validate(ring(5))
        assert report.passed
        assert require_valid(ring(5)).grades == (5, 5)

    def test_nonzero_composition_is_reported(self):
        one = BitMatrix(1, 1, [(0,)])
        cx = ChainComplex((1, 1, 1), (one, one))
        report = validate(cx)
        assert not report.passed
        assert report.witness[0]['grade'] == 2
        with pytest.raises(ChainComplexError) as exc:
            require_valid(cx)
        assert not exc.value.report.passed

    def test_shape_mismatch_is_reported(self):
        cx = ChainComplex((2, 3), (BitMatrix.zeros(2, 2),))
        report = validate(cx)
        assert not report.passed
        assert 'shape' in report.witness[0]['reason']

    def test_boundary_count_must_match(self):
        with pytest.raises(DimensionMismatchError):
            ChainComplex((2, 2), ())

    def test_boundary_outside_range_is_zero(self):
        cx = ring(4)
        assert cx.boundary(0).shape == (0, 4)
        assert cx.boundary(2).is_zero()

    def test_json_round_trip(self):
        cx = torus_2d(2, 3)
        back = ChainComplex.from_json(cx.to_json())
        assert back.grades == cx.grades
        assert back.boundaries == cx.boundaries
        assert back.label(1, 0) == cx.label(1, 0)


class TestHomology:

    def test_ring_betti_numbers(self):
        cx = ring(6)
        assert betti(cx, 0) == 1
        assert betti(cx, 1) == 1

    def test_torus_betti_numbers(self):
        cx = torus_2d(3, 3)
        assert [betti(cx, i) for i in range(3)] == [1, 2, 1]

    def test_homology_representatives_are_cycles(self):
        cx = torus_2d(3, 4)
        basis = homology_basis(cx, 1)
        assert len(basis) == 2
        for rep in basis:
            assert cx.boundary(1).apply(rep).weight == 0

    def test_cohomology_representatives_are_cocycles(self):
        cx = torus_2d(3, 4)
        basis = cohomology_basis(cx, 1)
        assert basis.kind == COHOMOLOGY
        for rep in basis:
            assert cx.coboundary(2).apply(rep).weight == 0

    def test_torus_distances(self):
        cx = torus_2d(3, 4)
        assert homology_distance(cx, 1, HOMOLOGY).value == 3
        assert homology_distance(cx, 1, COHOMOLOGY).value == 3

    def test_distance_witness_is_nontrivial_cycle(self):
        cx = torus_2d(3, 3)
        result = homology_distance(cx, 1)
        assert result.is_exact
        assert cx.boundary(1).apply(result.witness).weight == 0
        assert result.witness.weight == 3

    def test_trivial_homology_is_infinite(self):
        cx = extend_with_cycle_space(ring(5))
        assert betti(cx, 1) == 0
        assert homology_distance(cx, 1).is_infinite

    def test_grade_out_of_range(self):
        with pytest.raises(DimensionMismatchError):
            homology_basis(ring(3), 2)


class TestCheeger:

    def test_ring_cheeger_constant(self):
        # half the ring has two boundary edges over three vertices
        result = cheeger(ring(6), 0)
        assert result.is_exact
        assert result.value == Fraction(2, 3)
        assert result.witness.weight == 3

    def test_budget_applies_to_small_complexes(self):
        # δ on the 6-ring has rank 5
        assert cheeger(ring(6), 0, budget=5).value == Fraction(2, 3)
        result = cheeger(ring(6), 0, budget=2)
        assert not result.is_exact
        assert result.value is None
        assert result.to_json()['status'] == 'unknown'

    def test_cheeger_without_coboundary_is_infinite(self):
        cx = ChainComplex((3,), ())
        result = cheeger(cx, 0)
        assert not result.is_exact
        assert result.to_json()['value'] is None

    def test_cheeger_json(self):
        payload = cheeger(ring(4), 0).to_json()
        assert payload['status'] == 'exact'
        assert payload['value']['numerator'] == 1
        assert payload['value']['denominator'] == 1


class TestExtensions:

    def test_pad_to_grade(self):
        cx = pad_to_grade(ring(3), 3)
        assert cx.grades == (3, 3, 0, 0)
        assert validate(cx).passed

    def test_extend_with_cycle_space_rejects_wrong_top(self):
        with pytest.raises(DimensionMismatchError):
            extend_with_cycle_space(ring(3), top=0)

    def test_extension_boundary_columns_are_cycles(self):
        cx = extend_with_cycle_space(torus_2d(2, 2))
        assert cx.top == 3
        assert validate(cx).passed
        assert betti(cx, 2) == 0

"""Tests for the instance builders and the named-instance registry."""

import pytest

from gaugemeas.chain_complex import betti, validate
from gaugemeas.css_code import code_distance, from_complex
from gaugemeas.errors import InstanceError
from gaugemeas.examples import (
    INSTANCE_NAMES, colored_3torus, dual_complex, hggt_build, hggt_gauged_checks,
    hggt_membrane_logical_action, hggt_plan, iceberg_422, pauli_1form, resolve_instance,
    sixteen_cell, tetra_qubit_index, tetrahedral_color_code, tetrahedral_meta_checks, torus_2d,
    torus_3d,
)
from gaugemeas.gauging import (
    PRODUCT_STATE, check_gauged_commutation, disentangle_pauli_case, gauged_code, verify_gauss_law,
)
from gaugemeas.hfgate import PAULI_Z, XS


class TestTori:

    def test_torus_2d_grades(self):
        cx = torus_2d(3, 4)
        assert cx.grades == (12, 24, 12)
        assert validate(cx).passed

    def test_torus_3d_grades(self):
        cx = torus_3d(2)
        assert cx.grades == (8, 24, 24, 8)
        assert [betti(cx, i) for i in range(4)] == [1, 3, 3, 1]

    def test_torus_3d_size(self):
        with pytest.raises(InstanceError):
            torus_3d(1)

    def test_dual_reverses_grades(self):
        cx = torus_3d(2)
        assert dual_complex(cx).grades == (8, 24, 24, 8)
        assert dual_complex(torus_2d(2, 3)).grades == (6, 12, 6)
        assert validate(dual_complex(torus_2d(2, 3))).passed


class TestPauliGates:

    def test_z_gate_uses_the_dual_complex(self):
        code = from_complex(torus_2d(3, 3), 1, "toric-3")
        gate = pauli_1form(code, 'Z')
        assert gate.kind == PAULI_Z
        assert gate.n_sites == 18

    def test_restriction_keeps_only_listed_sites(self):
        code = from_complex(torus_2d(3, 3), 1, "toric-3")
        gate = pauli_1form(code, 'X', restriction=[0, 6, 12])
        assert gate.n_sites == 3
        assert gate.n_data == 18

    def test_blocks(self):
        code = from_complex(iceberg_422(), 1, "iceberg")
        gate = pauli_1form(code, 'X', blocks=2)
        assert gate.n_data == 8
        assert gate.sites[0].x_support == (0, 4)

    def test_bad_basis(self):
        code = from_complex(iceberg_422(), 1, "iceberg")
        with pytest.raises(InstanceError):
            pauli_1form(code, 'Y')


class TestTetrahedral:

    @pytest.fixture(scope='class')
    def tetra(self):
        return tetrahedral_color_code()

    def test_code_parameters(self, tetra):
        assert tetra.code.n == 15
        assert tetra.code.k == 1
        assert code_distance(tetra.code).d.value == 3

    def test_complex_grades(self, tetra):
        assert tetra.complex.grades == (4, 15, 18, 8)
        assert validate(tetra.complex).passed

    def test_meta_checks(self):
        meta = tetrahedral_meta_checks()
        assert len(meta) == 8
        assert all(len(m) == 4 for m in meta)

    def test_bipartition(self, tetra):
        assert len(tetra.black) == 7
        assert len(tetra.white) == 8
        assert tetra.gate.kind == XS

    def test_qubit_index(self):
        assert tetra_qubit_index([0, 1]) == 3
        assert tetra_qubit_index([]) == 0
        with pytest.raises(InstanceError):
            tetra_qubit_index([0, 1, 2, 3])

    def test_gauss_law(self, tetra):
        plan = resolve_instance('tetrahedral-cc').plan()
        assert verify_gauss_law(plan).passed

    def test_disentangler(self, tetra):
        plan = resolve_instance('tetrahedral-cc').plan()
        result = disentangle_pauli_case(plan)
        assert result.verdict == PRODUCT_STATE, result.failures
        rotations = {g[1]: g[2] for g in result.circuit if g[0] == 'T'}
        # T dagger undoes the T-conjugated sites on black qubits
        assert all(rotations[q] == -1 for q in tetra.black)
        assert all(rotations[q] == +1 for q in tetra.white)


class TestTwistedGaugeTheory:

    @pytest.fixture(scope='class')
    def build(self):
        return hggt_build(sixteen_cell())

    def test_register(self, build):
        assert len(build.red_faces) == 8
        assert len(build.green_faces) == 8
        assert build.n_data == 16
        assert len(build.by_edges) == 4
        assert len(build.rg_edges) == 4
        assert build.ancilla(build.rg_edges[0]) == 16

    def test_gate_complex_has_no_first_cohomology(self, build):
        assert betti(build.gate.gate_complex, 1) == 0
        assert hggt_plan(build).reps == ()

    def test_every_x_check_is_dressed(self, build):
        dressed = hggt_gauged_checks(build)
        assert len(dressed) == len(build.red_vertices) + len(build.green_vertices)
        assert all(key[0] == 'X' for key in dressed)

    def test_dressed_checks_commute(self, build):
        plan = hggt_plan(build)
        assert verify_gauss_law(plan).passed
        assert check_gauged_commutation(gauged_code(plan, verify=False)).passed

    def test_reference_choice(self):
        with pytest.raises(InstanceError):
            hggt_build(sixteen_cell(), reference='middle')

    def test_lattice_is_a_graph_on_one_colour(self, build):
        graph = build.lattice('r')
        assert set(graph.nodes) == set(build.red_vertices)
        assert all('qubit' in data for _, _, data in graph.edges(data=True))


class TestColored3Torus:

    def test_size_must_be_even(self):
        with pytest.raises(InstanceError):
            colored_3torus(3)
        with pytest.raises(InstanceError):
            colored_3torus(2)

    @pytest.mark.slow
    def test_counts(self):
        cs = colored_3torus(4)
        assert cs.n_vertices == 128
        assert len(cs.tetrahedra) == 768
        assert cs.validate().passed


class TestMembraneLogicalAction:

    @pytest.fixture(scope='class')
    def build(self):
        return hggt_build(colored_3torus(4))

    @pytest.mark.parametrize('axis', [0, 1, 2])
    def test_membrane_pairs_the_other_two_axes(self, build, axis):
        action = hggt_membrane_logical_action(build, axis)
        b, c = (a for a in range(3) if a != axis)
        # logical labels are (code, winding axis): CZ across red and green codes
        assert sorted(action.cz_pairs()) == sorted([((0, b), (1, c)), ((0, c), (1, b))])
        assert action.residual_ok
        assert not any(action.matrix[i][i] for i in range(len(action.labels)))


class TestRegistry:

    def test_torus_instance(self):
        inst = resolve_instance('torus2d:3,3')
        assert inst.codes[0].n == 18
        assert inst.initial_basis == 'zero'
        assert inst.statevector_feasible() is False

    def test_small_instance_is_feasible(self):
        assert resolve_instance('torus2d:2,2').statevector_feasible()

    def test_iceberg_cz_instance(self):
        inst = resolve_instance('iceberg-cz')
        assert inst.initial_basis == 'plus'
        assert inst.gate.n_data == 8
        assert inst.plan().n_hyperedges == 3

    @pytest.mark.parametrize('name', ['nope', 'torus2d:3', 'torus2d:a,b', 'torus3d', 'hggt',
                                      'colored-3torus:5', 'Bad Name!'])
    def test_bad_names(self, name):
        with pytest.raises(InstanceError):
            resolve_instance(name)

    def test_names_are_listed(self):
        assert 'tetrahedral-cc' in INSTANCE_NAMES
        assert 'hggt-16cell' in INSTANCE_NAMES

"""
Tests for the gauging measurement on small instances.

Runs are statevector simulations; the 2x2 toric code with its X 1-form gate keeps the
register at 12 qubits.
"""

import pytest

from gaugemeas.errors import (
    DimensionMismatchError, NotACocycleError, NotGaugeableError,
)
from gaugemeas.examples import initial_state, resolve_instance
from gaugemeas.f2la import BitVec
from gaugemeas.gauging import (
    NOT_APPLICABLE, PRODUCT_STATE, check_gauged_commutation, charge, cost_comparison,
    detectors, disentangle_pauli_case, execute, expected_projector, gauge_operator,
    gauged_code, make_plan, minimal_flux, run_algorithm1, run_report, verify_gauss_law,
)
from gaugemeas.opalg import PhasedCssOperator
from gaugemeas.sim import StateVector, make_rng, measure_involution


@pytest.fixture(scope='module')
def toric():
    return resolve_instance('torus2d:2,2')


@pytest.fixture
def plan(toric):
    return toric.plan(seed=7)


class TestPlan:

    def test_register_layout(self, plan):
        assert plan.n_data == 8
        assert plan.n_hyperedges == 4
        assert plan.n_total == 12
        assert plan.ancilla(0) == 8
        assert len(plan.vertex_operators) == 8
        assert len(plan.reps) == 2

    def test_vertex_operator_touches_site_and_hyperedges(self, plan):
        a0 = plan.vertex_operators[0]
        hyperedges = plan.delta.column(0).support
        assert a0 == PhasedCssOperator.x(12, [0] + [plan.ancilla(e) for e in hyperedges])

    def test_representatives_must_be_cocycles(self, toric):
        with pytest.raises(NotACocycleError):
            make_plan(toric.gate, reps=[BitVec(8, (0,))])
        with pytest.raises(DimensionMismatchError):
            make_plan(toric.gate, reps=[BitVec(5, (0,))])

    def test_ancilla_class_length(self, toric):
        with pytest.raises(DimensionMismatchError):
            make_plan(toric.gate, ancilla_class=BitVec(3, ()))


class TestGaussLaw:

    def test_vertex_products_equal_symmetries(self, plan):
        report = verify_gauss_law(plan)
        assert report.passed
        assert report.details['cocycles'] >= 2

    def test_gauged_checks_commute(self, plan):
        code = gauged_code(plan)
        assert len(code.vertex_terms) == 8
        assert len(code.plaquette_terms) == 1
        assert not code.absorbed
        assert check_gauged_commutation(code).passed

    def test_gauged_code_json(self, plan):
        payload = gauged_code(plan).to_json()
        assert payload['n_total'] == 12
        assert len(payload['vertex_terms']) == 8


class TestCharges:

    def test_single_z_has_one_charge(self, plan):
        chi = charge(plan, PhasedCssOperator.z(8, [0]))
        assert chi == BitVec(8, (0,))

    def test_open_charge_is_not_gaugeable(self, plan):
        with pytest.raises(NotGaugeableError):
            minimal_flux(plan, BitVec(8, (0,)))

    def test_face_boundary_needs_one_hyperedge(self, plan):
        chi = plan.extended.boundary(2).column(0)
        assert minimal_flux(plan, chi) == BitVec(4, (0,))

    def test_gauged_face_check_carries_its_flux(self, plan):
        face = plan.extended.boundary(2).column(0)
        gauged = gauge_operator(plan, PhasedCssOperator.z(8, face.support))
        assert gauged == PhasedCssOperator.z(12, list(face.support) + [plan.ancilla(0)])

    def test_uncharged_operator_is_unchanged(self, plan):
        op = PhasedCssOperator.x(8, [0, 1])
        assert gauge_operator(plan, op) == op.embed(12)

    def test_operator_size_is_checked(self, plan):
        with pytest.raises(DimensionMismatchError):
            charge(plan, PhasedCssOperator.z(5, [0]))


class TestRuns:

    @pytest.mark.parametrize('seed', [0, 1, 2])
    def test_run_matches_projector(self, toric, seed):
        plan = toric.plan(seed)
        state = initial_state(toric, make_rng(seed))
        report = run_report(plan, state, run_algorithm1(plan, state))
        assert report['detectors_ok']
        assert report['fidelity_vs_projector'] == pytest.approx(1.0, abs=1e-9)
        assert report['seed'] == seed

    def test_initial_state_is_not_consumed(self, toric, plan):
        state = initial_state(toric, make_rng(0))
        before = state.copy()
        run_algorithm1(plan, state)
        assert state.n == 8
        assert state.fidelity(before) == pytest.approx(1.0)

    def test_same_seed_same_outcome(self, toric, plan):
        state = initial_state(toric, make_rng(0))
        first = run_algorithm1(plan, state)
        second = run_algorithm1(plan, state)
        assert first.to_json() == second.to_json()

    def test_byproduct_explains_hyperedge_outcomes(self, toric, plan):
        outcome = run_algorithm1(plan, initial_state(toric, make_rng(3)))
        assert plan.delta.apply(outcome.byproduct) == outcome.x

    def test_state_size_is_checked(self, plan):
        with pytest.raises(DimensionMismatchError):
            execute(plan, StateVector.zeros(3), make_rng(0))

    def test_projector_needs_one_sign_per_representative(self, plan):
        with pytest.raises(DimensionMismatchError):
            expected_projector(plan, [1])

    def test_cz_pair_run(self):
        inst = resolve_instance('iceberg-cz')
        plan = inst.plan(seed=4)
        state = initial_state(inst, make_rng(4))
        report = run_report(plan, state)
        assert report['detectors_ok']
        assert report['fidelity_vs_projector'] == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.slow
    @pytest.mark.parametrize('name', ['torus2d:2,2', 'torus2d:2,3', 'iceberg-cz'])
    def test_hundred_seed_sweep(self, name):
        inst = resolve_instance(name)
        for seed in range(100):
            plan = inst.plan(seed)
            report = run_report(plan, initial_state(inst, make_rng(seed)))
            assert report['detectors_ok'], seed
            assert report['fidelity_vs_projector'] == pytest.approx(1.0, abs=1e-9), seed


def site_coboundary(plan):
    """δ of the first site with a nonzero coboundary"""
    for s in range(plan.gate.n_sites):
        ell = plan.delta.apply(BitVec(plan.gate.n_sites, (s,)))
        if ell:
            return ell
    raise AssertionError("gate complex has no nonzero coboundary")


@pytest.mark.parametrize('name', ['torus2d:2,2', 'iceberg-cz'])
@pytest.mark.parametrize('seed', [0, 1, 2])
class TestOutcomeConsistency:

    def test_final_state_repeats_sigma(self, name, seed):
        inst = resolve_instance(name)
        plan = inst.plan(seed)
        outcome = run_algorithm1(plan, initial_state(inst, make_rng(seed)))
        rng = make_rng(seed + 100)
        for i, sigma in enumerate(outcome.sigma):
            again, _ = measure_involution(outcome.final_state.copy(), plan.symmetry(i), rng)
            assert again == sigma

    def test_ancilla_class_gives_the_same_projection(self, name, seed):
        inst = resolve_instance(name)
        plain = inst.plan(seed)
        ell = site_coboundary(plain)
        shifted = make_plan(inst.gate, ancilla_class=ell, seed=seed)
        assert shifted.reps == plain.reps
        state = initial_state(inst, make_rng(seed))
        outcome = run_algorithm1(shifted, state)
        expected = expected_projector(plain, outcome.sigma).apply(state)
        assert expected.fidelity(outcome.final_state) == pytest.approx(1.0, abs=1e-9)

    def test_byproduct_explains_shifted_outcomes(self, name, seed):
        inst = resolve_instance(name)
        ell = site_coboundary(inst.plan(seed))
        shifted = make_plan(inst.gate, ancilla_class=ell, seed=seed)
        outcome = run_algorithm1(shifted, initial_state(inst, make_rng(seed)))
        assert shifted.delta.apply(outcome.byproduct) == outcome.x + ell


class TestDetectors:

    def test_one_detector_per_vertex(self, plan):
        dets = detectors(plan)
        assert len(dets) == 4
        assert all(dets.evaluate([1] * 8))

    def test_single_flip_trips_two_detectors(self, plan):
        dets = detectors(plan)
        eps = [1] * 8
        eps[0] = -1
        assert dets.evaluate(eps).count(False) == 2
        assert dets.syndrome(BitVec(8, (0,))).weight == 2


class TestDisentangler:

    def test_pauli_gauging_is_product_state_equivalent(self, plan):
        result = disentangle_pauli_case(plan)
        assert result.verdict == PRODUCT_STATE
        assert result.applicable
        assert not result.failures
        assert all(g[0] == 'CX' for g in result.circuit)

    def test_cz_sites_are_not_x_conjugate(self):
        plan = resolve_instance('iceberg-cz').plan()
        result = disentangle_pauli_case(plan)
        assert result.verdict == NOT_APPLICABLE
        assert not result.applicable


class TestCost:

    def test_single_round_against_d_rounds(self, plan):
        cost = cost_comparison(plan, 3)
        assert cost['higher_form']['rounds'] == 1
        assert cost['higher_form']['ancillas'] == 4
        assert cost['higher_form']['measurements'] == 12
        assert cost['zero_form']['rounds'] == 3
        assert cost['zero_form']['measurements'] == 3 * cost['zero_form']['ancillas']
        assert cost['rounds_saved'] == 2

    def test_distance_must_be_positive(self, plan):
        with pytest.raises(ValueError):
            cost_comparison(plan, 0)

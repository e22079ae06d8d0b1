"""
Tests for the statevector and tableau backends.

Both backends draw exactly one uniform per measurement, so a fixed seed gives
matching outcome sequences on Clifford circuits.
"""

import numpy as np
import pytest

from gaugemeas import settings
from gaugemeas.css_code import from_complex
from gaugemeas.errors import (
    BackendMismatchError, DetectedFaultError, GaugingError, QubitCeilingError,
)
from gaugemeas.examples import torus_2d
from gaugemeas.f2la import BitVec
from gaugemeas.opalg import PhasedCssOperator
from gaugemeas.sim import (
    PREPARE, SYNDROME, VERIFY, StabTableau, StateVector, compare_distributions, make_rng,
    project_codespace,
)

X = PhasedCssOperator.x
Z = PhasedCssOperator.z


def bell_state():
    amps = np.zeros(4, dtype=complex)
    amps[0] = amps[3] = 2 ** -0.5
    return StateVector(amps)


def y0x1(n):
    """Y on qubit 0 and X on qubit 1"""
    return PhasedCssOperator(n, phase=2, xpart=BitVec(n, (0, 1)), linear=((0, 2),))


class TestStateVector:

    def test_zero_state_measures_plus(self):
        sv = StateVector.zeros(3)
        rng = make_rng(1)
        assert all(sv.measure(Z(3, [q]), rng) == 1 for q in range(3))

    def test_deterministic_measurement_consumes_a_draw(self):
        rng, reference = make_rng(5), make_rng(5)
        StateVector.zeros(2).measure(Z(2, [0]), rng)
        reference.random()
        assert rng.random() == reference.random()

    def test_bell_state_stabilizers(self):
        sv = bell_state()
        assert sv.expectation(X(2, [0, 1])) == pytest.approx(1)
        assert sv.expectation(Z(2, [0, 1])) == pytest.approx(1)

    def test_bell_state_outcomes_are_correlated(self):
        for seed in range(5):
            sv = bell_state()
            rng = make_rng(seed)
            first = sv.measure(Z(2, [0]), rng)
            assert sv.measure(Z(2, [1]), rng) == first

    def test_projection_probability(self):
        plus = StateVector(np.full(2, 2 ** -0.5, dtype=complex))
        assert plus.project(Z(1, [0]), -1) == pytest.approx(0.5)
        with pytest.raises(GaugingError):
            StateVector.zeros(1).project(Z(1, [0]), -1)

    def test_append_and_discard(self):
        sv = bell_state()
        sv.append_qubits([1, 0])
        assert sv.n == 4
        assert sv.expectation(Z(4, [2])) == pytest.approx(-1)
        sv.discard([2, 3], [1, 0])
        assert sv.fidelity(bell_state()) == pytest.approx(1)

    def test_discard_entangled_qubit_raises(self):
        with pytest.raises(GaugingError):
            bell_state().discard([1], [0])

    def test_bytes_round_trip(self):
        sv = bell_state()
        assert np.allclose(StateVector.from_bytes(sv.to_bytes()).amplitudes, sv.amplitudes)

    def test_qubit_ceiling(self, monkeypatch):
        monkeypatch.setattr(settings, 'QUBIT_CEILING', 3)
        with pytest.raises(QubitCeilingError):
            StateVector.zeros(4)
        sv = StateVector.zeros(3)
        with pytest.raises(QubitCeilingError):
            sv.append_qubits([0])


class TestStabTableau:

    def test_initial_state(self):
        tab = StabTableau(3)
        assert tab.expectation(Z(3, [1])) == 1
        assert tab.expectation(X(3, [1])) == 0

    def test_single_qubit_gates(self):
        tab = StabTableau(1)
        tab.pauli_x(0)
        assert tab.expectation(Z(1, [0])) == -1
        tab.h(0)
        assert tab.expectation(X(1, [0])) == -1

    def test_bell_pair(self):
        tab = StabTableau(2)
        tab.h(0)
        tab.cnot(0, 1)
        assert tab.expectation(X(2, [0, 1])) == 1
        assert tab.expectation(Z(2, [0, 1])) == 1
        rng = make_rng(3)
        first = tab.measure(Z(2, [0]), rng)
        assert tab.measure(Z(2, [1]), rng) == first

    def test_non_pauli_is_rejected(self):
        with pytest.raises(BackendMismatchError):
            StabTableau(2).measure(PhasedCssOperator.cz(2, 0, 1), make_rng(0))

    def test_append_and_discard(self):
        tab = StabTableau(1)
        tab.append_qubits([1])
        assert tab.n == 2
        assert tab.expectation(Z(2, [1])) == -1
        tab.discard([1], [1])
        assert tab.expectation(Z(2, [1])) == 1
        with pytest.raises(GaugingError):
            tab.discard([1], [1])


class TestBackendAgreement:

    def run_sequence(self, state, seed):
        rng = make_rng(seed)
        n = state.n
        outcomes = [state.measure(X(n, [0, 1]), rng)]
        state.apply(PhasedCssOperator.s(n, 0))
        outcomes.append(state.measure(y0x1(n), rng))
        outcomes.append(state.measure(Z(n, [0, 1]), rng))
        outcomes.append(state.measure(X(n, [2]), rng))
        outcomes.append(state.measure(Z(n, [2]), rng))
        return outcomes

    @pytest.mark.parametrize('seed', range(6))
    def test_same_seed_same_outcomes(self, seed):
        sv = self.run_sequence(StateVector.zeros(3), seed)
        tab = self.run_sequence(StabTableau(3), seed)
        assert sv == tab
        # S maps the X0X1 eigenvalue onto Y0X1
        assert sv[1] == sv[0]
        assert sv[2] == 1


class TestCodespace:

    @pytest.fixture
    def code(self):
        return from_complex(torus_2d(2, 2), 1, "toric-2")

    def test_prepare_then_verify(self, code):
        rng = make_rng(9)
        state, record = project_codespace(StateVector.zeros(code.n), code, rng, PREPARE)
        assert len(record.x_outcomes[0]) == len(code.x_checks)
        project_codespace(state, code, rng, VERIFY)

    def test_verify_detects_error(self, code):
        rng = make_rng(9)
        state, _ = project_codespace(StateVector.zeros(code.n), code, rng, PREPARE)
        state.apply(X(code.n, [0]))
        with pytest.raises(DetectedFaultError):
            project_codespace(state, code, rng, VERIFY)

    def test_syndrome_mode_reports(self, code):
        rng = make_rng(2)
        tab = StabTableau(code.n)
        project_codespace(tab, code, rng, PREPARE)
        tab.apply(Z(code.n, [0]))
        _, record = project_codespace(tab, code, rng, SYNDROME)
        assert not record.trivial
        assert record.z_outcomes[0] == [1] * len(code.z_checks)


class TestDistributions:

    def test_identical_histograms(self):
        counts = {(1,): 50, (-1,): 50}
        assert compare_distributions(counts, dict(counts)) == pytest.approx(1.0)

    def test_disjoint_histograms(self):
        assert compare_distributions({'a': 100}, {'b': 100}) < 1e-3

    def test_single_outcome(self):
        assert compare_distributions({'a': 10}, {'a': 30}) == 1.0

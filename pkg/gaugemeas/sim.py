"""
State backends: a dense statevector and an Aaronson-Gottesman stabilizer tableau.

Qubit q is bit q of the basis index (qubit 0 least significant). Every
measurement consumes exactly one uniform draw from the run's generator, even
when the outcome is deterministic, so seeded runs line up across backends.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from . import settings
from .css_code import CssCode
from .errors import (
    BackendMismatchError, DetectedFaultError, DimensionMismatchError, GaugingError,
    QubitCeilingError,
)
from .f2la import BitVec, solve
from .opalg import OMEGA_POWERS, PhasedCssOperator, to_signed_pauli

logger = logging.getLogger(__name__)

DETERMINISTIC_TOL = 1e-12


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """One named stream per run"""
    if seed is None:
        seed = settings.DEFAULT_SEED
    return np.random.Generator(np.random.PCG64(seed))


def _sample(rng: np.random.Generator, p_plus: float) -> int:
    u = rng.random()
    if p_plus >= 1.0 - DETERMINISTIC_TOL:
        return +1
    if p_plus <= DETERMINISTIC_TOL:
        return -1
    return +1 if u < p_plus else -1


class StateVector:
    """Dense amplitudes of an n-qubit pure state"""

    def __init__(self, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        n = int(amplitudes.shape[0]).bit_length() - 1
        if amplitudes.ndim != 1 or (1 << n) != amplitudes.shape[0]:
            raise DimensionMismatchError("amplitude count must be a power of two")
        _check_ceiling(n)
        self.n = n
        self.amplitudes = amplitudes

    @classmethod
    def zeros(cls, n: int) -> "StateVector":
        return cls.basis(n, 0)

    @classmethod
    def basis(cls, n: int, index: int) -> "StateVector":
        _check_ceiling(n)
        amps = np.zeros(1 << n, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def from_bytes(cls, data: bytes) -> "StateVector":
        return cls(np.frombuffer(data, dtype='<c16').copy())

    def to_bytes(self) -> bytes:
        """Little-endian complex pairs"""
        return self.amplitudes.astype('<c16').tobytes()

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def _indices(self) -> np.ndarray:
        return np.arange(1 << self.n, dtype=np.int64)

    def applied(self, op: PhasedCssOperator) -> np.ndarray:
        """Amplitudes of op|ψ>, leaving the state untouched"""
        if op.n != self.n:
            raise DimensionMismatchError(f"operator on {op.n} qubits, state has {self.n}")
        idx = self._indices()
        phases = OMEGA_POWERS[(op.phase + op.diagonal_phase(idx)) % 8]
        out = np.empty_like(self.amplitudes)
        out[idx ^ op.x_mask()] = phases * self.amplitudes
        return out

    def apply(self, op: PhasedCssOperator) -> "StateVector":
        self.amplitudes = self.applied(op)
        return self

    def expectation(self, op: PhasedCssOperator) -> complex:
        return complex(np.vdot(self.amplitudes, self.applied(op)))

    def project(self, op: PhasedCssOperator, outcome: int) -> float:
        """Project onto the ``outcome`` eigenspace of a Hermitian involution; returns its probability"""
        image = self.applied(op)
        projected = (self.amplitudes + outcome * image) / 2
        prob = float(np.vdot(projected, projected).real)
        if prob <= DETERMINISTIC_TOL:
            raise GaugingError(f"projection onto outcome {outcome} of {op} has zero norm")
        self.amplitudes = projected / np.sqrt(prob)
        return prob

    def measure(self, op: PhasedCssOperator, rng: np.random.Generator) -> int:
        image = self.applied(op)
        ev = float(np.vdot(self.amplitudes, image).real)
        p_plus = min(max((1.0 + ev) / 2.0, 0.0), 1.0)
        outcome = _sample(rng, p_plus)
        projected = (self.amplitudes + outcome * image) / 2
        self.amplitudes = projected / np.linalg.norm(projected)
        return outcome

    def append_qubits(self, bits: Sequence[int]) -> "StateVector":
        """Tensor on len(bits) new highest-index qubits in the basis state ``bits``"""
        m = len(bits)
        _check_ceiling(self.n + m)
        index = sum(1 << i for i, b in enumerate(bits) if b)
        ancilla = np.zeros(1 << m, dtype=complex)
        ancilla[index] = 1.0
        self.amplitudes = np.kron(ancilla, self.amplitudes)
        self.n += m
        return self

    def discard(self, qubits: Sequence[int], expected: Sequence[int]) -> "StateVector":
        """Trace out ``qubits`` after checking they are in the product basis state ``expected``"""
        tensor = self.amplitudes.reshape([2] * self.n)
        selector = [slice(None)] * self.n
        for q, b in zip(qubits, expected):
            selector[self.n - 1 - q] = int(b)
        kept = tensor[tuple(selector)]
        weight = float(np.vdot(kept, kept).real)
        if abs(weight - 1.0) > 1e-9:
            raise GaugingError(f"qubits {list(qubits)} are not in the product state {list(expected)} "
                               f"(overlap {weight:.3e})")
        self.n -= len(qubits)
        self.amplitudes = np.ascontiguousarray(kept).reshape(1 << self.n) / np.sqrt(weight)
        return self

    def fidelity(self, other: "StateVector") -> float:
        if other.n != self.n:
            raise DimensionMismatchError(f"states on {self.n} and {other.n} qubits")
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


def _check_ceiling(n: int):
    if n > settings.QUBIT_CEILING:
        raise QubitCeilingError(
            f"statevector of {n} qubits exceeds the {settings.QUBIT_CEILING}-qubit ceiling; "
            f"use the symbolic verification suite (cli verify) instead")


class StabTableau:
    """Stabilizer tableau: rows 0..n-1 destabilizers, n..2n-1 stabilizers, sign bit per row"""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"Number of qubits must be positive, got {n}")
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        for i in range(n):
            self.x[i, i] = 1
            self.z[n + i, i] = 1

    def copy(self) -> "StabTableau":
        other = StabTableau.__new__(StabTableau)
        other.n = self.n
        other.x, other.z, other.r = self.x.copy(), self.z.copy(), self.r.copy()
        return other

    # gates

    def h(self, q: int):
        self.r ^= self.x[:, q] & self.z[:, q]
        self.x[:, q], self.z[:, q] = self.z[:, q].copy(), self.x[:, q].copy()

    def s(self, q: int):
        self.r ^= self.x[:, q] & self.z[:, q]
        self.z[:, q] ^= self.x[:, q]

    def pauli_x(self, q: int):
        self.r ^= self.z[:, q]

    def pauli_z(self, q: int):
        self.r ^= self.x[:, q]

    def cnot(self, c: int, t: int):
        self.r ^= self.x[:, c] & self.z[:, t] & (self.x[:, t] ^ self.z[:, c] ^ 1)
        self.x[:, t] ^= self.x[:, c]
        self.z[:, c] ^= self.z[:, t]

    def cz(self, p: int, q: int):
        self.h(q)
        self.cnot(p, q)
        self.h(q)

    def apply(self, op: PhasedCssOperator) -> "StabTableau":
        """Apply X(a)·D up to global phase: diagonal part first, then the X part"""
        if op.n != self.n:
            raise DimensionMismatchError(f"operator on {op.n} qubits, tableau has {self.n}")
        for q, power in op.linear:
            for _ in range(power):
                self.s(q)
        for p, q in sorted(op.quad):
            self.cz(p, q)
        for q in op.xpart.support:
            self.pauli_x(q)
        return self

    # row algebra

    @staticmethod
    def _g(x1, z1, x2, z2) -> np.ndarray:
        x1, z1, x2, z2 = (np.asarray(v, dtype=np.int64) for v in (x1, z1, x2, z2))
        return np.where(
            (x1 == 0) & (z1 == 0), 0,
            np.where((x1 == 1) & (z1 == 1), z2 - x2,
                     np.where(x1 == 1, z2 * (2 * x2 - 1), x2 * (1 - 2 * z2))))

    @classmethod
    def _multiply_rows(cls, xh, zh, rh, xi, zi, ri):
        total = 2 * int(rh) + 2 * int(ri) + int(cls._g(xi, zi, xh, zh).sum())
        return xh ^ xi, zh ^ zi, 0 if total % 4 == 0 else 1

    def _rowsum(self, h: int, i: int):
        self.x[h], self.z[h], self.r[h] = self._multiply_rows(
            self.x[h], self.z[h], self.r[h], self.x[i], self.z[i], self.r[i])

    def _anticommuting(self, px: np.ndarray, pz: np.ndarray) -> np.ndarray:
        return ((self.x.astype(np.int64) @ pz.astype(np.int64)) +
                (self.z.astype(np.int64) @ px.astype(np.int64))) % 2

    def _stabilizer_value(self, px: np.ndarray, pz: np.ndarray) -> Optional[int]:
        """(-1)^r when the unsigned Pauli lies in the stabilizer group up to sign, else None"""
        anti = self._anticommuting(px, pz)
        if anti[self.n:].any():
            return None
        xs = np.zeros(self.n, dtype=np.uint8)
        zs = np.zeros(self.n, dtype=np.uint8)
        rs = 0
        for i in np.flatnonzero(anti[:self.n]):
            xs, zs, rs = self._multiply_rows(xs, zs, rs, self.x[i + self.n],
                                             self.z[i + self.n], self.r[i + self.n])
        return -1 if rs else 1

    def expectation(self, op: PhasedCssOperator) -> int:
        """+1/-1 when a Hermitian Pauli is (anti)stabilized, 0 otherwise"""
        px, pz, sign = _pauli_bits(op)
        value = self._stabilizer_value(px, pz)
        return 0 if value is None else value * sign

    def measure_pauli(self, px: np.ndarray, pz: np.ndarray, sign: int,
                      rng: np.random.Generator) -> int:
        px = np.asarray(px, dtype=np.uint8)
        pz = np.asarray(pz, dtype=np.uint8)
        anti = self._anticommuting(px, pz)
        candidates = np.flatnonzero(anti[self.n:])
        if candidates.size == 0:
            rng.random()
            return self._stabilizer_value(px, pz) * sign
        p = int(candidates[0]) + self.n
        for i in np.flatnonzero(anti):
            if i != p:
                self._rowsum(int(i), p)
        self.x[p - self.n], self.z[p - self.n], self.r[p - self.n] = \
            self.x[p].copy(), self.z[p].copy(), self.r[p]
        outcome = _sample(rng, 0.5)
        self.x[p], self.z[p] = px.copy(), pz.copy()
        self.r[p] = 0 if outcome * sign == 1 else 1
        return outcome

    def measure(self, op: PhasedCssOperator, rng: np.random.Generator) -> int:
        px, pz, sign = _pauli_bits(op)
        return self.measure_pauli(px, pz, sign, rng)

    def append_qubits(self, bits: Sequence[int]) -> "StabTableau":
        """Add len(bits) new highest-index qubits prepared in the basis state ``bits``"""
        n, m = self.n, len(bits)
        total = n + m
        grown = StabTableau(total)
        grown.x[:n, :n], grown.z[:n, :n], grown.r[:n] = self.x[:n], self.z[:n], self.r[:n]
        grown.x[total:total + n, :n] = self.x[n:]
        grown.z[total:total + n, :n] = self.z[n:]
        grown.r[total:total + n] = self.r[n:]
        self.n, self.x, self.z, self.r = grown.n, grown.x, grown.z, grown.r
        for k, b in enumerate(bits):
            if b:
                self.pauli_x(n + k)
        return self

    def discard(self, qubits: Sequence[int], expected: Sequence[int]) -> "StabTableau":
        """
        Verify ``qubits`` hold the basis state ``expected`` and reset them to |0>.
        The register keeps its size; only data-qubit observables are read afterwards.
        """
        for q, b in zip(qubits, expected):
            value = self.expectation(PhasedCssOperator.z(self.n, [q]))
            if value != (-1 if b else 1):
                raise GaugingError(f"qubit {q} is not in the basis state {b}")
            if b:
                self.pauli_x(q)
        return self


def _pauli_bits(op: PhasedCssOperator):
    try:
        px, pz, sign = to_signed_pauli(op)
    except ValueError as e:
        raise BackendMismatchError(f"tableau backend needs a Hermitian Pauli: {e}") from e
    return px.astype(np.uint8), pz.astype(np.uint8), sign


State = Union[StateVector, StabTableau]


def apply(state: State, op: PhasedCssOperator) -> State:
    return state.apply(op)


def measure_involution(state: State, op: PhasedCssOperator, rng: np.random.Generator
                       ) -> Tuple[int, State]:
    """Measure a Hermitian involution; returns (outcome, collapsed state)"""
    return state.measure(op, rng), state


def measure_pauli(tableau: StabTableau, pauli: Union[PhasedCssOperator, Tuple],
                  rng: np.random.Generator) -> Tuple[int, StabTableau]:
    if isinstance(pauli, PhasedCssOperator):
        return tableau.measure(pauli, rng), tableau
    px, pz, sign = pauli
    return tableau.measure_pauli(px, pz, sign, rng), tableau


@dataclass
class SyndromeRecord:
    x_outcomes: List[List[int]] = field(default_factory=list)
    z_outcomes: List[List[int]] = field(default_factory=list)
    corrected: bool = False

    @property
    def trivial(self) -> bool:
        return all(o == 1 for block in self.x_outcomes + self.z_outcomes for o in block)

    def to_json(self) -> dict:
        return {'x': self.x_outcomes, 'z': self.z_outcomes, 'corrected': self.corrected}


PREPARE = 'prepare'
VERIFY = 'verify'
SYNDROME = 'syndrome'


def project_codespace(state: State, codes: Union[CssCode, Sequence[CssCode]],
                      rng: np.random.Generator, mode: str = PREPARE,
                      offsets: Optional[Sequence[int]] = None) -> Tuple[State, SyndromeRecord]:
    """
    Measure every X-check then every Z-check of each code (codes laid out from
    ``offsets``, consecutive by default).

    ``prepare`` corrects nontrivial syndromes adaptively, ``verify`` raises on any
    -1 outcome, ``syndrome`` only reports.
    """
    if isinstance(codes, CssCode):
        codes = [codes]
    if offsets is None:
        offsets, acc = [], 0
        for c in codes:
            offsets.append(acc)
            acc += c.n
    record = SyndromeRecord()
    for code, off in zip(codes, offsets):
        xs, zs = code.check_operators(state.n, off)
        x_out = [state.measure(op, rng) for op in xs]
        z_out = [state.measure(op, rng) for op in zs]
        record.x_outcomes.append(x_out)
        record.z_outcomes.append(z_out)
        if mode == PREPARE:
            sx = BitVec(len(x_out), tuple(i for i, o in enumerate(x_out) if o < 0))
            sz = BitVec(len(z_out), tuple(i for i, o in enumerate(z_out) if o < 0))
            if sx:
                w = solve(code.hx, sx)
                state.apply(PhasedCssOperator.z(state.n, [off + q for q in w.support]))
                record.corrected = True
            if sz:
                u = solve(code.hz, sz)
                state.apply(PhasedCssOperator.x(state.n, [off + q for q in u.support]))
                record.corrected = True
    if mode == VERIFY and not record.trivial:
        raise DetectedFaultError("code-space verification found a nontrivial syndrome",
                                 outcomes=record.to_json())
    return state, record


def compare_distributions(counts_a: Mapping, counts_b: Mapping) -> float:
    """Chi-square homogeneity p-value for two outcome histograms"""
    keys = sorted(set(counts_a) | set(counts_b), key=repr)
    table = np.array([[counts_a.get(k, 0) for k in keys],
                      [counts_b.get(k, 0) for k in keys]], dtype=float)
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        return 1.0
    _, p_value, _, _ = stats.chi2_contingency(table)
    return float(p_value)

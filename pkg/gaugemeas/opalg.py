"""
Phased CSS operators: X-type Paulis dressed by diagonal Clifford phases.

A value represents ``w^phase · X(a) · D`` with ``w = exp(iπ/4)`` and
``D = Π S_q^{l_q} · Π CZ_pq``. On a computational basis state the diagonal part
contributes ``w^{f(x)}`` with ``f(x) = 2 Σ l_q x_q + 4 Σ x_p x_q (mod 8)``.
The normal form keeps the X part on the left; moving a diagonal past X(b)
uses the update rule in ``_push_diagonal``.

T and CCZ only appear as conjugation maps, so the algebra stays closed.
"""

import logging
import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from . import settings
from .errors import DimensionMismatchError, OperatorSizeError
from .f2la import BitVec

logger = logging.getLogger(__name__)

# w^k for k = 0..7, written exactly where possible
OMEGA_POWERS = np.array([
    1, (1 + 1j) / np.sqrt(2), 1j, (-1 + 1j) / np.sqrt(2),
    -1, (-1 - 1j) / np.sqrt(2), -1j, (1 - 1j) / np.sqrt(2),
], dtype=complex)

# T^s X T^-s = w^(T_PHASE[s]) X S^(T_SPOWER[s]); fixed against 2x2 matrices in the tests
T_PHASE = {+1: 1, -1: 7}
T_SPOWER = {+1: 3, -1: 1}


def _canonical_linear(items: Iterable[Tuple[int, int]]) -> Tuple[Tuple[int, int], ...]:
    acc: Dict[int, int] = {}
    for q, p in items:
        acc[int(q)] = (acc.get(int(q), 0) + int(p)) % 4
    return tuple(sorted((q, p) for q, p in acc.items() if p))


def _canonical_quad(pairs: Iterable[Tuple[int, int]]) -> FrozenSet[Tuple[int, int]]:
    acc: Set[Tuple[int, int]] = set()
    for p, q in pairs:
        p, q = int(p), int(q)
        if p == q:
            raise ValueError(f"CZ needs two distinct qubits, got ({p}, {q})")
        acc ^= {(min(p, q), max(p, q))}
    return frozenset(acc)


@dataclass(frozen=True)
class PhasedCssOperator:
    n: int
    phase: int = 0
    xpart: BitVec = None
    linear: Tuple[Tuple[int, int], ...] = ()
    quad: FrozenSet[Tuple[int, int]] = frozenset()

    def __post_init__(self):
        xpart = self.xpart if self.xpart is not None else BitVec.zeros(self.n)
        if not isinstance(xpart, BitVec):
            xpart = BitVec(self.n, tuple(xpart))
        if xpart.length != self.n:
            raise DimensionMismatchError(f"X part has length {xpart.length}, expected {self.n}")
        linear = _canonical_linear(self.linear)
        quad = _canonical_quad(self.quad)
        for q, _ in linear:
            if not 0 <= q < self.n:
                raise DimensionMismatchError(f"S power on qubit {q} outside register of {self.n}")
        for p, q in quad:
            if q >= self.n or p < 0:
                raise DimensionMismatchError(f"CZ({p},{q}) outside register of {self.n}")
        object.__setattr__(self, 'phase', int(self.phase) % 8)
        object.__setattr__(self, 'xpart', xpart)
        object.__setattr__(self, 'linear', linear)
        object.__setattr__(self, 'quad', quad)

    # construction

    @classmethod
    def identity(cls, n: int) -> "PhasedCssOperator":
        return cls(n)

    @classmethod
    def x(cls, n: int, qubits: Iterable[int]) -> "PhasedCssOperator":
        qubits = list(qubits)
        return cls(n, xpart=BitVec(n, _odd(qubits)))

    @classmethod
    def z(cls, n: int, qubits: Iterable[int]) -> "PhasedCssOperator":
        return cls(n, linear=tuple((q, 2) for q in qubits))

    @classmethod
    def s(cls, n: int, qubit: int, power: int = 1) -> "PhasedCssOperator":
        return cls(n, linear=((qubit, power),))

    @classmethod
    def cz(cls, n: int, p: int, q: int) -> "PhasedCssOperator":
        return cls(n, quad=frozenset([(p, q)]))

    @classmethod
    def omega(cls, n: int, k: int) -> "PhasedCssOperator":
        return cls(n, phase=k)

    # queries

    @property
    def linear_map(self) -> Dict[int, int]:
        return dict(self.linear)

    @property
    def x_support(self) -> Tuple[int, ...]:
        return self.xpart.support

    @property
    def z_support(self) -> Tuple[int, ...]:
        """Qubits carrying S^2 = Z in the diagonal part"""
        return tuple(q for q, p in self.linear if p == 2)

    @property
    def support(self) -> Tuple[int, ...]:
        qubits = set(self.xpart.support)
        qubits.update(q for q, _ in self.linear)
        for p, q in self.quad:
            qubits.update((p, q))
        return tuple(sorted(qubits))

    @property
    def weight(self) -> int:
        return len(self.support)

    def is_identity(self) -> bool:
        return self.phase == 0 and not self.xpart and not self.linear and not self.quad

    def is_diagonal(self) -> bool:
        return not self.xpart

    def is_pauli(self) -> bool:
        """X(a)·Z(b) up to phase"""
        return not self.quad and all(p == 2 for _, p in self.linear)

    def is_z_type(self) -> bool:
        """Unsigned Z-type Pauli: no X part, no CZ, only Z powers, phase 0"""
        return self.phase == 0 and not self.xpart and not self.quad and \
            all(p == 2 for _, p in self.linear)

    def diagonal_phase(self, x: np.ndarray) -> np.ndarray:
        """f(x) mod 8 for an array of basis-state indices"""
        x = np.asarray(x, dtype=np.int64)
        f = np.zeros(x.shape, dtype=np.int64)
        for q, p in self.linear:
            f += 2 * p * ((x >> q) & 1)
        for p, q in self.quad:
            f += 4 * (((x >> p) & 1) & ((x >> q) & 1))
        return f % 8

    def x_mask(self) -> int:
        return self.xpart.to_int()

    # algebra

    def __matmul__(self, other: "PhasedCssOperator") -> "PhasedCssOperator":
        return multiply(self, other)

    def dagger(self) -> "PhasedCssOperator":
        return dagger(self)

    def to_text(self) -> str:
        parts = [f"w^{self.phase}"]
        if self.xpart:
            parts.append("X{" + ",".join(str(q) for q in self.xpart.support) + "}")
        if self.linear:
            parts.append("S{" + ",".join(f"{q}:{p}" for q, p in self.linear) + "}")
        if self.quad:
            parts.append("CZ{" + ",".join(f"({p},{q})" for p, q in sorted(self.quad)) + "}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def to_json(self) -> str:
        return self.to_text()

    def embed(self, n: int, mapping: Optional[Mapping[int, int]] = None) -> "PhasedCssOperator":
        """Relabel qubits (identity map by default) into a register of ``n`` qubits"""
        if mapping is None:
            mapping = {q: q for q in range(self.n)}
        return PhasedCssOperator(
            n,
            phase=self.phase,
            xpart=BitVec(n, tuple(mapping[q] for q in self.xpart.support)),
            linear=tuple((mapping[q], p) for q, p in self.linear),
            quad=frozenset((mapping[p], mapping[q]) for p, q in self.quad),
        )

    def restrict(self, qubits: Sequence[int]) -> "PhasedCssOperator":
        """Same operator on the register ``qubits`` (renumbered); support must lie inside"""
        position = {q: k for k, q in enumerate(qubits)}
        missing = [q for q in self.support if q not in position]
        if missing:
            raise DimensionMismatchError(f"operator acts outside the kept qubits: {missing}")
        return self.embed(len(qubits), position)


def _odd(qubits: Sequence[int]) -> Tuple[int, ...]:
    acc: Set[int] = set()
    for q in qubits:
        acc ^= {int(q)}
    return tuple(acc)


def _push_diagonal(linear: Mapping[int, int], quad: FrozenSet[Tuple[int, int]],
                   b: Set[int]) -> Tuple[int, Dict[int, int]]:
    """
    D·X(b) = w^c · X(b)·D' where D' has f'(x) = f(x xor b). Returns (c, linear of D');
    the CZ set is unchanged.
    """
    const = 0
    new_linear: Dict[int, int] = {}
    for q, p in linear.items():
        if q in b:
            const += 2 * p
            new_linear[q] = (-p) % 4
        else:
            new_linear[q] = p
    for p, q in quad:
        bp, bq = p in b, q in b
        if bq:
            new_linear[p] = (new_linear.get(p, 0) + 2) % 4
        if bp:
            new_linear[q] = (new_linear.get(q, 0) + 2) % 4
        if bp and bq:
            const += 4
    return const % 8, new_linear


def _same_register(a: PhasedCssOperator, b: PhasedCssOperator):
    if a.n != b.n:
        raise DimensionMismatchError(f"operators act on {a.n} and {b.n} qubits")


def multiply(a: PhasedCssOperator, b: PhasedCssOperator) -> PhasedCssOperator:
    """Exact product a·b"""
    _same_register(a, b)
    const, pushed = _push_diagonal(a.linear_map, a.quad, set(b.xpart.support))
    linear = list(pushed.items()) + list(b.linear)
    return PhasedCssOperator(
        a.n,
        phase=a.phase + b.phase + const,
        xpart=a.xpart + b.xpart,
        linear=linear,
        quad=a.quad ^ b.quad,
    )


def product(ops: Iterable[PhasedCssOperator], n: Optional[int] = None) -> PhasedCssOperator:
    result = None
    for op in ops:
        result = op if result is None else multiply(result, op)
    if result is None:
        if n is None:
            raise ValueError("empty product needs a register size")
        return PhasedCssOperator.identity(n)
    return result


def dagger(a: PhasedCssOperator) -> PhasedCssOperator:
    """(w^g X(a) D)† = w^-g D† X(a), rewritten in normal form"""
    inverse_linear = {q: (-p) % 4 for q, p in a.linear}
    const, pushed = _push_diagonal(inverse_linear, a.quad, set(a.xpart.support))
    return PhasedCssOperator(a.n, phase=-a.phase + const, xpart=a.xpart,
                             linear=tuple(pushed.items()), quad=a.quad)


def commutator(a: PhasedCssOperator, b: PhasedCssOperator) -> PhasedCssOperator:
    """Group commutator a·b·a†·b†"""
    return multiply(multiply(multiply(a, b), dagger(a)), dagger(b))


def commutes(a: PhasedCssOperator, b: PhasedCssOperator) -> bool:
    if not set(a.support) & set(b.support):
        return True
    return commutator(a, b).is_identity()


def conjugate_by_T(a: PhasedCssOperator, site: int, sign: int = +1) -> PhasedCssOperator:
    """T^sign · a · T^-sign with T on ``site``; diagonal parts commute with T"""
    if sign not in T_PHASE:
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if site not in a.xpart:
        return a
    return PhasedCssOperator(a.n, phase=a.phase + T_PHASE[sign], xpart=a.xpart,
                             linear=a.linear + ((site, T_SPOWER[sign]),), quad=a.quad)


def conjugate_by_CCZ(a: PhasedCssOperator, triple: Sequence[int]) -> PhasedCssOperator:
    """
    CCZ · a · CCZ on qubits (i, j, k). With c(x) = x_i x_j x_k the X part picks up
    the diagonal (-1)^{c(x) + c(x xor a)}, expanded into CZ, Z and a sign.
    """
    if len(triple) != 3 or len(set(triple)) != 3:
        raise ValueError(f"CCZ needs three distinct qubits, got {tuple(triple)}")
    i, j, k = (int(t) for t in triple)
    if any(not 0 <= t < a.n for t in (i, j, k)):
        raise DimensionMismatchError(f"CCZ{(i, j, k)} outside register of {a.n}")
    ai, aj, ak = (t in a.xpart for t in (i, j, k))
    pairs = []
    zs = []
    if ai:
        pairs.append((j, k))
    if aj:
        pairs.append((i, k))
    if ak:
        pairs.append((i, j))
    if ai and aj:
        zs.append(k)
    if ai and ak:
        zs.append(j)
    if aj and ak:
        zs.append(i)
    const = 4 if (ai and aj and ak) else 0
    return PhasedCssOperator(a.n, phase=a.phase + const, xpart=a.xpart,
                             linear=a.linear + tuple((q, 2) for q in zs),
                             quad=a.quad ^ _canonical_quad(pairs))


def conjugate_by_cnot(a: PhasedCssOperator, control: int, target: int) -> PhasedCssOperator:
    """CX · a · CX: X part maps a_t -> a_t + a_c, the diagonal becomes f(x with x_t -> x_t + x_c)"""
    c, t = int(control), int(target)
    if c == t or not (0 <= c < a.n and 0 <= t < a.n):
        raise DimensionMismatchError(f"CX({c},{t}) invalid on register of {a.n}")
    xs = set(a.xpart.support)
    if c in xs:
        xs ^= {t}
    linear = list(a.linear)
    quad = []
    for q, p in a.linear:
        if q == t:
            linear.append((c, p))
            if p % 2:
                quad.append((c, t))
    for p, q in a.quad:
        quad.append((p, q))
        if t in (p, q):
            other = q if p == t else p
            if other == c:
                linear.append((c, 2))
            else:
                quad.append((c, other))
    return PhasedCssOperator(a.n, phase=a.phase, xpart=BitVec(a.n, tuple(xs)),
                             linear=tuple(linear), quad=_canonical_quad(quad))


def is_hermitian_involution(a: PhasedCssOperator) -> bool:
    return multiply(a, a).is_identity() and dagger(a) == a


def to_matrix(a: PhasedCssOperator, max_qubits: Optional[int] = None) -> np.ndarray:
    """Dense 2^n x 2^n matrix; qubit q is bit q of the basis index"""
    limit = settings.DENSE_ORACLE_MAX if max_qubits is None else max_qubits
    if a.n > limit:
        raise OperatorSizeError(f"dense matrix for {a.n} qubits exceeds the {limit}-qubit ceiling")
    dim = 1 << a.n
    idx = np.arange(dim, dtype=np.int64)
    m = np.zeros((dim, dim), dtype=complex)
    m[idx ^ a.x_mask(), idx] = OMEGA_POWERS[(a.phase + a.diagonal_phase(idx)) % 8]
    return m


def xs_site(n: int, qubit: int, sign: int) -> PhasedCssOperator:
    """On-site action T^sign X T^-sign: sign +1 gives sqrt(i) X S†, sign -1 gives sqrt(-i) X S"""
    return conjugate_by_T(PhasedCssOperator.x(n, [qubit]), qubit, sign)


def to_signed_pauli(a: PhasedCssOperator) -> Tuple[np.ndarray, np.ndarray, int]:
    """
    Hermitian Pauli as (x bits, z bits, sign) with Y wherever both bits are set.
    X(a)Z(b) carries (-i) per overlapping qubit relative to the Y convention.
    """
    if not a.is_pauli():
        raise ValueError(f"not a Pauli operator: {a}")
    x = a.xpart.to_array().astype(bool)
    z = np.zeros(a.n, dtype=bool)
    for q in a.z_support:
        z[q] = True
    overlap = int(np.count_nonzero(x & z))
    phase = (a.phase - 2 * overlap) % 8
    if phase not in (0, 4):
        raise ValueError(f"Pauli operator is not Hermitian: {a}")
    return x, z, (1 if phase == 0 else -1)


_TEXT_RE = re.compile(r"(w\^-?\d+)|(X\{[^}]*\})|(S\{[^}]*\})|(CZ\{[^}]*\})")


def from_text(n: int, text: str) -> PhasedCssOperator:
    """Parse the report text form, e.g. ``w^3 X{0,4} S{2:1} CZ{(1,3)}``"""
    phase = 0
    xs: Tuple[int, ...] = ()
    linear = []
    quad = []
    stripped = text.strip()
    if _TEXT_RE.sub('', stripped).strip():
        raise ValueError(f"cannot parse operator text {text!r}")
    for match in _TEXT_RE.finditer(stripped):
        token = match.group(0)
        body = token[token.index('{') + 1:-1] if '{' in token else ''
        if token.startswith('w^'):
            phase = int(token[2:])
        elif token.startswith('X{'):
            xs = tuple(int(v) for v in body.split(',') if v.strip())
        elif token.startswith('S{'):
            for item in filter(None, (v.strip() for v in body.split(','))):
                q, p = item.split(':')
                linear.append((int(q), int(p)))
        else:
            for p, q in re.findall(r"\((\d+),\s*(\d+)\)", body):
                quad.append((int(p), int(q)))
    return PhasedCssOperator(n, phase=phase, xpart=BitVec(n, xs), linear=tuple(linear),
                             quad=frozenset(quad))

"""
CSS codes read off a chain complex.

With qubits on grade q, X-checks are the rows of ∂_q (one per grade q-1 element)
and Z-checks are the columns of ∂_{q+1} (one per grade q+1 element). Logical X
operators are cohomology classes, logical Z operators homology classes.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, NamedTuple, Optional, Sequence, Tuple

from .chain_complex import (
    ChainComplex, WeightResult, cohomology_basis, homology_basis, homology_distance,
    require_valid, COHOMOLOGY, HOMOLOGY,
)
from .errors import DimensionMismatchError
from .f2la import BitMatrix, BitVec, XorBasis, inverse, multiply, rank
from .opalg import PhasedCssOperator

logger = logging.getLogger(__name__)


class LdpcProfile(NamedTuple):
    max_check_weight: int
    max_qubit_degree: int


class CodeDistance(NamedTuple):
    d_x: WeightResult
    d_z: WeightResult

    @property
    def d(self) -> WeightResult:
        exact = [r for r in (self.d_x, self.d_z) if r.is_exact]
        if self.d_x.is_infinite and self.d_z.is_infinite:
            return WeightResult.infinite()
        if any(r.is_unknown for r in (self.d_x, self.d_z)):
            bound = min((r.value for r in exact), default=None)
            unknown = [r for r in (self.d_x, self.d_z) if r.is_unknown]
            if bound is not None and all(u.value is not None and bound < u.value for u in unknown):
                return min(exact, key=lambda r: r.value)
            return WeightResult.unknown(min(u.value for u in unknown if u.value is not None))
        return min(exact, key=lambda r: r.value)


@dataclass(frozen=True)
class CssCode:
    complex: ChainComplex
    qubit_grade: int = 1
    name: str = field(default="", compare=False)

    @property
    def n(self) -> int:
        return self.complex.dim(self.qubit_grade)

    @cached_property
    def hx(self) -> BitMatrix:
        """X-check matrix, rows indexed by checks"""
        return self.complex.boundary(self.qubit_grade)

    @cached_property
    def hz(self) -> BitMatrix:
        """Z-check matrix, rows indexed by checks"""
        return self.complex.boundary(self.qubit_grade + 1).transpose()

    @cached_property
    def x_checks(self) -> Tuple[BitVec, ...]:
        return tuple(BitVec(self.n, r) for r in self.hx.row_supports())

    @cached_property
    def z_checks(self) -> Tuple[BitVec, ...]:
        return tuple(BitVec(self.n, r) for r in self.hz.row_supports())

    @cached_property
    def k(self) -> int:
        return self.n - rank(self.hx) - rank(self.hz)

    @cached_property
    def z_stabilizer_span(self) -> XorBasis:
        return XorBasis(z.to_int() for z in self.z_checks)

    @cached_property
    def x_stabilizer_span(self) -> XorBasis:
        return XorBasis(x.to_int() for x in self.x_checks)

    def check_operators(self, register: int, offset: int = 0) -> Tuple[List[PhasedCssOperator], List[PhasedCssOperator]]:
        """(X-checks, Z-checks) as operators on a register, code qubits starting at ``offset``"""
        xs = [PhasedCssOperator.x(register, [offset + q for q in c.support]) for c in self.x_checks]
        zs = [PhasedCssOperator.z(register, [offset + q for q in c.support]) for c in self.z_checks]
        return xs, zs

    def to_json(self) -> dict:
        x_basis, z_basis = normalized_logicals(self)
        return {
            'name': self.name,
            'n': self.n,
            'k': self.k,
            'x_checks': [c.to_json() for c in self.x_checks],
            'z_checks': [c.to_json() for c in self.z_checks],
            'logical_x': [v.to_json() for v in x_basis],
            'logical_z': [v.to_json() for v in z_basis],
        }


def from_complex(cx: ChainComplex, qubit_grade: int = 1, name: str = "") -> CssCode:
    """Code with qubits on ``qubit_grade``; an invalid complex raises ChainComplexError"""
    require_valid(cx)
    if not 0 <= qubit_grade <= cx.top:
        raise DimensionMismatchError(f"qubit grade {qubit_grade} outside 0..{cx.top}")
    code = CssCode(cx, qubit_grade, name)
    logger.debug(f"code {name or '<anonymous>'}: n={code.n}, k={code.k}")
    return code


def _pairing(xs: Sequence[BitVec], zs: Sequence[BitVec]) -> BitMatrix:
    k = len(xs)
    return BitMatrix(k, k, [[a for a in range(k) if xs[a].dot(zs[b])] for b in range(k)])


def _combine(matrix: BitMatrix, vectors: Sequence[BitVec], length: int) -> List[BitVec]:
    """Row a of the result is Σ_b matrix[a, b] vectors[b]"""
    out = []
    dense = matrix.to_dense()
    for a in range(matrix.rows):
        acc = BitVec.zeros(length)
        for b in range(matrix.cols):
            if dense[a, b]:
                acc = acc + vectors[b]
        out.append(acc)
    return out


def normalized_logicals(code: CssCode, z_basis: Optional[Sequence[BitVec]] = None
                        ) -> Tuple[List[BitVec], List[BitVec]]:
    """
    Logical bases with identity pairing. By default the Z basis is re-combined
    against the cohomology representatives; when a Z basis is supplied it is kept
    and the X basis is re-combined instead.
    """
    q = code.qubit_grade
    xs = list(cohomology_basis(code.complex, q))
    if z_basis is None:
        zs = list(homology_basis(code.complex, q))
    else:
        zs = list(z_basis)
        if len(zs) != len(xs):
            raise DimensionMismatchError(f"expected {len(xs)} Z logicals, got {len(zs)}")
        boundary = code.complex.boundary(q)
        for z in zs:
            if boundary.apply(z):
                raise DimensionMismatchError(f"Z logical {z.support} violates an X-check")
    if not xs:
        return [], []
    pairing = _pairing(xs, zs)
    inv = inverse(pairing)
    if z_basis is None:
        # Z' = (P^-1)^T Z
        zs = _combine(inv.transpose(), zs, code.n)
    else:
        # X' = P^-1 X
        xs = _combine(inv, xs, code.n)
    return xs, zs


def logical_basis(code: CssCode, kind: str) -> List[BitVec]:
    x_basis, z_basis = normalized_logicals(code)
    if kind.upper() == 'X':
        return x_basis
    if kind.upper() == 'Z':
        return z_basis
    raise ValueError(f"logical type must be X or Z, got {kind!r}")


def code_distance(code: CssCode, budget: Optional[int] = None) -> CodeDistance:
    """(d_X, d_Z): X-distance from cohomology, Z-distance from homology"""
    q = code.qubit_grade
    d_x = homology_distance(code.complex, q, COHOMOLOGY, budget)
    d_z = homology_distance(code.complex, q, HOMOLOGY, budget)
    return CodeDistance(d_x, d_z)


def ldpc_profile(code: CssCode) -> LdpcProfile:
    hx, hz = code.hx, code.hz
    check_weight = max(hx.max_row_weight, hz.max_row_weight)
    x_degree = [len(c) for c in hx.columns]
    z_degree = [len(c) for c in hz.columns]
    degree = max((a + b for a, b in zip(x_degree, z_degree)), default=0)
    return LdpcProfile(check_weight, degree)


def commutation_violations(code: CssCode) -> List[Tuple[int, int]]:
    """X/Z check pairs with odd overlap (empty for any valid complex)"""
    product = multiply(code.hx, code.hz.transpose())
    return [(i, j) for j, col in enumerate(product.columns) for i in col]

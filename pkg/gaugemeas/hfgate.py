"""
Higher-form transversal gates.

A gate of form degree h assigns an operator to every grade-h basis element of
its gate complex; on a cocycle c of that complex the gate is the product of the
site operators over supp(c). Site operators act on a register made of the target
codes laid side by side.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .chain_complex import ChainComplex, cohomology_basis, require_valid
from .css_code import CssCode, normalized_logicals
from .errors import (
    CodespaceError, CommutationError, DimensionMismatchError, InvalidGateError,
    NoSolutionError, NotACocycleError,
)
from .f2la import BitMatrix, BitVec, XorBasis, kernel_basis, solve
from .opalg import (
    PhasedCssOperator, commutator, conjugate_by_CCZ, is_hermitian_involution,
    multiply, product, xs_site,
)
from .report import CheckReport

logger = logging.getLogger(__name__)

PAULI_X = 'pauli-x'
PAULI_Z = 'pauli-z'
CZ = 'cz'
XS = 'xs'
CUSTOM = 'custom'


@dataclass(frozen=True)
class SparsityProfile:
    max_site_support: int
    max_qubit_fan_in: int


@dataclass(frozen=True)
class HigherFormGate:
    h: int
    gate_complex: ChainComplex
    sites: Tuple[PhasedCssOperator, ...]
    targets: Tuple[CssCode, ...]
    embedding: Tuple[Tuple[int, ...], ...]
    kind: str = CUSTOM
    name: str = field(default="", compare=False)

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def offsets(self) -> Tuple[int, ...]:
        out, acc = [], 0
        for t in self.targets:
            out.append(acc)
            acc += t.n
        return tuple(out)

    @property
    def n_data(self) -> int:
        return sum(t.n for t in self.targets)

    @cached_property
    def sparsity(self) -> SparsityProfile:
        fan_in: Dict[int, int] = {}
        for op in self.sites:
            for q in op.support:
                fan_in[q] = fan_in.get(q, 0) + 1
        return SparsityProfile(max((op.weight for op in self.sites), default=0),
                               max(fan_in.values(), default=0))

    @cached_property
    def strongly_transversal(self) -> bool:
        """Every site carries the same on-site unitary up to relabelling"""
        shapes = {_site_shape(op) for op in self.sites}
        return len(shapes) <= 1

    @cached_property
    def cocycle_generators(self) -> List[BitVec]:
        """Local coboundary generators followed by cohomology representatives"""
        delta = self.gate_complex.coboundary(self.h)
        gens = [delta.column(b) for b in range(delta.cols) if delta.columns[b]]
        gens.extend(cohomology_basis(self.gate_complex, self.h))
        return gens

    def register_z_span(self) -> XorBasis:
        basis = XorBasis()
        for t, off in zip(self.targets, self.offsets):
            for z in t.z_checks:
                basis.add(sum(1 << (off + q) for q in z.support))
        return basis

    def register_checks(self) -> List[Tuple[str, int, int, PhasedCssOperator]]:
        """(type, target index, check index, operator) for every check of every target"""
        out = []
        for ti, (t, off) in enumerate(zip(self.targets, self.offsets)):
            xs, zs = t.check_operators(self.n_data, off)
            out.extend(('X', ti, i, op) for i, op in enumerate(xs))
            out.extend(('Z', ti, i, op) for i, op in enumerate(zs))
        return out

    def to_json(self) -> dict:
        return {
            'h': self.h,
            'name': self.name,
            'kind': self.kind,
            'gate_complex': self.gate_complex.to_json(),
            'sites': {str(i): op.to_text() for i, op in enumerate(self.sites)},
            'embedding': [list(e) for e in self.embedding],
        }


def _site_shape(op: PhasedCssOperator) -> Tuple:
    relabel = {q: k for k, q in enumerate(op.support)}
    local = op.embed(len(relabel), relabel)
    return (local.phase, local.xpart.support, local.linear, tuple(sorted(local.quad)))


def make_gate(h: int, gate_complex: ChainComplex, sites: Sequence[PhasedCssOperator],
              targets: Sequence[CssCode], embedding: Optional[Sequence[Sequence[int]]] = None,
              kind: str = CUSTOM, name: str = "") -> HigherFormGate:
    """Build a gate after checking site count, involutions and pairwise commutation"""
    require_valid(gate_complex)
    sites = tuple(sites)
    targets = tuple(targets)
    if len(sites) != gate_complex.dim(h):
        raise DimensionMismatchError(
            f"{len(sites)} site operators for {gate_complex.dim(h)} grade-{h} elements")
    n_data = sum(t.n for t in targets)
    for s, op in enumerate(sites):
        if op.n != n_data:
            raise DimensionMismatchError(f"site {s} acts on {op.n} qubits, register has {n_data}")
        if not is_hermitian_involution(op):
            raise InvalidGateError(f"site {s} operator {op} is not a Hermitian involution")
    if embedding is None:
        embedding = [op.support for op in sites]
    embedding = tuple(tuple(int(q) for q in e) for e in embedding)
    if len(embedding) != len(sites):
        raise DimensionMismatchError("embedding must list one entry per site")

    by_qubit: Dict[int, List[int]] = {}
    for s, op in enumerate(sites):
        for q in op.support:
            by_qubit.setdefault(q, []).append(s)
    checked = set()
    for members in by_qubit.values():
        for s, t in itertools.combinations(members, 2):
            if (s, t) in checked:
                continue
            checked.add((s, t))
            if not commutator(sites[s], sites[t]).is_identity():
                raise CommutationError(f"site operators {s} and {t} do not commute",
                                       witness=(s, t))
    gate = HigherFormGate(h, gate_complex, sites, targets, embedding, kind, name)
    logger.debug(f"gate {name or kind}: {len(sites)} sites, sparsity {gate.sparsity}")
    return gate


def partial_symmetry(g: HigherFormGate, y: BitVec) -> PhasedCssOperator:
    """Product of site operators over supp(y); y need not be a cocycle"""
    if y.length != g.n_sites:
        raise DimensionMismatchError(f"chain of length {y.length} for {g.n_sites} sites")
    return product((g.sites[s] for s in y.support), n=g.n_data)


def gate_for_cocycle(g: HigherFormGate, c: BitVec) -> PhasedCssOperator:
    """U(c) for a cocycle c of the gate complex"""
    if c.length != g.n_sites:
        raise DimensionMismatchError(f"chain of length {c.length} for {g.n_sites} sites")
    if g.gate_complex.coboundary(g.h + 1).apply(c):
        raise NotACocycleError(f"chain {c.support} has nonzero coboundary")
    return partial_symmetry(g, c)


def _x_check_pullbacks(code: CssCode, site_qubits: Sequence[int]) -> np.ndarray:
    """X-check generators of ``code`` read on the sites (rows: checks, cols: sites)"""
    dense = np.zeros((len(code.x_checks), len(site_qubits)), dtype=np.uint8)
    for i, check in enumerate(code.x_checks):
        supp = set(check.support)
        for s, q in enumerate(site_qubits):
            if q in supp:
                dense[i, s] = 1
    return dense


def _coboundary_generators(g: HigherFormGate) -> np.ndarray:
    delta = g.gate_complex.coboundary(g.h)
    rows = [col for col in delta.columns if col]
    dense = np.zeros((len(rows), g.n_sites), dtype=np.uint8)
    for i, col in enumerate(rows):
        dense[i, list(col)] = 1
    return dense


def validate_codespace_cz(g: HigherFormGate) -> CheckReport:
    """
    Triple condition (Im δ_h ∘ X-checks of target 0) · X-checks of target 1 = 0,
    checked over all generator triples on the sites' embedded qubits.
    """
    if len(g.targets) != 2:
        raise InvalidGateError(f"CZ condition needs two target codes, got {len(g.targets)}")
    off0, off1 = g.offsets
    n0, n1 = g.targets[0].n, g.targets[1].n
    q0, q1 = [], []
    for s, e in enumerate(g.embedding):
        first = [q - off0 for q in e if off0 <= q < off0 + n0]
        second = [q - off1 for q in e if off1 <= q < off1 + n1]
        if len(first) != 1 or len(second) != 1:
            raise InvalidGateError(f"site {s} is not embedded as one qubit per code: {e}")
        q0.append(first[0])
        q1.append(second[0])
    a = _coboundary_generators(g)
    b = _x_check_pullbacks(g.targets[0], q0)
    c = _x_check_pullbacks(g.targets[1], q1)
    violations = []
    for i in range(a.shape[0]):
        counts = ((a[i] * b).astype(np.int64) @ c.T.astype(np.int64)) % 2
        for j, k in zip(*np.nonzero(counts)):
            violations.append({'image': i, 'check0': int(j), 'check1': int(k)})
    if violations:
        logger.info(f"CZ codespace condition fails on {len(violations)} triples")
        return CheckReport.fail('codespace-cz', witness=violations[:20],
                                violations=len(violations))
    return CheckReport.ok('codespace-cz', triples=int(a.shape[0] * b.shape[0] * c.shape[0]))


def site_xs_signs(g: HigherFormGate) -> List[int]:
    """+1 for a sqrt(-i) X S site, -1 for sqrt(i) X S†"""
    signs = []
    for s, op in enumerate(g.sites):
        powers = dict(op.linear)
        if len(op.xpart.support) != 1 or op.quad or len(powers) != 1:
            raise InvalidGateError(f"site {s} is not an XS-type operator: {op}")
        power = next(iter(powers.values()))
        if power == 1:
            signs.append(+1)
        elif power == 3:
            signs.append(-1)
        else:
            raise InvalidGateError(f"site {s} is not an XS-type operator: {op}")
    return signs


def validate_codespace_xs(g: HigherFormGate) -> CheckReport:
    """
    XS conditions on one target: (Im δ_h ∘ X-checks) · X-checks = 0 for all generator
    triples, and every overlap region R = a ∘ b has even size with the number of
    XS sites congruent to |R|/2 mod 2.
    """
    if len(g.targets) != 1:
        raise InvalidGateError(f"XS condition needs one target code, got {len(g.targets)}")
    qubits = []
    for s, e in enumerate(g.embedding):
        if len(e) != 1:
            raise InvalidGateError(f"site {s} is not embedded on a single qubit: {e}")
        qubits.append(e[0])
    is_xs = np.array([1 if sign > 0 else 0 for sign in site_xs_signs(g)], dtype=np.int64)
    a = _coboundary_generators(g).astype(np.int64)
    b = _x_check_pullbacks(g.targets[0], qubits).astype(np.int64)
    violations = []
    for i in range(a.shape[0]):
        regions = a[i] * b
        triple = (regions @ b.T) % 2
        for j, k in zip(*np.nonzero(triple)):
            violations.append({'condition': 'triple', 'image': i, 'check': int(j),
                               'other': int(k)})
        sizes = regions.sum(axis=1)
        xs_counts = regions @ is_xs
        for j in range(b.shape[0]):
            size = int(sizes[j])
            if size % 2:
                violations.append({'condition': 'odd-region', 'image': i, 'check': j,
                                   'size': size})
            elif (int(xs_counts[j]) - size // 2) % 2:
                violations.append({'condition': 'parity', 'image': i, 'check': j,
                                   'size': size, 'xs_sites': int(xs_counts[j])})
    if violations:
        logger.info(f"XS codespace condition fails in {len(violations)} places")
        return CheckReport.fail('codespace-xs', witness=violations[:20],
                                violations=len(violations))
    return CheckReport.ok('codespace-xs', regions=int(a.shape[0] * b.shape[0]))


def verify_codespace(g: HigherFormGate) -> CheckReport:
    """
    Operational test: for every cocycle generator c and every check S touching U(c),
    the commutator U(c) S U(c)† S† must be an unsigned Z-type Pauli in the Z-stabilizer group.
    """
    z_span = g.register_z_span()
    checks = g.register_checks()
    by_qubit: Dict[int, List[int]] = {}
    for idx, (_, _, _, op) in enumerate(checks):
        for q in op.support:
            by_qubit.setdefault(q, []).append(idx)
    failures = []
    generators = g.cocycle_generators
    for gi, c in enumerate(generators):
        u = partial_symmetry(g, c)
        touched = sorted({idx for q in u.support for idx in by_qubit.get(q, ())})
        for idx in touched:
            kind, ti, ci, op = checks[idx]
            k = commutator(u, op)
            if k.is_identity():
                continue
            if k.is_z_type() and z_span.contains(sum(1 << q for q in k.z_support)):
                continue
            failures.append({'cocycle': list(c.support), 'check': [kind, ti, ci],
                             'commutator': k.to_text()})
            if len(failures) >= 20:
                break
        if len(failures) >= 20:
            break
    if failures:
        return CheckReport.fail('codespace', witness=failures)
    return CheckReport.ok('codespace', cocycle_generators=len(generators), checks=len(checks))


def derive_from_t(code: CssCode, black: Sequence[int], white: Sequence[int],
                  name: str = "") -> HigherFormGate:
    """
    1-form XS gate from T on ``black`` qubits and T† on ``white`` qubits: the site at
    qubit t is T^{±1} X_t T^{∓1}.
    """
    black, white = set(black), set(white)
    if black & white:
        raise InvalidGateError(f"qubits in both colour classes: {sorted(black & white)}")
    if black | white != set(range(code.n)):
        missing = sorted(set(range(code.n)) - (black | white))
        raise InvalidGateError(f"bipartition does not cover qubits {missing}")
    sites = [xs_site(code.n, t, +1 if t in black else -1) for t in range(code.n)]
    return make_gate(1, code.complex, sites, [code], [(t,) for t in range(code.n)], XS,
                     name or f"xs-{code.name}")


def derive_from_ccz(code: CssCode, name: str = "") -> HigherFormGate:
    """
    1-form CZ gate across two copies of ``code`` obtained from transversal CCZ on three
    copies: the site at qubit q is the commutator of CCZ(q, n+q, 2n+q) with X on copy 3.
    """
    q_grade = code.qubit_grade
    cx = code.complex
    n = code.n
    images = [col for col in cx.coboundary(q_grade).columns if col]
    cocycles = kernel_basis(cx.coboundary(q_grade + 1))
    a = np.zeros((len(images), n), dtype=np.int64)
    for i, col in enumerate(images):
        a[i, list(col)] = 1
    kmat = np.array([v.to_array() for v in cocycles], dtype=np.int64).reshape(len(cocycles), n)
    for i in range(a.shape[0]):
        counts = ((a[i] * kmat) @ kmat.T) % 2
        bad = np.argwhere(counts)
        if bad.size:
            j, k = (int(v) for v in bad[0])
            raise CodespaceError(
                f"transversal CCZ does not preserve three copies of {code.name or 'the code'}",
                witness={'image': i, 'cocycles': [j, k]})

    sites = []
    for q in range(n):
        x3 = PhasedCssOperator.x(3 * n, [2 * n + q])
        site = _ccz_commutator(x3, (q, n + q, 2 * n + q))
        sites.append(site.restrict(list(range(2 * n))))
    return make_gate(q_grade, cx, sites, [code, code], [(q, n + q) for q in range(n)], CZ,
                     name or f"ccz-{code.name}")


def _ccz_commutator(x: PhasedCssOperator, triple: Sequence[int]) -> PhasedCssOperator:
    """CCZ · x · CCZ† · x†, with CCZ self-inverse"""
    return multiply(conjugate_by_CCZ(x, triple), x.dagger())


def induced_cz_gate(code0: CssCode, code1: CssCode, name: str = "") -> HigherFormGate:
    """
    1-form CZ gate between two codes of equal length on shared qubit sites.
    C_0 = 0, C_1 = sites, and the rows of δ_2 span {b ∘ x} over X-checks b of one code
    and cocycles x of the other, in both orders; its cocycles are exactly the site
    sets whose CZ products preserve both code spaces.
    """
    if code0.n != code1.n:
        raise DimensionMismatchError(f"codes have {code0.n} and {code1.n} qubits")
    n = code0.n
    products = XorBasis()
    rows: List[Tuple[int, ...]] = []
    for checks, other in ((code0.x_checks, code1), (code1.x_checks, code0)):
        cocycles = kernel_basis(other.complex.coboundary(other.qubit_grade + 1))
        for b in checks:
            for x in cocycles:
                v = (b & x)
                if v and products.add(v.to_int()):
                    rows.append(v.support)
    delta2 = BitMatrix(len(rows), n, [[r for r, row in enumerate(rows) if j in row]
                                        for j in range(n)])
    gate_complex = ChainComplex((0, n, len(rows)),
                                (BitMatrix.zeros(0, n), delta2.transpose()))
    sites = [PhasedCssOperator.cz(2 * n, q, n + q) for q in range(n)]
    return make_gate(1, gate_complex, sites, [code0, code1], [(q, n + q) for q in range(n)], CZ,
                     name or "induced-cz")


@dataclass(frozen=True)
class CleaningWitness:
    cleanable: bool
    b: Optional[BitVec] = None
    cleaned: Optional[BitVec] = None

    def to_json(self) -> dict:
        return {'cleanable': self.cleanable,
                'b': self.b.to_json() if self.b is not None else None,
                'cleaned': self.cleaned.to_json() if self.cleaned is not None else None}


def cleanability_witness(g: HigherFormGate, region: Sequence[int], c: BitVec) -> CleaningWitness:
    """Find b with c + δ_h b vanishing on ``region`` (a set of sites)"""
    region = sorted(set(int(s) for s in region))
    if any(not 0 <= s < g.n_sites for s in region):
        raise DimensionMismatchError(f"region {region} outside {g.n_sites} sites")
    delta = g.gate_complex.coboundary(g.h)
    restricted = delta.select_rows(region)
    try:
        b = solve(restricted, c.restrict(region))
    except NoSolutionError:
        return CleaningWitness(False)
    return CleaningWitness(True, b, c + delta.apply(b))


@dataclass(frozen=True)
class LogicalAction:
    """
    Logical map of U(c): row a lists the logical Z content acquired by logical X_a.
    Symmetric off-diagonal pairs are logical CZs, diagonal entries logical Z on the pair.
    """
    labels: Tuple[Tuple[int, int], ...]
    matrix: Tuple[Tuple[int, ...], ...]
    signs: Tuple[int, ...]
    residual_ok: bool
    non_pauli: Tuple[int, ...] = ()

    def cz_pairs(self) -> List[Tuple[Tuple[int, int], Tuple[int, int]]]:
        out = []
        for a, b in itertools.combinations(range(len(self.labels)), 2):
            if self.matrix[a][b] and self.matrix[b][a]:
                out.append((self.labels[a], self.labels[b]))
        return out

    def is_symmetric(self) -> bool:
        m = np.array(self.matrix, dtype=np.uint8).reshape(len(self.labels), len(self.labels))
        return bool(np.array_equal(m, m.T))

    def to_json(self) -> dict:
        return {'labels': [list(l) for l in self.labels],
                'matrix': [list(r) for r in self.matrix],
                'signs': list(self.signs), 'residual_ok': self.residual_ok,
                'non_pauli': list(self.non_pauli)}


def register_logicals(g: HigherFormGate, bases: Optional[Sequence[Tuple[Sequence[BitVec], Sequence[BitVec]]]] = None):
    """Normalized (X, Z) logical bases of every target lifted to the register, with labels"""
    labels, xs, zs = [], [], []
    for ti, (t, off) in enumerate(zip(g.targets, g.offsets)):
        if bases is not None and bases[ti] is not None:
            x_basis, z_basis = bases[ti]
        else:
            x_basis, z_basis = normalized_logicals(t)
        for a, (x, z) in enumerate(zip(x_basis, z_basis)):
            labels.append((ti, a))
            xs.append(BitVec(g.n_data, tuple(off + q for q in x.support)))
            zs.append(BitVec(g.n_data, tuple(off + q for q in z.support)))
    return labels, xs, zs


def logical_action(g: HigherFormGate, c: BitVec,
                   bases: Optional[Sequence[Tuple[Sequence[BitVec], Sequence[BitVec]]]] = None
                   ) -> LogicalAction:
    """Conjugate each logical X by U(c) and read the acquired Z content in the logical basis"""
    u = gate_for_cocycle(g, c)
    labels, xs, zs = register_logicals(g, bases)
    z_span = g.register_z_span()
    matrix, signs, non_pauli = [], [], []
    residual_ok = True
    for a, x in enumerate(xs):
        k = commutator(u, PhasedCssOperator.x(g.n_data, x.support))
        if k.xpart or k.quad or any(p != 2 for _, p in k.linear) or k.phase % 4:
            non_pauli.append(a)
            matrix.append(tuple(0 for _ in xs))
            signs.append(0)
            continue
        z = BitVec(g.n_data, k.z_support)
        row = tuple(z.dot(xb) for xb in xs)
        residual = z
        for b, coef in enumerate(row):
            if coef:
                residual = residual + zs[b]
        if not z_span.contains(residual.to_int()):
            residual_ok = False
        matrix.append(row)
        signs.append(1 if k.phase == 0 else -1)
    return LogicalAction(tuple(labels), tuple(matrix), tuple(signs), residual_ok, tuple(non_pauli))

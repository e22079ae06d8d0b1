"""
Builders for the worked instances: torus cellulations, the small codes used for CZ
gates, the tetrahedral colour code with its XS gate, and the twisted gauge theory on
four-coloured 3-manifolds with its 1-form CZ gate.

Every builder validates what it returns. The named-instance registry at the bottom is
what the command line resolves ``--instance`` against.
"""

import itertools
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from . import settings
from .chain_complex import ChainComplex, cohomology_basis, require_valid
from .css_code import CssCode, from_complex, normalized_logicals
from .errors import (
    CodespaceError, DimensionMismatchError, GaugingError, InstanceError, InvalidGateError,
    NotACocycleError,
)
from .f2la import BitMatrix, BitVec
from .gauging import CheckKey, GaugingPlan, make_plan
from .hfgate import (
    CZ, PAULI_X, PAULI_Z, HigherFormGate, LogicalAction, cleanability_witness,
    derive_from_ccz, derive_from_t, gate_for_cocycle, induced_cz_gate, logical_action,
    make_gate,
)
from .opalg import PhasedCssOperator, commutator, multiply
from .sim import PREPARE, StateVector, make_rng, project_codespace
from .simplicial import COLORS, ColoredSimplicialComplex

logger = logging.getLogger(__name__)

AXES = ('x', 'y', 'z')


def _incidence(rows: int, columns: Sequence[Sequence[int]]) -> BitMatrix:
    """Boundary matrix from column supports; repeated entries cancel in pairs"""
    reduced = []
    for col in columns:
        acc = set()
        for i in col:
            acc ^= {i}
        reduced.append(tuple(acc))
    return BitMatrix(rows, len(columns), reduced)


# torus cellulations

def torus_2d(lx: int, ly: int) -> ChainComplex:
    """Square-lattice torus: vertices, edges (horizontal then vertical per site), faces"""
    if lx < 2 or ly < 2:
        raise InstanceError(f"torus needs both sizes >= 2, got {lx}x{ly}")

    def vertex(x, y):
        return (x % lx) + lx * (y % ly)

    def h_edge(x, y):
        return 2 * vertex(x, y)

    def v_edge(x, y):
        return 2 * vertex(x, y) + 1

    n = lx * ly
    d1 = [None] * (2 * n)
    d2 = []
    for y in range(ly):
        for x in range(lx):
            d1[h_edge(x, y)] = (vertex(x, y), vertex(x + 1, y))
            d1[v_edge(x, y)] = (vertex(x, y), vertex(x, y + 1))
            d2.append((h_edge(x, y), h_edge(x, y + 1), v_edge(x, y), v_edge(x + 1, y)))
    labels = {
        0: [f"v({i % lx},{i // lx})" for i in range(n)],
        1: [f"{'h' if e % 2 == 0 else 'v'}({(e // 2) % lx},{(e // 2) // lx})" for e in range(2 * n)],
        2: [f"f({i % lx},{i // lx})" for i in range(n)],
    }
    cx = ChainComplex((n, 2 * n, n), (_incidence(n, d1), _incidence(2 * n, d2)), labels)
    return require_valid(cx)


def torus_3d(size: int) -> ChainComplex:
    """Cubic 3-torus: vertices, edges (3 per site), faces (3 per site, by normal), cubes"""
    if size < 2:
        raise InstanceError(f"3-torus needs size >= 2, got {size}")
    L = size

    def site(p):
        x, y, z = (c % L for c in p)
        return x + L * (y + L * z)

    def shift(p, axis, step=1):
        q = list(p)
        q[axis] += step
        return tuple(q)

    n = L ** 3
    points = [(x, y, z) for z in range(L) for y in range(L) for x in range(L)]
    d1 = [None] * (3 * n)
    d2 = [None] * (3 * n)
    d3 = [None] * n
    for p in points:
        s = site(p)
        for axis in range(3):
            d1[3 * s + axis] = (s, site(shift(p, axis)))
        for normal in range(3):
            a, b = (d for d in range(3) if d != normal)
            d2[3 * s + normal] = (3 * s + a, 3 * site(shift(p, b)) + a,
                                  3 * s + b, 3 * site(shift(p, a)) + b)
        d3[s] = tuple(3 * site(q) + normal for normal in range(3)
                      for q in (p, shift(p, normal)))
    cx = ChainComplex((n, 3 * n, 3 * n, n),
                      (_incidence(n, d1), _incidence(3 * n, d2), _incidence(3 * n, d3)))
    return require_valid(cx)


def dual_complex(cx: ChainComplex) -> ChainComplex:
    """Grades reversed; the boundary out of new grade i is the transposed old boundary"""
    top = cx.top
    grades = tuple(reversed(cx.grades))
    boundaries = tuple(cx.boundary(top - i + 1).transpose() for i in range(1, top + 1))
    labels = {top - g: names for g, names in cx.labels.items()}
    return ChainComplex(grades, boundaries, labels)


# small codes for CZ gates

def iceberg_422() -> ChainComplex:
    """The [[4,2,2]] code: one weight-4 X check and one weight-4 Z check"""
    cx = ChainComplex((1, 4, 1),
                      (BitMatrix(1, 4, [(0,)] * 4), BitMatrix(4, 1, [(0, 1, 2, 3)])),
                      {1: [f"q{i}" for i in range(4)]})
    return require_valid(cx)


def cz_pair(code: Optional[CssCode] = None) -> HigherFormGate:
    """CZ 1-form gate between two copies of ``code`` (the [[4,2,2]] code by default)"""
    if code is None:
        code = from_complex(iceberg_422(), name="iceberg-422")
    return induced_cz_gate(code, code, name=f"cz-pair-{code.name}")


# Pauli 1-form gates

def pauli_1form(code: CssCode, basis: str = 'X', restriction: Optional[Sequence[int]] = None,
                blocks: int = 1) -> HigherFormGate:
    """
    Transversal X (or Z) as a 1-form gate over ``blocks`` copies of ``code``. Site q acts
    on qubit q of every block. With a restriction only those qubits carry sites and the
    gate complex is truncated below them, so its cocycles are the logicals supported there.
    """
    basis = basis.upper()
    if basis not in ('X', 'Z'):
        raise InstanceError(f"basis must be X or Z, got {basis!r}")
    if blocks < 1:
        raise InstanceError(f"need at least one block, got {blocks}")
    q = code.qubit_grade
    if basis == 'X':
        cx, h = code.complex, q
    else:
        cx = dual_complex(code.complex)
        h = cx.top - q

    n = code.n
    n_data = n * blocks
    if restriction is not None:
        kept = sorted(set(int(i) for i in restriction))
        if kept and (kept[0] < 0 or kept[-1] >= n):
            raise InstanceError(f"restriction {kept} outside qubits 0..{n - 1}")
        full = make_gate(h, cx, [PhasedCssOperator.identity(n)] * n, [code])
        excluded = [s for s in range(n) if s not in set(kept)]
        cleanable = sum(1 for rep in cohomology_basis(cx, h)
                        if cleanability_witness(full, excluded, rep).cleanable)
        logger.info(f"restricted {basis} gate on {len(kept)} qubits: "
                    f"{cleanable} logical classes cleanable onto the region")
        cx = _restrict_complex(cx, h, kept)
    else:
        kept = list(range(n))

    factory = PhasedCssOperator.x if basis == 'X' else PhasedCssOperator.z
    sites = [factory(n_data, [b * n + s for b in range(blocks)]) for s in kept]
    embedding = [tuple(b * n + s for b in range(blocks)) for s in kept]
    kind = PAULI_X if basis == 'X' else PAULI_Z
    suffix = "" if blocks == 1 else f"x{blocks}"
    return make_gate(h, cx, sites, [code] * blocks, embedding, kind,
                     f"pauli-{basis.lower()}{suffix}-{code.name}")


def _restrict_complex(cx: ChainComplex, h: int, kept: Sequence[int]) -> ChainComplex:
    """Keep only grade-h elements in ``kept``; grades below h become empty"""
    grades = list(cx.grades)
    boundaries = list(cx.boundaries)
    for i in range(h):
        grades[i] = 0
    for i in range(1, h):
        boundaries[i - 1] = BitMatrix.zeros(0, 0)
    grades[h] = len(kept)
    if h >= 1:
        boundaries[h - 1] = BitMatrix.zeros(0, len(kept))
    if h + 1 <= cx.top:
        boundaries[h] = cx.boundary(h + 1).select_rows(kept)
    return ChainComplex(tuple(grades), tuple(boundaries))


# tetrahedral colour code

def sixteen_cell() -> ColoredSimplicialComplex:
    """
    Boundary of the 4-dimensional cross-polytope: vertices v_i = i and u_i = 4 + i,
    both coloured COLORS[i]; one tetrahedron per subset s of {0,1,2,3}, containing u_i
    for i in s and v_i otherwise.
    """
    colors = tuple(COLORS[i % 4] for i in range(8))
    ids = tuple([f"v{i}" for i in range(4)] + [f"u{i}" for i in range(4)])
    tets = [_tetra_of_subset(mask) for mask in range(16)]
    return ColoredSimplicialComplex(colors, tuple(tets), ids).require_valid()


def _tetra_of_subset(mask: int) -> Tuple[int, int, int, int]:
    return tuple(4 + i if (mask >> i) & 1 else i for i in range(4))


def tetra_qubit_index(subset: Sequence[int]) -> int:
    """Qubit of the tetrahedron labelled by ``subset`` (its bitmask); the full subset is removed"""
    mask = sum(1 << i for i in set(subset))
    if mask == 15:
        raise InstanceError("the all-u tetrahedron is not a qubit of the code")
    return mask


def tetrahedral_meta_checks() -> List[Tuple[int, ...]]:
    """
    Z-check edges of each meta-check. At v_i the edges split into three colour classes
    (other endpoint coloured j); two class pairs per vertex give the relations.
    """
    edges = _tetra_edges()
    index = {e: k for k, e in enumerate(edges)}
    out = []
    for i in range(4):
        others = [j for j in range(4) if j != i]

        def cls(j):
            return [index[tuple(sorted((i, j)))], index[tuple(sorted((i, 4 + j)))]]

        j1, j2, j3 = others
        out.append(tuple(cls(j1) + cls(j2)))
        out.append(tuple(cls(j1) + cls(j3)))
    return out


def _tetra_edges() -> List[Tuple[int, int]]:
    """Edges with at least one v endpoint"""
    return sorted({tuple(sorted((i, j))) for i in range(4) for j in range(8)
                   if j % 4 != i})


@dataclass(frozen=True)
class TetrahedralInstance:
    cs: ColoredSimplicialComplex
    complex: ChainComplex
    code: CssCode
    gate: HigherFormGate
    black: Tuple[int, ...]
    white: Tuple[int, ...]


def tetrahedral_color_code() -> TetrahedralInstance:
    """[[15,1,3]] code on the 16-cell minus one tetrahedron, with its XS 1-form gate"""
    cs = sixteen_cell()
    qubit_of = {}
    for t_index, tet in enumerate(cs.tetrahedra):
        mask = sum(1 << (v - 4) for v in tet if v >= 4)
        if mask != 15:
            qubit_of[t_index] = mask
    n = 15
    x_checks = [[qubit_of[t] for t in cs.tets_of_vertex[i] if t in qubit_of] for i in range(4)]
    edges = _tetra_edges()
    z_checks = [[qubit_of[t] for t in cs.tets_of_edge[e] if t in qubit_of] for e in edges]
    d1 = BitMatrix(4, n, [[i for i in range(4) if q in x_checks[i]] for q in range(n)])
    d2 = BitMatrix(n, len(edges), z_checks)
    d3 = BitMatrix(len(edges), 8, tetrahedral_meta_checks())
    labels = {
        0: [cs.ids[i] for i in range(4)],
        1: ["{" + ",".join(str(i) for i in range(4) if (q >> i) & 1) + "}" for q in range(n)],
        2: [f"{cs.ids[a]}{cs.ids[b]}" for a, b in edges],
    }
    try:
        cx = require_valid(ChainComplex((4, n, len(edges), 8), (d1, d2, d3), labels))
    except GaugingError as e:
        raise InstanceError(f"tetrahedral data fails its invariants: {e}") from e
    code = from_complex(cx, 1, "tetrahedral-cc")
    black = tuple(q for q in range(n) if bin(q).count('1') % 2 == 0)
    white = tuple(q for q in range(n) if bin(q).count('1') % 2 == 1)
    gate = derive_from_t(code, black, white, name="xs-tetrahedral")
    return TetrahedralInstance(cs, cx, code, gate, black, white)


# coloured 3-torus

def colored_3torus(size: int) -> ColoredSimplicialComplex:
    """
    Body-centred cubic tetrahedralization of the 3-torus. Cube corners are r/g and
    cube centres b/y by coordinate parity; every square plaquette contributes four
    tetrahedra, one per square edge joined with the two centres on either side.
    """
    L = size
    if L < 4 or L % 2:
        raise InstanceError(f"the coloured 3-torus needs an even size >= 4, got {L}")

    def site(p):
        x, y, z = (c % L for c in p)
        return x + L * (y + L * z)

    def shift(p, axis, step=1):
        q = list(p)
        q[axis] += step
        return tuple(q)

    points = [(x, y, z) for z in range(L) for y in range(L) for x in range(L)]
    n = L ** 3
    colors, ids, coords = [None] * (2 * n), [None] * (2 * n), [None] * (2 * n)
    for p in points:
        s = site(p)
        parity = sum(p) % 2
        colors[s] = 'r' if parity == 0 else 'g'
        colors[n + s] = 'b' if parity == 0 else 'y'
        ids[s] = "c{},{},{}".format(*p)
        ids[n + s] = "k{},{},{}".format(*p)
        coords[s] = tuple(float(c) for c in p)
        coords[n + s] = tuple(c + 0.5 for c in p)

    tets = []
    for p in points:
        for normal in range(3):
            a, b = (d for d in range(3) if d != normal)
            centres = (n + site(p), n + site(shift(p, normal, -1)))
            corners = (p, shift(p, a), shift(shift(p, a), b), shift(p, b))
            for k in range(4):
                edge = (site(corners[k]), site(corners[(k + 1) % 4]))
                tets.append(edge + centres)
    cs = ColoredSimplicialComplex(tuple(colors), tuple(tets), tuple(ids), tuple(coords), L)
    return cs.require_valid()


def torus_membrane(build: "HggtBuild", axis: int, position: int = 0) -> BitVec:
    """By-edges crossing the plane where coordinate ``axis`` equals ``position``"""
    cs = build.cs
    if cs.period is None:
        raise InstanceError("membranes need a periodic complex with coordinates")
    L = cs.period
    below = (position - 0.5) % L
    above = (position + 0.5) % L
    support = []
    for k, (a, b) in enumerate(build.by_edges):
        ca, cb = cs.coords[a], cs.coords[b]
        if {ca[axis], cb[axis]} == {below, above} and \
                all(ca[d] == cb[d] for d in range(3) if d != axis):
            support.append(k)
    return BitVec(len(build.by_edges), tuple(support))


# twisted gauge theory

LOWEST = 'lowest'
HIGHEST = 'highest'


@dataclass(frozen=True)
class HggtBuild:
    cs: ColoredSimplicialComplex
    red_code: CssCode
    green_code: CssCode
    gate: HigherFormGate
    red_vertices: Tuple[int, ...]
    green_vertices: Tuple[int, ...]
    red_faces: Tuple[Tuple[int, int, int], ...]
    green_faces: Tuple[Tuple[int, int, int], ...]
    by_edges: Tuple[Tuple[int, int], ...]
    rg_edges: Tuple[Tuple[int, int], ...]
    reference: str = LOWEST
    orderings: Dict[Tuple[int, int], Tuple[int, ...]] = field(default_factory=dict, compare=False)

    @property
    def n_data(self) -> int:
        return len(self.red_faces) + len(self.green_faces)

    @cached_property
    def qubit_of_face(self) -> Dict[Tuple[int, int, int], int]:
        out = {f: i for i, f in enumerate(self.red_faces)}
        out.update({f: len(self.red_faces) + i for i, f in enumerate(self.green_faces)})
        return out

    @cached_property
    def rg_edge_index(self) -> Dict[Tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.rg_edges)}

    def ancilla(self, rg_edge: Tuple[int, int]) -> int:
        return self.n_data + self.rg_edge_index[tuple(sorted(rg_edge))]

    def lattice(self, color: str) -> nx.Graph:
        """
        Vertices of ``color`` joined through faces of that colour: a face joins the
        ``color`` vertices of its two tetrahedra. Edges carry the smallest such face.
        """
        cs = self.cs
        faces = self.red_faces if color == 'r' else self.green_faces
        graph = nx.Graph()
        graph.add_nodes_from(self.red_vertices if color == 'r' else self.green_vertices)
        for f in faces:
            ends = sorted(next(v for v in cs.tetrahedra[t] if v not in f)
                          for t in cs.tets_of_face[f])
            a, b = ends
            qubit = self.qubit_of_face[f]
            if graph.has_edge(a, b):
                if qubit < graph[a][b]['qubit']:
                    graph[a][b]['qubit'] = qubit
            else:
                graph.add_edge(a, b, qubit=qubit)
        return graph


def _code_for_color(cs: ColoredSimplicialComplex, color: str, name: str):
    """
    Surface-code chain complex of one colour: vertices of that colour, faces of that
    colour, edges avoiding it, and b/y vertices as meta-checks.
    """
    vertices = cs.vertices_of_color(color)
    vpos = {v: i for i, v in enumerate(vertices)}
    faces = [f for f in cs.faces if cs.face_color(f) == color]
    fpos = {f: i for i, f in enumerate(faces)}
    edges = [e for e in cs.edges if color not in cs.edge_colors(e)]
    epos = {e: i for i, e in enumerate(edges)}
    meta = [v for v in range(cs.n_vertices) if cs.colors[v] in ('b', 'y')]

    d1 = []
    for f in faces:
        d1.append([vpos[next(v for v in cs.tetrahedra[t] if v not in f)]
                   for t in cs.tets_of_face[f]])
    d2 = [[] for _ in edges]
    for f in faces:
        for e in itertools.combinations(f, 2):
            d2[epos[e]].append(fpos[f])
    d3 = [[epos[e] for e in (tuple(sorted((v, w))) for w in cs.neighbours[v]) if e in epos]
          for v in meta]
    cx = ChainComplex((len(vertices), len(faces), len(edges), len(meta)),
                      (_incidence(len(vertices), d1), _incidence(len(faces), d2),
                       _incidence(len(edges), d3)))
    try:
        require_valid(cx)
    except GaugingError as e:
        raise InstanceError(f"{color} code complex is invalid: {e}") from e
    return from_complex(cx, 1, name), tuple(vertices), tuple(faces)


def _gate_complex(cs: ColoredSimplicialComplex):
    by_vertices = [v for v in range(cs.n_vertices) if cs.colors[v] in ('b', 'y')]
    rg_vertices = [v for v in range(cs.n_vertices) if cs.colors[v] in ('r', 'g')]
    by_edges = [e for e in cs.edges if cs.edge_colors(e) == frozenset('by')]
    rg_edges = [e for e in cs.edges if cs.edge_colors(e) == frozenset('rg')]
    bv = {v: i for i, v in enumerate(by_vertices)}
    be = {e: i for i, e in enumerate(by_edges)}
    re_ = {e: i for i, e in enumerate(rg_edges)}
    d1 = [[bv[a], bv[b]] for a, b in by_edges]
    d2 = [[] for _ in rg_edges]
    for t in cs.tetrahedra:
        rg = tuple(v for v in t if cs.colors[v] in ('r', 'g'))
        by = tuple(v for v in t if cs.colors[v] in ('b', 'y'))
        d2[re_[rg]].append(be[by])
    d3 = [[re_[e] for e in (tuple(sorted((v, w))) for w in cs.neighbours[v]) if e in re_]
          for v in rg_vertices]
    cx = ChainComplex((len(by_vertices), len(by_edges), len(rg_edges), len(rg_vertices)),
                      (_incidence(len(by_vertices), d1), _incidence(len(by_edges), d2),
                       _incidence(len(rg_edges), d3)),
                      {0: [cs.ids[v] for v in by_vertices],
                       1: [f"{cs.ids[a]}-{cs.ids[b]}" for a, b in by_edges],
                       2: [f"{cs.ids[a]}-{cs.ids[b]}" for a, b in rg_edges],
                       3: [cs.ids[v] for v in rg_vertices]})
    try:
        require_valid(cx)
    except GaugingError as e:
        raise InstanceError(f"gate complex is invalid: {e}") from e
    return cx, tuple(by_edges), tuple(rg_edges)


def _edge_ordering(cs: ColoredSimplicialComplex, edge: Tuple[int, int],
                   reference: str) -> List[int]:
    """
    Link cycle of a by-edge read from the green vertex of the reference red face,
    stepping first towards the smaller of its two red neighbours.
    """
    cycle = cs.edge_link_cycle(edge)
    greens = [v for v in cycle if cs.colors[v] == 'g']
    if len(greens) * 2 != len(cycle):
        raise InstanceError(f"link of {edge} does not alternate red and green")
    start = min(greens) if reference == LOWEST else max(greens)
    k = cycle.index(start)
    m = len(cycle)
    after, before = cycle[(k + 1) % m], cycle[(k - 1) % m]
    step = 1 if after < before else -1
    return [cycle[(k + step * j) % m] for j in range(m)]


def _edge_site(build_faces: Dict[Tuple[int, int, int], int], n_data: int,
               edge: Tuple[int, int], ordering: Sequence[int]) -> PhasedCssOperator:
    """Π_{j>k} CZ(red face at g_j, green face at r_k) around the ordered link"""
    greens = ordering[0::2]
    reds = ordering[1::2]

    def face(v):
        return build_faces[tuple(sorted(edge + (v,)))]

    pairs = [(face(greens[j]), face(reds[k]))
             for j in range(1, len(greens)) for k in range(j)]
    return PhasedCssOperator(n_data, quad=frozenset(pairs))


def hggt_build(cs: ColoredSimplicialComplex, reference: str = LOWEST) -> HggtBuild:
    """Red and green surface codes on faces, the 1-form CZ gate on by-edges, and its gate complex"""
    if reference not in (LOWEST, HIGHEST):
        raise InstanceError(f"reference must be {LOWEST!r} or {HIGHEST!r}, got {reference!r}")
    cs.require_valid()
    red_code, red_vertices, red_faces = _code_for_color(cs, 'r', 'hggt-red')
    green_code, green_vertices, green_faces = _code_for_color(cs, 'g', 'hggt-green')
    gate_cx, by_edges, rg_edges = _gate_complex(cs)

    faces = {f: i for i, f in enumerate(red_faces)}
    faces.update({f: len(red_faces) + i for i, f in enumerate(green_faces)})
    n_data = len(red_faces) + len(green_faces)
    orderings, sites = {}, []
    for e in by_edges:
        ordering = _edge_ordering(cs, e, reference)
        orderings[e] = tuple(ordering)
        sites.append(_edge_site(faces, n_data, e, ordering))
    embedding = [tuple(faces[tuple(sorted(e + (v,)))] for v in sorted(orderings[e]))
                 for e in by_edges]
    try:
        gate = make_gate(1, gate_cx, sites, [red_code, green_code], embedding, CZ,
                         f"hggt-cz-{reference}")
    except (InvalidGateError, DimensionMismatchError) as e:
        raise InstanceError(f"on-site CZ construction failed: {e}") from e
    logger.info(f"twisted gauge theory: {len(red_faces)}+{len(green_faces)} data qubits, "
                f"{len(by_edges)} sites, {len(rg_edges)} hyperedges")
    return HggtBuild(cs, red_code, green_code, gate, red_vertices, green_vertices,
                     red_faces, green_faces, by_edges, rg_edges, reference, orderings)


def hggt_membrane_action(gate: HigherFormGate, c: BitVec, membrane: BitVec,
                         target: int = 0) -> PhasedCssOperator:
    """
    Residual U(c) X(m) U(c)† X(m)† for an X membrane m on one target code. The
    membrane must meet every Z-check evenly.
    """
    code = gate.targets[target]
    if membrane.length != code.n:
        raise DimensionMismatchError(f"membrane of length {membrane.length} on a code of {code.n}")
    if code.hz.apply(membrane):
        raise NotACocycleError(f"faces {list(membrane.support)} do not form a membrane")
    u = gate_for_cocycle(gate, c)
    off = gate.offsets[target]
    return commutator(u, PhasedCssOperator.x(gate.n_data, [off + q for q in membrane.support]))


def _crossings(cs: ColoredSimplicialComplex, a: int, b: int) -> int:
    """Bitmask of the axes along which the short segment from a to b wraps around"""
    L = cs.period
    mask = 0
    for d in range(3):
        delta = cs.coords[b][d] - cs.coords[a][d]
        if delta > L / 2:
            delta -= L
        elif delta < -L / 2:
            delta += L
        end = cs.coords[a][d] + delta
        if end < 0 or end >= L:
            mask |= 1 << d
    return mask


def winding_string(build: HggtBuild, color: str, axis: int) -> BitVec:
    """Z string of one colour winding once along ``axis``, as a chain on that code's qubits"""
    cs = build.cs
    if cs.period is None:
        raise InstanceError("winding strings need a periodic complex with coordinates")
    base = build.lattice(color)
    lifted = nx.Graph()
    for a, b, data in sorted(base.edges(data=True)):
        cross = _crossings(cs, a, b)
        for bits in range(8):
            lifted.add_edge((a, bits), (b, bits ^ cross), qubit=data['qubit'])
    origin = min(base.nodes)
    path = nx.shortest_path(lifted, (origin, 0), (origin, 1 << axis))
    offset = 0 if color == 'r' else len(build.red_faces)
    n = len(build.red_faces) if color == 'r' else len(build.green_faces)
    acc = set()
    for u, v in zip(path, path[1:]):
        acc ^= {lifted[u][v]['qubit'] - offset}
    return BitVec(n, tuple(acc))


def hggt_logical_bases(build: HggtBuild):
    """Normalized (X, Z) bases per colour with Z̄_a the string winding along axis a"""
    bases = []
    for color, code in (('r', build.red_code), ('g', build.green_code)):
        strings = [winding_string(build, color, axis) for axis in range(3)]
        bases.append(normalized_logicals(code, z_basis=strings))
    return bases


def hggt_membrane_logical_action(build: HggtBuild, axis: int) -> LogicalAction:
    """Logical map of the CZ membrane normal to ``axis`` in the winding-string basis"""
    return logical_action(build.gate, torus_membrane(build, axis), hggt_logical_bases(build))


def _dressing(build: HggtBuild, vertex: int, n_total: int) -> PhasedCssOperator:
    """
    V_v: CZ between the hyperedge on (v, w) and the opposite-colour faces along the
    reference path from w back to the smallest neighbour w_0, for every other neighbour w.
    """
    cs = build.cs
    other = 'g' if cs.colors[vertex] == 'r' else 'r'
    graph = build.lattice(other)
    neighbours = [w for w in cs.neighbours[vertex] if cs.colors[w] == other]
    w0 = neighbours[0]
    pairs = set()
    for w in neighbours[1:]:
        ancilla = build.ancilla((vertex, w))
        path = nx.shortest_path(graph, w, w0)
        for a, b in zip(path, path[1:]):
            pairs ^= {(min(ancilla, graph[a][b]['qubit']), max(ancilla, graph[a][b]['qubit']))}
    return PhasedCssOperator(n_total, quad=frozenset(pairs))


def hggt_gauged_checks(build: HggtBuild) -> Dict[CheckKey, PhasedCssOperator]:
    """Dressed X-checks V_v · X(lk v) for every red and green vertex, keyed as gate checks"""
    n_total = build.n_data + len(build.rg_edges)
    out: Dict[CheckKey, PhasedCssOperator] = {}
    for ti, (code, vertices, off) in enumerate(
            ((build.red_code, build.red_vertices, 0),
             (build.green_code, build.green_vertices, len(build.red_faces)))):
        for ci, v in enumerate(vertices):
            x = PhasedCssOperator.x(n_total, [off + q for q in code.x_checks[ci].support])
            out[('X', ti, ci)] = multiply(_dressing(build, v, n_total), x)
    return out


def hggt_plan(build: HggtBuild, seed: Optional[int] = None) -> GaugingPlan:
    return make_plan(build.gate, seed=seed, dressings=hggt_gauged_checks(build))


# colour code on the 3-torus and the derived CZ gate

def color_code_3torus(size: int) -> CssCode:
    """Qubits on tetrahedra, X checks on vertices, Z checks on edges"""
    cs = colored_3torus(size)
    n_t = len(cs.tetrahedra)
    d1 = [list(t) for t in cs.tetrahedra]
    d2 = [cs.tets_of_edge[e] for e in cs.edges]
    cx = ChainComplex((cs.n_vertices, n_t, len(cs.edges)),
                      (_incidence(cs.n_vertices, d1), _incidence(n_t, d2)))
    return from_complex(cx, 1, f"color-code-3torus-{size}")


def ccz_triple_torus(size: int) -> HigherFormGate:
    """CZ 1-form gate across two colour-code copies, from transversal CCZ on three"""
    code = color_code_3torus(size)
    try:
        return derive_from_ccz(code, name=f"ccz-triple-{size}")
    except CodespaceError:
        logger.error(f"transversal CCZ does not preserve three copies of {code.name}")
        raise


# named instances

@dataclass
class Instance:
    name: str
    gate: HigherFormGate
    complex: ChainComplex
    dressings: Dict[CheckKey, PhasedCssOperator] = field(default_factory=dict)
    initial_basis: str = 'zero'
    build: Optional[object] = None

    @property
    def codes(self) -> Tuple[CssCode, ...]:
        return self.gate.targets

    def plan(self, seed: Optional[int] = None) -> GaugingPlan:
        return make_plan(self.gate, seed=seed, dressings=self.dressings)

    def statevector_feasible(self) -> bool:
        return self.plan().n_total <= settings.QUBIT_CEILING


def initial_state(instance: Instance, rng: np.random.Generator,
                  basis: Optional[str] = None) -> StateVector:
    """|0…0> or |+…+> projected into the code space of every target"""
    basis = basis or instance.initial_basis
    n = instance.gate.n_data
    if basis == 'zero':
        state = StateVector.zeros(n)
    elif basis == 'plus':
        state = StateVector(np.full(1 << n, (1 << n) ** -0.5, dtype=complex))
    else:
        raise InstanceError(f"initial basis must be 'zero' or 'plus', got {basis!r}")
    state, _ = project_codespace(state, instance.gate.targets, rng, PREPARE,
                                 offsets=instance.gate.offsets)
    return state


INSTANCE_NAMES = ('torus2d:Lx,Ly', 'torus3d:L', 'tetrahedral-cc', 'iceberg-cz',
                  'colored-3torus:L', 'hggt-16cell', 'hggt:FILE', 'ccz-triple:L')

_PATTERN = re.compile(r'^(?P<kind>[a-z0-9\-]+)(?::(?P<arg>.+))?$')


def _ints(arg: Optional[str], count: int, name: str) -> List[int]:
    try:
        values = [int(v) for v in (arg or '').split(',')]
    except ValueError:
        values = []
    if len(values) != count:
        raise InstanceError(f"instance {name} needs {count} integer size(s), got {arg!r}")
    return values


def _hggt_instance(name: str, cs: ColoredSimplicialComplex) -> Instance:
    build = hggt_build(cs)
    return Instance(name, build.gate, build.gate.gate_complex, hggt_gauged_checks(build),
                    'plus', build)


def resolve_instance(name: str) -> Instance:
    """Build a named instance; unknown names and bad sizes raise InstanceError"""
    match = _PATTERN.match(name.strip())
    if not match:
        raise InstanceError(f"unknown instance {name!r}; known: {', '.join(INSTANCE_NAMES)}")
    kind, arg = match.group('kind'), match.group('arg')
    logger.info(f"building instance {name}")
    if kind == 'torus2d':
        lx, ly = _ints(arg, 2, kind)
        cx = torus_2d(lx, ly)
        code = from_complex(cx, 1, f"torus2d-{lx}x{ly}")
        return Instance(name, pauli_1form(code, 'X'), cx)
    if kind == 'torus3d':
        (L,) = _ints(arg, 1, kind)
        cx = torus_3d(L)
        code = from_complex(cx, 1, f"torus3d-{L}")
        return Instance(name, pauli_1form(code, 'X'), cx)
    if kind == 'tetrahedral-cc':
        inst = tetrahedral_color_code()
        return Instance(name, inst.gate, inst.complex, build=inst)
    if kind == 'iceberg-cz':
        gate = cz_pair()
        return Instance(name, gate, gate.targets[0].complex, initial_basis='plus')
    if kind == 'colored-3torus':
        (L,) = _ints(arg, 1, kind)
        return _hggt_instance(name, colored_3torus(L))
    if kind == 'hggt-16cell':
        return _hggt_instance(name, sixteen_cell())
    if kind == 'hggt':
        if not arg:
            raise InstanceError("instance hggt needs a file: hggt:PATH")
        return _hggt_instance(name, ColoredSimplicialComplex.load(arg))
    if kind == 'ccz-triple':
        (L,) = _ints(arg, 1, kind)
        gate = ccz_triple_torus(L)
        return Instance(name, gate, gate.targets[0].complex, initial_basis='plus')
    raise InstanceError(f"unknown instance {name!r}; known: {', '.join(INSTANCE_NAMES)}")

"""
Four-colored simplicial 3-complexes: incidence tables, links and stars.

Vertices carry one of the colours r, g, b, y. An edge is coloured by its two
endpoint colours and a face by the colour of the vertex it misses.
"""

import itertools
import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import InstanceError
from .report import CheckReport

logger = logging.getLogger(__name__)

COLORS = ('r', 'g', 'b', 'y')

Simplex = FrozenSet[int]


@dataclass(frozen=True)
class ColoredSimplicialComplex:
    colors: Tuple[str, ...]
    tetrahedra: Tuple[Tuple[int, int, int, int], ...]
    ids: Tuple[str, ...] = field(default=(), compare=False)
    coords: Tuple[Tuple[float, float, float], ...] = field(default=(), compare=False)
    period: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'colors', tuple(self.colors))
        tets = tuple(sorted(tuple(sorted(int(v) for v in t)) for t in self.tetrahedra))
        object.__setattr__(self, 'tetrahedra', tets)
        if not self.ids:
            object.__setattr__(self, 'ids', tuple(str(v) for v in range(len(self.colors))))
        bad = [c for c in self.colors if c not in COLORS]
        if bad:
            raise InstanceError(f"unknown vertex colours {sorted(set(bad))}")
        for t in tets:
            if len(set(t)) != 4:
                raise InstanceError(f"tetrahedron {t} does not have four distinct vertices")
            if t[0] < 0 or t[-1] >= len(self.colors):
                raise InstanceError(f"tetrahedron {t} references a missing vertex")

    @property
    def n_vertices(self) -> int:
        return len(self.colors)

    # incidence tables

    @cached_property
    def edges(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(sorted({e for t in self.tetrahedra for e in itertools.combinations(t, 2)}))

    @cached_property
    def faces(self) -> Tuple[Tuple[int, int, int], ...]:
        return tuple(sorted({f for t in self.tetrahedra for f in itertools.combinations(t, 3)}))

    @cached_property
    def edge_index(self) -> Dict[Tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def face_index(self) -> Dict[Tuple[int, int, int], int]:
        return {f: i for i, f in enumerate(self.faces)}

    @cached_property
    def tets_of_face(self) -> Dict[Tuple[int, int, int], List[int]]:
        out: Dict[Tuple[int, int, int], List[int]] = {}
        for i, t in enumerate(self.tetrahedra):
            for f in itertools.combinations(t, 3):
                out.setdefault(f, []).append(i)
        return out

    @cached_property
    def tets_of_edge(self) -> Dict[Tuple[int, int], List[int]]:
        out: Dict[Tuple[int, int], List[int]] = {}
        for i, t in enumerate(self.tetrahedra):
            for e in itertools.combinations(t, 2):
                out.setdefault(e, []).append(i)
        return out

    @cached_property
    def tets_of_vertex(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {v: [] for v in range(self.n_vertices)}
        for i, t in enumerate(self.tetrahedra):
            for v in t:
                out[v].append(i)
        return out

    @cached_property
    def neighbours(self) -> Dict[int, Tuple[int, ...]]:
        out: Dict[int, Set[int]] = {v: set() for v in range(self.n_vertices)}
        for a, b in self.edges:
            out[a].add(b)
            out[b].add(a)
        return {v: tuple(sorted(ns)) for v, ns in out.items()}

    def vertices_of_color(self, color: str) -> List[int]:
        return [v for v, c in enumerate(self.colors) if c == color]

    def edge_colors(self, edge: Sequence[int]) -> FrozenSet[str]:
        return frozenset(self.colors[v] for v in edge)

    def face_color(self, face: Sequence[int]) -> str:
        present = {self.colors[v] for v in face}
        missing = [c for c in COLORS if c not in present]
        if len(missing) != 1:
            raise InstanceError(f"face {tuple(face)} is not three-coloured")
        return missing[0]

    def faces_of_color(self, color: str) -> List[int]:
        return [i for i, f in enumerate(self.faces) if self.face_color(f) == color]

    # stars and links

    def star(self, simplex: Iterable[int]) -> Set[Simplex]:
        """Simplices containing ``simplex``"""
        s = frozenset(simplex)
        out = set()
        for t in self._tets_containing(s):
            rest = [v for v in t if v not in s]
            for k in range(len(rest) + 1):
                for extra in itertools.combinations(rest, k):
                    out.add(s | frozenset(extra))
        return out

    def link(self, simplex: Iterable[int]) -> Set[Simplex]:
        """Simplices disjoint from ``simplex`` whose join with it lies in the complex"""
        s = frozenset(simplex)
        out = set()
        for t in self._tets_containing(s):
            rest = [v for v in t if v not in s]
            for k in range(1, len(rest) + 1):
                out.update(frozenset(c) for c in itertools.combinations(rest, k))
        return out

    def link_vertices(self, simplex: Iterable[int]) -> List[int]:
        return sorted({v for tau in self.link(simplex) if len(tau) == 1 for v in tau})

    def _tets_containing(self, s: Simplex) -> List[Tuple[int, ...]]:
        if not s:
            return list(self.tetrahedra)
        anchor = min(s)
        return [self.tetrahedra[i] for i in self.tets_of_vertex[anchor] if s <= set(self.tetrahedra[i])]

    def edge_link_cycle(self, edge: Tuple[int, int]) -> List[int]:
        """
        Link vertices of an edge in cyclic order, starting at the smallest vertex and
        continuing to its smaller cycle neighbour.
        """
        edge = tuple(sorted(edge))
        tets = self.tets_of_edge.get(edge)
        if not tets:
            raise InstanceError(f"{edge} is not an edge of the complex")
        adjacency: Dict[int, List[int]] = {}
        for i in tets:
            a, b = (v for v in self.tetrahedra[i] if v not in edge)
            adjacency.setdefault(a, []).append(b)
            adjacency.setdefault(b, []).append(a)
        if any(len(ns) != 2 for ns in adjacency.values()):
            raise InstanceError(f"link of edge {edge} is not a cycle")
        start = min(adjacency)
        cycle = [start, min(adjacency[start])]
        while len(cycle) < len(adjacency):
            a, b = adjacency[cycle[-1]]
            cycle.append(a if a != cycle[-2] else b)
        if cycle[0] not in adjacency[cycle[-1]]:
            raise InstanceError(f"link of edge {edge} is not a single cycle")
        return cycle

    # validation

    def validate(self) -> CheckReport:
        failures = []
        for t in self.tetrahedra:
            if {self.colors[v] for v in t} != set(COLORS):
                failures.append({'tetrahedron': list(t), 'reason': 'colours repeat'})
        for f, tets in self.tets_of_face.items():
            if len(tets) != 2:
                failures.append({'face': list(f), 'reason': f'in {len(tets)} tetrahedra'})
        if failures:
            return CheckReport.fail('colored-complex', witness=failures[:20])
        return CheckReport.ok('colored-complex', vertices=self.n_vertices,
                              tetrahedra=len(self.tetrahedra))

    def require_valid(self) -> "ColoredSimplicialComplex":
        report = self.validate()
        if not report.passed:
            raise InstanceError(f"colored complex fails its invariants: {report.witness}")
        return self

    # serialization

    def to_json(self) -> dict:
        return {
            'vertices': [{'id': i, 'color': c} for i, c in zip(self.ids, self.colors)],
            'tetrahedra': [[self.ids[v] for v in t] for t in self.tetrahedra],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ColoredSimplicialComplex":
        try:
            vertices = data['vertices']
            ids = [str(v['id']) for v in vertices]
            colors = [v['color'] for v in vertices]
            lookup = {vid: i for i, vid in enumerate(ids)}
            tets = [[lookup[str(v)] for v in t] for t in data['tetrahedra']]
        except (KeyError, TypeError) as e:
            raise InstanceError(f"malformed colored complex JSON: missing or invalid {e}") from e
        if len(lookup) != len(ids):
            raise InstanceError("duplicate vertex ids in colored complex JSON")
        return cls(tuple(colors), tuple(tuple(t) for t in tets), tuple(ids))

    @classmethod
    def load(cls, path: str) -> "ColoredSimplicialComplex":
        try:
            with open(path, encoding='utf-8') as fh:
                data = json.load(fh)
        except json.JSONDecodeError as e:
            raise InstanceError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
        except OSError as e:
            raise InstanceError(f"cannot read {path}: {e}") from e
        return cls.from_json(data)


def all_simplices(cs: ColoredSimplicialComplex) -> Set[Simplex]:
    return closure(frozenset(t) for t in cs.tetrahedra)


def closure(simplices: Iterable[Simplex]) -> Set[Simplex]:
    """Every nonempty face of every member"""
    out = set()
    for s in simplices:
        items = sorted(s)
        for k in range(1, len(items) + 1):
            out.update(frozenset(c) for c in itertools.combinations(items, k))
    return out


def naive_link(cs: ColoredSimplicialComplex, simplex: Iterable[int]) -> Set[Simplex]:
    """lk = closure(st(s)) minus st(closure(s)), evaluated literally on the full simplex set"""
    s = frozenset(simplex)
    everything = all_simplices(cs)
    st = {tau for tau in everything if s <= tau}
    faces_of_s = closure([s])
    st_of_closure = {tau for tau in everything if any(f <= tau for f in faces_of_s)}
    return closure(st) - st_of_closure

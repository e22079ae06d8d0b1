"""
Chain complexes over GF(2): validation, (co)homology, distances, Cheeger constants.

Grades run 0..top. ``boundaries[i - 1]`` is the boundary map from grade i to
grade i - 1; the coboundary into grade i is its transpose. One basis is fixed per
grade and never re-identified with its dual.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import settings
from .errors import ChainComplexError, DimensionMismatchError
from .f2la import (
    BitMatrix, BitVec, WeightResult, XorBasis, gray_code_span, image_basis,
    kernel_basis, min_weight_search, multiply, popcount, rank,
)
from .report import CheckReport

logger = logging.getLogger(__name__)

HOMOLOGY = 'homology'
COHOMOLOGY = 'cohomology'


@dataclass(frozen=True)
class ChainComplex:
    grades: Tuple[int, ...]
    boundaries: Tuple[BitMatrix, ...]
    labels: Dict[int, List[str]] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, 'grades', tuple(int(g) for g in self.grades))
        object.__setattr__(self, 'boundaries', tuple(self.boundaries))
        if not self.grades:
            raise DimensionMismatchError("a chain complex needs at least one grade")
        if len(self.boundaries) != len(self.grades) - 1:
            raise DimensionMismatchError(
                f"{len(self.grades)} grades need {len(self.grades) - 1} boundary maps, "
                f"got {len(self.boundaries)}")

    @property
    def top(self) -> int:
        return len(self.grades) - 1

    def dim(self, i: int) -> int:
        if 0 <= i <= self.top:
            return self.grades[i]
        return 0

    def boundary(self, i: int) -> BitMatrix:
        """∂_i : C_i -> C_{i-1}; zero map outside the stored range"""
        if 1 <= i <= self.top:
            return self.boundaries[i - 1]
        return BitMatrix.zeros(self.dim(i - 1), self.dim(i))

    def coboundary(self, i: int) -> BitMatrix:
        """δ_i : C_{i-1} -> C_i"""
        return self.boundary(i).transpose()

    def label(self, grade: int, index: int) -> str:
        names = self.labels.get(grade)
        if names:
            return names[index]
        return f"{grade}:{index}"

    def to_json(self) -> dict:
        return {
            'grades': list(self.grades),
            'boundaries': [b.to_json() for b in self.boundaries],
            'labels': {str(k): list(v) for k, v in sorted(self.labels.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "ChainComplex":
        try:
            grades = data['grades']
            boundaries = [BitMatrix.from_json(b) for b in data['boundaries']]
        except (KeyError, TypeError) as e:
            raise DimensionMismatchError(f"malformed complex JSON: {e}") from e
        labels = {int(k): list(v) for k, v in data.get('labels', {}).items()}
        return cls(tuple(grades), tuple(boundaries), labels)


def validate(cx: ChainComplex) -> CheckReport:
    """Dimensions chain correctly and every composition ∂_i ∂_{i+1} vanishes"""
    failures = []
    for i in range(1, cx.top + 1):
        b = cx.boundary(i)
        if b.shape != (cx.grades[i - 1], cx.grades[i]):
            failures.append({'grade': i, 'column': None,
                             'reason': f"boundary {i} has shape {b.shape}, expected "
                                       f"{(cx.grades[i - 1], cx.grades[i])}"})
    if failures:
        return CheckReport.fail('chain-complex', witness=failures)
    for i in range(1, cx.top):
        product = multiply(cx.boundary(i), cx.boundary(i + 1))
        for j, col in enumerate(product.columns):
            if col:
                failures.append({'grade': i + 1, 'column': j,
                                 'reason': f"boundary of {cx.label(i + 1, j)} is not a cycle"})
    if failures:
        return CheckReport.fail('chain-complex', witness=failures)
    return CheckReport.ok('chain-complex', grades=list(cx.grades))


def require_valid(cx: ChainComplex) -> ChainComplex:
    report = validate(cx)
    if not report.passed:
        first = report.witness[0]
        raise ChainComplexError(
            f"invalid chain complex at grade {first['grade']}, column {first['column']}: "
            f"{first['reason']}", report)
    return cx


@dataclass(frozen=True)
class HomologyBasis:
    grade: int
    representatives: Tuple[BitVec, ...]
    kind: str

    def __len__(self) -> int:
        return len(self.representatives)

    def __iter__(self):
        return iter(self.representatives)

    def to_json(self) -> dict:
        return {'grade': self.grade, 'kind': self.kind,
                'representatives': [r.to_json() for r in self.representatives]}


def _cycles_and_boundaries(cx: ChainComplex, i: int, kind: str):
    if kind == HOMOLOGY:
        return kernel_basis(cx.boundary(i)), image_basis(cx.boundary(i + 1))
    if kind == COHOMOLOGY:
        return kernel_basis(cx.coboundary(i + 1)), image_basis(cx.coboundary(i))
    raise ValueError(f"unknown kind {kind!r}")


def _quotient_representatives(kernel: Sequence[BitVec], image: Sequence[BitVec],
                              length: int) -> List[BitVec]:
    basis = XorBasis(v.to_int() for v in image)
    picks = [v.to_int() for v in kernel if basis.add(v.to_int())]
    generators = [v.to_int() for v in image]
    reduced = []
    for rep in picks:
        improved = True
        while improved:
            improved = False
            for g in generators:
                candidate = rep ^ g
                if popcount(candidate) < popcount(rep):
                    rep = candidate
                    improved = True
        reduced.append(BitVec.from_int(length, rep))
    return reduced


def homology_basis(cx: ChainComplex, i: int) -> HomologyBasis:
    """Representatives of ker ∂_i / Im ∂_{i+1}"""
    _check_grade(cx, i)
    kernel, image = _cycles_and_boundaries(cx, i, HOMOLOGY)
    reps = _quotient_representatives(kernel, image, cx.dim(i))
    return HomologyBasis(i, tuple(reps), HOMOLOGY)


def cohomology_basis(cx: ChainComplex, i: int) -> HomologyBasis:
    """Representatives of ker δ_{i+1} / Im δ_i, weight-reduced by coboundary generators"""
    _check_grade(cx, i)
    kernel, image = _cycles_and_boundaries(cx, i, COHOMOLOGY)
    reps = _quotient_representatives(kernel, image, cx.dim(i))
    return HomologyBasis(i, tuple(reps), COHOMOLOGY)


def betti(cx: ChainComplex, i: int) -> int:
    """dim H_i, equal to dim H^i"""
    return cx.dim(i) - rank(cx.boundary(i)) - rank(cx.boundary(i + 1))


def homology_distance(cx: ChainComplex, i: int, kind: str = HOMOLOGY,
                      budget: Optional[int] = None) -> WeightResult:
    """
    Minimum weight of a nontrivial (co)homology class at grade i.

    A (co)cycle is nontrivial iff it pairs nontrivially with some dual
    representative, so the search looks for the lightest vector whose
    (co)boundary vanishes and whose pairing signature is nonzero.
    """
    _check_grade(cx, i)
    if budget is None:
        budget = settings.DISTANCE_BUDGET
    if kind == HOMOLOGY:
        constraint = cx.boundary(i)
        dual = cohomology_basis(cx, i)
    elif kind == COHOMOLOGY:
        constraint = cx.coboundary(i + 1)
        dual = homology_basis(cx, i)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    k = len(dual)
    if k == 0:
        return WeightResult.infinite()

    n = cx.dim(i)
    shift = constraint.rows
    signatures = []
    for j in range(n):
        sig = 0
        for r in constraint.columns[j]:
            sig |= 1 << r
        for a, rep in enumerate(dual.representatives):
            if j in rep:
                sig |= 1 << (shift + a)
        signatures.append(sig)
    targets = [t << shift for t in range(1, 1 << k)]
    support = min_weight_search(signatures, targets, budget)
    if support is None:
        logger.info(f"{kind} distance at grade {i} exceeds budget {budget}")
        return WeightResult.unknown(budget + 1)
    return WeightResult.exact(len(support), BitVec(n, support))


@dataclass(frozen=True)
class CheegerResult:
    value: Optional[Fraction]
    status: str
    witness: Optional[BitVec] = None

    @property
    def is_exact(self) -> bool:
        return self.status == WeightResult.EXACT

    def to_json(self) -> dict:
        payload = {'status': self.status, 'value': None}
        if self.value is not None:
            payload['value'] = {'numerator': self.value.numerator,
                                'denominator': self.value.denominator,
                                'float': float(self.value)}
        if self.witness is not None:
            payload['witness'] = self.witness.to_json()
        return payload


def cheeger(cx: ChainComplex, h: int, budget: Optional[int] = None) -> CheegerResult:
    """
    Higher Cheeger constant: min |δ_{h+1} c~| / |c~| over nonzero classes of
    C_h / ker δ_{h+1}, with c~ the lightest representative of its class.

    ``budget`` bounds the quotient dimension (rank of δ_{h+1}); past it the result is
    UNKNOWN. Within the budget, grades of at most EXHAUSTIVE_BITS cells are enumerated
    chain by chain, larger ones class by class.
    """
    _check_grade(cx, h)
    if budget is None:
        budget = settings.CHEEGER_BITS
    delta = cx.coboundary(h + 1)
    n = cx.dim(h)
    columns = [sum(1 << r for r in col) for col in delta.columns]

    r = rank(delta)
    if r > budget:
        logger.info(f"cheeger at grade {h}: quotient dimension {r} exceeds budget {budget}")
        return CheegerResult(None, WeightResult.UNKNOWN)

    if n <= settings.EXHAUSTIVE_BITS:
        best: Dict[int, Tuple[int, Tuple[int, ...]]] = {}
        chain = 0
        image = 0
        flips = [1 << j for j in range(n)]
        for step, delta_image in enumerate(_gray_images(columns)):
            if step:
                j = (step & -step).bit_length() - 1
                chain ^= flips[j]
            image = delta_image
            if not image:
                continue
            w = popcount(chain)
            current = best.get(image)
            if current is None or w < current[0] or (w == current[0] and
                                                     _supp(chain) < current[1]):
                best[image] = (w, _supp(chain))
        return _cheeger_from_classes(best, n)

    best = {}
    image_gens = [v.to_int() for v in image_basis(delta)]
    for image in gray_code_span(image_gens):
        if not image:
            continue
        support = min_weight_search(columns, [image], n)
        best[image] = (len(support), support)
    return _cheeger_from_classes(best, n)


def _gray_images(columns: Sequence[int]):
    current = 0
    yield current
    for i in range(1, 1 << len(columns)):
        current ^= columns[(i & -i).bit_length() - 1]
        yield current


def _supp(mask: int) -> Tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if (mask >> i) & 1)


def _cheeger_from_classes(best: Dict[int, Tuple[int, Tuple[int, ...]]], n: int) -> CheegerResult:
    if not best:
        return CheegerResult(None, WeightResult.INFINITE)
    value = None
    witness = None
    for image, (w, supp) in sorted(best.items(), key=lambda kv: kv[1][1]):
        ratio = Fraction(popcount(image), w)
        if value is None or ratio < value:
            value = ratio
            witness = supp
    return CheegerResult(value, WeightResult.EXACT, BitVec(n, witness))


def extend_with_cycle_space(cx: ChainComplex, top: Optional[int] = None) -> ChainComplex:
    """Append a grade whose boundary columns are a basis of ker ∂_top"""
    if top is None:
        top = cx.top
    if top != cx.top:
        raise DimensionMismatchError(f"complex tops out at grade {cx.top}, not {top}")
    cycles = kernel_basis(cx.boundary(top)) if top > 0 else [
        BitVec(cx.dim(0), (j,)) for j in range(cx.dim(0))]
    new_boundary = BitMatrix.from_columns(cx.dim(top), cycles)
    labels = dict(cx.labels)
    logger.debug(f"extended complex above grade {top} by {len(cycles)} cycle generators")
    return ChainComplex(cx.grades + (len(cycles),), cx.boundaries + (new_boundary,), labels)


def pad_to_grade(cx: ChainComplex, top: int) -> ChainComplex:
    """Append zero-dimensional grades until the complex reaches ``top``"""
    grades = list(cx.grades)
    boundaries = list(cx.boundaries)
    while len(grades) - 1 < top:
        boundaries.append(BitMatrix.zeros(grades[-1], 0))
        grades.append(0)
    return ChainComplex(tuple(grades), tuple(boundaries), dict(cx.labels))


def _check_grade(cx: ChainComplex, i: int):
    if not 0 <= i <= cx.top:
        raise DimensionMismatchError(f"grade {i} outside 0..{cx.top}")

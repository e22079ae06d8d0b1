"""
Fault injection for the gauging measurement and the distance claims that go with it.

Three fault types are modelled: flipped A_v outcomes, X errors on hyperedges after
their preparation, and Pauli errors on data qubits before the Gauss-law round.
Runs are bracketed by reliable code-space rounds.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import settings
from .chain_complex import (
    COHOMOLOGY, HOMOLOGY, CheegerResult, cheeger, cohomology_basis, homology_distance,
)
from .css_code import code_distance
from .errors import BoundViolationError, DetectedFaultError, DimensionMismatchError
from .f2la import BitMatrix, BitVec, WeightResult, coset_min_weight, kernel_basis, popcount
from .gauging import GaugingOutcome, GaugingPlan, detectors, execute
from .hfgate import register_logicals
from .opalg import PhasedCssOperator
from .report import CheckReport
from .sim import PREPARE, State, SyndromeRecord, make_rng, project_codespace

logger = logging.getLogger(__name__)

PAULIS = ('X', 'Y', 'Z')


@dataclass(frozen=True)
class FaultPattern:
    meas_flips: Tuple[int, ...] = ()
    hyperedge_x: Tuple[int, ...] = ()
    vertex_errors: Tuple[Tuple[int, str], ...] = ()

    @property
    def weight(self) -> int:
        return len(self.meas_flips) + len(self.hyperedge_x) + len(self.vertex_errors)

    def validate(self, plan: GaugingPlan) -> "FaultPattern":
        for v in self.meas_flips:
            if not 0 <= v < plan.gate.n_sites:
                raise DimensionMismatchError(f"measurement flip on site {v} out of range")
        for e in self.hyperedge_x:
            if not 0 <= e < plan.n_hyperedges:
                raise DimensionMismatchError(f"hyperedge {e} out of range")
        for q, p in self.vertex_errors:
            if not 0 <= q < plan.n_data or p not in PAULIS:
                raise DimensionMismatchError(f"vertex error ({q}, {p}) invalid")
        return self

    def to_json(self) -> dict:
        return {'meas_flips': list(self.meas_flips), 'hyperedge_x': list(self.hyperedge_x),
                'vertex_errors': [[q, p] for q, p in self.vertex_errors]}


@dataclass
class FaultRunReport:
    pattern: FaultPattern
    outcome: Optional[GaugingOutcome]
    detectors_ok: List[bool] = field(default_factory=list)
    byproduct_failed: bool = False
    final_syndrome: Optional[SyndromeRecord] = None
    signature: Tuple = ()

    @property
    def detected(self) -> bool:
        if self.byproduct_failed or not all(self.detectors_ok):
            return True
        return self.final_syndrome is not None and not self.final_syndrome.trivial

    def to_json(self) -> dict:
        return {
            'pattern': self.pattern.to_json(),
            'outcome': self.outcome.to_json() if self.outcome is not None else None,
            'detectors_ok': self.detectors_ok,
            'byproduct_failed': self.byproduct_failed,
            'final_syndrome': self.final_syndrome.to_json() if self.final_syndrome else None,
            'detected': self.detected,
        }


def logical_signature(plan: GaugingPlan, state: State) -> Tuple:
    """Rounded expectations of every normalized logical X and Z of the targets"""
    _, xs, zs = register_logicals(plan.gate)
    values = []
    for vectors, make in ((xs, PhasedCssOperator.x), (zs, PhasedCssOperator.z)):
        for v in vectors:
            ev = state.expectation(make(state.n, v.support))
            values.append(round(float(np.real(ev)), 6) + 0.0)
    return tuple(values)


def run_with_faults(plan: GaugingPlan, initial: State, pattern: FaultPattern,
                    rng: Optional[np.random.Generator] = None) -> FaultRunReport:
    """Faulty run followed by a reliable, correcting code-space round"""
    pattern.validate(plan)
    if rng is None:
        rng = make_rng(plan.seed)
    try:
        outcome = execute(plan, initial.copy(), rng, pattern.meas_flips, pattern.hyperedge_x,
                          pattern.vertex_errors)
    except DetectedFaultError as e:
        logger.debug(f"pattern {pattern.to_json()} detected at the byproduct solve: {e}")
        return FaultRunReport(pattern, None, byproduct_failed=True)
    outcome.seed = plan.seed
    report = FaultRunReport(pattern, outcome, detectors(plan).evaluate(outcome.eps))
    state, record = project_codespace(outcome.final_state, plan.gate.targets, rng, PREPARE,
                                      plan.gate.offsets)
    report.final_syndrome = record
    report.signature = logical_signature(plan, state)
    return report


def meas_fault_distance(plan: GaugingPlan, budget: Optional[int] = None) -> WeightResult:
    """
    Lightest outcome-flip pattern that passes every detector (∂_h p = 0) yet flips
    some measured σ_i, found by exhaustive enumeration up to ``budget``.
    """
    if budget is None:
        budget = settings.DISTANCE_BUDGET
    if not plan.reps:
        return WeightResult.infinite()
    cx = plan.gate.gate_complex
    boundary = cx.boundary(plan.h)
    n = plan.gate.n_sites
    shift = boundary.rows
    signatures = []
    for v in range(n):
        sig = sum(1 << r for r in boundary.columns[v])
        for i, rep in enumerate(plan.reps):
            if v in rep:
                sig |= 1 << (shift + i)
        signatures.append(sig)
    low = (1 << shift) - 1
    for w in range(1, min(budget, n) + 1):
        for combo in itertools.combinations(range(n), w):
            acc = 0
            for v in combo:
                acc ^= signatures[v]
            if not acc & low and acc >> shift:
                logger.info(f"measurement fault distance {w}, witness {combo}")
                return WeightResult.exact(w, BitVec(n, combo))
    if not cohomology_basis(cx, plan.h):
        return WeightResult.infinite()
    return WeightResult.unknown(budget + 1)


def homology_fault_distance(plan: GaugingPlan, budget: Optional[int] = None) -> WeightResult:
    """Distance of ker ∂_h / Im ∂_{h+1}, the closed form of meas_fault_distance"""
    return homology_distance(plan.gate.gate_complex, plan.h, HOMOLOGY, budget)


def _class_minima(columns: Sequence[int], n: int) -> Dict[int, int]:
    """For each coboundary image, the weight of its lightest preimage (Gray-code sweep)"""
    best: Dict[int, int] = {}
    chain = 0
    image = 0
    for step in range(1 << n):
        if step:
            j = (step & -step).bit_length() - 1
            chain ^= 1 << j
            image ^= columns[j]
        if image:
            w = popcount(chain)
            if image not in best or w < best[image]:
                best[image] = w
    return best


def _lightest_preimage_weight(plan: GaugingPlan, c: BitVec) -> int:
    delta = plan.gate.gate_complex.coboundary(plan.h + 1)
    cocycles = kernel_basis(delta)
    if not cocycles:
        return c.weight
    result = coset_min_weight(BitMatrix.from_columns(c.length, cocycles), c)
    return result.value if result.is_exact else c.weight


def verify_cleaning_bound(plan: GaugingPlan, samples: Optional[int] = None,
                          rng: Optional[np.random.Generator] = None) -> CheckReport:
    """
    Cleaning a hyperedge error δc onto the sites must shrink it by at least φ_h, and a
    cohomologically nontrivial error r = ℓ + δc by at least φ_h / 2. All chains are
    enumerated when the site count allows, otherwise ``samples`` random chains are drawn.
    """
    cx = plan.gate.gate_complex
    h = plan.h
    phi = cheeger(cx, h)
    if not phi.is_exact:
        return CheckReport.fail('cleaning-bound', witness={'cheeger': phi.to_json()},
                                reason='cheeger constant unresolved')
    delta = cx.coboundary(h + 1)
    n = cx.dim(h)
    columns = [sum(1 << r for r in col) for col in delta.columns]

    if n <= settings.EXHAUSTIVE_BITS and samples is None:
        minima = _class_minima(columns, n)
        mode = 'exhaustive'
    else:
        rng = rng or make_rng(plan.seed)
        minima = {}
        for _ in range(samples or 256):
            bits = tuple(int(j) for j in np.flatnonzero(rng.random(n) < 0.5))
            c = BitVec(n, bits)
            image = delta.apply(c).to_int()
            if image and image not in minima:
                minima[image] = _lightest_preimage_weight(plan, c)
        mode = 'sampled'

    violations = []
    for image, w in minima.items():
        if Fraction(popcount(image), w) < phi.value:
            violations.append({'kind': 'trivial', 'hyperedges': image, 'cleaned_weight': w})

    # nontrivial classes, each taken at its lightest representative
    nontrivial = 0
    m = cx.dim(h + 1)
    image_matrix = BitMatrix.from_columns(m, [delta.column(j) for j in range(n)])
    higher = cohomology_basis(cx, h + 1) if cx.top >= h + 1 else ()
    for rep in higher:
        lightest = coset_min_weight(image_matrix, rep)
        ell = lightest.witness.to_int() if lightest.is_exact and lightest.witness else rep.to_int()
        for image, w in minima.items():
            r = ell ^ image
            nontrivial += 1
            if Fraction(2 * popcount(r), w) < phi.value:
                violations.append({'kind': 'nontrivial', 'hyperedges': r, 'cleaned_weight': w})

    if violations:
        raise BoundViolationError(f"cleaning bound violated in {len(violations)} cases",
                                  witness=violations[:20])
    return CheckReport.ok('cleaning-bound', mode=mode, cheeger=phi.value,
                          trivial_classes=len(minima), nontrivial_samples=nontrivial)


def fault_locations(plan: GaugingPlan) -> List[Tuple]:
    """Every single-fault location in a fixed order: flips, hyperedges, then data Paulis"""
    locs: List[Tuple] = [('meas', v) for v in range(plan.gate.n_sites)]
    locs += [('hyperedge', e) for e in range(plan.n_hyperedges)]
    locs += [('vertex', q, p) for q in range(plan.n_data) for p in PAULIS]
    return locs


def pattern_from_locations(locations: Sequence[Tuple]) -> FaultPattern:
    flips, hyper, vertex = [], [], []
    for loc in locations:
        if loc[0] == 'meas':
            flips.append(loc[1])
        elif loc[0] == 'hyperedge':
            hyper.append(loc[1])
        else:
            vertex.append((loc[1], loc[2]))
    return FaultPattern(tuple(flips), tuple(hyper), tuple(vertex))


def _clean_reference(plan: GaugingPlan, initial: State, seed: int) -> FaultRunReport:
    return run_with_faults(plan, initial, FaultPattern(), make_rng(seed))


def is_logical_fault(plan: GaugingPlan, initial: State, pattern: FaultPattern,
                     seeds: Sequence[int], references: Optional[Dict[int, FaultRunReport]] = None
                     ) -> bool:
    """
    Undetected and logically active on some seed: same-seed frame comparison of σ
    and the logical signature against the fault-free run.
    """
    for seed in seeds:
        if references is not None and seed in references:
            clean = references[seed]
        else:
            clean = _clean_reference(plan, initial, seed)
            if references is not None:
                references[seed] = clean
        faulty = run_with_faults(plan, initial, pattern, make_rng(seed))
        if faulty.detected:
            return False
        if faulty.outcome.sigma != clean.outcome.sigma or faulty.signature != clean.signature:
            return True
    return False


def scan_fault_patterns(plan: GaugingPlan, initial: State, weight: int, start: int = 0,
                        stop: Optional[int] = None, seeds: Sequence[int] = (0,)
                        ) -> Iterator[FaultPattern]:
    """Yield the undetected logical patterns among combinations [start, stop) of ``weight`` locations"""
    references: Dict[int, FaultRunReport] = {}
    combos = itertools.combinations(fault_locations(plan), weight)
    for locations in itertools.islice(combos, start, stop):
        pattern = pattern_from_locations(locations)
        if is_logical_fault(plan, initial, pattern, seeds, references):
            yield pattern


def code_distance_of_targets(plan: GaugingPlan, budget: Optional[int] = None) -> WeightResult:
    results = [code_distance(t, budget).d for t in plan.gate.targets]
    exact = [r for r in results if r.is_exact]
    if exact and len(exact) == len(results):
        return min(exact, key=lambda r: r.value)
    if all(r.is_infinite for r in results):
        return WeightResult.infinite()
    return WeightResult.unknown(min((r.value for r in results if r.value is not None), default=None))


@dataclass
class ProcedureDistance:
    found: WeightResult
    phi: CheegerResult
    d: WeightResult
    bound: Optional[Fraction]
    witness: Optional[FaultPattern] = None

    def to_json(self) -> dict:
        return {
            'min_weight_found': self.found.to_json(),
            'cheeger': self.phi.to_json(),
            'd': self.d.to_json(),
            'bound': self.bound,
            'witness': self.witness.to_json() if self.witness else None,
        }


def procedure_code_distance(plan: GaugingPlan, initial: State, budget: int = 1,
                            seeds: Sequence[int] = (0, 1, 2)) -> ProcedureDistance:
    """
    Lightest undetected logical fault pattern of the whole procedure up to ``budget``
    faults, compared with φ_h·d/2; a lighter witness raises BoundViolationError.
    """
    phi = cheeger(plan.gate.gate_complex, plan.h)
    d = code_distance_of_targets(plan)
    bound = phi.value * d.value / 2 if phi.is_exact and d.is_exact else None
    found = WeightResult.unknown(budget + 1)
    witness = None
    references: Dict[int, FaultRunReport] = {}
    for w in range(0, budget + 1):
        logger.info(f"scanning weight-{w} fault patterns")
        for locations in itertools.combinations(fault_locations(plan), w):
            pattern = pattern_from_locations(locations)
            if is_logical_fault(plan, initial, pattern, seeds, references):
                found = WeightResult.exact(w)
                witness = pattern
                break
        if witness is not None:
            break
    result = ProcedureDistance(found, phi, d, bound, witness)
    if bound is not None and found.is_exact and found.value < bound:
        raise BoundViolationError(
            f"undetected logical fault of weight {found.value} below φ·d/2 = {bound}",
            witness=witness.to_json())
    logger.info(f"procedure distance search: found {found.to_json()}, bound {bound}")
    return result


def required_fault_budget(plan: GaugingPlan) -> Optional[int]:
    """⌈φ_h·d/2⌉ - 1, the weight up to which no logical fault may exist"""
    phi = cheeger(plan.gate.gate_complex, plan.h)
    d = code_distance_of_targets(plan)
    if not (phi.is_exact and d.is_exact):
        return None
    return max(ceil(phi.value * d.value / 2) - 1, 0)


def improved_bound(plan: GaugingPlan, budget: Optional[int] = None) -> dict:
    """
    φ_h·d next to φ_h·d/2; the improvement holds once the hyperedge cohomology
    distance (the meta-check distance of grade h+1) reaches φ_h·d.
    """
    phi = cheeger(plan.gate.gate_complex, plan.h)
    d = code_distance_of_targets(plan, budget)
    meta = homology_distance(plan.extended, plan.h + 1, COHOMOLOGY, budget)
    payload = {'cheeger': phi.to_json(), 'd': d.to_json(), 'meta_distance': meta.to_json(),
               'bound': None, 'improved_bound': None, 'improved_applies': False}
    if phi.is_exact and d.is_exact:
        payload['bound'] = phi.value * d.value / 2
        payload['improved_bound'] = phi.value * d.value
        payload['improved_applies'] = bool(
            meta.is_infinite or (meta.is_exact and meta.value >= phi.value * d.value))
    return payload

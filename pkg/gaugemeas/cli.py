"""
Command-line front end.

    python -m gaugemeas inspect --instance torus2d:3,3
    python -m gaugemeas gauge   --instance iceberg-cz --seed 7 --shots 5
    python -m gaugemeas verify  --instance tetrahedral-cc
    python -m gaugemeas faults  --instance torus2d:2,2 --budget 4
    python -m gaugemeas campaign --instance torus2d:2,3 --kind gauging --shots 100

Reports go to stdout (or --out) as schema-versioned JSON; logs go to stderr.
Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error.
"""

import argparse
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from . import settings
from .chain_complex import betti, cheeger
from .css_code import code_distance, ldpc_profile
from .errors import (
    BackendMismatchError, CampaignError, ChainComplexError, DimensionMismatchError,
    GaugingError, InstanceError, NotACocycleError, QubitCeilingError,
)
from .examples import (
    HggtBuild, Instance, hggt_membrane_action, hggt_membrane_logical_action, initial_state,
    resolve_instance,
)
from .faults import (
    homology_fault_distance, improved_bound, meas_fault_distance, procedure_code_distance,
    required_fault_budget, verify_cleaning_bound,
)
from .gauging import (
    PRODUCT_STATE, check_gauged_commutation, cost_comparison,
    disentangle_pauli_case, gauged_code, run_algorithm1, run_report, verify_gauss_law,
)
from .hfgate import (
    CZ, PAULI_X, PAULI_Z, XS, validate_codespace_cz, validate_codespace_xs,
    verify_codespace,
)
from .report import CheckReport, VerificationSuite, dump_report, write_report
from .sim import PREPARE, StabTableau, compare_distributions, make_rng, project_codespace

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

# weight searches are only run unprompted on codes this small
SEARCH_QUBIT_LIMIT = 64
BACKEND_AGREEMENT_MAX = 12

INPUT_ERRORS = (InstanceError, DimensionMismatchError, ChainComplexError, NotACocycleError,
                QubitCeilingError, BackendMismatchError)


@dataclass
class RunConfig:
    command: str
    instance: str
    seed: int = settings.DEFAULT_SEED
    budget: Optional[int] = None
    shots: int = 1
    out: Optional[str] = None
    format: str = 'json'
    kind: str = 'gauging'
    host: str = settings.TEMPORAL_HOST
    debug: bool = False

    def __post_init__(self):
        if self.budget is not None and self.budget < 1:
            raise InstanceError(f"--budget must be positive, got {self.budget}")
        if self.shots < 1:
            raise InstanceError(f"--shots must be positive, got {self.shots}")


class CommandResult:
    """Payload plus pass/fail for one command"""

    def __init__(self, kind: str, payload: dict, passed: bool = True):
        self.kind = kind
        self.payload = payload
        self.passed = passed


# inspect

def cmd_inspect(config: RunConfig) -> CommandResult:
    inst = resolve_instance(config.instance)
    gate = inst.gate
    codes = []
    for code in inst.codes:
        entry = {'name': code.name, 'n': code.n, 'k': code.k,
                 'ldpc': ldpc_profile(code)._asdict()}
        if code.n <= SEARCH_QUBIT_LIMIT or config.budget is not None:
            d = code_distance(code, config.budget)
            entry['d'] = {'x': d.d_x.to_json(), 'z': d.d_z.to_json(), 'min': d.d.to_json()}
        else:
            entry['d'] = None
            entry['d_skipped'] = f"n > {SEARCH_QUBIT_LIMIT}; pass --budget to search"
        codes.append(entry)
    cx = inst.complex
    phi = cheeger(gate.gate_complex, gate.h, config.budget)
    payload = {
        'instance': inst.name,
        'codes': codes,
        'complex': {'grades': list(cx.grades),
                    'betti': [betti(cx, i) for i in range(cx.top + 1)]},
        'gate': {'h': gate.h, 'kind': gate.kind, 'sites': gate.n_sites,
                 'sparsity': gate.sparsity, 'strongly_transversal': gate.strongly_transversal,
                 'gate_complex_grades': list(gate.gate_complex.grades),
                 'cheeger': phi.to_json()},
    }
    if not phi.is_exact:
        payload['gate']['cheeger_caveat'] = "quotient too large for the search budget"
    return CommandResult('inspect', payload)


# gauge

def cmd_gauge(config: RunConfig) -> CommandResult:
    inst = resolve_instance(config.instance)
    plan = inst.plan(config.seed)
    if plan.n_total > settings.QUBIT_CEILING:
        logger.warning(f"[WARNING] {plan.n_total} qubits exceed the statevector ceiling "
                       f"{settings.QUBIT_CEILING}; running the symbolic suite instead")
        suite = build_verify_suite(inst, config)
        payload = {'instance': inst.name, 'seed': config.seed, 'statevector': 'refused',
                   'reason': f"{plan.n_total} qubits > ceiling {settings.QUBIT_CEILING}",
                   'symbolic': suite.to_json()}
        return CommandResult('gauge', payload, suite.passed)

    rng = make_rng(config.seed)
    initial = initial_state(inst, rng)
    runs = []
    passed = True
    for shot in range(config.shots):
        outcome = run_algorithm1(plan, initial, rng)
        report = run_report(plan, initial, outcome)
        report['shot'] = shot
        fidelity = report['fidelity_vs_projector']
        if not report['detectors_ok'] or fidelity is None or \
                fidelity < 1.0 - settings.FIDELITY_TOL:
            passed = False
        runs.append(report)
    payload = {
        'instance': inst.name,
        'seed': config.seed,
        'n_data': plan.n_data,
        'n_hyperedges': plan.n_hyperedges,
        'representatives': [rep.to_json() for rep in plan.reps],
        'runs': runs,
        'cost': cost_comparison(plan, max(1, _known_distance(inst))),
    }
    return CommandResult('gauge', payload, passed)


def _known_distance(inst: Instance) -> int:
    smallest = None
    for code in inst.codes:
        if code.n > SEARCH_QUBIT_LIMIT:
            continue
        d = code_distance(code).d
        if d.is_exact and (smallest is None or d.value < smallest):
            smallest = d.value
    return smallest or 1


# verify

def _disentangler_check(plan) -> Callable[[], CheckReport]:
    def check():
        result = disentangle_pauli_case(plan)
        if result.verdict == PRODUCT_STATE:
            return CheckReport.ok('disentangler', gates=len(result.circuit))
        return CheckReport.fail('disentangler', witness=result.failures, verdict=result.verdict)
    return check


def backend_agreement(inst: Instance, plan, shots: int, seed: int) -> CheckReport:
    """Same-seed σ from statevector and tableau runs, plus a chi-square on the histograms"""
    sv_counts: Dict[tuple, int] = {}
    tab_counts: Dict[tuple, int] = {}
    mismatches = []
    for k in range(shots):
        s = seed + k
        sv_rng, tab_rng = make_rng(s), make_rng(s)
        sv_initial = initial_state(inst, sv_rng)
        tableau = StabTableau(plan.n_data)
        if inst.initial_basis == 'plus':
            for q in range(plan.n_data):
                tableau.h(q)
        tableau, _ = project_codespace(tableau, inst.gate.targets, tab_rng, PREPARE,
                                       inst.gate.offsets)
        sigma_sv = run_algorithm1(plan, sv_initial, sv_rng).sigma
        sigma_tab = run_algorithm1(plan, tableau, tab_rng).sigma
        sv_counts[sigma_sv] = sv_counts.get(sigma_sv, 0) + 1
        tab_counts[sigma_tab] = tab_counts.get(sigma_tab, 0) + 1
        if sigma_sv != sigma_tab:
            mismatches.append({'seed': s, 'statevector': sigma_sv, 'tableau': sigma_tab})
    p_value = compare_distributions(sv_counts, tab_counts)
    if mismatches or p_value <= 0.001:
        return CheckReport.fail('backend-agreement', witness=mismatches[:10], p_value=p_value)
    return CheckReport.ok('backend-agreement', shots=shots, p_value=p_value)


def _membrane_checks(suite: VerificationSuite, build: HggtBuild):
    gate = build.gate
    z_span = gate.register_z_span()

    def trivial_membrane():
        red = build.red_code
        for c in gate.cocycle_generators[:4]:
            residual = hggt_membrane_action(gate, c, red.x_checks[0], target=0)
            if not residual.is_z_type() or not z_span.contains(sum(1 << q for q in residual.z_support)):
                return CheckReport.fail('membrane-stabilizer', witness={'cocycle': c.to_json(),
                                                                        'residual': residual.to_text()})
        return CheckReport.ok('membrane-stabilizer')

    suite.run('membrane-stabilizer', trivial_membrane)
    if build.cs.period is None:
        suite.skip('membrane-logical-action', "complex has no periodic coordinates")
        return
    for axis in range(3):
        name = f"membrane-logical-action-{'xyz'[axis]}"

        def check(axis=axis, name=name):
            action = hggt_membrane_logical_action(build, axis)
            b, c = (a for a in range(3) if a != axis)
            expected = sorted([((0, b), (1, c)), ((0, c), (1, b))])
            pairs = sorted(action.cz_pairs())
            diagonal = [action.matrix[i][i] for i in range(len(action.labels))]
            if pairs == expected and action.residual_ok and not any(diagonal):
                return CheckReport.ok(name, cz_pairs=pairs)
            return CheckReport.fail(name, witness=action.to_json(), expected=expected)
        suite.run(name, check)


def build_verify_suite(inst: Instance, config: RunConfig) -> VerificationSuite:
    """Symbolic checks always; simulation checks when the register fits the ceiling"""
    suite = VerificationSuite(f"verify {inst.name}")
    gate = inst.gate
    plan = inst.plan(config.seed)

    suite.run('codespace', lambda: verify_codespace(gate))
    if gate.kind == XS:
        suite.run('codespace-xs', lambda: validate_codespace_xs(gate))
    elif gate.kind == CZ and all(len(e) == 2 for e in gate.embedding):
        suite.run('codespace-cz', lambda: validate_codespace_cz(gate))
    suite.run('gauss-law', lambda: verify_gauss_law(plan))
    suite.run('gauged-commutation',
              lambda: check_gauged_commutation(gauged_code(plan, verify=False)))
    if gate.kind in (PAULI_X, XS):
        suite.run('disentangler', _disentangler_check(plan))
    else:
        suite.skip('disentangler', "site operators are not X-conjugate")
    if isinstance(inst.build, HggtBuild):
        _membrane_checks(suite, inst.build)
    if gate.gate_complex.dim(gate.h) <= settings.EXHAUSTIVE_BITS:
        suite.run('cleaning-bound', lambda: verify_cleaning_bound(plan))
    else:
        suite.skip('cleaning-bound', f"{gate.n_sites} sites exceed exhaustive enumeration")

    if plan.n_total > settings.QUBIT_CEILING:
        suite.skip('projector-equivalence', f"{plan.n_total} qubits exceed the statevector ceiling")
        return suite

    def equivalence():
        rng = make_rng(config.seed)
        initial = initial_state(inst, rng)
        worst = 1.0
        for _ in range(config.shots):
            report = run_report(plan, initial, run_algorithm1(plan, initial, rng))
            worst = min(worst, report['fidelity_vs_projector'])
            if not report['detectors_ok']:
                return CheckReport.fail('projector-equivalence', witness=report)
        if worst < 1.0 - settings.FIDELITY_TOL:
            return CheckReport.fail('projector-equivalence', witness={'fidelity': worst})
        return CheckReport.ok('projector-equivalence', shots=config.shots, min_fidelity=worst)

    suite.run('projector-equivalence', equivalence)
    if gate.kind in (PAULI_X, PAULI_Z) and plan.n_total <= BACKEND_AGREEMENT_MAX:
        suite.run('backend-agreement',
                  lambda: backend_agreement(inst, plan, max(config.shots, 20), config.seed))
    return suite


def cmd_verify(config: RunConfig) -> CommandResult:
    inst = resolve_instance(config.instance)
    suite = build_verify_suite(inst, config)
    suite.summary()
    return CommandResult('verify', suite.to_json(), suite.passed)


# faults

def cmd_faults(config: RunConfig) -> CommandResult:
    inst = resolve_instance(config.instance)
    plan = inst.plan(config.seed)
    budget = config.budget if config.budget is not None else settings.DISTANCE_BUDGET
    meas = meas_fault_distance(plan, budget)
    homology = homology_fault_distance(plan, budget)
    payload = {
        'instance': inst.name,
        'seed': config.seed,
        'meas_fault_distance': meas.to_json(),
        'homology_distance': homology.to_json(),
        'improved_bound': improved_bound(plan, budget),
    }
    passed = meas.to_json() == homology.to_json()
    if not passed:
        logger.warning("[FAIL] measurement fault distance differs from the homology distance")

    if plan.gate.n_sites <= settings.EXHAUSTIVE_BITS:
        try:
            payload['cleaning_bound'] = verify_cleaning_bound(plan).to_json()
        except GaugingError as e:
            payload['cleaning_bound'] = {'passed': False, 'error': str(e),
                                         'witness': getattr(e, 'witness', None)}
            passed = False
    required = required_fault_budget(plan)
    payload['required_fault_budget'] = required
    if plan.n_total <= settings.QUBIT_CEILING and required is not None and required <= 2:
        rng = make_rng(config.seed)
        initial = initial_state(inst, rng)
        try:
            payload['procedure_distance'] = procedure_code_distance(plan, initial, required).to_json()
        except GaugingError as e:
            payload['procedure_distance'] = {'passed': False, 'error': str(e),
                                             'witness': getattr(e, 'witness', None)}
            passed = False
    else:
        payload['procedure_distance'] = None
    return CommandResult('faults', payload, passed)


# campaign

def cmd_campaign(config: RunConfig) -> CommandResult:
    """Submit a campaign to the Temporal worker and wait for its merged summary"""
    from asgiref.sync import async_to_sync

    try:
        from start_campaign import submit_campaign
    except ImportError as e:
        raise CampaignError(f"campaign launcher is not importable from this directory: {e}") from e
    args = {'instance': config.instance, 'seed': config.seed, 'shots': config.shots,
            'budget': config.budget}
    summary = async_to_sync(submit_campaign)(config.kind, args, config.host)
    return CommandResult('campaign', summary, bool(summary.get('passed', False)))


COMMANDS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    'inspect': cmd_inspect,
    'gauge': cmd_gauge,
    'verify': cmd_verify,
    'faults': cmd_faults,
    'campaign': cmd_campaign,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='gaugemeas',
        description="Higher-form gauging measurement: build, inspect, gauge, verify, fault campaigns",
    )
    parser.add_argument('--debug', action='store_true', help="DEBUG logging for the package")
    sub = parser.add_subparsers(dest='command', required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument('--instance', required=True,
                       help="torus2d:Lx,Ly | torus3d:L | tetrahedral-cc | iceberg-cz | "
                            "colored-3torus:L | hggt-16cell | hggt:FILE | ccz-triple:L")
        p.add_argument('--seed', type=int, default=settings.DEFAULT_SEED)
        p.add_argument('--budget', type=int, default=None, help="weight / quotient search budget")
        p.add_argument('--shots', type=int, default=1)
        p.add_argument('--out', default=None, help="write the report here instead of stdout")
        p.add_argument('--format', choices=['json'], default='json')
        if name == 'campaign':
            p.add_argument('--kind', choices=['gauging', 'faults'], default='gauging')
            p.add_argument('--host', default=settings.TEMPORAL_HOST)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings.setup_logging(debug_mode=args.debug or settings.DEBUG, to_file=False)
    try:
        config = RunConfig(command=args.command, instance=args.instance, seed=args.seed,
                           budget=args.budget, shots=args.shots, out=args.out,
                           format=args.format, kind=getattr(args, 'kind', 'gauging'),
                           host=getattr(args, 'host', settings.TEMPORAL_HOST), debug=args.debug)
        result = COMMANDS[config.command](config)
    except INPUT_ERRORS as e:
        logger.error(f"[ERROR] {type(e).__name__}: {e}")
        return EXIT_USAGE
    except CampaignError as e:
        logger.error(f"[ERROR] {e}")
        return EXIT_USAGE
    except GaugingError as e:
        logger.error(f"[FAIL] {type(e).__name__}: {e}")
        witness = getattr(e, 'witness', None)
        write_report(dump_report({'passed': False, 'error': type(e).__name__,
                                  'message': str(e), 'witness': witness}, config.command),
                     config.out)
        return EXIT_CHECK_FAILED

    result.payload['passed'] = result.passed
    write_report(dump_report(result.payload, result.kind), config.out)
    if result.passed:
        logger.info(f"[SUCCESS] {config.command} {config.instance}")
        return EXIT_OK
    logger.warning(f"[FAIL] {config.command} {config.instance}")
    return EXIT_CHECK_FAILED

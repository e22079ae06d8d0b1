import math
from datetime import datetime

# Import temporalio activity module
from temporalio import activity

from gaugemeas import settings
from gaugemeas.errors import CampaignError, DetectedFaultError, GaugingError
from gaugemeas.examples import initial_state, resolve_instance
from gaugemeas.faults import fault_locations, scan_fault_patterns
from gaugemeas.gauging import run_algorithm1, run_report
from gaugemeas.sim import make_rng


def _feasible_instance(name: str):
    """Resolve ``name`` and refuse registers above the statevector ceiling"""
    try:
        inst = resolve_instance(name)
    except GaugingError as e:
        activity.logger.error(f"Cannot build instance {name}: {e}")
        raise CampaignError(f"Instance resolution failed: {str(e)}")
    n_total = inst.plan().n_total
    if n_total > settings.QUBIT_CEILING:
        raise CampaignError(
            f"{name} needs {n_total} qubits, above the statevector ceiling {settings.QUBIT_CEILING}")
    return inst


@activity.defn(name="gauging_batch_activity")
async def gauging_batch_activity(args: dict) -> dict:
    """
    Run the gauging measurement once per seed in [start, stop) and summarize.

    Args:
        args: Dictionary containing:
            - instance: instance name understood by resolve_instance
            - start: first seed of the batch
            - stop: one past the last seed

    Returns:
        Summary with successful/failed counts, detector failures and the lowest fidelity
    """
    name = args.get("instance")
    start = args.get("start")
    stop = args.get("stop")

    if name is None or start is None or stop is None:
        activity.logger.error(f"Missing required arguments. Got: {list(args.keys())}")
        raise CampaignError(f"Missing required arguments for gauging batch. Received args: {list(args.keys())}")

    activity.logger.info(f"Starting gauging batch {name} seeds [{start}, {stop})")
    start_time = datetime.now()
    inst = _feasible_instance(name)

    successful = 0
    failed = []
    min_fidelity = 1.0
    try:
        for seed in range(start, stop):
            plan = inst.plan(seed)
            initial = initial_state(inst, make_rng(seed))
            try:
                outcome = run_algorithm1(plan, initial)
            except DetectedFaultError as e:
                failed.append({'seed': seed, 'reason': str(e)})
                continue
            report = run_report(plan, initial, outcome)
            fidelity = report['fidelity_vs_projector']
            if not report['detectors_ok'] or fidelity < 1 - settings.FIDELITY_TOL:
                failed.append({'seed': seed, 'detectors_ok': report['detectors_ok'],
                               'fidelity': fidelity})
            else:
                successful += 1
            min_fidelity = min(min_fidelity, fidelity)
            activity.heartbeat(seed)
    except GaugingError as e:
        activity.logger.error(f"Gauging batch failed: {e}")
        raise CampaignError(f"Gauging batch failed: {str(e)}")

    elapsed = (datetime.now() - start_time).total_seconds()
    activity.logger.info(f"[SUCCESS] Batch done in {elapsed:.2f}s: {successful} ok, {len(failed)} failed")
    return {
        'instance': name,
        'seeds': [start, stop],
        'successful': successful,
        'failed': failed,
        'min_fidelity': min_fidelity,
        'processing_time_seconds': elapsed,
    }


@activity.defn(name="fault_space_activity")
async def fault_space_activity(args: dict) -> dict:
    """Count the single-fault locations and the weight-w combinations of them"""
    name = args.get("instance")
    weight = args.get("weight")
    if name is None or weight is None:
        raise CampaignError(f"Missing required arguments for fault space. Received args: {list(args.keys())}")
    inst = _feasible_instance(name)
    locations = len(fault_locations(inst.plan()))
    total = math.comb(locations, weight)
    activity.logger.info(f"{name}: {locations} fault locations, {total} patterns of weight {weight}")
    return {'instance': name, 'weight': weight, 'locations': locations, 'patterns': total}


@activity.defn(name="fault_scan_activity")
async def fault_scan_activity(args: dict) -> dict:
    """
    Scan combinations [start, stop) of ``weight`` fault locations for undetected logical faults.

    Args:
        args: Dictionary containing:
            - instance: instance name
            - weight: number of faults per pattern
            - start, stop: slice of the combination order
            - seeds: seeds each pattern is replayed with

    Returns:
        Summary with the number of patterns scanned and the logical witnesses found
    """
    name = args.get("instance")
    weight = args.get("weight")
    start = args.get("start")
    stop = args.get("stop")
    seeds = args.get("seeds") or [settings.DEFAULT_SEED]

    if None in (name, weight, start, stop):
        activity.logger.error(f"Missing required arguments. Got: {list(args.keys())}")
        raise CampaignError(f"Missing required arguments for fault scan. Received args: {list(args.keys())}")

    activity.logger.info(f"Scanning weight-{weight} patterns [{start}, {stop}) of {name}")
    inst = _feasible_instance(name)
    plan = inst.plan(seeds[0])
    initial = initial_state(inst, make_rng(seeds[0]))
    try:
        witnesses = [p.to_json() for p in
                     scan_fault_patterns(plan, initial, weight, start, stop, seeds)]
    except GaugingError as e:
        activity.logger.error(f"Fault scan failed: {e}")
        raise CampaignError(f"Fault scan failed: {str(e)}")

    if witnesses:
        activity.logger.warning(f"[WARNING] {len(witnesses)} undetected logical pattern(s) of weight {weight}")
    return {
        'instance': name,
        'weight': weight,
        'range': [start, stop],
        'scanned': stop - start,
        'witnesses': witnesses,
    }

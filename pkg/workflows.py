import asyncio
from datetime import timedelta
from typing import List, Tuple

from temporalio import workflow
from temporalio.common import RetryPolicy

# Import with pass_through to avoid sandbox restrictions
with workflow.unsafe.imports_passed_through():
    from activities import fault_scan_activity, fault_space_activity, gauging_batch_activity
    from gaugemeas import settings


CAMPAIGN_RETRY = RetryPolicy(
    maximum_attempts=3,
    initial_interval=timedelta(seconds=1),
    maximum_interval=timedelta(seconds=10),
    backoff_coefficient=2,
    non_retryable_error_types=["CampaignError"],
)


def chunk_ranges(start: int, stop: int, size: int) -> List[Tuple[int, int]]:
    """Split [start, stop) into consecutive half-open ranges of at most ``size``"""
    if size < 1:
        raise ValueError("chunk size must be positive")
    return [(lo, min(lo + size, stop)) for lo in range(start, stop, size)]


def merge_gauging(summaries: List[dict]) -> dict:
    failed = [f for s in summaries for f in s['failed']]
    return {
        'kind': 'gauging',
        'batches': len(summaries),
        'successful': sum(s['successful'] for s in summaries),
        'failed': failed,
        'min_fidelity': min((s['min_fidelity'] for s in summaries), default=None),
        'passed': not failed,
    }


def merge_faults(space: dict, summaries: List[dict]) -> dict:
    witnesses = [w for s in summaries for w in s['witnesses']]
    return {
        'kind': 'faults',
        'weight': space['weight'],
        'locations': space['locations'],
        'patterns': space['patterns'],
        'scanned': sum(s['scanned'] for s in summaries),
        'witnesses': witnesses,
        'passed': not witnesses,
    }


@workflow.defn
class GaugingCampaignWorkflow:
    """
    Seed sweep of the gauging measurement. Seeds are cut into chunks, one activity per
    chunk, and the chunk summaries are merged.
    """

    @workflow.run
    async def run(self, args: dict) -> dict:
        name = args["instance"]
        first = args.get("seed", 0)
        shots = args.get("shots", 1)
        workflow.logger.info(f"Starting GaugingCampaignWorkflow for {name}, {shots} shot(s)")

        chunks = chunk_ranges(first, first + shots, settings.CAMPAIGN_CHUNK)
        try:
            summaries = await asyncio.gather(*[
                workflow.execute_activity(
                    gauging_batch_activity,
                    {"instance": name, "start": lo, "stop": hi},
                    start_to_close_timeout=timedelta(minutes=10),
                    retry_policy=CAMPAIGN_RETRY,
                )
                for lo, hi in chunks
            ])
        except Exception as e:
            workflow.logger.error(f"Gauging campaign for {name} failed: {e}")
            raise

        merged = merge_gauging(list(summaries))
        merged['instance'] = name
        workflow.logger.info(f"Gauging campaign for {name}: {merged['successful']} ok, "
                             f"{len(merged['failed'])} failed")
        return merged


@workflow.defn
class FaultCampaignWorkflow:
    """Distributed scan of every fault pattern of one weight"""

    @workflow.run
    async def run(self, args: dict) -> dict:
        name = args["instance"]
        weight = args.get("budget") or 1
        seeds = [args.get("seed", 0) + i for i in range(max(args.get("shots", 1), 1))]
        workflow.logger.info(f"Starting FaultCampaignWorkflow for {name}, weight {weight}")

        try:
            space = await workflow.execute_activity(
                fault_space_activity,
                {"instance": name, "weight": weight},
                start_to_close_timeout=timedelta(minutes=2),
                retry_policy=CAMPAIGN_RETRY,
            )
            chunks = chunk_ranges(0, space['patterns'], settings.CAMPAIGN_CHUNK)
            summaries = await asyncio.gather(*[
                workflow.execute_activity(
                    fault_scan_activity,
                    {"instance": name, "weight": weight, "start": lo, "stop": hi, "seeds": seeds},
                    start_to_close_timeout=timedelta(minutes=30),
                    retry_policy=CAMPAIGN_RETRY,
                )
                for lo, hi in chunks
            ])
        except Exception as e:
            workflow.logger.error(f"Fault campaign for {name} failed: {e}")
            raise

        merged = merge_faults(space, list(summaries))
        merged['instance'] = name
        workflow.logger.info(f"Fault campaign for {name}: {merged['scanned']} patterns, "
                             f"{len(merged['witnesses'])} witness(es)")
        return merged

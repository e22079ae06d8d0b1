#!/usr/bin/env python
"""
Temporal worker for gauging campaigns.

    python run_worker.py          # serve TASK_QUEUE until SIGINT/SIGTERM
    python run_worker.py health   # exit 0 when the server answers

Each activity builds its instance from the name in its arguments, so any number of
workers can share the queue.
"""
import asyncio
import logging
import os
import signal
import sys
from typing import List, Optional

from temporalio.api.workflowservice.v1 import GetSystemInfoRequest
from temporalio.client import Client
from temporalio.worker import Worker

from activities import fault_scan_activity, fault_space_activity, gauging_batch_activity
from gaugemeas import settings
from workflows import FaultCampaignWorkflow, GaugingCampaignWorkflow

WORKFLOWS = [GaugingCampaignWorkflow, FaultCampaignWorkflow]
ACTIVITIES = [gauging_batch_activity, fault_space_activity, fault_scan_activity]

logger = logging.getLogger("gaugemeas.worker")


class GracefulShutdown:
    """Set by SIGINT/SIGTERM, polled by serve()"""

    def __init__(self):
        self.requested = False

    def install(self):
        for sig in (signal.SIGINT, signal.SIGTERM):
            signal.signal(sig, self.request)

    def request(self, signum, frame):
        logger.info(f"signal {signum}: finishing current batches, then stopping")
        self.requested = True


def _definition(fn):
    return getattr(fn, '__temporal_activity_definition', None)


def activity_names() -> List[str]:
    return [_definition(fn).name if _definition(fn) else fn.__name__ for fn in ACTIVITIES]


def verify_imports() -> bool:
    """Every registered activity must carry a Temporal definition"""
    missing = [fn.__name__ for fn in ACTIVITIES if _definition(fn) is None]
    for name in missing:
        logger.error(f"[ERROR] {name} is registered but not decorated with @activity.defn")
    if not missing:
        logger.info(f"[OK] activities {activity_names()}")
        logger.info(f"[OK] workflows {[wf.__name__ for wf in WORKFLOWS]}")
    return not missing


async def connect(host: str = settings.TEMPORAL_HOST, attempts: int = 3) -> Optional[Client]:
    """Client.connect with a linear backoff of 2s, 4s, ...; None when every attempt fails"""
    for attempt in range(1, attempts + 1):
        try:
            client = await Client.connect(host, namespace=settings.TEMPORAL_NAMESPACE)
            await client.workflow_service.get_system_info(GetSystemInfoRequest())
            logger.info(f"[SUCCESS] connected to {host} ({settings.TEMPORAL_NAMESPACE})")
            return client
        except Exception as e:
            logger.error(f"[ERROR] attempt {attempt}/{attempts} to reach {host}: {e}")
            if attempt < attempts:
                await asyncio.sleep(2 * attempt)
    return None


async def serve(client: Client, identity: str, shutdown: GracefulShutdown):
    worker = Worker(
        client,
        task_queue=settings.TASK_QUEUE,
        workflows=WORKFLOWS,
        activities=ACTIVITIES,
        max_concurrent_activities=settings.WORKER_SLOTS,
        identity=identity,
    )
    logger.info(f"[SUCCESS] {identity} polling {settings.TASK_QUEUE}")
    running = asyncio.create_task(worker.run())
    while not (shutdown.requested or running.done()):
        await asyncio.sleep(1)
    if running.done():
        # worker.run() only returns on failure or cancellation
        running.result()
        return
    running.cancel()
    try:
        await running
    except asyncio.CancelledError:
        pass
    logger.info(f"[SUCCESS] {identity} stopped")


async def main():
    identity = os.getenv("WORKER_ID", f"gaugemeas-worker-{os.getpid()}")
    logger.info("=" * 60)
    logger.info(f"GAUGING CAMPAIGN WORKER {identity}")
    logger.info(f"host {settings.TEMPORAL_HOST}, queue {settings.TASK_QUEUE}, "
                f"qubit ceiling {settings.QUBIT_CEILING}, chunk {settings.CAMPAIGN_CHUNK}")
    logger.info("=" * 60)

    if not verify_imports():
        sys.exit(1)
    client = await connect()
    if client is None:
        logger.error("[ERROR] no Temporal server; start one with `docker compose up -d`")
        sys.exit(1)

    shutdown = GracefulShutdown()
    shutdown.install()
    await serve(client, identity, shutdown)


async def health_check() -> bool:
    return await connect(attempts=1) is not None


if __name__ == "__main__":
    settings.setup_logging(debug_mode=settings.DEBUG, to_file=True)
    if sys.argv[1:2] == ["health"]:
        sys.exit(0 if asyncio.run(health_check()) else 1)
    try:
        asyncio.run(main())
    except KeyboardInterrupt:
        logger.warning("[WARNING] worker interrupted")
    except Exception as e:
        logger.error(f"[FATAL] {e}", exc_info=True)
        sys.exit(1)

#!/usr/bin/env python
"""Submit a gauging or fault-scan campaign to the worker and wait for its summary."""
import asyncio
import json
import logging
import re
import sys
from datetime import datetime
from typing import Optional

from temporalio.client import Client

from gaugemeas import settings
from gaugemeas.errors import CampaignError
from workflows import FaultCampaignWorkflow, GaugingCampaignWorkflow

CAMPAIGN_WORKFLOWS = {
    'gauging': GaugingCampaignWorkflow,
    'faults': FaultCampaignWorkflow,
}

logger = logging.getLogger("gaugemeas.campaign")


def campaign_workflow_id(kind: str, instance: str, now: Optional[datetime] = None) -> str:
    """Unique, Temporal-safe workflow id: kind, sanitized instance name and timestamp"""
    now = now or datetime.now()
    slug = re.sub(r'[^A-Za-z0-9]+', '-', instance).strip('-')
    return f"{kind}-campaign-{slug}-{now.strftime('%Y%m%d-%H%M%S')}"


async def submit_campaign(kind: str, args: dict, host: Optional[str] = None) -> dict:
    """
    Start the campaign workflow for ``kind`` and block until its merged summary arrives.

    Raises:
        CampaignError: unknown kind, unreachable server or a failed workflow
    """
    workflow_cls = CAMPAIGN_WORKFLOWS.get(kind)
    if workflow_cls is None:
        raise CampaignError(f"unknown campaign kind {kind!r}; expected one of {sorted(CAMPAIGN_WORKFLOWS)}")
    host = host or settings.TEMPORAL_HOST

    logger.info("=" * 60)
    logger.info(f"{kind.upper()} CAMPAIGN STARTER")
    logger.info("=" * 60)
    logger.info(f"Instance: {args.get('instance')}")
    logger.info(f"Temporal Host: {host}")
    logger.info("=" * 60)

    try:
        client = await Client.connect(host, namespace=settings.TEMPORAL_NAMESPACE)
        logger.info("[SUCCESS] Connected to Temporal server")
    except Exception as e:
        logger.error(f"[ERROR] Failed to connect to Temporal: {e}")
        raise CampaignError(f"cannot reach Temporal at {host}: {str(e)}")

    workflow_id = campaign_workflow_id(kind, args.get('instance', 'unnamed'))
    logger.info(f"Starting {workflow_cls.__name__} with ID {workflow_id}")
    try:
        handle = await client.start_workflow(
            workflow_cls.run,
            args=[args],
            id=workflow_id,
            task_queue=settings.TASK_QUEUE,
        )
        logger.info(f"[SUCCESS] Workflow started with ID: {handle.id}")
        logger.info("Waiting for workflow to complete...")
        result = await handle.result()
    except Exception as e:
        logger.error(f"[ERROR] Workflow failed: {e}")
        raise CampaignError(f"campaign workflow {workflow_id} failed: {str(e)}")

    logger.info("=" * 60)
    logger.info(f"CAMPAIGN COMPLETED: passed={result.get('passed')}")
    logger.info("=" * 60)
    result['workflow_id'] = workflow_id
    return result


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="Start a gauging or fault-scan campaign")
    parser.add_argument("--kind", choices=sorted(CAMPAIGN_WORKFLOWS), default="gauging")
    parser.add_argument("--instance", required=True, help="instance name, e.g. torus2d:3,3")
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    parser.add_argument("--shots", type=int, default=100, help="seeds swept (gauging) or replayed per pattern (faults)")
    parser.add_argument("--budget", type=int, default=None, help="fault weight scanned")
    parser.add_argument("--host", default=settings.TEMPORAL_HOST)
    cli_args = parser.parse_args()

    settings.setup_logging(debug_mode=settings.DEBUG, to_file=False)
    payload = {'instance': cli_args.instance, 'seed': cli_args.seed,
               'shots': cli_args.shots, 'budget': cli_args.budget}
    try:
        summary = asyncio.run(submit_campaign(cli_args.kind, payload, cli_args.host))
    except CampaignError as e:
        logger.error(f"[ERROR] {e}")
        sys.exit(2)
    print(json.dumps(summary, indent=2, sort_keys=True))
    sys.exit(0 if summary.get('passed') else 1)

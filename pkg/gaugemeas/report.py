"""
Check reports, verification suites and JSON emission.

Reports are plain data: every check either passes or carries a witness that
explains the failure. JSON output is schema-versioned, key-sorted and free of
timestamps, so identical inputs always produce identical bytes.
"""

import json
import logging
from dataclasses import dataclass, field, asdict, is_dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .errors import GaugingError

logger = logging.getLogger(__name__)

SCHEMA = "gaugemeas.report/1"


@dataclass
class CheckReport:
    """Outcome of one named check"""
    name: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)
    witness: Any = None

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> Dict[str, Any]:
        payload = {'name': self.name, 'passed': self.passed, 'details': to_jsonable(self.details)}
        if self.witness is not None:
            payload['witness'] = to_jsonable(self.witness)
        return payload

    @classmethod
    def ok(cls, name: str, **details) -> "CheckReport":
        return cls(name=name, passed=True, details=details)

    @classmethod
    def fail(cls, name: str, witness: Any = None, **details) -> "CheckReport":
        return cls(name=name, passed=False, details=details, witness=witness)


class VerificationSuite:
    """Run a list of checks and keep a pass/fail ledger"""

    def __init__(self, title: str):
        self.title = title
        self.reports: List[CheckReport] = []
        self.results = {
            'passed': [],
            'failed': [],
            'skipped': [],
            'total': 0
        }

    def run(self, name: str, check: Callable[[], CheckReport]) -> CheckReport:
        """Execute a check; library errors become failed reports with the message as witness"""
        self.results['total'] += 1
        logger.info(f"Running check: {name}")
        try:
            report = check()
            if report.name != name:
                report = CheckReport(name=name, passed=report.passed,
                                     details=report.details, witness=report.witness)
        except GaugingError as e:
            logger.error(f"  [FAIL] {name}: {type(e).__name__}: {e}")
            report = CheckReport.fail(name, witness={'error': type(e).__name__, 'message': str(e)})
        self.record(report)
        return report

    def skip(self, name: str, reason: str) -> None:
        self.results['total'] += 1
        self.results['skipped'].append({'name': name, 'reason': reason})
        logger.info(f"  [SKIP] {name}: {reason}")

    def record(self, report: CheckReport) -> None:
        self.reports.append(report)
        if report.passed:
            self.results['passed'].append(report.name)
            logger.info(f"  [OK] {report.name}")
        else:
            self.results['failed'].append(report.name)
            logger.warning(f"  [FAIL] {report.name}")

    @property
    def passed(self) -> bool:
        return not self.results['failed']

    def to_json(self) -> Dict[str, Any]:
        return {
            'suite': self.title,
            'passed': self.passed,
            'checks': [r.to_json() for r in self.reports],
            'skipped': self.results['skipped'],
        }

    def summary(self) -> Dict[str, int]:
        """Log the suite banner; returns the counts it logged"""
        counts = {
            'total': self.results['total'],
            'passed': len(self.results['passed']),
            'skipped': len(self.results['skipped']),
            'failed': len(self.results['failed']),
        }
        logger.info("=" * 60)
        logger.info(f"{self.title.upper()} SUMMARY")
        logger.info("=" * 60)
        logger.info(f"Total checks: {counts['total']}")
        logger.info(f"[OK] Passed: {counts['passed']}")
        logger.info(f"[SKIP] Skipped: {counts['skipped']}")
        logger.info(f"[FAIL] Failed: {counts['failed']}")
        for name in self.results['failed']:
            logger.info(f"  - {name}")
        logger.info("=" * 60)
        return counts


def to_jsonable(obj: Any) -> Any:
    """Convert library values into JSON-compatible structures"""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, Fraction):
        return {'numerator': obj.numerator, 'denominator': obj.denominator, 'value': float(obj)}
    if hasattr(obj, 'to_json'):
        return to_jsonable(obj.to_json())
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in obj]
        if isinstance(obj, (set, frozenset)):
            items.sort(key=lambda v: json.dumps(v, sort_keys=True))
        return items
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"Cannot serialise {type(obj).__name__}")


def dump_report(payload: Dict[str, Any], kind: str) -> str:
    """Schema-versioned, key-sorted JSON text for a report payload"""
    document = {'schema': SCHEMA, 'kind': kind}
    document.update(to_jsonable(payload))
    return json.dumps(document, sort_keys=True, indent=2)


def write_report(text: str, out: Optional[str] = None) -> None:
    if out is None:
        print(text)
        return
    with open(out, 'w', encoding='utf-8') as f:
        f.write(text + "\n")
    logger.info(f"Report written to {out}")

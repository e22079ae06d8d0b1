"""Tests for check reports, verification suites and JSON emission."""

import json
from fractions import Fraction

from gaugemeas.errors import NotACocycleError
from gaugemeas.report import SCHEMA, CheckReport, VerificationSuite, dump_report


def raise_not_a_cocycle():
    raise NotACocycleError("δ c != 0")


class TestVerificationSuite:

    def test_summary_counts(self):
        suite = VerificationSuite("verify toy")
        suite.run('ok', lambda: CheckReport.ok('ok', weight=2))
        suite.run('broken', raise_not_a_cocycle)
        suite.skip('large', "over the ceiling")
        assert suite.summary() == {'total': 3, 'passed': 1, 'skipped': 1, 'failed': 1}
        assert not suite.passed

    def test_library_errors_become_witnesses(self):
        suite = VerificationSuite("verify toy")
        report = suite.run('broken', raise_not_a_cocycle)
        assert not report.passed
        assert report.witness == {'error': 'NotACocycleError', 'message': "δ c != 0"}

    def test_report_is_renamed_to_the_check(self):
        suite = VerificationSuite("verify toy")
        report = suite.run('gauss-law', lambda: CheckReport.ok('inner'))
        assert report.name == 'gauss-law'
        assert suite.to_json()['checks'][0]['name'] == 'gauss-law'


class TestDumpReport:

    def test_schema_and_sorted_keys(self):
        text = dump_report({'b': 1, 'a': Fraction(1, 2)}, 'inspect')
        document = json.loads(text)
        assert document['schema'] == SCHEMA
        assert document['kind'] == 'inspect'
        assert document['a'] == {'numerator': 1, 'denominator': 2, 'value': 0.5}
        assert list(document) == sorted(document)

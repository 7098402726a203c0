"""Tests for the verification suites and the shared aggregation."""
import pytest

from src.checks import SUITES, DictionarySuite, GaussManinSuite, HomalgSuite, PullbackSuite, TransferSuite, WeylLawSuite
from src.core.base_suite import BaseSuite, CheckResult
from src.core.constants import CHART_CAVEAT, ReportKeys
from src.validators.schema_validator import SchemaValidator


def by_name(result):
    return {check.name: check for check in result.checks}


class RecordingSuite(BaseSuite):
    name = 'recording'

    def build_instances(self):
        return [0, 1, 2]

    def check_instance(self, key):
        return [CheckResult('even', key % 2 == 0, witness=key), CheckResult('always', True)]


class TestAggregation:

    def test_merges_by_name(self):
        result = RecordingSuite(seed=1).run()
        checks = by_name(result)
        assert list(checks) == ['even', 'always']
        assert checks['even'].detail == {'instances': 3, 'failed': 1}
        assert checks['even'].witness == 1
        assert checks['always'].passed
        assert not result.passed

    def test_single_result_keeps_detail(self):
        suite = RecordingSuite()
        [merged] = suite.aggregate([CheckResult('once', True, detail={'k': 1})])
        assert merged.detail == {'k': 1}

    def test_report_has_no_timing(self):
        report = RecordingSuite(seed=5).run().to_dict()
        assert report[ReportKeys.SEED] == 5
        assert ReportKeys.ELAPSED not in report
        assert report[ReportKeys.DISCLAIMER]


class TestSuites:

    def test_registry(self):
        assert set(SUITES) == {'dictionary', 'weyl', 'pullback', 'transfer', 'homalg', 'gaussmanin'}

    def test_weyl(self):
        assert WeylLawSuite(count=3, order_cap=2).run().passed

    def test_dictionary(self):
        assert DictionarySuite(count=4).run().passed

    def test_dictionary_declared_integrability(self, inputs_dir):
        validator = SchemaValidator()
        inputs = [validator.load(str(inputs_dir / 'corrupted_connection.json'))]
        result = DictionarySuite(inputs=inputs).run()
        assert not by_name(result)['declared_integrability'].passed
        assert not result.passed

    def test_pullback(self):
        result = PullbackSuite(count=3).run()
        assert result.passed
        assert by_name(result)['squaring_instance_value'].passed

    def test_transfer(self):
        result = TransferSuite(count=2, order_cap=2).run()
        checks = by_name(result)
        assert result.passed
        assert checks['sign_flip_detected'].passed
        assert checks['cotangent_sequence_exact'].passed
        assert result.to_dict()[ReportKeys.CHART_CAVEAT] == CHART_CAVEAT

    def test_homalg(self):
        result = HomalgSuite(degree_cap=4).run()
        assert result.passed
        assert result.to_dict()['degree_bounds'] == {'n1': 4, 'n2': 2}

    def test_gaussmanin(self):
        result = GaussManinSuite(count=2).run()
        checks = by_name(result)
        assert checks['sign_flip_detected'].passed
        assert all(checks[f"oracle_{name}"].passed
                   for name in ('linear', 'quadratic', 'cubic', 'trivial', 'twisted_linear', 'gaussian'))
        assert result.passed

    def test_gaussmanin_from_file(self, inputs_dir):
        validator = SchemaValidator()
        inputs = validator.entries(validator.load(str(inputs_dir / 'families.json')), 'families')
        result = GaussManinSuite(inputs=inputs).run()
        assert result.passed
        assert 'routes_quadratic' in by_name(result)

    @pytest.mark.parametrize('full', [False, True])
    def test_full_flag_is_reported(self, full, inputs_dir):
        validator = SchemaValidator()
        inputs = [validator.load(str(inputs_dir / 'family_cubic.json'))]
        result = GaussManinSuite(inputs=inputs, full_h1=full).run()
        assert result.to_dict()['full_h1'] is full
        assert result.passed

"""Tests for run configuration, exit codes and reproducible report files."""
import pytest

from src.core.base_suite import CheckResult, SuiteResult
from src.core.constants import ExitCode, Limits
from src.core.errors import CapExceeded, SchemaError
from src.pipeline.verification_pipeline import RunConfig, RunReport, VerificationPipeline


def suite_result(*checks: CheckResult) -> SuiteResult:
    return SuiteResult('weyl', list(checks), {'degree_cap': 8, 'order_cap': 3}, Limits.DEFAULT_SEED)


class TestRunConfig:

    def test_defaults(self):
        config = RunConfig('weyl')
        assert config.seed == Limits.DEFAULT_SEED
        assert config.caps == {'degree_cap': Limits.DEFAULT_DEGREE_CAP, 'order_cap': Limits.DEFAULT_ORDER_CAP}
        assert config.suites == ['weyl']

    def test_all_runs_every_suite(self):
        assert len(RunConfig('all').suites) == 6

    def test_unknown_command(self):
        with pytest.raises(SchemaError):
            RunConfig('sheaves')

    def test_unknown_format(self):
        with pytest.raises(SchemaError):
            RunConfig('weyl', output_format='yaml')

    @pytest.mark.parametrize('overrides', [
        {'degree_cap': Limits.DEGREE_CAP_MAX + 1},
        {'degree_cap': 0},
        {'order_cap': Limits.ORDER_CAP_MAX + 1},
        {'jobs': 0},
        {'count': -1},
    ])
    def test_limits(self, overrides):
        with pytest.raises(CapExceeded):
            RunConfig('weyl', **overrides)


class TestRunReport:

    def test_pass(self):
        report = RunReport(RunConfig('weyl'), [suite_result(CheckResult('a', True))])
        assert report.exit_code == ExitCode.PASS

    def test_failure(self):
        report = RunReport(RunConfig('weyl'), [suite_result(CheckResult('a', True), CheckResult('b', False))])
        assert report.exit_code == ExitCode.CHECK_FAILED
        assert report.to_dict()['passed'] is False

    def test_stuck_outranks_failure(self):
        stuck = CheckResult('routes', False, stuck={'step': 'twist'})
        report = RunReport(RunConfig('weyl'), [suite_result(CheckResult('b', False)), suite_result(stuck)])
        assert report.exit_code == ExitCode.REDUCTION_STUCK


class TestPipeline:

    def test_weyl_ignores_input(self, inputs_dir):
        pipeline = VerificationPipeline(RunConfig('weyl', input_path=str(inputs_dir / 'connections.json')))
        assert pipeline.load_inputs('weyl') is None

    def test_loads_multi_entry_document(self, inputs_dir):
        pipeline = VerificationPipeline(RunConfig('gaussmanin', input_path=str(inputs_dir / 'families.json')))
        assert len(pipeline.load_inputs('gaussmanin')) == 4

    def test_invalid_input_is_a_schema_error(self, inputs_dir):
        path = str(inputs_dir / 'nonintegrable_twist.json')
        with pytest.raises(SchemaError):
            VerificationPipeline(RunConfig('gaussmanin', input_path=path)).run()

    @pytest.mark.parametrize('output_format', ['json', 'text'])
    def test_reports_are_byte_identical(self, tmp_path, output_format):
        paths = [tmp_path / f"run{k}.{output_format}" for k in range(2)]
        for path in paths:
            config = RunConfig('weyl', count=3, order_cap=2, output_format=output_format, output=str(path))
            assert VerificationPipeline(config).run().passed
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_output_folder_is_created(self, tmp_path):
        path = tmp_path / 'nested' / 'report.json'
        VerificationPipeline(RunConfig('weyl', count=1, order_cap=2, output=str(path))).run()
        assert path.exists()

    def test_corrupted_connection_fails(self, inputs_dir):
        config = RunConfig('dictionary', input_path=str(inputs_dir / 'corrupted_connection.json'))
        assert VerificationPipeline(config).run().exit_code == ExitCode.CHECK_FAILED

"""Tests for the text, JSON and Excel report exporters."""
import json

import pytest
from openpyxl import load_workbook

from src.checks import GaussManinSuite
from src.core.base_suite import CheckResult, SuiteResult
from src.exporters.excel_exporter import ExcelExporter
from src.exporters.report_exporter import ReportExporter
from src.pipeline.verification_pipeline import RunConfig, RunReport
from src.validators.schema_validator import SchemaValidator

SAMPLE = {'a': 1, 'b': [1, 2], 'c': {'d': None, 'e': [[1, 2]]}, 'f': True}


@pytest.fixture
def exporter():
    return ReportExporter()


@pytest.fixture
def weyl_report():
    checks = [CheckResult('associativity', True, detail={'instances': 2, 'failed': 0}),
              CheckResult('transpose_involutive', False, witness=['d_x'])]
    result = SuiteResult('weyl', checks, {'degree_cap': 8, 'order_cap': 2}, 2024)
    return RunReport(RunConfig('weyl', order_cap=2), [result])


class TestReportExporter:

    def test_text_rendering(self, exporter):
        assert exporter.to_text(SAMPLE) == "a: 1\nb:\n  - 1\n  - 2\nc:\n  d: null\n  e:\n    - [1, 2]\nf: true\n"

    def test_empty_list(self, exporter):
        assert exporter.to_text({'basis': []}) == "basis:\n  []\n"

    def test_json_keeps_order(self, exporter):
        text = exporter.to_json(SAMPLE)
        assert text.endswith('\n')
        assert list(json.loads(text)) == ['a', 'b', 'c', 'f']

    def test_render_dispatch(self, exporter):
        assert exporter.render(SAMPLE, 'text') == exporter.to_text(SAMPLE)
        assert exporter.render(SAMPLE, 'json') == exporter.to_json(SAMPLE)

    def test_export_and_failure(self, exporter, tmp_path):
        path = tmp_path / 'report.txt'
        exporter.export(SAMPLE, str(path), 'text')
        assert path.read_text(encoding='utf-8') == exporter.to_text(SAMPLE)
        with pytest.raises(RuntimeError):
            exporter.export(SAMPLE, str(tmp_path / 'missing' / 'report.json'))

    def test_run_report(self, exporter, weyl_report):
        document = json.loads(exporter.to_json(weyl_report.to_dict()))
        assert document['exit_code'] == 1
        assert document['suites'][0]['checks'][1]['witness'] == ['d_x']


class TestExcelExporter:

    def test_summary_and_checks(self, weyl_report, tmp_path):
        path = tmp_path / 'certificate.xlsx'
        ExcelExporter().export(weyl_report, str(path))
        wb = load_workbook(path)
        assert wb.sheetnames == ['Summary', 'Checks']

    def test_gauss_manin_sheet(self, inputs_dir, tmp_path):
        validator = SchemaValidator()
        inputs = [validator.load(str(inputs_dir / 'family_quadratic.json'))]
        result = GaussManinSuite(inputs=inputs).run()
        report = RunReport(RunConfig('gaussmanin'), [result])
        path = tmp_path / 'gm.xlsx'
        ExcelExporter().export(report, str(path))
        assert 'Gauss_Manin' in load_workbook(path).sheetnames

    def test_unwritable_path(self, weyl_report, tmp_path):
        with pytest.raises(RuntimeError):
            ExcelExporter().export(weyl_report, str(tmp_path / 'missing' / 'certificate.xlsx'))

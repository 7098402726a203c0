"""
Excel exporter for verification certificates.
Uses openpyxl to create .xlsx files with one sheet per report view.
"""
import json
from typing import Any, Dict, List

from openpyxl import Workbook
from openpyxl.styles import Alignment, Font, PatternFill

from ..core.constants import (
    DEFAULT_COLUMN_PADDING, MAX_COLUMN_WIDTH, SHEET_CERTIFICATES, SHEET_CHECKS, SHEET_GAUSS_MANIN, SHEET_SUMMARY,
    ExcelColors, ExcelFontSizes, ReportKeys,
)
from ..core.logger import get_logger

logger = get_logger(__name__)

# Excel rejects longer cell values
MAX_CELL_LENGTH = 32000


def _fill(color: str) -> PatternFill:
    return PatternFill(start_color=color, end_color=color, fill_type="solid")


def _compact(value: Any) -> str:
    if value is None:
        return ''
    text = value if isinstance(value, str) else json.dumps(value, ensure_ascii=False)
    return text[:MAX_CELL_LENGTH]


class ExcelExporter:
    """
    Exports a run report to Excel format (.xlsx): a summary per suite, every
    check, the Gauss-Manin matrices and the exactness certificates.
    """

    def __init__(self):
        """Initialize the Excel exporter."""
        # Header styles
        self.header_fill = _fill(ExcelColors.HEADER_FILL)
        self.header_font = Font(bold=True, color=ExcelColors.HEADER_FONT, size=ExcelFontSizes.HEADER)
        self.header_alignment = Alignment(horizontal="center", vertical="center")

        # Suite rows
        self.suite_fill = _fill(ExcelColors.SUITE_FILL)
        self.suite_font = Font(bold=True, color=ExcelColors.SUITE_FONT, size=ExcelFontSizes.SUITE)

        # Verdict cells
        self.pass_fill = _fill(ExcelColors.PASS_FILL)
        self.pass_font = Font(bold=True, color=ExcelColors.PASS_FONT, size=ExcelFontSizes.DATA)
        self.fail_fill = _fill(ExcelColors.FAIL_FILL)
        self.fail_font = Font(bold=True, color=ExcelColors.FAIL_FONT, size=ExcelFontSizes.DATA)

        # Data cell styles - dark theme for eye comfort
        self.data_fill = _fill(ExcelColors.DATA_FILL)
        self.data_font = Font(color=ExcelColors.DATA_FONT, size=ExcelFontSizes.DATA)

    def export(self, report, output_path: str) -> None:
        """
        Export a run report to a workbook.

        Args:
            report: RunReport from the verification pipeline
            output_path: Path for the output Excel file

        Raises:
            RuntimeError: If the workbook cannot be saved
        """
        wb = Workbook()

        # Remove default sheet
        if 'Sheet' in wb.sheetnames:
            wb.remove(wb['Sheet'])

        self._create_summary_sheet(wb, report)
        self._create_checks_sheet(wb, report.results)

        gauss_manin = [r for r in report.results if r.suite == 'gaussmanin']
        if gauss_manin:
            self._create_gauss_manin_sheet(wb, gauss_manin[0])

        homalg = [r for r in report.results if r.suite == 'homalg']
        if homalg:
            self._create_exactness_sheet(wb, homalg[0])

        try:
            wb.save(output_path)
        except OSError as e:
            logger.error(f"Failed to save workbook: {output_path} - {str(e)}")
            raise RuntimeError(f"Cannot save workbook: {str(e)}") from e

    def _write_headers(self, ws, headers: List[str]) -> None:
        for col_num, header in enumerate(headers, 1):
            cell = ws.cell(row=1, column=col_num, value=header)
            cell.fill = self.header_fill
            cell.font = self.header_font
            cell.alignment = self.header_alignment
        ws.freeze_panes = 'A2'

    def _write_row(self, ws, row_num: int, values: List[Any]) -> None:
        for col_num, value in enumerate(values, 1):
            cell = ws.cell(row=row_num, column=col_num, value=value)
            cell.fill = self.data_fill
            cell.font = self.data_font

    def _write_verdict(self, ws, row_num: int, col_num: int, passed: bool) -> None:
        cell = ws.cell(row=row_num, column=col_num, value='PASS' if passed else 'FAIL')
        cell.fill = self.pass_fill if passed else self.fail_fill
        cell.font = self.pass_font if passed else self.fail_font
        cell.alignment = self.header_alignment

    def _create_summary_sheet(self, wb: Workbook, report) -> None:
        """
        Create the Summary sheet: one row per suite plus the run totals.

        Args:
            wb: Workbook object
            report: RunReport
        """
        ws = wb.create_sheet(SHEET_SUMMARY)
        self._write_headers(ws, ['Suite', 'Checks', 'Failed', 'Status', 'Seconds', 'Seed',
                                 'Degree cap', 'Order cap'])

        row_num = 2
        for result in report.results:
            self._write_row(ws, row_num, [
                result.suite,
                len(result.checks),
                len(result.failed_checks),
                None,
                round(result.elapsed, 2),
                result.seed,
                result.caps.get('degree_cap'),
                result.caps.get('order_cap'),
            ])
            self._write_verdict(ws, row_num, 4, result.passed)
            row_num += 1

        total = ws.cell(row=row_num, column=1, value='Total')
        total.fill = self.suite_fill
        total.font = self.suite_font
        ws.cell(row=row_num, column=2, value=sum(len(r.checks) for r in report.results))
        ws.cell(row=row_num, column=3, value=sum(len(r.failed_checks) for r in report.results))
        self._write_verdict(ws, row_num, 4, report.passed)
        ws.cell(row=row_num, column=5, value=round(report.elapsed, 2))

        self._adjust_column_widths(ws)
        self._apply_dark_background_to_entire_sheet(ws)

    def _create_checks_sheet(self, wb: Workbook, results) -> None:
        """
        Create the Checks sheet with every check of every suite.

        Args:
            wb: Workbook object
            results: SuiteResults of the run
        """
        ws = wb.create_sheet(SHEET_CHECKS)
        self._write_headers(ws, ['Suite', 'Check', 'Status', 'Detail', 'Witness'])

        row_num = 2
        for result in results:
            suite_cell = ws.cell(row=row_num, column=1, value=result.suite)
            suite_cell.fill = self.suite_fill
            suite_cell.font = self.suite_font
            row_num += 1
            for check in result.checks:
                detail = check.detail
                # Gauss-Manin reports have their own sheet
                if isinstance(detail, dict) and ReportKeys.ROUTES in detail:
                    detail = {'verdict': detail.get('verdict'), ReportKeys.GM_MATRIX: detail.get(ReportKeys.GM_MATRIX)}
                self._write_row(ws, row_num, ['', check.name, None, _compact(detail), _compact(check.witness)])
                self._write_verdict(ws, row_num, 3, check.passed)
                row_num += 1

        self._adjust_column_widths(ws)
        self._apply_dark_background_to_entire_sheet(ws)

    def _create_gauss_manin_sheet(self, wb: Workbook, result) -> None:
        """
        Create the Gauss_Manin sheet: one row per family report.

        Args:
            wb: Workbook object
            result: SuiteResult of the gaussmanin suite
        """
        ws = wb.create_sheet(SHEET_GAUSS_MANIN)
        self._write_headers(ws, ['Family', 'h', 'Basis', 'GM matrix', 'Routes agree', 'E1 d1', 'H0 matrix',
                                 'Picard-Fuchs'])

        row_num = 2
        for check in result.checks:
            report: Dict[str, Any] = check.detail if isinstance(check.detail, dict) else {}
            if ReportKeys.ROUTES not in report:
                continue
            family = report.get('family', {})
            self._write_row(ws, row_num, [
                family.get('name'),
                family.get('h'),
                ', '.join(report.get(ReportKeys.BASIS, [])),
                _compact(report.get(ReportKeys.GM_MATRIX)),
                None,
                _compact(report.get(ReportKeys.E1_CHECK)),
                _compact(report.get(ReportKeys.H0, {}).get('gm_matrix')),
                '; '.join(report.get(ReportKeys.PICARD_FUCHS, [])),
            ])
            self._write_verdict(ws, row_num, 5, bool(report.get(ReportKeys.ROUTES_AGREE)))
            row_num += 1

        self._adjust_column_widths(ws)
        self._apply_dark_background_to_entire_sheet(ws)

    def _create_exactness_sheet(self, wb: Workbook, result) -> None:
        """
        Create the Exactness sheet from the homalg certificates.

        Args:
            wb: Workbook object
            result: SuiteResult of the homalg suite
        """
        ws = wb.create_sheet(SHEET_CERTIFICATES)
        self._write_headers(ws, ['Certificate', 'Status', 'Detail'])

        row_num = 2
        for check in result.checks:
            self._write_row(ws, row_num, [check.name, None, _compact(check.detail)])
            self._write_verdict(ws, row_num, 2, check.passed)
            row_num += 1

        note = ws.cell(row=row_num + 1, column=1, value=result.to_dict()[ReportKeys.DISCLAIMER])
        note.font = self.data_font

        self._adjust_column_widths(ws)
        self._apply_dark_background_to_entire_sheet(ws)

    def _adjust_column_widths(self, ws):
        """
        Auto-adjust column widths based on content.

        Args:
            ws: Worksheet object
        """
        for column in ws.columns:
            max_length = 0
            column_letter = column[0].column_letter

            for cell in column:
                if cell.value is not None:
                    max_length = max(max_length, len(str(cell.value)))

            adjusted_width = min(max_length + DEFAULT_COLUMN_PADDING, MAX_COLUMN_WIDTH)
            ws.column_dimensions[column_letter].width = adjusted_width

    def _apply_dark_background_to_entire_sheet(self, ws):
        """
        Apply dark background to the used sheet area and a margin around it.

        Args:
            ws: Worksheet object
        """
        max_row = ws.max_row + 20
        max_col = max(ws.max_column, 10)
        for row in ws.iter_rows(min_row=1, max_row=max_row, min_col=1, max_col=max_col):
            for cell in row:
                if not cell.fill or cell.fill.start_color.rgb in ['00000000', 'FFFFFFFF']:
                    cell.fill = self.data_fill

        for col in range(1, max_col + 1):
            col_letter = ws.cell(row=1, column=col).column_letter
            current_width = ws.column_dimensions[col_letter].width
            if current_width is None or current_width < 12:
                ws.column_dimensions[col_letter].width = 12

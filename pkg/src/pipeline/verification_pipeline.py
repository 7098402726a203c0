"""
Verification pipeline that orchestrates the suites of one CLI run.
Coordinates input validation, the suites, the process pool and the exporters.
"""
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from ..checks import SUITES
from ..core.base_suite import SuiteResult
from ..core.constants import CHART_CAVEAT, ExitCode, Limits, ReportKeys
from ..core.errors import CapExceeded, SchemaError
from ..core.logger import get_logger
from ..exporters.excel_exporter import ExcelExporter
from ..exporters.report_exporter import ReportExporter
from ..validators.schema_validator import SchemaValidator

logger = get_logger(__name__)

COMMAND_ALL = 'all'
OUTPUT_FORMATS = ('json', 'text')

# Suites that read --input, and the list key of a multi-entry document
INPUT_LISTS = {
    'dictionary': 'connections',
    'pullback': 'maps',
    'gaussmanin': 'families',
}

CHART_SUITES = ('transfer', 'gaussmanin')


@dataclass(frozen=True)
class RunConfig:
    """
    Everything that determines a run. Identical configs give byte-identical reports.

    Raises:
        CapExceeded: If a cap is outside [1, hard limit]
        SchemaError: If the command or output format is unknown
    """
    command: str
    input_path: Optional[str] = None
    output_format: str = 'json'
    seed: int = Limits.DEFAULT_SEED
    degree_cap: int = Limits.DEFAULT_DEGREE_CAP
    order_cap: int = Limits.DEFAULT_ORDER_CAP
    jobs: int = 1
    count: Optional[int] = None
    full_h1: bool = False
    output: Optional[str] = None
    excel: Optional[str] = None
    debug: bool = False

    def __post_init__(self):
        if self.command != COMMAND_ALL and self.command not in SUITES:
            raise SchemaError(f"Unknown command '{self.command}'")
        if self.output_format not in OUTPUT_FORMATS:
            raise SchemaError(f"Unknown output format '{self.output_format}', expected one of {OUTPUT_FORMATS}")
        if not 1 <= self.degree_cap <= Limits.DEGREE_CAP_MAX:
            raise CapExceeded(f"Degree cap {self.degree_cap} outside [1, {Limits.DEGREE_CAP_MAX}]")
        if not 1 <= self.order_cap <= Limits.ORDER_CAP_MAX:
            raise CapExceeded(f"Order cap {self.order_cap} outside [1, {Limits.ORDER_CAP_MAX}]")
        if self.jobs < 1:
            raise CapExceeded(f"--jobs must be positive, got {self.jobs}")
        if self.count is not None and self.count < 0:
            raise CapExceeded(f"--count must be non-negative, got {self.count}")

    @property
    def suites(self) -> List[str]:
        return list(SUITES) if self.command == COMMAND_ALL else [self.command]

    @property
    def caps(self) -> Dict[str, int]:
        return {'degree_cap': self.degree_cap, 'order_cap': self.order_cap}


@dataclass
class RunReport:
    config: RunConfig
    results: List[SuiteResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def exit_code(self) -> int:
        """Stuck reductions outrank failed checks."""
        if any(result.stuck is not None for result in self.results):
            return ExitCode.REDUCTION_STUCK
        if not self.passed:
            return ExitCode.CHECK_FAILED
        return ExitCode.PASS

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.config.command,
            ReportKeys.SEED: self.config.seed,
            ReportKeys.CAPS: self.config.caps,
            ReportKeys.PASSED: self.passed,
            'exit_code': self.exit_code,
            'suites': [result.to_dict() for result in self.results],
        }


class VerificationPipeline:
    """
    Main verification orchestrator.
    Validates inputs, runs the selected suites and exports the report.
    """

    def __init__(self, config: RunConfig):
        """
        Initialize the verification pipeline.

        Args:
            config: Run configuration
        """
        self.config = config
        self.debug = config.debug
        self.validator = SchemaValidator(debug=config.debug)
        self.report_exporter = ReportExporter()
        self.excel_exporter = ExcelExporter()

    def load_inputs(self, suite: str) -> Optional[List[Dict[str, Any]]]:
        """
        Read and validate the --input document for a suite.

        Returns:
            The list of entries, or None when the suite runs on random instances

        Raises:
            SchemaError: If the document is malformed or describes invalid objects
        """
        path = self.config.input_path
        if path is None:
            return None
        if suite not in INPUT_LISTS:
            logger.warning(f"Suite '{suite}' takes no input file; ignoring {path}")
            return None

        entries = self.validator.entries(self.validator.load(path), INPUT_LISTS[suite])
        for index, entry in enumerate(entries):
            if not isinstance(entry, dict):
                raise SchemaError(f"{path}: entry {index} is not an object")
            if suite == 'dictionary':
                self.validator.connection(entry, f"connection[{index}]")
            elif suite == 'pullback':
                self.validator.pullback_input(entry, f"map[{index}]")
            else:
                self.validator.family(entry, f"family[{index}]")
        logger.info(f"Loaded {len(entries)} input entr{'y' if len(entries) == 1 else 'ies'} from {path}")
        return entries

    def build_suite(self, name: str):
        kwargs = dict(
            seed=self.config.seed,
            degree_cap=self.config.degree_cap,
            order_cap=self.config.order_cap,
            count=self.config.count,
            inputs=self.load_inputs(name),
            debug=self.debug,
        )
        if name == 'gaussmanin':
            kwargs['full_h1'] = self.config.full_h1
        return SUITES[name](**kwargs)

    def run_suite(self, name: str, executor: Optional[ProcessPoolExecutor] = None) -> SuiteResult:
        """
        Run one suite, over the process pool when one is given.

        Args:
            name: Suite name
            executor: Optional process pool

        Returns:
            SuiteResult with its wall-clock time filled in
        """
        suite = self.build_suite(name)
        logger.info("="*60)
        logger.info(f"SUITE: {name}")
        logger.info("="*60)

        start = time.time()
        result = suite.run(executor.map if executor else None)
        result.elapsed = time.time() - start

        for check in result.checks:
            mark = '✓' if check.passed else '✗'
            line = f"  {mark} {check.name}"
            if check.stuck is not None:
                line += " (reduction stuck)"
            if check.passed:
                logger.info(line)
            else:
                logger.warning(line)
        logger.info(f"{'✓' if result.passed else '✗'} {name}: {len(result.checks) - len(result.failed_checks)}"
                    f"/{len(result.checks)} checks passed ({result.elapsed:.2f}s)")
        return result

    def run(self) -> RunReport:
        """
        Execute every selected suite and export the report.

        Returns:
            RunReport; its exit_code is the process exit code of the run
        """
        logger.info("="*60)
        logger.info(f"D-MODULE VERIFICATION: {self.config.command.upper()}")
        logger.info(f"Seed {self.config.seed}, degree cap {self.config.degree_cap}, "
                    f"order cap {self.config.order_cap}, jobs {self.config.jobs}")
        logger.info("="*60)

        if any(name in CHART_SUITES for name in self.config.suites):
            logger.info(f"Note: {CHART_CAVEAT}")

        report = RunReport(self.config)
        start = time.time()
        if self.config.jobs > 1:
            with ProcessPoolExecutor(max_workers=self.config.jobs) as executor:
                report.results = [self.run_suite(name, executor) for name in self.config.suites]
        else:
            report.results = [self.run_suite(name) for name in self.config.suites]
        report.elapsed = time.time() - start

        self.export(report)

        logger.info("="*60)
        logger.info(f"{'✓' if report.passed else '✗'} VERIFICATION {'PASSED' if report.passed else 'FAILED'}")
        logger.info("="*60)
        logger.info(f"Suites run: {len(report.results)}")
        logger.info(f"Exit code: {report.exit_code}")
        return report

    def export(self, report: RunReport) -> None:
        """Write the report file and the Excel workbook when requested."""
        if self.config.output:
            self._ensure_folder(self.config.output)
            self.report_exporter.export(report.to_dict(), self.config.output, self.config.output_format)
            logger.info(f"Report written to {self.config.output}")
        if self.config.excel:
            self._ensure_folder(self.config.excel)
            self.excel_exporter.export(report, self.config.excel)
            logger.info(f"Workbook written to {self.config.excel}")

    def _ensure_folder(self, path: str) -> None:
        folder = os.path.dirname(path)
        if not folder:
            return
        try:
            os.makedirs(folder, exist_ok=True)
        except OSError as e:
            logger.error(f"Failed to create output folder: {folder} - {str(e)}")
            raise RuntimeError(f"Cannot create output folder: {str(e)}") from e

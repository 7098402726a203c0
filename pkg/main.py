"""
Command-line front end of the D-module verification engine, using Typer and Rich.
Each command runs one verification suite (or all of them) and emits a canonical report.
"""
import logging
import sys
from typing import Optional

import typer
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from src.core.constants import ExitCode, Limits
from src.core.errors import DModuleError, ReductionStuck
from src.core.logger import enable_file_logging, get_logger, set_level
from src.exporters.report_exporter import ReportExporter
from src.pipeline.verification_pipeline import COMMAND_ALL, RunConfig, RunReport, VerificationPipeline

# Initialize
app = typer.Typer(help="Exact verification of D-module identities and Gauss-Manin connections")
console = Console()
logger = get_logger(__name__)

# Shared options
INPUT = typer.Option(None, "--input", "-i", help="JSON input file (connection, map or family)")
FORMAT = typer.Option("json", "--format", "-f", help="Report format: json or text")
SEED = typer.Option(Limits.DEFAULT_SEED, "--seed", help="Seed for every random instance")
DEGREE_CAP = typer.Option(Limits.DEFAULT_DEGREE_CAP, "--degree-cap",
                          help=f"Truncation degree cap (at most {Limits.DEGREE_CAP_MAX})")
ORDER_CAP = typer.Option(Limits.DEFAULT_ORDER_CAP, "--order-cap",
                         help=f"Operator order cap (at most {Limits.ORDER_CAP_MAX})")
JOBS = typer.Option(1, "--jobs", "-j", help="Worker processes for independent instances")
COUNT = typer.Option(None, "--count", help="Random suite size (defaults to the acceptance size)")
OUTPUT = typer.Option(None, "--output", "-o", help="Write the report to this file instead of stdout")
EXCEL = typer.Option(None, "--excel", help="Also write an .xlsx certificate workbook")
DEBUG = typer.Option(False, "--debug/--no-debug", help="Enable or disable debug output")
LOG_FILE = typer.Option(False, "--log-file", help="Also log to logs/verification.log")


def display_summary(report: RunReport) -> None:
    """
    Display the per-suite results using a Rich table.

    Args:
        report: Finished run report
    """
    table = Table(title="Verification Summary", box=box.DOUBLE)
    table.add_column("Suite", style="cyan")
    table.add_column("Checks", justify="right")
    table.add_column("Status", justify="center")
    table.add_column("Seconds", style="yellow", justify="right")

    for result in report.results:
        if result.stuck is not None:
            status = "[magenta]STUCK[/magenta]"
        elif result.passed:
            status = "[green]✓ PASS[/green]"
        else:
            status = f"[red]✗ FAIL ({len(result.failed_checks)})[/red]"
        table.add_row(result.suite, str(len(result.checks)), status, f"{result.elapsed:.2f}")

    table.add_row("Total", str(sum(len(r.checks) for r in report.results)),
                  "[green]✓[/green]" if report.passed else "[red]✗[/red]", f"{report.elapsed:.2f}")
    console.print()
    console.print(table)


def execute(command: str, input_path: Optional[str], output_format: str, seed: int, degree_cap: int,
            order_cap: int, jobs: int, count: Optional[int], output: Optional[str], excel: Optional[str],
            debug: bool, log_file: bool, full_h1: bool = False) -> None:
    """
    Build the RunConfig, run the pipeline and exit with the run's exit code.

    Exit codes: 0 pass, 1 check failure, 2 input or limit error, 3 reduction stuck.
    """
    if log_file:
        enable_file_logging(True)
    if debug:
        set_level(logging.DEBUG)

    console.print(Panel.fit(f"[bold cyan]D-MODULE VERIFICATION: {command.upper()}[/bold cyan]",
                            border_style="cyan"))
    try:
        config = RunConfig(
            command=command,
            input_path=input_path,
            output_format=output_format,
            seed=seed,
            degree_cap=degree_cap,
            order_cap=order_cap,
            jobs=jobs,
            count=count,
            full_h1=full_h1,
            output=output,
            excel=excel,
            debug=debug,
        )
        report = VerificationPipeline(config).run()
    except ReductionStuck as e:
        console.print(f"\n[magenta]✗ Reduction stuck: {e}[/magenta]")
        logger.error(f"Reduction stuck: {e.certificate}")
        raise typer.Exit(ExitCode.REDUCTION_STUCK)
    except (DModuleError, RuntimeError) as e:
        console.print(f"\n[red]✗ Input error: {e}[/red]")
        raise typer.Exit(ExitCode.INPUT_ERROR)
    except KeyboardInterrupt:
        console.print("\n\n[yellow]⚠ Verification interrupted by user.[/yellow]")
        raise typer.Exit(ExitCode.CHECK_FAILED)

    if output is None:
        sys.stdout.write(ReportExporter().render(report.to_dict(), output_format))
        sys.stdout.flush()

    display_summary(report)
    for result in report.results:
        for check in result.failed_checks:
            console.print(f"  [red]✗[/red] {result.suite}: {check.name}")
    if report.exit_code == ExitCode.PASS:
        console.print("\n[bold green]✓ All checks passed![/bold green]")
    raise typer.Exit(report.exit_code)


@app.command()
def dictionary(input_path: Optional[str] = INPUT, output_format: str = FORMAT, seed: int = SEED,
               degree_cap: int = DEGREE_CAP, order_cap: int = ORDER_CAP, jobs: int = JOBS,
               count: Optional[int] = COUNT, output: Optional[str] = OUTPUT, excel: Optional[str] = EXCEL,
               debug: bool = DEBUG, log_file: bool = LOG_FILE):
    """Connection / derivation action / jet section round trips and curvature."""
    execute('dictionary', input_path, output_format, seed, degree_cap, order_cap, jobs, count, output, excel,
            debug, log_file)


@app.command()
def pullback(input_path: Optional[str] = INPUT, output_format: str = FORMAT, seed: int = SEED,
             degree_cap: int = DEGREE_CAP, order_cap: int = ORDER_CAP, jobs: int = JOBS,
             count: Optional[int] = COUNT, output: Optional[str] = OUTPUT, excel: Optional[str] = EXCEL,
             debug: bool = DEBUG, log_file: bool = LOG_FILE):
    """Chain-rule pullback against the D-module inverse image."""
    execute('pullback', input_path, output_format, seed, degree_cap, order_cap, jobs, count, output, excel,
            debug, log_file)


@app.command()
def gaussmanin(input_path: Optional[str] = INPUT, output_format: str = FORMAT, seed: int = SEED,
               degree_cap: int = DEGREE_CAP, order_cap: int = ORDER_CAP, jobs: int = JOBS,
               count: Optional[int] = COUNT, output: Optional[str] = OUTPUT, excel: Optional[str] = EXCEL,
               debug: bool = DEBUG, log_file: bool = LOG_FILE,
               full_h1: bool = typer.Option(False, "--full-h1", help="Keep the dlog(h) class in the H^1 basis")):
    """Three-route Gauss-Manin comparison with Picard-Fuchs operators and the d1 cross-check."""
    execute('gaussmanin', input_path, output_format, seed, degree_cap, order_cap, jobs, count, output, excel,
            debug, log_file, full_h1=full_h1)


@app.command()
def homalg(output_format: str = FORMAT, seed: int = SEED, degree_cap: int = DEGREE_CAP,
           order_cap: int = ORDER_CAP, jobs: int = JOBS, output: Optional[str] = OUTPUT,
           excel: Optional[str] = EXCEL, debug: bool = DEBUG, log_file: bool = LOG_FILE):
    """Truncated exactness of the De Rham and Spencer resolutions and the Leray cone homotopies."""
    execute('homalg', None, output_format, seed, degree_cap, order_cap, jobs, None, output, excel,
            debug, log_file)


@app.command()
def weyl(output_format: str = FORMAT, seed: int = SEED, degree_cap: int = DEGREE_CAP,
         order_cap: int = ORDER_CAP, jobs: int = JOBS, count: Optional[int] = COUNT,
         output: Optional[str] = OUTPUT, excel: Optional[str] = EXCEL, debug: bool = DEBUG,
         log_file: bool = LOG_FILE):
    """Weyl algebra laws on seeded random operators."""
    execute('weyl', None, output_format, seed, degree_cap, order_cap, jobs, count, output, excel,
            debug, log_file)


@app.command()
def transfer(output_format: str = FORMAT, seed: int = SEED, degree_cap: int = DEGREE_CAP,
             order_cap: int = ORDER_CAP, jobs: int = JOBS, count: Optional[int] = COUNT,
             output: Optional[str] = OUTPUT, excel: Optional[str] = EXCEL, debug: bool = DEBUG,
             log_file: bool = LOG_FILE):
    """Involution, left/right exchange and transfer module identities."""
    execute('transfer', None, output_format, seed, degree_cap, order_cap, jobs, count, output, excel,
            debug, log_file)


@app.command(name=COMMAND_ALL)
def run_all(output_format: str = FORMAT, seed: int = SEED, degree_cap: int = DEGREE_CAP,
            order_cap: int = ORDER_CAP, jobs: int = JOBS, count: Optional[int] = COUNT,
            output: Optional[str] = OUTPUT, excel: Optional[str] = EXCEL, debug: bool = DEBUG,
            log_file: bool = LOG_FILE,
            full_h1: bool = typer.Option(False, "--full-h1", help="Keep the dlog(h) class in the H^1 basis")):
    """Every suite on its seeded random instances."""
    execute(COMMAND_ALL, None, output_format, seed, degree_cap, order_cap, jobs, count, output, excel,
            debug, log_file, full_h1=full_h1)


if __name__ == "__main__":
    app()

"""Command-line interface for fairsim."""

from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.table import Table

from fairsim.auditor.report import FairnessReport
from fairsim.infra.errors import TopologyError
from fairsim.kernel.time import format_simtime
from fairsim.scenarios.config import ScenarioConfig, bundled_scenarios, load_scenario
from fairsim.scenarios.errors import ScenarioError, ScenarioValidationError, SweepError
from fairsim.utils.logging import get_logger, setup_logging
from fairsim.utils.settings import load_settings

app = typer.Typer(
    name="fairsim",
    help="Discrete-event exchange simulator auditing temporal fairness of order matching",
    add_completion=False,
)

console = Console()
logger = get_logger(__name__)

EXIT_FAILURE = 1
EXIT_INVALID = 2


@app.callback()
def callback(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Override FAIRSIM_LOG_LEVEL"),
):
    """fairsim - (epsilon, delta) fairness auditing for simulated exchanges."""
    settings = load_settings()
    setup_logging(level=log_level or settings.log_level, log_file=settings.log_file)


def _load(config: str) -> ScenarioConfig:
    try:
        return load_scenario(config)
    except ScenarioValidationError as e:
        console.print(f"[red]Invalid scenario:[/red] {e}")
        raise typer.Exit(EXIT_INVALID)
    except TopologyError as e:
        console.print(f"[red]Inconsistent topology:[/red] {e}")
        raise typer.Exit(EXIT_INVALID)
    except ScenarioError as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(EXIT_FAILURE)


def _render_report(report: FairnessReport, title: str) -> None:
    summary = Table(title=title)
    summary.add_column("Metric", style="cyan")
    summary.add_column("Value", justify="right")
    summary.add_row("races", str(report.races))
    summary.add_row("uncontested", str(report.uncontested_races))
    if report.straddling_races:
        summary.add_row("straddling windows", str(report.straddling_races))
    summary.add_row("l_hat", format_simtime(report.l_hat) if report.l_hat is not None else "-")
    for point in report.epsilon_of_delta:
        summary.add_row(f"epsilon({point.delta:g})", format_simtime(point.epsilon))
    summary.add_row("max spread", format_simtime(report.max_spread))
    if report.delta_at_audit_epsilon is not None:
        summary.add_row(
            f"delta({format_simtime(report.audit_epsilon_ns)})", f"{report.delta_at_audit_epsilon:.4f}"
        )
    summary.add_row("req1 max spread", format_simtime(report.req1_max_spread))
    summary.add_row("req2 violations", str(report.req2_violations))
    summary.add_row("req3 violations", str(report.req3_violations))
    for reason, count in report.dropped_messages.items():
        summary.add_row(f"dropped ({reason})", str(count))
    console.print(summary)

    if report.victory_stats:
        pairs = Table(title="Victories")
        pairs.add_column("Pair")
        pairs.add_column("r (ns)")
        pairs.add_column("Races", justify="right")
        pairs.add_column("Wins")
        pairs.add_column("Faster wins", justify="right")
        pairs.add_column("chi2 p", justify="right")
        for s in report.victory_stats:
            pairs.add_row(
                " vs ".join(s.pair),
                " / ".join(str(r) for r in s.reaction_times_ns),
                str(s.races),
                ", ".join(f"{p}={n}" for p, n in s.wins.items()),
                f"{s.faster_win_rate:.3f}" if s.faster_win_rate is not None else "-",
                f"{s.p_value:.3f}" if s.p_value is not None else "-",
            )
        console.print(pairs)
    console.print(f"config {report.config_hash[:12]}  seed {report.seed}  trace {report.trace_digest[:12]}")


@app.command()
def run(
    config: str = typer.Argument(..., help="Scenario file (JSON/YAML) or bundled scenario name"),
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Master seed (default: first scenario seed)"),
    races: Optional[int] = typer.Option(None, "--races", "-n", help="Number of stimuli to run"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    trace: bool = typer.Option(False, "--trace", help="Export trace.ndjson"),
    plot_data: bool = typer.Option(False, "--plot-data", help="Export ECDF points as ecdf.csv"),
):
    """Run one scenario and write its result files."""
    from fairsim.scenarios.outputs import write_outputs
    from fairsim.scenarios.runner import run_scenario

    settings = load_settings()
    scenario = _load(config)
    out_dir = out or Path(settings.output_dir) / scenario.name
    export_trace = trace or settings.export_trace
    try:
        with console.status(f"Running {scenario.name}..."):
            result = run_scenario(scenario, seed, races, record_trace=export_trace)
        written = write_outputs(result, out_dir, export_trace=export_trace, plot_data=plot_data)
    except (ScenarioError, TopologyError) as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(EXIT_INVALID)
    except Exception as e:
        logger.error(f"Run of {scenario.name} failed: {e}")
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(EXIT_FAILURE)

    _render_report(result.report, f"{scenario.name} (seed {result.seed})")
    console.print(f"[green]✓[/green] Wrote {', '.join(p.name for p in written.values())} to {out_dir}")


def _parse_values(values: str) -> List[float]:
    parsed = []
    for raw in values.split(","):
        raw = raw.strip()
        if not raw:
            continue
        try:
            parsed.append(float(raw))
        except ValueError:
            console.print(f"[red]Value '{raw}' is not numeric[/red]")
            raise typer.Exit(EXIT_INVALID)
    return parsed


@app.command()
def sweep(
    config: str = typer.Argument(..., help="Scenario file (JSON/YAML) or bundled scenario name"),
    param: str = typer.Option(..., "--param", "-p", help="Dotted path of a numeric config field"),
    values: str = typer.Option("", "--values", "-v", help="Comma-separated values"),
    seeds: Optional[int] = typer.Option(None, "--seeds", "-k", help="Number of seeds per value"),
    races: Optional[int] = typer.Option(None, "--races", "-n", help="Number of stimuli per run"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Aggregate CSV path"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Parallel runs (default FAIRSIM_WORKERS)"),
):
    """Run a scenario across parameter values and seeds."""
    from fairsim.scenarios.sweep import sweep as run_sweep

    settings = load_settings()
    scenario = _load(config)
    base = scenario.seeds[0]
    seed_list = list(scenario.seeds) if seeds is None else [base + i for i in range(seeds)]
    try:
        table = run_sweep(
            scenario, param, _parse_values(values), seed_list, races, workers or settings.workers
        )
    except SweepError as e:
        console.print(f"[red]Invalid sweep parameter:[/red] {e}")
        raise typer.Exit(EXIT_INVALID)
    except (ScenarioError, TopologyError) as e:
        console.print(f"[red]Invalid sweep value:[/red] {e}")
        raise typer.Exit(EXIT_INVALID)

    csv_path = out or Path(settings.output_dir) / f"{scenario.name}_sweep.csv"
    table.write_csv(csv_path)

    rendered = Table(title=f"{scenario.name}: {param}")
    for column in table.header()[:-1]:
        rendered.add_column(column)
    for row in table.rows():
        rendered.add_row(*["-" if v is None else str(v) for v in row[:-1]])
    console.print(rendered)
    console.print(f"[green]✓[/green] {len(table)} runs written to {csv_path}")


@app.command()
def report(
    directory: Path = typer.Argument(..., help="Output directory of a previous run"),
):
    """Re-render the summary of a finished run."""
    from fairsim.scenarios.outputs import read_races, read_report

    try:
        fairness = read_report(directory)
        rows = read_races(directory)
    except FileNotFoundError as e:
        console.print(f"[red]Not a run directory: {e}[/red]")
        raise typer.Exit(EXIT_FAILURE)
    _render_report(fairness, f"{fairness.scenario} (seed {fairness.seed})")
    console.print(f"{len(rows)} race entries in races.csv")


@app.command()
def validate(
    config: str = typer.Argument(..., help="Scenario file (JSON/YAML) or bundled scenario name"),
):
    """Validate a scenario without running it."""
    scenario = _load(config)
    console.print(
        f"[green]✓[/green] {scenario.name}: {len(scenario.participants)} participants, "
        f"{len(scenario.gateways)} gateways, {scenario.stimuli.count} stimuli"
    )
    console.print(f"config hash {scenario.config_hash()}")


@app.command("list")
def list_scenarios():
    """List the bundled scenarios."""
    table = Table(title="Bundled scenarios")
    table.add_column("Name", style="cyan", no_wrap=True)
    table.add_column("Description")
    for name in bundled_scenarios():
        table.add_row(name, load_scenario(name).description)
    console.print(table)


@app.command()
def version():
    """Show version information."""
    from fairsim import __version__
    console.print(f"fairsim version {__version__}")


def main():
    """Entry point for the CLI."""
    try:
        app()
    except KeyboardInterrupt:
        console.print("\n[red]Interrupted by user[/red]")
        raise typer.Exit(EXIT_FAILURE)


if __name__ == "__main__":
    main()

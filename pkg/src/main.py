"""
📡 IRS Beamforming Simulator - Main Entry Point
"""

import shutil
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn
from rich.table import Table

from .config import settings
from .experiment import (
    aic_decay,
    baseline_crossover,
    crossover,
    doubling_gaps,
    sweep,
    write_csv,
)
from .models import Method, ScenarioConfig, SweepResult, SweepVariable
from .scenarios import (
    NEAR_ORTHOGONAL_LIMIT,
    bs_steering_correlation,
    build_setup,
    load_config,
    write_config,
)

app = typer.Typer(
    name="irs-beamforming",
    help="📡 Multi-IRS multi-user MIMO max-min SINR simulator",
)
console = Console()

DEFAULT_SCENARIO = Path("scenario.txt")


def _parse_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _scenario(config_path: Optional[Path], setup: int, trials: Optional[int],
              seed: Optional[int], methods: Optional[str]) -> ScenarioConfig:
    config = load_config(config_path) if config_path else build_setup(setup)
    overrides = {}
    if trials is not None:
        overrides["trials"] = trials
    if seed is not None:
        overrides["master_seed"] = seed
    if methods:
        overrides["methods"] = [Method(m) for m in _parse_list(methods)]
    if not overrides:
        return config
    return ScenarioConfig.model_validate({**config.model_dump(), **overrides})


def _warn_correlation(config: ScenarioConfig, variable: SweepVariable,
                      values: list[float]) -> None:
    """BS steering vectors too correlated for the interference-free bound"""
    antennas = ([int(v) for v in values]
                if variable == SweepVariable.N else [config.bs_antennas])
    for n in antennas:
        value = bs_steering_correlation(
            config.with_sweep_value(SweepVariable.N, n))
        if value >= NEAR_ORTHOGONAL_LIMIT:
            console.print(
                f"[yellow]⚠️ N={n}: BS steering correlation {value:.3f} >= "
                f"{NEAR_ORTHOGONAL_LIMIT}, exhaustive results will deviate "
                f"from the theoretical curve[/yellow]")


def _results_table(result: SweepResult) -> Table:
    table = Table(title=f"Max-min SINR vs {result.variable.value}")
    table.add_column(result.variable.value, justify="right")
    table.add_column("method")
    table.add_column("mean [dB]", justify="right")
    table.add_column("std [dB]", justify="right")
    for row in result.rows:
        table.add_row(f"{row.value:g}", row.method.value,
                      f"{row.min_sinr_db_mean:.2f}",
                      f"{row.min_sinr_db_std:.2f}")
    return table


def _readouts(result: SweepResult) -> None:
    if result.variable in (SweepVariable.M, SweepVariable.N) and len(
            result.values) > 1:
        for method in result.methods:
            gaps = ", ".join(f"{g:.2f}"
                             for g in doubling_gaps(result, method))
            console.print(f"📈 {method.value}: gain per doubling [{gaps}] dB")

    if result.variable == SweepVariable.M and Method.CONVENTIONAL in result.methods:
        for method in (Method.GREEDY, Method.EXHAUSTIVE):
            if method in result.methods:
                value = crossover(result, method, Method.CONVENTIONAL)
                text = f"M = {value:.0f}" if value is not None else "none in range"
                console.print(
                    f"✂️ {method.value} vs conventional crossover: {text}")
                break


@app.command()
def run(
    config_path: Optional[Path] = typer.Option(
        None,
        "--config",
        "-c",
        help="Scenario file (key=value)",
    ),
    sweep_var: Optional[SweepVariable] = typer.Option(
        None,
        "--sweep",
        help="Swept parameter: M, N or d",
    ),
    values: Optional[str] = typer.Option(
        None,
        "--values",
        help="Comma-separated sweep values (e.g. 200,400,800)",
    ),
    trials: Optional[int] = typer.Option(
        None,
        "--trials",
        "-t",
        min=1,
        help="Monte-Carlo trials per value",
    ),
    seed: Optional[int] = typer.Option(
        None,
        "--seed",
        "-s",
        min=0,
        help="Master seed",
    ),
    out: Optional[Path] = typer.Option(
        None,
        "--out",
        "-o",
        help="CSV output path",
    ),
    methods: Optional[str] = typer.Option(
        None,
        "--methods",
        "-m",
        help="exhaustive,greedy,theoretical,conventional",
    ),
    setup: int = typer.Option(
        1,
        "--setup",
        min=1,
        max=2,
        help="Built-in geometry when no --config is given",
    ),
    workers: Optional[int] = typer.Option(
        None,
        "--workers",
        "-w",
        min=1,
        help="Worker threads",
    ),
):
    """Run Monte-Carlo trials, optionally sweeping M, N or d"""
    try:
        config = _scenario(config_path, setup, trials, seed, methods)
        variable = sweep_var or SweepVariable.M
        if values:
            sweep_values = [float(v) for v in _parse_list(values)]
        elif variable == SweepVariable.M:
            sweep_values = [float(config.irs_elements)]
        elif variable == SweepVariable.N:
            sweep_values = [float(config.bs_antennas)]
        else:
            sweep_values = [config.user_distance]

        console.print(
            Panel.fit(
                f"[bold blue]📡 {config.name}[/bold blue]\n"
                f"🛰️ L={config.num_irs} IRS, K={config.num_users} users, "
                f"N={config.bs_antennas}, M={config.irs_elements} "
                f"({config.irs_rows}x{config.irs_cols})\n"
                f"🔁 {variable.value} ∈ {{{', '.join(f'{v:g}' for v in sweep_values)}}}, "
                f"{config.trials} trials, seed {config.master_seed}\n"
                f"🧮 {', '.join(m.value for m in config.methods)}\n"
                f"📐 BS steering correlation {bs_steering_correlation(config):.3f}",
                title="Starting",
            ))
        _warn_correlation(config, variable, sweep_values)

        with Progress(TextColumn("[cyan]{task.description}"), BarColumn(),
                      MofNCompleteColumn(),
                      console=console) as progress:
            task = progress.add_task("trials",
                                     total=len(sweep_values) * config.trials)
            result = sweep(config,
                           variable,
                           sweep_values,
                           workers=workers,
                           on_trial=lambda _: progress.advance(task))

        out = out or settings.ensure_output_dir(
        ) / f"{config.name}_{variable.value}.csv"
        write_csv(result, out)
    except (ValueError, OSError) as e:
        console.print(f"[red]❌ {e}[/red]")
        raise typer.Exit(1)

    console.print(_results_table(result))
    _readouts(result)

    failures = sum(len(r.errors) for rs in result.trial_results for r in rs)
    unconverged = sum(not ok for rs in result.trial_results for r in rs
                      for ok in r.converged.values())
    console.print(
        Panel.fit(
            f"[green]✅ {len(result.rows)} rows written[/green]\n"
            f"Output: {out}\n"
            f"Method failures: {failures}, non-converged solves: {unconverged}",
            title="Complete",
        ))


@app.command()
def aic(
    values: str = typer.Option(
        "100,400,1600",
        "--values",
        help="Comma-separated IRS sizes M",
    ),
    draws: int = typer.Option(200, "--draws", min=1, help="Draws per M"),
    seed: Optional[int] = typer.Option(None, "--seed", "-s", min=0),
):
    """Rayleigh AIC: cross-gain ratio of a tuned IRS versus M"""
    try:
        elements = [int(v) for v in _parse_list(values)]
        ratios = aic_decay(elements, draws,
                           settings.experiment.master_seed
                           if seed is None else seed)
    except ValueError as e:
        console.print(f"[red]❌ {e}[/red]")
        raise typer.Exit(1)

    table = Table(title="Tuned-IRS cross-gain |w'| / w*'")
    table.add_column("M", justify="right")
    table.add_column("mean ratio", justify="right")
    table.add_column("factor", justify="right")
    previous = None
    for m, ratio in ratios:
        factor = f"{ratio / previous:.3f}" if previous else "-"
        table.add_row(str(m), f"{ratio:.4f}", factor)
        previous = ratio
    console.print(table)


@app.command("crossover")
def crossover_command(
    values: str = typer.Option(
        "100,200,300,400,500,600",
        "--values",
        help="Comma-separated IRS sizes M",
    ),
    trials: Optional[int] = typer.Option(None, "--trials", "-t", min=1),
    seed: Optional[int] = typer.Option(None, "--seed", "-s", min=0),
    antennas: int = typer.Option(32, "--antennas", "-n", min=1, help="N"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", min=1),
):
    """Setup 2: greedy vs conventional crossover for both baseline normalizations"""
    try:
        config = _scenario(None, 2, trials, seed, None)
        config = config.with_sweep_value(SweepVariable.N, antennas)
        sweep_values = [float(v) for v in _parse_list(values)]
        with Progress(TextColumn("[cyan]{task.description}"), BarColumn(),
                      MofNCompleteColumn(),
                      console=console) as progress:
            task = progress.add_task(
                "trials", total=2 * len(sweep_values) * config.trials)
            report = baseline_crossover(
                config,
                sweep_values,
                workers=workers,
                on_trial=lambda _: progress.advance(task))
    except ValueError as e:
        console.print(f"[red]❌ {e}[/red]")
        raise typer.Exit(1)

    low, high = report.band
    table = Table(title=f"greedy vs conventional, band [{low:g}, {high:g}]")
    table.add_column("normalization")
    table.add_column("crossover M", justify="right")
    table.add_column("in band")
    for mode, value in (("literal", report.literal),
                        ("per-path", report.per_path)):
        table.add_row(mode, "none" if value is None else f"{value:.1f}",
                      "✅" if report.in_band(value) else "❌")
    console.print(table)

    if not report.consistent:
        literal = ("no crossover" if report.literal is None else
                   f"M = {report.literal:.1f}")
        console.print(f"[yellow]⚠️ crossover outside [{low:g}, {high:g}] "
                      f"for at least one normalization; literal mode: "
                      f"{literal}[/yellow]")


@app.command()
def config():
    """Show current configuration"""
    console.print(
        Panel.fit(
            f"[bold]⚙️ Configuration[/bold]\n\n"
            f"Output Dir: {settings.output_dir}\n"
            f"Verbose: {settings.verbose}\n\n"
            f"[dim]Solver:[/dim]\n"
            f"  Tolerance: {settings.solver.tolerance:g}\n"
            f"  Max iterations: {settings.solver.max_iterations}\n"
            f"  Random init: {settings.solver.random_init}\n"
            f"[dim]Search:[/dim]\n"
            f"  Exhaustive limit: {settings.search.exhaustive_limit}\n"
            f"[dim]Experiment:[/dim]\n"
            f"  Trials: {settings.experiment.trials}\n"
            f"  Master seed: {settings.experiment.master_seed}\n"
            f"  Workers: {settings.experiment.workers}",
            title="Settings",
        ))


@app.command()
def init():
    """Initialize project (create .env and a default scenario file)"""
    env_path = Path(".env")
    example_path = Path(".env.example")

    if env_path.exists():
        console.print("[yellow].env file already exists![/yellow]")
    elif example_path.exists():
        shutil.copy(example_path, env_path)
        console.print("[green]✅ Created .env file from .env.example[/green]")
    else:
        console.print("[red].env.example not found![/red]")

    if DEFAULT_SCENARIO.exists():
        console.print(f"[yellow]{DEFAULT_SCENARIO} already exists![/yellow]")
        return
    write_config(
        build_setup(1,
                    trials=settings.experiment.trials,
                    master_seed=settings.experiment.master_seed),
        DEFAULT_SCENARIO)
    console.print(f"[green]✅ Created {DEFAULT_SCENARIO} (setup 1)[/green]")


def main():
    """Main entry point"""
    app()


if __name__ == "__main__":
    main()

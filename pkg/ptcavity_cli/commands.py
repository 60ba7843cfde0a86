"""ptcavity CLI: Typer-based command-line interface."""

from __future__ import annotations

import sys
from collections.abc import Callable
from pathlib import Path
from typing import Annotated, Any, TypeVar

import typer
from loguru import logger
from rich.console import Console

from ptcavity.__version__ import __version__
from ptcavity.core.config import PRESET_NOTES, RunConfig, load_config
from ptcavity.errors import PtCavityError, VerificationFailed
from ptcavity.model.types import PhaseConvention
from ptcavity_cli.output import (
    render_config,
    render_files_table,
    render_presets_table,
    render_summary,
    render_verify_table,
)

app = typer.Typer(
    name="ptcavity",
    help="ptcavity - atom-cavity-mirror system with complex coupling",
    no_args_is_help=True,
)

console = Console()
err_console = Console(stderr=True)

T = TypeVar("T")

ConfigOpt = Annotated[
    Path | None, typer.Option("--config", "-c", help="JSON (or YAML) run configuration")
]
PresetOpt = Annotated[
    str | None, typer.Option("--preset", "-p", help="Built-in preset (see `ptcavity presets`)")
]
OutOpt = Annotated[Path | None, typer.Option("--out", "-o", help="Output directory")]
FormatOpt = Annotated[
    str | None, typer.Option("--format", "-f", help="Comma list of csv,json,svg,ascii")
]


def _version_callback(value: bool) -> None:
    if value:
        console.print(f"ptcavity v{__version__}")
        raise typer.Exit()


def _setup_logging(level: str) -> None:
    logger.remove()
    logger.add(sys.stderr, level=level, format="<level>{level: <8}</level> {message}")


@app.callback()
def main(
    version: bool = typer.Option(
        None, "--version", callback=_version_callback, is_eager=True, help="Show version"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-V", help="Debug logging"),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="Warnings and errors only"),
) -> None:
    """ptcavity - atom-cavity-mirror system with complex coupling."""
    _setup_logging("DEBUG" if verbose else "WARNING" if quiet else "INFO")


# ── Helpers ─────────────────────────────────────────────────


def _load(
    config: Path | None,
    preset: str | None,
    out: Path | None,
    fmt: str | None,
    extra: dict[str, Any] | None = None,
) -> RunConfig:
    overrides: dict[str, Any] = dict(extra or {})
    output: dict[str, Any] = {}
    if out is not None:
        output["directory"] = str(out)
    if fmt is not None:
        output["formats"] = fmt
    if output:
        overrides["output"] = output
    return load_config(config, preset=preset, overrides=overrides)


def _guarded(fn: Callable[[], T]) -> T:
    """Run a command body; map ptcavity errors to their exit codes."""
    try:
        return fn()
    except PtCavityError as e:
        err_console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(code=e.exit_code) from e


# ════════════════════════════════════════════════════════════
# FIGURE COMMANDS
# ════════════════════════════════════════════════════════════


@app.command("branch-sweep")
def branch_sweep(
    config: ConfigOpt = None, preset: PresetOpt = None, out: OutOpt = None, fmt: FormatOpt = None
) -> None:
    """Steady mirror displacement of both branches over the coupling G."""
    from ptcavity.io.figures import run_branch_sweep

    def body() -> None:
        art = run_branch_sweep(_load(config, preset, out, fmt))
        s = art.summary
        render_summary(
            console,
            "Branch sweep",
            {
                "threshold G (MHz)": s["threshold_G"],
                "saddle G (MHz)": s["saddle_G"],
                "meeting delta at threshold (MHz)": s["meeting_delta_at_threshold"],
                "first branch row G (MHz)": s["first_branch_row_G"],
            },
        )
        render_files_table(console, "Written", art.files)

    _guarded(body)


@app.command("phase-match")
def phase_match(
    config: ConfigOpt = None,
    preset: PresetOpt = None,
    out: OutOpt = None,
    fmt: FormatOpt = None,
    k: int = typer.Option(0, "--k", help="Period index"),
    phase_convention: PhaseConvention | None = typer.Option(
        None, "--phase-convention", help="exact (default) or tangent"
    ),
) -> None:
    """Matching phase of both branches over the detuning."""
    from ptcavity.io.figures import run_phase_match

    extra = {"hysteresis": {"convention": phase_convention.value}} if phase_convention else {}

    def body() -> None:
        art = run_phase_match(_load(config, preset, out, fmt, extra), k=k)
        render_summary(
            console,
            "Phase match",
            {"k": k, "meeting delta (MHz)": art.summary["meeting_delta"]},
        )
        render_files_table(console, "Written", art.files)

    _guarded(body)


@app.command("gain-map")
def gain_map(
    config: ConfigOpt = None, preset: PresetOpt = None, out: OutOpt = None, fmt: FormatOpt = None
) -> None:
    """Gain-loss margin over two swept parameters, with its zero contour."""
    from ptcavity.io.figures import run_gain_map

    def body() -> None:
        art = run_gain_map(_load(config, preset, out, fmt))
        s = art.summary
        render_summary(
            console,
            "Gain map",
            {
                "axes": [a["name"] for a in s["axes"]],
                "cells": s["cells"],
                "NetGain cells": s["net_gain_cells"],
                "zero-level lines": len(s["zero_contour"]["lines"]),
            },
        )
        render_files_table(console, "Written", art.files)

    _guarded(body)


@app.command()
def hysteresis(
    config: ConfigOpt = None,
    preset: PresetOpt = None,
    out: OutOpt = None,
    fmt: FormatOpt = None,
    delta: list[float] | None = typer.Option(
        None, "--delta", "-d", help="Detuning(s) in MHz; repeat for several"
    ),
    phase_convention: PhaseConvention | None = typer.Option(
        None, "--phase-convention", help="exact (default) or tangent"
    ),
) -> None:
    """Quadrature hysteresis curves per branch and detuning."""
    from ptcavity.io.figures import run_hysteresis

    extra = {"hysteresis": {"convention": phase_convention.value}} if phase_convention else {}

    def body() -> None:
        art = run_hysteresis(_load(config, preset, out, fmt, extra), deltas=delta or None)
        rows = {
            f"delta {v['delta']:+g} MHz": (
                f"{v['folds']} fold(s), max total {v['max_total']}, "
                f"max stable {v['max_stable_count']}"
            )
            for v in art.summary["deltas"].values()
        }
        render_summary(console, f"Hysteresis ({art.summary['convention']})", rows)
        render_files_table(console, "Written", art.files)

    _guarded(body)


@app.command()
def simulate(
    config: ConfigOpt = None,
    preset: PresetOpt = None,
    out: OutOpt = None,
    fmt: FormatOpt = None,
    mode: str | None = typer.Option(None, "--mode", "-m", help="full or driven"),
    duration: float | None = typer.Option(None, "--time", "-t", help="Duration, us"),
    dt: float | None = typer.Option(None, "--dt", help="Step, us"),
) -> None:
    """Integrate the equations of motion from the configured initial state."""
    from ptcavity.io.figures import run_simulate

    dyn = {k: v for k, v in {"mode": mode, "T": duration, "dt": dt}.items() if v is not None}
    extra = {"dynamics": dyn} if dyn else {}

    def body() -> None:
        art = run_simulate(_load(config, preset, out, fmt, extra))
        s = art.summary
        render_summary(
            console,
            f"Simulate ({s['mode']})",
            {
                "terminal": s["terminal"],
                "t final (us)": s["t_final"],
                "dt (us)": s["dt"],
                "records": s["samples"],
            },
        )
        render_files_table(console, "Written", art.files)

    _guarded(body)


# ════════════════════════════════════════════════════════════
# verify
# ════════════════════════════════════════════════════════════


@app.command()
def verify(
    config: ConfigOpt = None,
    preset: PresetOpt = None,
    out: OutOpt = None,
    seed: int | None = typer.Option(None, "--seed", "-s", help="Seed of the random suites"),
    suite: list[str] | None = typer.Option(None, "--suite", help="Run only these suites"),
) -> None:
    """Run the invariant suites and write a deterministic JSON report."""
    from ptcavity.io.writers import write_json
    from ptcavity.verify import run_suites

    extra = {"verify": {"seed": seed}} if seed is not None else {}

    def body() -> None:
        cfg = _load(config, preset, out, None, extra)
        report = run_suites(cfg, only=suite or None)
        path = write_json(cfg.output_path / "verify_report.json", report)
        render_verify_table(console, report)
        console.print(f"[dim]Report: {path}[/dim]")
        if report["failures"]:
            raise VerificationFailed(report["failures"])

    _guarded(body)


# ════════════════════════════════════════════════════════════
# presets / show-config
# ════════════════════════════════════════════════════════════


@app.command()
def presets() -> None:
    """List the built-in presets."""
    render_presets_table(console, PRESET_NOTES)


@app.command("show-config")
def show_config(config: ConfigOpt = None, preset: PresetOpt = None) -> None:
    """Print the resolved configuration."""

    def body() -> None:
        cfg = _load(config, preset, None, None)
        render_config(console, cfg.model_dump_json(indent=2))

    _guarded(body)


if __name__ == "__main__":
    app()

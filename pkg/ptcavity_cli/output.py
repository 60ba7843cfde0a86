"""Rich output formatters for the CLI."""

from __future__ import annotations

from pathlib import Path
from typing import Any

from rich.console import Console
from rich.json import JSON
from rich.panel import Panel
from rich.table import Table


def render_files_table(console: Console, title: str, files: list[Path]) -> None:
    """Render written files as a Rich table."""
    if not files:
        console.print("[dim]No files written (check --format).[/dim]")
        return
    table = Table(title=title)
    table.add_column("File", style="cyan", no_wrap=True)
    table.add_column("Bytes", justify="right")
    for f in files:
        table.add_row(str(f), f"{f.stat().st_size:,}" if f.exists() else "-")
    console.print(table)


def render_summary(console: Console, title: str, rows: dict[str, Any]) -> None:
    """Render key figures of a run as a two-column panel."""
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column(style="dim")
    table.add_column(style="bold")
    for key, value in rows.items():
        table.add_row(key, _fmt(value))
    console.print(Panel(table, title=title, border_style="blue"))


def render_verify_table(console: Console, report: dict[str, Any]) -> None:
    """Render verification suites with pass/fail status."""
    table = Table(title=f"Verification (seed {report['seed']})")
    table.add_column("Suite", style="cyan")
    table.add_column("Cases", justify="right")
    table.add_column("Failures", justify="right")
    table.add_column("Status")
    for s in report["suites"]:
        ok = s["failures"] == 0
        table.add_row(
            s["suite"],
            f"{s['cases']:,}",
            str(s["failures"]),
            "[green]pass[/green]" if ok else "[red]FAIL[/red]",
        )
    table.add_section()
    table.add_row("TOTAL", f"{report['cases']:,}", str(report["failures"]), "")
    console.print(table)


def render_presets_table(console: Console, notes: dict[str, str]) -> None:
    table = Table(title="Presets")
    table.add_column("Name", style="cyan")
    table.add_column("Description", style="white")
    for name, note in notes.items():
        table.add_row(name, note)
    console.print(table)


def render_config(console: Console, text: str) -> None:
    console.print(Panel(JSON(text), title="Resolved configuration", border_style="green"))


def _fmt(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)

"""Atomic CSV, JSON, SVG and ASCII-plot writers.

Every file carries the unit convention: a leading ``# units:`` comment line in CSV
and text plots, a ``units`` key in JSON, the SVG description metadata.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from collections.abc import Iterable, Mapping, Sequence
from enum import Enum
from pathlib import Path
from typing import Any

import matplotlib
import numpy as np
from loguru import logger
from matplotlib.figure import Figure

UNITS: dict[str, str] = {
    "frequency": "MHz",
    "angle": "rad",
    "time": "us",
    "displacement": "eta*x in MHz",
    "quadrature": "dimensionless",
}
UNITS_LINE = "# units: " + ", ".join(f"{k}={v}" for k, v in UNITS.items())

Series = tuple[str, Sequence[float], Sequence[float]]


# ════════════════════════════════════════════════════════════
# PRIMITIVES
# ════════════════════════════════════════════════════════════


def atomic_write(path: Path, data: bytes) -> Path:
    """Write to a sibling temporary file, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.debug(f"wrote {path} ({len(data)} bytes)")
    return path


def format_cell(value: Any) -> str:
    """CSV cell text: shortest round-trip floats, empty for None."""
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Path):
        return obj.as_posix()
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def dumps_json(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ════════════════════════════════════════════════════════════
# TABULAR AND DOCUMENT FILES
# ════════════════════════════════════════════════════════════


def write_csv(
    path: Path, fieldnames: Sequence[str], rows: Iterable[Mapping[str, Any]]
) -> Path:
    """Header row plus one line per mapping; missing keys become empty cells."""
    buf = io.StringIO()
    buf.write(UNITS_LINE + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fieldnames)
    for row in rows:
        w.writerow([format_cell(row.get(k)) for k in fieldnames])
    return atomic_write(path, buf.getvalue().encode("utf-8"))


def read_csv(path: Path) -> list[dict[str, str]]:
    """Rows of a file written by ``write_csv`` (comment lines skipped)."""
    with open(path, encoding="utf-8", newline="") as f:
        lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))


def write_json(path: Path, payload: Mapping[str, Any]) -> Path:
    doc = dict(payload)
    doc.setdefault("units", UNITS)
    return atomic_write(path, dumps_json(doc).encode("utf-8"))


# ════════════════════════════════════════════════════════════
# FIGURES
# ════════════════════════════════════════════════════════════


def _save_svg(fig: Figure, path: Path, title: str) -> Path:
    buf = io.BytesIO()
    with matplotlib.rc_context({"svg.hashsalt": "ptcavity", "svg.fonttype": "none"}):
        fig.savefig(
            buf,
            format="svg",
            metadata={"Date": None, "Title": title, "Description": UNITS_LINE[2:]},
        )
    return atomic_write(path, buf.getvalue())


def write_svg_lines(
    path: Path,
    series: Sequence[Series],
    title: str,
    xlabel: str,
    ylabel: str,
    logx: bool = False,
    logy: bool = False,
) -> Path:
    """Line plot of one or more (label, x, y) series; NaN breaks a line."""
    fig = Figure(figsize=(6.4, 4.2))
    ax = fig.subplots()
    for label, xs, ys in series:
        ax.plot(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), label=label, lw=1.2)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    if len(series) > 1:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _save_svg(fig, path, title)


def write_svg_contour(
    path: Path,
    rows: np.ndarray,
    cols: np.ndarray,
    z: np.ndarray,
    zero_lines: Sequence[np.ndarray],
    title: str,
    row_label: str,
    col_label: str,
    log_rows: bool = False,
) -> Path:
    """Filled contour of z(row, col) with the zero level dashed; rows on the vertical axis."""
    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.subplots()
    scaled = np.sign(z) * np.log10(1.0 + np.abs(z))
    cs = ax.contourf(cols, rows, scaled, levels=24, cmap="viridis")
    fig.colorbar(cs, ax=ax, label="sign(F) log10(1+|F|)")
    for line in zero_lines:
        ax.plot(line[:, 1], line[:, 0], ls="--", color="white", lw=1.0)
    if log_rows:
        ax.set_yscale("log")
    ax.set_title(title)
    ax.set_xlabel(col_label)
    ax.set_ylabel(row_label)
    fig.tight_layout()
    return _save_svg(fig, path, title)


def ascii_plot(
    series: Sequence[Series],
    width: int = 72,
    height: int = 20,
    logx: bool = False,
) -> str:
    """Character-cell rendering of line series for terminal inspection."""
    marks = "*o+x#@"
    pts: list[tuple[int, float, float]] = []
    for idx, (_, xs, ys) in enumerate(series):
        for xv, yv in zip(xs, ys):
            if yv is None or xv is None:
                continue
            xv, yv = float(xv), float(yv)
            if not (math.isfinite(xv) and math.isfinite(yv)) or (logx and xv <= 0):
                continue
            pts.append((idx, math.log10(xv) if logx else xv, yv))
    lines = [UNITS_LINE]
    if not pts:
        return "\n".join([*lines, "(no finite points)"]) + "\n"

    x_lo, x_hi = min(p[1] for p in pts), max(p[1] for p in pts)
    y_lo, y_hi = min(p[2] for p in pts), max(p[2] for p in pts)
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0
    canvas = [[" "] * width for _ in range(height)]
    for idx, xv, yv in pts:
        col = round((xv - x_lo) / x_span * (width - 1))
        row = height - 1 - round((yv - y_lo) / y_span * (height - 1))
        canvas[row][col] = marks[idx % len(marks)]

    lines.append(f"y: [{y_lo:.6g}, {y_hi:.6g}]")
    lines.extend("|" + "".join(r) for r in canvas)
    lines.append("+" + "-" * width)
    x_desc = "log10 x" if logx else "x"
    lines.append(f"{x_desc}: [{x_lo:.6g}, {x_hi:.6g}]")
    for idx, (label, _, _) in enumerate(series):
        lines.append(f"  {marks[idx % len(marks)]} {label}")
    return "\n".join(lines) + "\n"


def write_ascii(path: Path, text: str) -> Path:
    return atomic_write(path, text.encode("utf-8"))

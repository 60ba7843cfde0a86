"""Run layer behind the CLI subcommands: compute a data set, write it in every
requested format, return the written paths and a summary."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from loguru import logger

from ptcavity.core.config.schema import RunConfig
from ptcavity.dynamics.integrator import ModeState, driven_mode, integrate, recommended_dt
from ptcavity.errors import ConfigError, NoMeetingPoint
from ptcavity.hysteresis.quadrature import multistability_count, trace_curve
from ptcavity.io import writers
from ptcavity.model.steady import (
    branch_displacement,
    branch_phases,
    compute_rho,
    meeting_delta,
    saddle_G,
    threshold_G,
)
from ptcavity.model.types import Branch, SystemParams
from ptcavity.spectral.gain import gain_map, zero_contour

BRANCH_FIELDS = ["G_MHz", "x_upper", "x_lower", "rho"]
PHASE_FIELDS = ["delta_MHz", "phi0_upper", "phi0_lower"]
CURVE_FIELDS = ["X_a", "X_b"]
COUNT_FIELDS = ["X_b", "total", "stable_count", "upper_roots", "lower_roots"]
TRAJECTORY_FIELDS = ["t", "re_a", "im_a", "re_b", "im_b", "x", "v"]


@dataclass
class Artifacts:
    """Files written by one command and its machine-readable summary."""

    files: list[Path] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)

    def add(self, path: Path) -> None:
        self.files.append(path)


def _meeting_or_none(p: SystemParams) -> list[float] | None:
    try:
        return list(meeting_delta(p))
    except NoMeetingPoint:
        return None


def delta_label(delta: float) -> str:
    """File-name tag of a detuning, e.g. ``d+1.5`` or ``d+0``."""
    return "d" + (f"{delta:+g}" if delta != 0 else "+0")


# ════════════════════════════════════════════════════════════
# BRANCH SWEEP
# ════════════════════════════════════════════════════════════


def run_branch_sweep(cfg: RunConfig) -> Artifacts:
    """Branch displacements and rho over the G sweep, plus characteristic couplings."""
    p, axis, out = cfg.params, cfg.sweeps.branch, cfg.output_path
    rows: list[dict[str, Any]] = []
    first_split: float | None = None
    for G in axis.values():
        q = p.replace(G=float(G))
        rho = compute_rho(q)
        row: dict[str, Any] = {"G_MHz": float(G), "rho": rho, "x_upper": None, "x_lower": None}
        if rho > 1.0:
            x = branch_displacement(q)
            row["x_upper"], row["x_lower"] = x, -x
            if first_split is None:
                first_split = float(G)
        rows.append(row)

    art = Artifacts()
    art.summary = {
        "command": "branch-sweep",
        "params": p.model_dump(),
        "threshold_G": threshold_G(p),
        "saddle_G": saddle_G(p),
        "meeting_delta_at_threshold": _meeting_or_none(p.replace(G=threshold_G(p))),
        "first_branch_row_G": first_split,
        "rows": len(rows),
    }
    if cfg.wants("csv"):
        art.add(writers.write_csv(out / "branch_sweep.csv", BRANCH_FIELDS, rows))
    if cfg.wants("json"):
        art.add(writers.write_json(out / "branch_sweep_summary.json", art.summary))
    series = _branch_series(rows)
    if cfg.wants("svg"):
        art.add(
            writers.write_svg_lines(
                out / "branch_sweep.svg",
                series,
                title="Steady mirror displacement",
                xlabel="G (MHz)",
                ylabel="eta x (MHz) / eta",
                logx=axis.scale == "log",
            )
        )
    if cfg.wants("ascii"):
        text = writers.ascii_plot(series, logx=axis.scale == "log")
        art.add(writers.write_ascii(out / "branch_sweep.txt", text))
    logger.info(
        f"branch-sweep: {len(rows)} rows, threshold G={art.summary['threshold_G']:.6g} MHz"
    )
    return art


def _branch_series(rows: list[dict[str, Any]]) -> list[writers.Series]:
    G = [r["G_MHz"] for r in rows]
    nan = float("nan")
    up = [nan if r["x_upper"] is None else r["x_upper"] for r in rows]
    lo = [nan if r["x_lower"] is None else r["x_lower"] for r in rows]
    return [("Upper", G, up), ("Lower", G, lo)]


# ════════════════════════════════════════════════════════════
# PHASE MATCH
# ════════════════════════════════════════════════════════════


def run_phase_match(cfg: RunConfig, k: int = 0) -> Artifacts:
    """Matching phases of both branches over the delta sweep."""
    p, axis, out = cfg.params, cfg.sweeps.phase, cfg.output_path
    convention = cfg.hysteresis.convention
    rows: list[dict[str, Any]] = []
    for d in axis.values():
        phases = branch_phases(p.replace(delta=float(d)), k, convention)
        row: dict[str, Any] = {"delta_MHz": float(d), "phi0_upper": None, "phi0_lower": None}
        if phases is not None:
            row["phi0_upper"], row["phi0_lower"] = phases
        rows.append(row)

    art = Artifacts()
    art.summary = {
        "command": "phase-match",
        "params": p.model_dump(),
        "k": k,
        "convention": convention.value,
        "meeting_delta": _meeting_or_none(p),
        "rows": len(rows),
    }
    nan = float("nan")
    d_vals = [r["delta_MHz"] for r in rows]
    series: list[writers.Series] = [
        ("Upper", d_vals, [nan if r["phi0_upper"] is None else r["phi0_upper"] for r in rows]),
        ("Lower", d_vals, [nan if r["phi0_lower"] is None else r["phi0_lower"] for r in rows]),
    ]
    if cfg.wants("csv"):
        art.add(writers.write_csv(out / "phase_match.csv", PHASE_FIELDS, rows))
    if cfg.wants("json"):
        art.add(writers.write_json(out / "phase_match_summary.json", art.summary))
    if cfg.wants("svg"):
        art.add(
            writers.write_svg_lines(
                out / "phase_match.svg",
                series,
                title=f"Matching phase, k={k}",
                xlabel="delta (MHz)",
                ylabel="phi0 (rad)",
            )
        )
    if cfg.wants("ascii"):
        art.add(writers.write_ascii(out / "phase_match.txt", writers.ascii_plot(series)))
    logger.info(f"phase-match: {len(rows)} rows, meeting at {art.summary['meeting_delta']}")
    return art


# ════════════════════════════════════════════════════════════
# GAIN MAP
# ════════════════════════════════════════════════════════════


def run_gain_map(cfg: RunConfig) -> Artifacts:
    """Gain margin and classification grid with its zero-level polylines."""
    rows_axis, cols_axis, out = cfg.sweeps.gain_rows, cfg.sweeps.gain_cols, cfg.output_path
    grid = gain_map(cfg.params, rows_axis, cols_axis, cfg.sweeps.x)
    lines = zero_contour(grid)

    art = Artifacts()
    counts = {c: int(np.count_nonzero(grid.classification == c)) for c in ("NetGain", "NetLoss")}
    art.summary = {
        "command": "gain-map",
        "params": cfg.params.model_dump(),
        "axes": [rows_axis.model_dump(), cols_axis.model_dump()],
        "x": cfg.sweeps.x,
        "cells": int(grid.margin.size),
        "net_gain_cells": counts["NetGain"],
        "net_loss_cells": counts["NetLoss"],
        "zero_contour": {
            "columns": [rows_axis.name, cols_axis.name],
            "lines": [line.tolist() for line in lines],
        },
    }
    if cfg.wants("csv"):
        fields = [rows_axis.name, cols_axis.name, "margin", "rate", "classification"]
        art.add(writers.write_csv(out / "gain_map.csv", fields, _grid_rows(grid, fields)))
    if cfg.wants("json"):
        art.add(writers.write_json(out / "gain_map_contour.json", art.summary))
    if cfg.wants("svg"):
        art.add(
            writers.write_svg_contour(
                out / "gain_map.svg",
                grid.rows,
                grid.cols,
                grid.margin,
                lines,
                title="Gain-loss margin",
                row_label=rows_axis.name,
                col_label=cols_axis.name,
                log_rows=rows_axis.scale == "log",
            )
        )
    if cfg.wants("ascii"):
        art.add(writers.write_ascii(out / "gain_map.txt", _ascii_classes(grid)))
    logger.info(
        f"gain-map: {grid.margin.size} cells, {counts['NetGain']} NetGain, "
        f"{len(lines)} zero-level lines"
    )
    return art


def _grid_rows(grid: Any, fields: list[str]) -> list[dict[str, Any]]:
    out = []
    for i, r in enumerate(grid.rows):
        for j, c in enumerate(grid.cols):
            out.append(
                {
                    fields[0]: float(r),
                    fields[1]: float(c),
                    "margin": float(grid.margin[i, j]),
                    "rate": float(grid.rate[i, j]),
                    "classification": grid.classification[i, j],
                }
            )
    return out


def _ascii_classes(grid: Any, width: int = 72, height: int = 24) -> str:
    ri = np.linspace(0, len(grid.rows) - 1, min(height, len(grid.rows))).round().astype(int)
    ci = np.linspace(0, len(grid.cols) - 1, min(width, len(grid.cols))).round().astype(int)
    glyph = {"NetGain": "#", "NetLoss": ".", "Balanced": "0"}
    lines = [
        writers.UNITS_LINE,
        f"rows: {grid.axes[0].name} (top = max), cols: {grid.axes[1].name}",
    ]
    for i in ri[::-1]:
        lines.append("".join(glyph[grid.classification[i, j]] for j in ci))
    lines.append("# NetGain  . NetLoss  0 Balanced")
    return "\n".join(lines) + "\n"


# ════════════════════════════════════════════════════════════
# HYSTERESIS
# ════════════════════════════════════════════════════════════


def run_hysteresis(cfg: RunConfig, deltas: list[float] | None = None) -> Artifacts:
    """Quadrature curves per (branch, delta) and the multistability scan over X_b."""
    h, out = cfg.hysteresis, cfg.output_path
    art = Artifacts()
    per_delta: dict[str, Any] = {}
    for d in deltas if deltas is not None else h.deltas:
        p = cfg.params.replace(G=h.G, delta=float(d))
        tag = delta_label(d)
        curves = {
            b: trace_curve(p, b, h.k, n=h.samples, convention=h.convention)
            for b in (Branch.UPPER, Branch.LOWER)
        }
        entry: dict[str, Any] = {"delta": float(d), "rho": compute_rho(p), "branches": {}}
        for b, curve in curves.items():
            entry["branches"][b.value] = {
                "phi0": curve.phi0,
                "c3": curve.c3,
                "c1": curve.c1,
                "fold": list(curve.fold) if curve.fold else None,
                "turning_points": list(curve.turning_points) if curve.turning_points else None,
            }
            if cfg.wants("csv"):
                rows = [{"X_a": xa, "X_b": xb} for xa, xb in curve.samples.tolist()]
                path = out / f"hysteresis_{b.value.lower()}_{tag}.csv"
                art.add(writers.write_csv(path, CURVE_FIELDS, rows))

        scan = _count_scan(p, h, curves)
        entry["folds"] = sum(1 for c in curves.values() if c.fold)
        entry["max_total"] = max(r["total"] for r in scan)
        entry["max_stable_count"] = max(r["stable_count"] for r in scan)
        per_delta[tag] = entry
        if cfg.wants("csv"):
            art.add(writers.write_csv(out / f"hysteresis_counts_{tag}.csv", COUNT_FIELDS, scan))
        series = [(b.value, c.samples[:, 1], c.samples[:, 0]) for b, c in curves.items()]
        if cfg.wants("svg"):
            art.add(
                writers.write_svg_lines(
                    out / f"hysteresis_{tag}.svg",
                    series,
                    title=f"Quadrature hysteresis, delta={d:g} MHz, G={h.G:g} MHz, k={h.k}",
                    xlabel="X_b (input)",
                    ylabel="X_a (output)",
                )
            )
        if cfg.wants("ascii"):
            art.add(writers.write_ascii(out / f"hysteresis_{tag}.txt", writers.ascii_plot(series)))
        logger.info(
            f"hysteresis delta={d:g} MHz: {entry['folds']} fold(s), "
            f"max total {entry['max_total']}, max stable {entry['max_stable_count']}"
        )

    art.summary = {
        "command": "hysteresis",
        "params": cfg.params.model_dump(),
        "G": h.G,
        "k": h.k,
        "convention": h.convention.value,
        "deltas": per_delta,
    }
    if cfg.wants("json"):
        art.add(writers.write_json(out / "hysteresis_summary.json", art.summary))
    return art


def _count_scan(p: SystemParams, h: Any, curves: dict) -> list[dict[str, Any]]:
    """Multistability over X_b spanning 1.5x the widest fold (or the traced range)."""
    edges = [c.fold[1] for c in curves.values() if c.fold]
    if edges:
        reach = 1.5 * max(edges)
    else:
        reach = max(float(np.max(np.abs(c.samples[:, 1]))) for c in curves.values())
    rows = []
    for xb in np.linspace(-reach, reach, h.input_samples):
        m = multistability_count(p, h.k, float(xb), h.convention)
        rows.append(
            {
                "X_b": float(xb),
                "total": m.total,
                "stable_count": m.stable_count,
                "upper_roots": len(m.per_branch[Branch.UPPER]),
                "lower_roots": len(m.per_branch[Branch.LOWER]),
            }
        )
    return rows


# ════════════════════════════════════════════════════════════
# SIMULATE
# ════════════════════════════════════════════════════════════


def run_simulate(cfg: RunConfig) -> Artifacts:
    """Integrate the full or the driven (frozen-atom) model from the configured state."""
    p, d, out = cfg.params, cfg.dynamics, cfg.output_path
    s0 = ModeState(a=complex(*d.a), b=complex(*d.b), x=d.x, v=d.v)
    if d.mode == "driven" and p.N <= 0:
        raise ConfigError("driven mode needs params.N > 0")
    dt = d.dt if d.dt is not None else recommended_dt(p, s0)
    if d.T < dt:
        raise ConfigError(f"dynamics.T={d.T:g} us is shorter than one step dt={dt:g} us")
    steps = math.floor(d.T / dt + 1e-9)
    if steps > d.max_steps:
        raise ConfigError(
            f"T/dt = {steps} steps exceeds dynamics.max_steps={d.max_steps}; "
            f"raise dt or lower T"
        )
    runner = driven_mode if d.mode == "driven" else integrate
    traj = runner(p, s0, dt, d.T, stride=d.stride)

    art = Artifacts()
    art.summary = {
        "command": "simulate",
        "mode": d.mode,
        "params": p.model_dump(),
        "initial_state": {"a": s0.a, "b": s0.b, "x": s0.x, "v": s0.v},
        **traj.metadata(),
        "final_state": {
            "a": traj.final.a,
            "b": traj.final.b,
            "x": traj.final.x,
            "v": traj.final.v,
        },
    }
    if cfg.wants("csv"):
        rows = [
            {
                "t": float(t),
                "re_a": y[0].real,
                "im_a": y[0].imag,
                "re_b": y[1].real,
                "im_b": y[1].imag,
                "x": y[2].real,
                "v": y[3].real,
            }
            for t, y in zip(traj.times.tolist(), traj.states.tolist())
        ]
        art.add(writers.write_csv(out / "trajectory.csv", TRAJECTORY_FIELDS, rows))
    if cfg.wants("json"):
        art.add(writers.write_json(out / "trajectory_meta.json", art.summary))
    t = traj.times
    series: list[writers.Series] = [
        ("|a|", t, np.abs(traj.states[:, 0])),
        ("|b|", t, np.abs(traj.states[:, 1])),
    ]
    if cfg.wants("svg"):
        art.add(
            writers.write_svg_lines(
                out / "trajectory.svg",
                series,
                title=f"{d.mode} run: {traj.terminal.value}",
                xlabel="t (us)",
                ylabel="amplitude",
            )
        )
    if cfg.wants("ascii"):
        art.add(writers.write_ascii(out / "trajectory.txt", writers.ascii_plot(series)))
    logger.info(f"simulate ({d.mode}): {len(traj)} records, terminal {traj.terminal.value}")
    return art

"""Tests for ptcavity_cli."""

import json
from unittest.mock import patch

import pytest
from loguru import logger
from typer.testing import CliRunner

from ptcavity.__version__ import __version__
from ptcavity.io.writers import UNITS_LINE, read_csv
from ptcavity_cli.commands import app

runner = CliRunner()


@pytest.fixture(autouse=True)
def _reset_logger(tmp_path, monkeypatch):
    """Run from an empty directory; drop sinks bound to finished runner streams."""
    monkeypatch.chdir(tmp_path)
    yield
    logger.remove()


def _write_config(tmp_path, doc) -> str:
    f = tmp_path / "run.json"
    f.write_text(json.dumps(doc))
    return str(f)


# ── Basics ──────────────────────────────────────────────────


def test_cli_help():
    """--help works and shows command names."""
    result = runner.invoke(app, ["--help"])
    assert result.exit_code == 0
    for name in ("branch-sweep", "phase-match", "gain-map", "hysteresis", "simulate", "verify"):
        assert name in result.output


def test_version():
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_presets():
    result = runner.invoke(app, ["presets"])
    assert result.exit_code == 0
    assert "gain-detuning" in result.output
    assert "fig5" in result.output


def test_show_config_with_preset():
    result = runner.invoke(app, ["show-config", "--preset", "gain-detuning"])
    assert result.exit_code == 0
    assert "1000.0" in result.output


# ── Exit codes ──────────────────────────────────────────────


def test_bad_config_exits_2(tmp_path):
    cfg = _write_config(tmp_path, {"params": {"kappa": -1.0}})
    result = runner.invoke(app, ["branch-sweep", "-c", cfg, "-o", str(tmp_path / "out")])
    assert result.exit_code == 2


def test_unknown_preset_exits_2(tmp_path):
    result = runner.invoke(app, ["branch-sweep", "-p", "nope", "-o", str(tmp_path)])
    assert result.exit_code == 2


def test_below_threshold_exits_2(tmp_path):
    cfg = _write_config(tmp_path, {"hysteresis": {"G": 0.5, "deltas": [0.0]}})
    result = runner.invoke(app, ["hysteresis", "-c", cfg, "-o", str(tmp_path / "out")])
    assert result.exit_code == 2


def test_far_detuning_exits_2(tmp_path):
    result = runner.invoke(app, ["hysteresis", "-d", "1e6", "-o", str(tmp_path / "out")])
    assert result.exit_code == 2


def test_step_budget_exits_2(tmp_path):
    result = runner.invoke(
        app, ["simulate", "--dt", "1e-6", "--time", "10", "-o", str(tmp_path / "out")]
    )
    assert result.exit_code == 2


def test_duration_shorter_than_step_exits_2(tmp_path):
    result = runner.invoke(
        app, ["simulate", "--time", "0.001", "--dt", "0.01", "-o", str(tmp_path / "out")]
    )
    assert result.exit_code == 2


def test_driven_without_atoms_exits_2(tmp_path):
    cfg = _write_config(tmp_path, {"params": {"N": 0}, "dynamics": {"mode": "driven"}})
    result = runner.invoke(app, ["simulate", "-c", cfg, "-o", str(tmp_path / "out")])
    assert result.exit_code == 2


def test_overflow_exits_3(tmp_path):
    cfg = _write_config(
        tmp_path,
        {"params": {"delta": 0.0, "G": 1.0}, "dynamics": {"a": [1e200, 0.0], "dt": 0.01}},
    )
    result = runner.invoke(app, ["simulate", "-c", cfg, "-o", str(tmp_path / "out")])
    assert result.exit_code == 3


# ── Sweep commands ──────────────────────────────────────────


def test_branch_sweep(tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(app, ["branch-sweep", "-o", str(out)])
    assert result.exit_code == 0, result.output
    path = out / "branch_sweep.csv"
    assert path.read_text().splitlines()[0] == UNITS_LINE
    rows = read_csv(path)
    assert len(rows) == 281
    split = [r for r in rows if r["x_upper"]]
    assert split and float(split[0]["G_MHz"]) >= 203.9
    for r in split:
        assert float(r["x_upper"]) == -float(r["x_lower"])
    summary = json.loads((out / "branch_sweep_summary.json").read_text())
    assert summary["threshold_G"] == pytest.approx(204.0, rel=0.01)


def test_phase_match_preset(tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(app, ["phase-match", "-p", "phase-meeting", "-o", str(out)])
    assert result.exit_code == 0, result.output
    rows = read_csv(out / "phase_match.csv")
    assert len(rows) == 721
    assert rows[0]["phi0_upper"] == ""  # |delta| = 36 GHz is past the meeting point
    summary = json.loads((out / "phase_match_summary.json").read_text())
    assert summary["meeting_delta"][1] == pytest.approx(32_012.3, rel=1e-5)


def test_gain_map_detuning_preset(tmp_path):
    out = tmp_path / "out"
    cfg = _write_config(
        tmp_path, {"sweeps": {"gain_rows": {"count": 41}, "gain_cols": {"count": 41}}}
    )
    fmts = "csv,json,svg,ascii"
    args = ["gain-map", "-p", "gain-detuning", "-c", cfg, "-o", str(out), "-f", fmts]
    result = runner.invoke(app, args)
    assert result.exit_code == 0, result.output
    rows = read_csv(out / "gain_map.csv")
    assert len(rows) == 41 * 41
    assert set(rows[0]) == {"delta", "phi", "margin", "rate", "classification"}
    center = [r for r in rows if float(r["delta"]) == 0.0]
    assert any(r["classification"] == "NetGain" for r in center)
    doc = json.loads((out / "gain_map_contour.json").read_text())
    assert doc["zero_contour"]["lines"]
    assert (out / "gain_map.svg").exists()
    assert (out / "gain_map.txt").read_text().startswith(UNITS_LINE)


def test_hysteresis_single_delta(tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(app, ["hysteresis", "-d", "1.5", "-o", str(out)])
    assert result.exit_code == 0, result.output
    assert (out / "hysteresis_upper_d+1.5.csv").exists()
    assert (out / "hysteresis_lower_d+1.5.csv").exists()
    counts = read_csv(out / "hysteresis_counts_d+1.5.csv")
    assert {1, 3} <= {int(r["lower_roots"]) for r in counts}
    assert all(int(r["upper_roots"]) == 1 for r in counts)
    summary = json.loads((out / "hysteresis_summary.json").read_text())
    entry = summary["deltas"]["d+1.5"]
    assert entry["folds"] == 1
    assert entry["branches"]["Upper"]["fold"] is None
    assert summary["convention"] == "exact"


def test_hysteresis_numbered_preset(tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(app, ["hysteresis", "-p", "fig5", "-o", str(out)])
    assert result.exit_code == 0, result.output
    summary = json.loads((out / "hysteresis_summary.json").read_text())
    assert summary["convention"] == "tangent"
    deltas = summary["deltas"]
    assert deltas["d+0"]["folds"] == 1
    assert deltas["d+0"]["branches"]["Upper"]["fold"] is not None
    assert deltas["d+0"]["max_stable_count"] == 3
    assert deltas["d+1.5"]["folds"] == 2
    assert deltas["d-1.5"]["folds"] == 0
    assert deltas["d+1.5"]["max_total"] != deltas["d-1.5"]["max_total"]


def test_simulate(tmp_path):
    out = tmp_path / "out"
    cfg = _write_config(
        tmp_path, {"params": {"delta": 0.0, "G": 1.0}, "dynamics": {"T": 1.0, "dt": 0.01}}
    )
    result = runner.invoke(app, ["simulate", "-c", cfg, "-o", str(out)])
    assert result.exit_code == 0, result.output
    rows = read_csv(out / "trajectory.csv")
    assert float(rows[0]["t"]) == 0.0
    assert float(rows[0]["re_a"]) == 1e-3
    meta = json.loads((out / "trajectory_meta.json").read_text())
    assert meta["dt"] == 0.01
    assert meta["terminal"] == "MaxTime"


def test_env_overrides_out_flag(tmp_path, monkeypatch):
    monkeypatch.setenv("PTCAVITY_OUTPUT__DIRECTORY", str(tmp_path / "env"))
    result = runner.invoke(app, ["branch-sweep", "-o", str(tmp_path / "flag")])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "env" / "branch_sweep.csv").exists()
    assert not (tmp_path / "flag").exists()


# ── verify ──────────────────────────────────────────────────

_SMALL = {
    "verify": {"balance_draws": 20, "gain_draws": 200, "settle_draws": 3, "contour_grid": 41}
}


def test_verify_passes_and_is_deterministic(tmp_path):
    cfg = _write_config(tmp_path, _SMALL)
    reports = []
    for name in ("a", "b"):
        out = tmp_path / name
        result = runner.invoke(app, ["verify", "-c", cfg, "-o", str(out), "--seed", "7"])
        assert result.exit_code == 0, result.output
        reports.append((out / "verify_report.json").read_bytes())
    assert reports[0] == reports[1]
    doc = json.loads(reports[0])
    assert doc["seed"] == 7
    assert doc["failures"] == 0
    assert len(doc["suites"]) == 11


def test_verify_single_suite(tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(
        app, ["verify", "--suite", "meeting_points", "--suite", "branch_threshold", "-o", str(out)]
    )
    assert result.exit_code == 0, result.output
    doc = json.loads((out / "verify_report.json").read_text())
    assert [s["suite"] for s in doc["suites"]] == ["branch_threshold", "meeting_points"]


def test_verify_failure_exits_1(tmp_path):
    report = {"version": __version__, "seed": 42, "suites": [], "cases": 3, "failures": 1}
    with patch("ptcavity.verify.run_suites", return_value=report):
        result = runner.invoke(app, ["verify", "-o", str(tmp_path / "out")])
    assert result.exit_code == 1
    assert (tmp_path / "out" / "verify_report.json").exists()

"""Run configuration schema: JSON/YAML document + Pydantic + env override."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from ptcavity.model.types import DEFAULT_G_SINGLE, PhaseConvention, SystemParams
from ptcavity.spectral.gain import SweepAxis

OutputFormat = Literal["csv", "json", "svg", "ascii"]


# ════════════════════════════════════════════════════════════
# SUB-CONFIGS (nested BaseModel)
# ════════════════════════════════════════════════════════════


def _default_branch_axis() -> SweepAxis:
    return SweepAxis(
        name="G",
        min=DEFAULT_G_SINGLE,
        max=DEFAULT_G_SINGLE * math.sqrt(1e7),
        count=281,
        scale="log",
    )


def _default_coupling_axis() -> SweepAxis:
    """G over N = 1..1e7 atoms, log-spaced, for the (G, phi) gain map."""
    return SweepAxis(
        name="G",
        min=DEFAULT_G_SINGLE,
        max=DEFAULT_G_SINGLE * math.sqrt(1e7),
        count=201,
        scale="log",
    )


class SweepsConfig(BaseModel):
    """Parameter sweeps of the figure commands."""

    branch: SweepAxis = Field(default_factory=_default_branch_axis)
    phase: SweepAxis = Field(
        default_factory=lambda: SweepAxis(name="delta", min=-36000, max=36000, count=721)
    )
    gain_rows: SweepAxis = Field(default_factory=_default_coupling_axis)
    gain_cols: SweepAxis = Field(
        default_factory=lambda: SweepAxis(name="phi", min=0.0, max=math.pi, count=201)
    )
    x: float = Field(0.0, description="mirror coordinate of gain maps")

    @field_validator("branch")
    @classmethod
    def _branch_sweeps_G(cls, v: SweepAxis) -> SweepAxis:
        if v.name != "G":
            raise ValueError("the branch sweep runs over G")
        return v

    @field_validator("phase")
    @classmethod
    def _phase_sweeps_delta(cls, v: SweepAxis) -> SweepAxis:
        if v.name != "delta":
            raise ValueError("the phase-match sweep runs over delta")
        return v


class OutputConfig(BaseModel):
    """Where and in which formats results are written."""

    directory: Path = Path("results")
    formats: list[OutputFormat] = Field(default_factory=lambda: ["csv", "json"])

    @field_validator("formats", mode="before")
    @classmethod
    def _split_formats(cls, v: object) -> object:
        if isinstance(v, str):
            return [f.strip().lower() for f in v.split(",") if f.strip()]
        return v


class VerifyConfig(BaseModel):
    """Sizes of the randomized verification suites."""

    seed: int = 42
    balance_draws: int = Field(1000, ge=1)
    gain_draws: int = Field(10_000, ge=1)
    settle_draws: int = Field(100, ge=1)
    contour_grid: int = Field(201, ge=3)


class HysteresisConfig(BaseModel):
    """Quadrature curves: coupling, detunings, period index and sampling."""

    G: float = Field(345.0, gt=0)
    deltas: list[float] = Field(default_factory=lambda: [0.0, -1.5, 1.5])
    k: int = 0
    samples: int = Field(401, ge=2)
    input_samples: int = Field(2001, ge=2, description="X_b points of the count scan")
    convention: PhaseConvention = PhaseConvention.EXACT


class DynamicsConfig(BaseModel):
    """Initial state and step control of ``simulate``."""

    mode: Literal["full", "driven"] = "full"
    dt: float | None = Field(None, gt=0, description="us; None picks 0.1 / fastest rate")
    T: float = Field(1.0, gt=0, description="us")
    max_steps: int = Field(2_000_000, ge=1)
    stride: int = Field(10, ge=1)
    a: tuple[float, float] = (1e-3, 0.0)
    b: tuple[float, float] = (0.0, 0.0)
    x: float = 0.0
    v: float = 0.0


# ════════════════════════════════════════════════════════════
# ROOT CONFIG (BaseSettings)
# ════════════════════════════════════════════════════════════


class RunConfig(BaseSettings):
    """
    Root configuration.

    Priority: env vars > .env > config file (init kwargs) > defaults

    Env override examples:
        PTCAVITY_OUTPUT__DIRECTORY=out
        PTCAVITY_PARAMS__KAPPA=2.0
        PTCAVITY_VERIFY__SEED=7

    Units: frequencies in MHz, angles in radians, times in microseconds.
    """

    model_config = SettingsConfigDict(
        env_prefix="PTCAVITY_",
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    params: SystemParams = Field(default_factory=SystemParams)
    sweeps: SweepsConfig = Field(default_factory=SweepsConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
    hysteresis: HysteresisConfig = Field(default_factory=HysteresisConfig)
    dynamics: DynamicsConfig = Field(default_factory=DynamicsConfig)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return env_settings, dotenv_settings, init_settings, file_secret_settings

    # ── Computed properties ─────────────────────────────────

    @property
    def output_path(self) -> Path:
        return Path(self.output.directory).expanduser()

    def wants(self, fmt: OutputFormat) -> bool:
        return fmt in self.output.formats


# ════════════════════════════════════════════════════════════
# PRESETS
# ════════════════════════════════════════════════════════════

PRESETS: dict[str, dict] = {
    "branching": {
        "sweeps": {"branch": _default_branch_axis().model_dump()},
    },
    "phase-meeting": {
        "params": {"G": 204.0},
        "sweeps": {"phase": {"name": "delta", "min": -36000, "max": 36000, "count": 721}},
    },
    "gain-coupling": {
        "params": {"delta": 0.0},
        "sweeps": {
            "gain_rows": _default_coupling_axis().model_dump(),
            "gain_cols": {"name": "phi", "min": 0.0, "max": math.pi, "count": 201},
        },
    },
    "gain-detuning": {
        "params": {"G": 1000.0},
        "sweeps": {
            "gain_rows": {"name": "delta", "min": -1e6, "max": 1e6, "count": 201},
            "gain_cols": {"name": "phi", "min": 0.0, "max": math.pi, "count": 201},
        },
    },
    "multistable": {
        "hysteresis": {
            "G": 345.0,
            "deltas": [0.0, -1.5, 1.5],
            "k": 0,
            "convention": "tangent",
        },
    },
}

PRESET_NOTES: dict[str, str] = {
    "branching": "branch displacement vs G = sqrt(N) g, N from 1 to 1e7 (log)",
    "phase-meeting": "matching phases vs delta at G = 204 MHz, k = 0",
    "gain-coupling": "gain margin over (G, phi) at delta = 0, G log-spaced over N = 1..1e7",
    "gain-detuning": "gain margin over (delta, phi) at G = 1 GHz",
    "multistable": "printed-form phases, hysteresis at G = 345 MHz, delta in {0, +-1.5} MHz",
}

# Numbered aliases of the presets above
PRESET_ALIASES: dict[str, str] = {
    "fig2": "branching",
    "fig3": "phase-meeting",
    "fig4a": "gain-coupling",
    "fig4b": "gain-detuning",
    "fig5": "multistable",
}
PRESETS.update({alias: PRESETS[name] for alias, name in PRESET_ALIASES.items()})
PRESET_NOTES.update({alias: f"same as {name}" for alias, name in PRESET_ALIASES.items()})

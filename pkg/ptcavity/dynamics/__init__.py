"""Time-domain integration of the coupled modes and the frozen-atom driven cavity."""

from ptcavity.dynamics.integrator import (
    ModeState,
    SettleResult,
    Terminal,
    Trajectory,
    derivatives,
    driven_mode,
    integrate,
    linear_solution,
    mode_matrix,
    recommended_dt,
    rk4_step,
    settle,
)

__all__ = [
    "ModeState",
    "SettleResult",
    "Terminal",
    "Trajectory",
    "derivatives",
    "driven_mode",
    "integrate",
    "linear_solution",
    "mode_matrix",
    "recommended_dt",
    "rk4_step",
    "settle",
]

"""Fixed-step integration of the cavity, atomic and mirror equations of motion.

In the cavity rotating frame, with the noise input set to zero:

    x'' = -Gamma x' - omega_M^2 x + (beta omega_M^2 / eta) |a|^2
    a'  = i eta x a - kappa a - i G e^{i phi} b
    b'  = -i delta b - gamma b - i G e^{i phi} a

The state vector is (a, b, x, v) stored as complex128; x and v stay real.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from loguru import logger
from scipy.linalg import expm

from ptcavity.errors import NonFiniteState
from ptcavity.model.steady import bogoliubov_drive
from ptcavity.model.types import SystemParams

# Relative norm thresholds against the reference (initial) norm
DIVERGE_FACTOR = 1e12
DECAY_FACTOR = 1e-12
# Relative state change per mirror period below which a run counts as settled
SETTLE_TOL = 1e-8

Rhs = Callable[[np.ndarray], np.ndarray]


class Terminal(str, Enum):
    DECAYED = "Decayed"
    DIVERGED = "Diverged"
    SETTLED = "Settled"
    MAX_TIME = "MaxTime"


@dataclass(frozen=True, slots=True)
class ModeState:
    """Cavity amplitude a, atomic amplitude b, mirror displacement x and velocity v."""

    a: complex = 0j
    b: complex = 0j
    x: float = 0.0
    v: float = 0.0

    def to_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.x, self.v], dtype=np.complex128)

    @classmethod
    def from_array(cls, y: np.ndarray) -> ModeState:
        a, b, x, v = y.tolist()
        return cls(a=complex(a), b=complex(b), x=float(x.real), v=float(v.real))

    def norm(self) -> float:
        return float(np.linalg.norm(self.to_array()))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.to_array())))


@dataclass(frozen=True)
class Trajectory:
    """Recorded states of one run; ``states`` rows are (a, b, x, v)."""

    times: np.ndarray
    states: np.ndarray
    dt: float
    stride: int
    terminal: Terminal
    reference_norm: float
    thresholds: dict[str, float] = field(
        default_factory=lambda: {
            "diverge_factor": DIVERGE_FACTOR,
            "decay_factor": DECAY_FACTOR,
            "settle_tol": SETTLE_TOL,
        }
    )

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> ModeState:
        return ModeState.from_array(self.states[i])

    @property
    def final(self) -> ModeState:
        return self.state(-1)

    def metadata(self) -> dict[str, object]:
        return {
            "units": {"time": "us", "rates": "MHz"},
            "dt": self.dt,
            "stride": self.stride,
            "samples": len(self.times),
            "t_final": float(self.times[-1]),
            "terminal": self.terminal.value,
            "reference_norm": self.reference_norm,
            "thresholds": dict(self.thresholds),
        }


@dataclass(frozen=True, slots=True)
class SettleResult:
    terminal: Terminal
    state: ModeState
    time: float


# ════════════════════════════════════════════════════════════
# RIGHT-HAND SIDES
# ════════════════════════════════════════════════════════════


def _full_rhs(p: SystemParams) -> Rhs:
    cg = -1j * p.coupling
    kappa, eta = p.kappa, p.eta
    atom = complex(-p.gamma, -p.delta)
    force, w2, damp = p.force_coefficient, p.omega_M**2, p.Gamma_m

    def rhs(y: np.ndarray) -> np.ndarray:
        a, b, x, v = y.tolist()
        x, v = x.real, v.real
        return np.array(
            [
                (1j * eta * x - kappa) * a + cg * b,
                atom * b + cg * a,
                v,
                -damp * v - w2 * x + force * (a.real * a.real + a.imag * a.imag),
            ],
            dtype=np.complex128,
        )

    return rhs


def _driven_rhs(p: SystemParams) -> Rhs:
    drive = bogoliubov_drive(p)
    kappa, eta = p.kappa, p.eta
    force, w2, damp = p.force_coefficient, p.omega_M**2, p.Gamma_m

    def rhs(y: np.ndarray) -> np.ndarray:
        a, _, x, v = y.tolist()
        x, v = x.real, v.real
        return np.array(
            [
                (1j * eta * x - kappa) * a + drive,
                0.0,
                v,
                -damp * v - w2 * x + force * (a.real * a.real + a.imag * a.imag),
            ],
            dtype=np.complex128,
        )

    return rhs


def derivatives(p: SystemParams, s: ModeState) -> ModeState:
    """Time derivative of the full state."""
    return ModeState.from_array(_full_rhs(p)(s.to_array()))


def rk4_step(f: Rhs, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def recommended_dt(p: SystemParams, s: ModeState | None = None) -> float:
    """0.1 over the fastest rate of the problem; not enforced by the integrators."""
    rates = [p.kappa, p.gamma, p.omega_M, abs(p.delta), p.G]
    if s is not None:
        rates.append(abs(p.eta * s.x))
    return 0.1 / max(rates)


# ════════════════════════════════════════════════════════════
# RUNNERS
# ════════════════════════════════════════════════════════════


def _norm(y: np.ndarray, mask: np.ndarray | None) -> float:
    return float(np.linalg.norm(y if mask is None else y[mask]))


def _run(
    f: Rhs,
    y0: np.ndarray,
    dt: float,
    T: float,
    stride: int,
    check_period: int | None,
    mask: np.ndarray | None = None,
) -> Trajectory:
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if T < dt:
        raise ValueError(f"T={T} must be at least dt={dt}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")

    n_steps = int(math.floor(T / dt + 1e-9))
    n0 = _norm(y0, mask)
    # Zero initial state: decay is not meaningful, divergence is measured against unit norm
    reference = n0 if n0 > 0 else 1.0
    hi, lo = DIVERGE_FACTOR * reference, DECAY_FACTOR * n0

    times, states = [0.0], [y0.copy()]
    y = y0.copy()
    anchor = y0.copy()
    terminal = Terminal.MAX_TIME
    for i in range(1, n_steps + 1):
        y = rk4_step(f, y, dt)
        t = i * dt
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(t)
        n = _norm(y, mask)
        if n > hi:
            terminal = Terminal.DIVERGED
        elif n0 > 0 and n < lo:
            terminal = Terminal.DECAYED
        elif check_period and i % check_period == 0:
            change = _norm(y - anchor, mask)
            if change <= SETTLE_TOL * max(n, np.finfo(float).tiny):
                terminal = Terminal.SETTLED
            anchor = y.copy()
        if terminal is not Terminal.MAX_TIME or i % stride == 0 or i == n_steps:
            times.append(t)
            states.append(y.copy())
        if terminal is not Terminal.MAX_TIME:
            break

    logger.debug(f"integrated {len(times) - 1} records to t={times[-1]:.6g} us: {terminal.value}")
    if terminal is Terminal.MAX_TIME:
        logger.warning(f"run reached MaxTime T={T:.6g} us without a terminal classification")
    return Trajectory(
        times=np.asarray(times),
        states=np.vstack(states),
        dt=dt,
        stride=stride,
        terminal=terminal,
        reference_norm=reference,
    )


def _steps_per_period(p: SystemParams, dt: float) -> int:
    return max(1, round(2 * math.pi / p.omega_M / dt))


def integrate(
    p: SystemParams, s0: ModeState, dt: float, T: float, stride: int = 1
) -> Trajectory:
    """Classical fourth-order fixed-step run; stops early on Diverged or Decayed.

    Raises
    ------
    NonFiniteState
        On NaN or overflow, with the offending time.
    """
    return _run(_full_rhs(p), s0.to_array(), dt, T, stride, check_period=None)


def settle(
    p: SystemParams,
    s0: ModeState,
    T_max: float,
    dt: float | None = None,
) -> SettleResult:
    """Integrate until Decayed, Diverged, Settled or T_max.

    Settled means the state moved less than 1e-8 (relative) over one mirror period.
    """
    step = dt if dt is not None else recommended_dt(p, s0)
    if s0.norm() == 0:
        return SettleResult(Terminal.SETTLED, s0, 0.0)
    n_steps = max(1, int(math.floor(T_max / step + 1e-9)))
    traj = _run(
        _full_rhs(p),
        s0.to_array(),
        step,
        max(T_max, step),
        stride=n_steps,
        check_period=_steps_per_period(p, step),
    )
    return SettleResult(traj.terminal, traj.final, float(traj.times[-1]))


def driven_mode(
    p: SystemParams,
    s0: ModeState,
    dt: float,
    T: float,
    stride: int = 1,
) -> Trajectory:
    """Frozen-atom run: b fixed at sqrt(N), phi fixed at pi/2, drive G*sqrt(N).

    Only (a, x, v) evolve and enter the norm. Stops on Settled as well as on
    Decayed and Diverged.
    """
    if p.N <= 0:
        raise ValueError("driven mode needs N > 0")
    y0 = s0.to_array()
    y0[1] = math.sqrt(p.N)
    mask = np.array([True, False, True, True])
    traj = _run(
        _driven_rhs(p), y0, dt, T, stride, check_period=_steps_per_period(p, dt), mask=mask
    )
    logger.info(
        f"driven mode: drive={bogoliubov_drive(p):.6g} MHz, terminal {traj.terminal.value}, "
        f"a={traj.final.a:.6g}"
    )
    return traj


# ════════════════════════════════════════════════════════════
# CLOSED FORM
# ════════════════════════════════════════════════════════════


def mode_matrix(p: SystemParams) -> np.ndarray:
    """Generator of (a, b) with the mirror frozen at x = 0."""
    cg = -1j * p.coupling
    return np.array([[-p.kappa, cg], [cg, complex(-p.gamma, -p.delta)]], dtype=np.complex128)


def linear_solution(p: SystemParams, s0: ModeState, t: np.ndarray | float) -> np.ndarray:
    """Exact (a, b) at times t for a decoupled mirror, shape (len(t), 2).

    Uses the eigen-decomposition of the 2x2 generator; near an exceptional point,
    where the eigenvectors coalesce, falls back to the matrix exponential.
    """
    if p.eta != 0:
        raise ValueError("linear_solution describes the decoupled mirror (eta = 0)")
    times = np.atleast_1d(np.asarray(t, dtype=float))
    M = mode_matrix(p)
    y0 = np.array([s0.a, s0.b], dtype=np.complex128)
    lam, V = np.linalg.eig(M)
    if np.linalg.cond(V) > 1e6:
        return np.array([expm(M * tk) @ y0 for tk in times])
    c = np.linalg.solve(V, y0)
    return (V[None, :, :] * (c[None, :] * np.exp(np.outer(times, lam)))[:, None, :]).sum(axis=2)

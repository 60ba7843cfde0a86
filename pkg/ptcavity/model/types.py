"""Physical parameters and steady-state records.

Units: rates, couplings and detunings in MHz (angular), displacement in units where
eta * x is in MHz, time in microseconds.
"""

from __future__ import annotations

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Default parameter set: BEC in a high-finesse cavity with a movable end mirror
DEFAULT_KAPPA = 1.3
DEFAULT_GAMMA = 3.0
DEFAULT_ETA = math.sqrt(1.8) * DEFAULT_KAPPA
DEFAULT_G_SINGLE = 10.9
DEFAULT_DELTA = 32_000.0


class Branch(str, Enum):
    """Steady-state branch of the mirror displacement."""

    ZERO = "Zero"
    UPPER = "Upper"
    LOWER = "Lower"


class PhaseConvention(str, Enum):
    """How the matching phase is computed.

    ``exact`` takes the two-argument angle of the complex balance requirement and
    satisfies the balance equation for every k. ``tangent`` evaluates the closed
    arctangent form with a principal-valued arctangent and a k*pi/2 step, as printed
    alongside the reference figures.
    """

    EXACT = "exact"
    TANGENT = "tangent"


class SystemParams(BaseModel):
    """All rates, couplings and the coupling phase of the atom-cavity-mirror system."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kappa: float = Field(DEFAULT_KAPPA, gt=0, description="cavity linewidth, MHz")
    gamma: float = Field(DEFAULT_GAMMA, gt=0, description="atomic-mode relaxation, MHz")
    Gamma_m: float = Field(0.01, ge=0, description="mirror damping, MHz")
    delta: float = Field(DEFAULT_DELTA, description="atom-cavity detuning Omega - omega0, MHz")
    eta: float = Field(DEFAULT_ETA, description="radiation-pressure coupling, 0 decouples")
    G: float = Field(DEFAULT_G_SINGLE, ge=0, description="collective coupling, MHz")
    phi: float = Field(0.0, description="coupling phase, rad")
    g_single: float = Field(DEFAULT_G_SINGLE, ge=0, description="single-atom coupling, MHz")
    N: int = Field(1, ge=0, description="atom count")
    beta: float | None = Field(None, gt=0, description="eta^2/(m omega_M^2); defaults to kappa")
    omega_M: float = Field(1.0, gt=0, description="mirror frequency, MHz")
    Omega_abs: float | None = None
    omega0_abs: float | None = None

    @model_validator(mode="after")
    def _check_consistency(self) -> SystemParams:
        values = [self.kappa, self.gamma, self.Gamma_m, self.delta, self.eta, self.G, self.phi]
        if not all(math.isfinite(v) for v in values):
            raise ValueError("all parameters must be finite")
        if self.Omega_abs is not None and self.omega0_abs is not None:
            if self.delta != self.Omega_abs - self.omega0_abs:
                raise ValueError(
                    f"delta={self.delta} must equal Omega_abs - omega0_abs="
                    f"{self.Omega_abs - self.omega0_abs}"
                )
        return self

    # ── Derived quantities ──────────────────────────────────

    @property
    def beta_eff(self) -> float:
        """Mechanical response beta; kappa when unset."""
        return self.kappa if self.beta is None else self.beta

    @property
    def coupling(self) -> complex:
        """Complex coupling G e^{i phi}."""
        return self.G * complex(math.cos(self.phi), math.sin(self.phi))

    @property
    def force_coefficient(self) -> float:
        """eta/m written as beta * omega_M^2 / eta; zero for a decoupled mirror."""
        if self.eta == 0:
            return 0.0
        return self.beta_eff * self.omega_M**2 / self.eta

    def replace(self, **changes: object) -> SystemParams:
        """Return a validated copy with ``changes`` applied."""
        return SystemParams(**{**self.model_dump(), **changes})


class SteadySolution(BaseModel):
    """One admissible equilibrium of the mirror."""

    model_config = ConfigDict(frozen=True)

    branch: Branch
    x_ss: float
    phi0: float
    rho: float
    k: int = 0

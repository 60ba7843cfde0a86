"""Exception hierarchy. Every error carries the values that triggered it."""

from __future__ import annotations


class PtCavityError(Exception):
    """Base class for all ptcavity errors."""

    exit_code: int = 3


class ConfigError(PtCavityError):
    """Raised when a run configuration cannot be loaded or validated."""

    exit_code = 2

    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(f"Invalid configuration: {detail}")


class VerificationFailed(PtCavityError):
    """Raised when one or more verification suites report failures."""

    exit_code = 1

    def __init__(self, failures: int):
        self.failures = failures
        super().__init__(f"{failures} verification case(s) failed")


# ── Numerical failures ──────────────────────────────────────


class NumericalError(PtCavityError):
    """NaN, overflow or an ill-conditioned quantity."""


class NonFiniteState(NumericalError):
    """Integration produced a NaN or infinite component."""

    def __init__(self, time: float):
        self.time = time
        super().__init__(f"Non-finite state at t={time:.6g} us")


class DegenerateDiscriminant(NumericalError):
    """The complex discriminant is too small for a polar angle."""

    def __init__(self, modulus: float):
        self.modulus = modulus
        super().__init__(f"Discriminant modulus {modulus:.3e} MHz^2 is degenerate")


# ── Domain failures ─────────────────────────────────────────


class DomainError(PtCavityError):
    """An operation was called outside the region where it is defined.

    The parameters come from the run configuration, so the CLI reports these as
    configuration errors.
    """

    exit_code = 2


class NoMeetingPoint(DomainError):
    """G^4/kappa^2 < gamma^2: the two matching-phase curves never meet."""

    def __init__(self, G: float, radicand: float):
        self.G = G
        self.radicand = radicand
        super().__init__(f"No meeting point at G={G:.6g} MHz (radicand {radicand:.3e})")


class ZeroCoupling(DomainError):
    """The quadrature relations divide by G."""

    def __init__(self) -> None:
        super().__init__("Collective coupling G is zero")


class BelowThreshold(DomainError):
    """Upper and Lower branches only exist for rho > 1."""

    def __init__(self, rho: float):
        self.rho = rho
        super().__init__(f"rho={rho:.6g} <= 1: no non-zero branches")


class InconsistentBranch(DomainError):
    """A displacement that no steady state of the model can have."""

    def __init__(self, x: float, mismatch: float, reason: str | None = None):
        self.x = x
        self.mismatch = mismatch
        reason = reason or f"relative modulus mismatch {mismatch:.3e}"
        super().__init__(f"x={x:.6g} is not a branch value ({reason})")


class MirrorDecoupled(DomainError):
    """eta = 0: branch displacements and radiation pressure are undefined."""

    def __init__(self) -> None:
        super().__init__("eta is zero: the mirror is decoupled from the cavity")

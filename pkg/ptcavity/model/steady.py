"""Steady-state theory: balance equation, gain-loss ratio, matching phase, branches."""

from __future__ import annotations

import cmath
import math

from ptcavity.errors import BelowThreshold, InconsistentBranch, MirrorDecoupled, NoMeetingPoint
from ptcavity.model.types import Branch, PhaseConvention, SteadySolution, SystemParams

# Relative mismatch |target| vs G^2 accepted by phi_matching
BRANCH_TOL = 1e-8
# |rho - 1| below which the two branches are treated as meeting
MEETING_TOL = 1e-9


# ════════════════════════════════════════════════════════════
# COUPLING
# ════════════════════════════════════════════════════════════


def hopfield_G(g_single: float, N: int) -> float:
    """Collective coupling of N atoms, sqrt(N) * g."""
    return math.sqrt(N) * g_single


def coupling_from_atoms(g_single: float, N: float) -> float:
    """Collective coupling for a (possibly non-integer) atom count, used by N-axis sweeps."""
    return hopfield_G(g_single, N)


def atoms_from_coupling(g_single: float, G: float) -> float:
    """Atom count that produces collective coupling G (inverse of hopfield_G)."""
    return (G / g_single) ** 2


def bogoliubov_drive(p: SystemParams) -> float:
    """Effective drive amplitude G * sqrt(N) of the frozen-atom model."""
    return p.G * math.sqrt(p.N)


# ════════════════════════════════════════════════════════════
# GAIN-LOSS RATIO AND CHARACTERISTIC COUPLINGS
# ════════════════════════════════════════════════════════════


def compute_rho(p: SystemParams) -> float:
    """Compound gain-loss ratio (G^2/kappa^2) * (G^2/(gamma^2 + delta^2))."""
    G2 = p.G * p.G
    return (G2 / p.kappa**2) * (G2 / (p.gamma**2 + p.delta**2))


def threshold_G(p: SystemParams) -> float:
    """Coupling at which rho = 1 and the non-zero branches split off."""
    return math.sqrt(p.kappa * math.hypot(p.gamma, p.delta))


def saddle_G(p: SystemParams) -> float:
    """Inflection of x_ss(G) between the parabolic and the quadratic regions."""
    return (3.0 * p.kappa**2 * (p.gamma**2 + p.delta**2)) ** 0.25


def meeting_delta(p: SystemParams) -> tuple[float, float]:
    """Detunings where rho = 1 and the Upper/Lower phase curves meet.

    Raises
    ------
    NoMeetingPoint
        When G^4/kappa^2 < gamma^2.
    """
    radicand = p.G**4 / p.kappa**2 - p.gamma**2
    if radicand < 0:
        raise NoMeetingPoint(p.G, radicand)
    d = math.sqrt(radicand)
    return -d, d


# ════════════════════════════════════════════════════════════
# BALANCE EQUATION
# ════════════════════════════════════════════════════════════


def balance_residual(p: SystemParams, x: float) -> complex:
    """kappa*gamma + delta*eta*x + G^2 e^{2i phi} + i(kappa*delta - gamma*eta*x)."""
    ex = p.eta * x
    return complex(p.kappa * p.gamma + p.delta * ex, p.kappa * p.delta - p.gamma * ex) + (
        p.G * p.G * cmath.exp(2j * p.phi)
    )


def degenerate_det(p: SystemParams, x: float) -> complex:
    """Determinant of the homogeneous (a, b) steady-state matrix."""
    return complex(p.kappa, -p.eta * x) * complex(p.gamma, p.delta) + (
        p.G * p.G * cmath.exp(2j * p.phi)
    )


def _balance_target(p: SystemParams, x: float) -> complex:
    """Value G^2 e^{2i phi} must take for the balance residual to vanish at x."""
    ex = p.eta * x
    return complex(-(p.kappa * p.gamma + p.delta * ex), -(p.kappa * p.delta - p.gamma * ex))


def phi_matching(p: SystemParams, x_ss: float, k: int = 0) -> float:
    """Matching phase phi0 = arg(target)/2 + k*pi for a branch displacement.

    The family is pi-periodic in k and makes ``balance_residual`` vanish for every k.

    Raises
    ------
    InconsistentBranch
        When |target| differs from G^2, i.e. no phase can balance x_ss.
    """
    target = _balance_target(p, x_ss)
    G2 = p.G * p.G
    scale = max(G2, abs(target))
    mismatch = abs(abs(target) - G2) / scale
    if mismatch > BRANCH_TOL:
        raise InconsistentBranch(x_ss, mismatch)
    return 0.5 * cmath.phase(target) + k * math.pi


def tangent_phase(p: SystemParams, branch: Branch, k: int = 0) -> float:
    """Matching phase from the closed arctangent form (principal value, k*pi/2 step).

    tan(2 phi0) = (delta - gamma*e) / (gamma + delta*e) with e = eta*x/kappa, so the sign
    of the form follows the sign of eta*x: e = +sqrt(rho - 1) on Upper when eta > 0.
    Only one k parity of this family solves the balance equation; use ``phi_matching``
    for steady states.
    """
    s = math.sqrt(max(compute_rho(p) - 1.0, 0.0))
    e = math.copysign(s, p.eta if p.eta != 0 else 1.0)
    if branch is Branch.LOWER:
        e = -e
    num = p.delta - p.gamma * e
    den = p.gamma + p.delta * e
    angle = math.copysign(math.pi / 2, num) if den == 0 else math.atan(num / den)
    return 0.5 * (angle + k * math.pi)


def branch_displacement(p: SystemParams) -> float:
    """Magnitude (kappa/eta) sqrt(rho - 1) of the non-zero branches; 0 below threshold."""
    rho = compute_rho(p)
    if rho <= 1.0:
        return 0.0
    if p.eta == 0:
        raise MirrorDecoupled()
    return abs(p.kappa / p.eta) * math.sqrt(rho - 1.0)


def steady_states(p: SystemParams, k: int = 0) -> list[SteadySolution]:
    """All equilibria at period index k.

    Always contains the Zero solution; for rho > 1 also Upper (x > 0) and Lower (x < 0).
    The Zero solution carries the matching phase when rho equals 1 and the configured
    coupling phase otherwise (the trivial equilibrium exists for any phase).
    """
    rho = compute_rho(p)
    if math.isclose(rho, 1.0, rel_tol=1e-12, abs_tol=0.0):
        zero_phase = phi_matching(p, 0.0, k)
    else:
        zero_phase = p.phi
    solutions = [SteadySolution(branch=Branch.ZERO, x_ss=0.0, phi0=zero_phase, rho=rho, k=k)]
    if rho <= 1.0:
        return solutions

    x = branch_displacement(p)
    for branch, x_ss in ((Branch.UPPER, x), (Branch.LOWER, -x)):
        solutions.append(
            SteadySolution(
                branch=branch, x_ss=x_ss, phi0=phi_matching(p, x_ss, k), rho=rho, k=k
            )
        )
    return solutions


def branch_solution(p: SystemParams, branch: Branch, k: int = 0) -> SteadySolution:
    """The Upper or Lower solution at index k."""
    for sol in steady_states(p, k):
        if sol.branch is branch:
            return sol
    raise BelowThreshold(compute_rho(p))


def branch_phases(
    p: SystemParams, k: int = 0, convention: PhaseConvention = PhaseConvention.EXACT
) -> tuple[float, float] | None:
    """(phi0_upper, phi0_lower) at index k, or None below threshold.

    Within MEETING_TOL of rho = 1 both phases equal the x = 0 matching phase.
    """
    rho = compute_rho(p)
    if abs(rho - 1.0) <= MEETING_TOL:
        if convention is PhaseConvention.TANGENT:
            phase = tangent_phase(p, Branch.UPPER, k)
        else:
            phase = phi_matching(p, 0.0, k)
        return phase, phase
    if rho < 1.0:
        return None
    if convention is PhaseConvention.TANGENT:
        return tangent_phase(p, Branch.UPPER, k), tangent_phase(p, Branch.LOWER, k)
    x = branch_displacement(p)
    return phi_matching(p, x, k), phi_matching(p, -x, k)


def steady_amplitudes(p: SystemParams, solution: SteadySolution) -> tuple[complex, complex]:
    """Zero-phase cavity and atomic amplitudes (a, b) of a steady solution.

    a = sqrt(eta * x / beta) follows from the mirror equilibrium; b from the cavity
    equation. The Zero solution returns (0, 0).

    Raises
    ------
    InconsistentBranch
        When eta * x < 0, which no real photon number can produce.
    """
    from ptcavity.hysteresis.quadrature import b_from_a

    if solution.branch is Branch.ZERO:
        return 0j, 0j
    ex = p.eta * solution.x_ss
    if ex < 0:
        raise InconsistentBranch(
            solution.x_ss, ex, reason="radiation pressure cannot push the mirror inward"
        )
    a = complex(math.sqrt(ex / p.beta_eff), 0.0)
    return a, b_from_a(p.replace(phi=solution.phi0), a)

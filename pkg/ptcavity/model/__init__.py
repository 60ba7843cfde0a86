"""Physical parameters and the steady-state theory."""

from ptcavity.model.steady import (
    atoms_from_coupling,
    balance_residual,
    bogoliubov_drive,
    branch_phases,
    branch_solution,
    compute_rho,
    coupling_from_atoms,
    degenerate_det,
    hopfield_G,
    meeting_delta,
    phi_matching,
    saddle_G,
    steady_amplitudes,
    steady_states,
    tangent_phase,
    threshold_G,
)
from ptcavity.model.types import Branch, PhaseConvention, SteadySolution, SystemParams

__all__ = [
    "Branch",
    "PhaseConvention",
    "SteadySolution",
    "SystemParams",
    "atoms_from_coupling",
    "balance_residual",
    "bogoliubov_drive",
    "branch_phases",
    "branch_solution",
    "compute_rho",
    "coupling_from_atoms",
    "degenerate_det",
    "hopfield_G",
    "meeting_delta",
    "phi_matching",
    "saddle_G",
    "steady_amplitudes",
    "steady_states",
    "tangent_phase",
    "threshold_G",
]

"""Tests for ptcavity.model (parameters, balance equation, branches)."""

import cmath
import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from ptcavity.errors import (
    BelowThreshold,
    InconsistentBranch,
    MirrorDecoupled,
    NoMeetingPoint,
)
from ptcavity.hysteresis.quadrature import b_from_a
from ptcavity.model import (
    atoms_from_coupling,
    coupling_from_atoms,
    hopfield_G,
)
from ptcavity.model.steady import (
    balance_residual,
    bogoliubov_drive,
    branch_displacement,
    branch_phases,
    branch_solution,
    compute_rho,
    degenerate_det,
    meeting_delta,
    phi_matching,
    saddle_G,
    steady_amplitudes,
    steady_states,
    tangent_phase,
    threshold_G,
)
from ptcavity.model.types import Branch, PhaseConvention, SystemParams

# ── Parameters ──────────────────────────────────────────────


def test_defaults(default_params):
    assert default_params.kappa == 1.3
    assert default_params.gamma == 3.0
    assert default_params.delta == 32_000.0
    assert default_params.eta == pytest.approx(math.sqrt(1.8) * 1.3)
    assert default_params.beta_eff == default_params.kappa


def test_rejects_non_positive_rates():
    with pytest.raises(ValidationError):
        SystemParams(kappa=0.0)
    with pytest.raises(ValidationError):
        SystemParams(gamma=-1.0)
    with pytest.raises(ValidationError):
        SystemParams(G=-1.0)


def test_rejects_non_finite():
    with pytest.raises(ValidationError):
        SystemParams(phi=math.inf)
    with pytest.raises(ValidationError):
        SystemParams(delta=math.nan)


def test_absolute_frequencies_must_match_detuning():
    SystemParams(delta=10.0, Omega_abs=100.0, omega0_abs=90.0)
    with pytest.raises(ValidationError):
        SystemParams(delta=10.0, Omega_abs=100.0, omega0_abs=80.0)


def test_replace_validates():
    p = SystemParams()
    assert p.replace(G=3.0).G == 3.0
    with pytest.raises(ValidationError):
        p.replace(kappa=-1.0)


def test_coupling_is_complex():
    p = SystemParams(G=2.0, phi=math.pi / 2)
    assert p.coupling == pytest.approx(2j)


def test_decoupled_mirror_has_no_force():
    assert SystemParams(eta=0.0).force_coefficient == 0.0


# ── Coupling ────────────────────────────────────────────────


def test_hopfield_coupling():
    assert hopfield_G(10.9, 100) == pytest.approx(109.0)
    assert coupling_from_atoms(10.9, 2.5e5) == pytest.approx(5450.0)
    assert atoms_from_coupling(10.9, 109.0) == pytest.approx(100.0)


# ── Characteristic couplings ────────────────────────────────


def test_threshold_near_204_mhz(default_params):
    G_star = threshold_G(default_params)
    assert G_star == pytest.approx(204.0, rel=0.01)
    assert compute_rho(default_params.replace(G=G_star)) == pytest.approx(1.0, rel=1e-12)


def test_saddle_above_threshold(default_params):
    ratio = saddle_G(default_params) / threshold_G(default_params)
    assert ratio == pytest.approx(3**0.25, rel=1e-12)


def test_rho_formula():
    p = SystemParams(kappa=2.0, gamma=3.0, delta=4.0, G=5.0)
    assert compute_rho(p) == pytest.approx((25 / 4) * (25 / 25))


def test_meeting_points_at_204():
    lo, hi = meeting_delta(SystemParams(G=204.0))
    assert hi == pytest.approx(32_012.3, rel=1e-5)
    assert lo == -hi
    assert compute_rho(SystemParams(G=204.0, delta=hi)) == pytest.approx(1.0, rel=1e-9)


def test_no_meeting_point_for_weak_coupling():
    with pytest.raises(NoMeetingPoint) as exc:
        meeting_delta(SystemParams(G=1.0))
    assert exc.value.radicand < 0


# ── Steady states ───────────────────────────────────────────


def test_below_threshold_only_zero(default_params):
    sols = steady_states(default_params)
    assert [s.branch for s in sols] == [Branch.ZERO]
    assert sols[0].x_ss == 0.0
    assert sols[0].phi0 == default_params.phi
    assert branch_phases(default_params) is None


def test_branches_symmetric(above_threshold):
    p = above_threshold
    sols = {s.branch: s for s in steady_states(p)}
    assert set(sols) == {Branch.ZERO, Branch.UPPER, Branch.LOWER}
    assert sols[Branch.UPPER].x_ss > 0
    assert sols[Branch.LOWER].x_ss == -sols[Branch.UPPER].x_ss
    expected = p.kappa / p.eta * math.sqrt(compute_rho(p) - 1)
    assert branch_displacement(p) == pytest.approx(expected)


def test_branch_displacement_just_above_threshold():
    # rho - 1 = 7.694e-4 at G = 204 MHz
    assert branch_displacement(SystemParams(G=204.0)) == pytest.approx(0.020675, rel=1e-3)


def test_branch_solution_below_threshold(default_params):
    with pytest.raises(BelowThreshold):
        branch_solution(default_params, Branch.UPPER)


def test_decoupled_mirror_above_threshold(above_threshold):
    with pytest.raises(MirrorDecoupled):
        steady_states(above_threshold.replace(eta=0.0))


def test_matching_phase_is_pi_periodic(above_threshold):
    x = branch_displacement(above_threshold)
    assert phi_matching(above_threshold, x, 1) - phi_matching(above_threshold, x, 0) == (
        pytest.approx(math.pi)
    )


def test_phi_matching_rejects_foreign_displacement(above_threshold):
    with pytest.raises(InconsistentBranch):
        phi_matching(above_threshold, 123.0)


def test_matched_phase_zeroes_determinant(above_threshold):
    sol = branch_solution(above_threshold, Branch.LOWER, k=1)
    q = above_threshold.replace(phi=sol.phi0)
    assert abs(degenerate_det(q, sol.x_ss)) < 1e-9 * q.G**2


@settings(max_examples=200, deadline=None)
@given(
    kappa=st.floats(0.5, 5.0),
    gamma=st.floats(0.5, 5.0),
    G=st.floats(1.0, 100.0),
    frac=st.floats(-2.0, 2.0),
    k=st.integers(-2, 2),
)
def test_balance_residual_vanishes(kappa, gamma, G, frac, k):
    """Every non-zero branch with its matching phase solves the balance equation."""
    p = SystemParams(kappa=kappa, gamma=gamma, G=G, delta=frac * G * G / kappa)
    assume(compute_rho(p) > 1 + 1e-6)
    for sol in steady_states(p, k):
        if sol.branch is Branch.ZERO:
            continue
        r = balance_residual(p.replace(phi=sol.phi0), sol.x_ss)
        assert abs(r) < 1e-9 * kappa * gamma


def test_branch_phases_meet_at_rho_one():
    p = SystemParams(G=204.0)
    _, hi = meeting_delta(p)
    up, lo = branch_phases(p.replace(delta=hi))
    assert up == lo
    near = branch_phases(p.replace(delta=hi * (1 - 1e-8)))
    assert near is not None
    assert abs(near[0] - near[1]) < 1e-3


@settings(max_examples=200, deadline=None)
@given(
    kappa=st.floats(0.1, 10.0),
    gamma=st.floats(0.1, 10.0),
    delta=st.floats(-1e4, 1e4),
    eta=st.floats(-5.0, 5.0),
    G=st.floats(0.0, 500.0),
    phi=st.floats(-math.pi, math.pi),
    x=st.floats(-1e3, 1e3),
)
def test_determinant_equals_balance_residual(kappa, gamma, delta, eta, G, phi, x):
    """Off the steady-state manifold too, det and the balance residual are one polynomial."""
    p = SystemParams(kappa=kappa, gamma=gamma, delta=delta, eta=eta, G=G, phi=phi)
    scale = G * G + abs(complex(kappa, eta * x)) * abs(complex(gamma, delta))
    assert abs(degenerate_det(p, x) - balance_residual(p, x)) <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(
    kappa=st.floats(0.1, 10.0),
    gamma=st.floats(0.1, 10.0),
    delta=st.floats(-1e3, 1e3),
    G=st.floats(0.1, 500.0),
    lam=st.floats(1e-3, 1e3),
)
def test_rho_is_scale_free(kappa, gamma, delta, G, lam):
    p = SystemParams(kappa=kappa, gamma=gamma, delta=delta, G=G)
    scaled = SystemParams(kappa=lam * kappa, gamma=lam * gamma, delta=lam * delta, G=lam * G)
    assert compute_rho(scaled) == pytest.approx(compute_rho(p), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    kappa=st.floats(0.5, 5.0),
    gamma=st.floats(0.5, 5.0),
    G=st.floats(1.0, 100.0),
    frac=st.floats(-2.0, 2.0),
    k=st.integers(-2, 2),
)
def test_matching_phase_is_never_hermitian(kappa, gamma, G, frac, k):
    """No branch is balanced by a real coupling: phi0 is never a multiple of pi."""
    p = SystemParams(kappa=kappa, gamma=gamma, G=G, delta=frac * G * G / kappa)
    assume(compute_rho(p) > 1 + 1e-6)
    for sol in steady_states(p, k)[1:]:
        assert abs(math.remainder(sol.phi0, math.pi)) > 1e-6


def test_bogoliubov_drive():
    assert bogoliubov_drive(SystemParams(G=2.0, N=9)) == pytest.approx(6.0)
    assert bogoliubov_drive(SystemParams(G=2.0, N=0)) == 0.0


# ── Tangent convention ──────────────────────────────────────


def test_tangent_phase_on_resonance(above_threshold):
    # delta = 0 and eta > 0: tan(2 phi0) = -eta*x/kappa
    s = math.sqrt(compute_rho(above_threshold) - 1)
    assert tangent_phase(above_threshold, Branch.UPPER) == pytest.approx(-0.5 * math.atan(s))
    assert tangent_phase(above_threshold, Branch.LOWER) == pytest.approx(0.5 * math.atan(s))


def test_tangent_phase_sign_follows_eta(above_threshold):
    flipped = above_threshold.replace(eta=-above_threshold.eta)
    assert tangent_phase(flipped, Branch.UPPER) == tangent_phase(above_threshold, Branch.LOWER)
    assert tangent_phase(flipped, Branch.LOWER) == tangent_phase(above_threshold, Branch.UPPER)


def test_tangent_phase_steps_by_half_pi(above_threshold):
    step = tangent_phase(above_threshold, Branch.UPPER, 1) - tangent_phase(
        above_threshold, Branch.UPPER, 0
    )
    assert step == pytest.approx(math.pi / 2)


def test_branch_phases_tangent(above_threshold):
    up, lo = branch_phases(above_threshold, 0, PhaseConvention.TANGENT)
    assert up == tangent_phase(above_threshold, Branch.UPPER)
    assert lo == tangent_phase(above_threshold, Branch.LOWER)


@settings(max_examples=200, deadline=None)
@given(
    kappa=st.floats(0.5, 5.0),
    gamma=st.floats(0.5, 5.0),
    G=st.floats(1.0, 100.0),
    frac=st.floats(-2.0, 2.0),
    eta_sign=st.sampled_from([-1.0, 1.0]),
)
def test_tangent_phase_agrees_with_matching_phase(kappa, gamma, G, frac, eta_sign):
    """Same tan(2 phi0) as the exact phase; exactly one k parity balances each branch."""
    p = SystemParams(
        kappa=kappa, gamma=gamma, G=G, delta=frac * G * G / kappa, eta=eta_sign * 1.7
    )
    assume(compute_rho(p) > 1 + 1e-6)
    x = branch_displacement(p)
    for branch, x_ss in ((Branch.UPPER, x), (Branch.LOWER, -x)):
        exact = phi_matching(p, x_ss)
        closed = tangent_phase(p, branch)
        assert cmath.exp(4j * closed) == pytest.approx(cmath.exp(4j * exact), abs=1e-8)
        balanced = [
            abs(balance_residual(p.replace(phi=tangent_phase(p, branch, k)), x_ss)) < 1e-8 * G * G
            for k in (0, 1)
        ]
        assert balanced.count(True) == 1


# ── Amplitudes ──────────────────────────────────────────────


def test_steady_amplitudes_upper(above_threshold):
    sol = branch_solution(above_threshold, Branch.UPPER)
    a, b = steady_amplitudes(above_threshold, sol)
    assert a.imag == 0 and a.real > 0
    assert abs(a) ** 2 == pytest.approx(above_threshold.eta * sol.x_ss / above_threshold.beta_eff)
    assert b == pytest.approx(b_from_a(above_threshold.replace(phi=sol.phi0), a))


def test_steady_amplitudes_zero(above_threshold):
    zero = steady_states(above_threshold)[0]
    assert steady_amplitudes(above_threshold, zero) == (0j, 0j)


def test_lower_branch_has_no_photon_number(above_threshold):
    sol = branch_solution(above_threshold, Branch.LOWER)
    with pytest.raises(InconsistentBranch):
        steady_amplitudes(above_threshold, sol)

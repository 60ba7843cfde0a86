"""Tests for ptcavity.hysteresis (quadrature cubic, folds, multistability)."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ptcavity.errors import BelowThreshold, ZeroCoupling
from ptcavity.hysteresis import (
    HysteresisCurve,
    RootTag,
    b_from_a,
    branch_phase,
    cubic_coefficients,
    fold_interval,
    invert_map,
    multistability_count,
    quadrature_map,
    tag_roots,
    trace_curve,
)
from ptcavity.model.steady import tangent_phase
from ptcavity.model.types import Branch, PhaseConvention, SystemParams

FOLD_PHASE = -math.pi / 4  # cos > 0, sin < 0


@pytest.fixture
def strong() -> SystemParams:
    """G = 345 MHz on resonance."""
    return SystemParams(G=345.0, delta=0.0)


# ── Amplitude relation ──────────────────────────────────────


def test_b_from_a_zero():
    assert b_from_a(SystemParams(G=2.0), 0j) == 0j


def test_b_from_a_needs_coupling():
    with pytest.raises(ZeroCoupling):
        b_from_a(SystemParams(G=0.0), 1.0 + 0j)
    with pytest.raises(ZeroCoupling):
        cubic_coefficients(SystemParams(G=0.0), 0.3)


def test_b_from_a_balances_cavity_equation():
    """With x at the mirror equilibrium the cavity amplitude is stationary."""
    p = SystemParams(G=2.0, phi=0.4)
    a = 0.3 - 0.7j
    b = b_from_a(p, a)
    x = p.beta_eff * abs(a) ** 2 / p.eta
    da = (1j * p.eta * x - p.kappa) * a - 1j * p.coupling * b
    assert abs(da) < 1e-12


# ── Cubic and folds ─────────────────────────────────────────


def test_map_is_odd():
    p = SystemParams(G=2.0)
    X = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(quadrature_map(p, 0.7, -X), -quadrature_map(p, 0.7, X))


def test_fold_criterion():
    p = SystemParams(G=2.0)
    c3, c1 = cubic_coefficients(p, FOLD_PHASE)
    assert c3 > 0 > c1
    lo, hi = fold_interval(c3, c1)
    assert lo == -hi
    assert fold_interval(*cubic_coefficients(p, math.pi / 4)) is None


def test_fold_edges_at_turning_points():
    p = SystemParams(G=2.0)
    c3, c1 = cubic_coefficients(p, FOLD_PHASE)
    t = math.sqrt(-c1 / (3 * c3))
    _, hi = fold_interval(c3, c1)
    assert quadrature_map(p, FOLD_PHASE, -t) == pytest.approx(hi)
    assert 3 * c3 * t * t + c1 == pytest.approx(0.0, abs=1e-15)


def test_one_three_one_sequence():
    p = SystemParams(G=2.0)
    _, hi = fold_interval(*cubic_coefficients(p, FOLD_PHASE))
    counts = [len(invert_map(p, FOLD_PHASE, s * hi)) for s in (-2.0, -0.5, 0.0, 0.5, 2.0)]
    assert counts == [1, 3, 3, 3, 1]


def test_two_roots_at_fold_edge():
    p = SystemParams(G=2.0)
    _, hi = fold_interval(*cubic_coefficients(p, FOLD_PHASE))
    assert len(invert_map(p, FOLD_PHASE, hi)) == 2
    assert len(invert_map(p, FOLD_PHASE, -hi)) == 2


def test_monotone_map_single_root():
    p = SystemParams(G=2.0)
    for xb in (-5.0, 0.0, 1e-3, 5.0):
        assert len(invert_map(p, math.pi / 4, xb)) == 1


def test_tag_roots():
    tags = [r.tag for r in tag_roots([-1.0, 0.0, 1.0])]
    assert tags == [RootTag.OUTER, RootTag.INNER, RootTag.OUTER]
    assert [r.tag for r in tag_roots([0.5])] == [RootTag.MONO]
    assert [r.tag for r in tag_roots([-1.0, 0.5])] == [RootTag.OUTER, RootTag.OUTER]


@settings(max_examples=200, deadline=None)
@given(
    G=st.floats(1.0, 100.0),
    phi0=st.floats(-math.pi, math.pi),
    X_b=st.floats(-10.0, 10.0),
)
def test_inversion_matches_polynomial_roots(G, phi0, X_b):
    assume(abs(math.cos(phi0)) > 1e-3 and abs(math.sin(phi0)) > 1e-3)
    p = SystemParams(G=G)
    c3, c1 = cubic_coefficients(p, phi0)
    fold = fold_interval(c3, c1)
    if fold is not None:
        assume(abs(abs(X_b) - fold[1]) > 1e-3 * fold[1])
    roots = invert_map(p, phi0, X_b)
    reference = [r for r in np.roots([c3, 0.0, c1, -X_b]) if abs(r.imag) <= 1e-6 * max(1, abs(r))]
    assert len(roots) == len(reference)
    assert roots == sorted(roots)
    for r in roots:
        assert abs(quadrature_map(p, phi0, r) - X_b) < 1e-9 * max(1.0, abs(X_b))


# ── Branch level ────────────────────────────────────────────


def test_branch_phase_below_threshold():
    with pytest.raises(BelowThreshold):
        branch_phase(SystemParams(G=1.0), Branch.UPPER)


def test_branch_phase_tangent(strong):
    assert branch_phase(strong, Branch.LOWER, 1, PhaseConvention.TANGENT) == tangent_phase(
        strong, Branch.LOWER, 1
    )


def test_only_lower_folds_on_resonance(strong):
    upper = trace_curve(strong, Branch.UPPER)
    lower = trace_curve(strong, Branch.LOWER)
    assert upper.fold is None
    assert lower.fold is not None
    assert lower.turning_points == pytest.approx((-math.sqrt(4 / 3), math.sqrt(4 / 3)), rel=1e-3)


def test_fold_width_asymmetric_in_detuning():
    """Opposite detunings give different fold widths of the Lower branch."""
    widths = []
    for d in (-1.5, 1.5):
        curve = trace_curve(SystemParams(G=345.0, delta=d), Branch.LOWER)
        assert curve.fold is not None
        widths.append(curve.fold[1])
    assert widths[0] > 2 * widths[1]


def test_multistability_counts_on_resonance(strong):
    edge = trace_curve(strong, Branch.LOWER).fold[1]

    at_zero = multistability_count(strong, 0, 0.0)
    assert at_zero.total == 3
    assert at_zero.stable_count == 3

    inside = multistability_count(strong, 0, 0.5 * edge)
    assert len(inside.per_branch[Branch.LOWER]) == 3
    assert len(inside.per_branch[Branch.UPPER]) == 1
    assert inside.total == 4
    assert inside.stable_count == 3

    outside = multistability_count(strong, 0, 2.0 * edge)
    assert outside.total == 2
    assert outside.stable_count == 2


def test_stable_count_keeps_mono_roots(strong):
    m = multistability_count(strong, 0, 0.0)
    assert [r.tag for r in m.per_branch[Branch.UPPER]] == [RootTag.MONO]
    assert [r.tag for r in m.per_branch[Branch.LOWER]] == [
        RootTag.OUTER,
        RootTag.INNER,
        RootTag.OUTER,
    ]


# ── Tangent convention ──────────────────────────────────────


def _tangent_curves(delta: float) -> dict[Branch, HysteresisCurve]:
    p = SystemParams(G=345.0, delta=delta)
    return {
        b: trace_curve(p, b, 0, convention=PhaseConvention.TANGENT)
        for b in (Branch.UPPER, Branch.LOWER)
    }


def test_tangent_only_upper_folds_on_resonance(strong):
    curves = _tangent_curves(0.0)
    assert curves[Branch.UPPER].fold is not None
    assert curves[Branch.LOWER].fold is None
    m = multistability_count(strong, 0, 0.0, PhaseConvention.TANGENT)
    assert m.total == 3
    assert m.stable_count == 3


def test_tangent_folds_mirror_in_detuning():
    """Both branches fold at delta = +1.5 MHz and neither does at -1.5 MHz."""
    plus, minus = _tangent_curves(1.5), _tangent_curves(-1.5)
    assert all(c.fold is not None for c in plus.values())
    assert all(c.fold is None for c in minus.values())

    tangent = PhaseConvention.TANGENT
    at_plus = multistability_count(SystemParams(G=345.0, delta=1.5), 0, 0.0, tangent)
    assert at_plus.total == 5
    assert at_plus.stable_count == 4
    for xb in (0.0, 0.1, 1.0):
        at_minus = multistability_count(SystemParams(G=345.0, delta=-1.5), 0, xb, tangent)
        assert at_minus.total <= 2


def test_trace_curve_samples(strong):
    curve = trace_curve(strong, Branch.LOWER, n=101)
    assert curve.samples.shape == (101, 2)
    X_a, X_b = curve.samples[:, 0], curve.samples[:, 1]
    np.testing.assert_allclose(X_b, quadrature_map(strong, curve.phi0, X_a), rtol=1e-12)
    t = curve.turning_points[1]
    assert X_a[-1] == pytest.approx(3 * t)


def test_trace_curve_custom_range(strong):
    curve = trace_curve(strong, Branch.UPPER, x_a_range=(-1.0, 2.0), n=4)
    np.testing.assert_allclose(curve.samples[:, 0], [-1.0, 0.0, 1.0, 2.0])


def test_trace_curve_needs_two_samples(strong):
    with pytest.raises(ValueError):
        trace_curve(strong, Branch.UPPER, n=1)

"""Seeded invariant suites behind ``ptcavity verify``.

Each suite draws from its own generator ``default_rng([seed, index])`` so that
suites are independent of each other's draw counts. The report carries no
timestamps or paths and serializes with sorted keys, so equal seeds give
byte-identical reports.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from loguru import logger

from ptcavity.__version__ import __version__
from ptcavity.core.config.schema import RunConfig
from ptcavity.dynamics.integrator import (
    ModeState,
    Terminal,
    derivatives,
    integrate,
    linear_solution,
    settle,
)
from ptcavity.hysteresis.quadrature import (
    cubic_coefficients,
    fold_interval,
    invert_map,
    multistability_count,
    quadrature_map,
)
from ptcavity.model.steady import (
    balance_residual,
    branch_phases,
    compute_rho,
    meeting_delta,
    steady_amplitudes,
    steady_states,
    threshold_G,
)
from ptcavity.model.types import Branch, PhaseConvention, SystemParams
from ptcavity.spectral.gain import (
    BALANCE_TOL,
    SweepAxis,
    gain_center_phi,
    gain_map,
    gain_margin,
    net_gain_rate,
)


@dataclass
class SuiteResult:
    """Outcome of one suite: case and failure counts plus diagnostic values."""

    suite: str
    cases: int = 0
    failures: int = 0
    tolerances: dict[str, float] = field(default_factory=dict)
    observations: dict[str, Any] = field(default_factory=dict)
    failed_examples: list[dict[str, Any]] = field(default_factory=list)

    def check(self, ok: bool, **example: Any) -> None:
        self.cases += 1
        if not ok:
            self.failures += 1
            if len(self.failed_examples) < 5:
                self.failed_examples.append(example)

    def as_dict(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "cases": self.cases,
            "failures": self.failures,
            "tolerances": self.tolerances,
            "observations": self.observations,
            "failed_examples": self.failed_examples,
        }


def _log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(10 ** rng.uniform(math.log10(lo), math.log10(hi)))


def _draw_above_threshold(rng: np.random.Generator, g_max: float = 100.0) -> SystemParams:
    """Random parameters with rho > 1: log-uniform G, kappa, gamma; delta over +-2G^2/kappa."""
    while True:
        kappa = _log_uniform(rng, 0.5, 5.0)
        gamma = _log_uniform(rng, 0.5, 5.0)
        G = _log_uniform(rng, 1.0, g_max)
        span = 2 * G * G / kappa
        delta = float(rng.uniform(-span, span))
        p = SystemParams(kappa=kappa, gamma=gamma, G=G, delta=delta)
        if compute_rho(p) > 1.0 + 1e-6:
            return p


# ════════════════════════════════════════════════════════════
# STEADY STATES
# ════════════════════════════════════════════════════════════


def suite_threshold(cfg: RunConfig, rng: np.random.Generator) -> SuiteResult:
    res = SuiteResult("branch_threshold", tolerances={"relative": 0.01})
    p = SystemParams(delta=32_000.0)
    G_star = threshold_G(p)
    res.check(abs(G_star - 204.0) / 204.0 < 0.01, G=G_star)
    res.check(math.isclose(compute_rho(p.replace(G=G_star)), 1.0, rel_tol=1e-12), G=G_star)
    res.check(compute_rho(p.replace(G=G_star * (1 - 1e-9))) < 1.0, G=G_star)
    res.observations["threshold_G"] = G_star
    return res


def suite_balance(cfg: RunConfig, rng: np.random.Generator) -> SuiteResult:
    res = SuiteResult("balance_residual", tolerances={"residual_over_kappa_gamma": 1e-9})
    worst = 0.0
    for _ in range(cfg.verify.balance_draws):
        p = _draw_above_threshold(rng)
        for k in range(-2, 3):
            for sol in steady_states(p, k):
                if sol.branch is Branch.ZERO:
                    continue
                r = abs(balance_residual(p.replace(phi=sol.phi0), sol.x_ss))
                ratio = r / (p.kappa * p.gamma)
                worst = max(worst, ratio)
                res.check(ratio < 1e-9, G=p.G, delta=p.delta, k=k, branch=sol.branch, ratio=ratio)
    res.observations["worst_ratio"] = worst
    return res


def suite_steady_equality(cfg: RunConfig, rng: np.random.Generator) -> SuiteResult:
    res = SuiteResult(
        "steady_equality",
        tolerances={"margin_over_kg_K2": 1e-6, "rate_over_K": 1e-6},
    )
    for _ in range(max(1, cfg.verify.balance_draws // 5)):
        p = _draw_above_threshold(rng, g_max=30.0)
        K = p.kappa + p.gamma
        for sol in steady_states(p, int(rng.integers(-2, 3))):
            if sol.branch is Branch.ZERO:
                continue
            q = p.replace(phi=sol.phi0)
            margin = gain_margin(q, sol.x_ss)
            rate = net_gain_rate(q, sol.x_ss)
            res.check(
                abs(margin) < 1e-6 * p.kappa * p.gamma * K * K and abs(rate) < 1e-6 * K,
                G=p.G,
                delta=p.delta,
                branch=sol.branch,
                margin=margin,
                rate=rate,
            )
    return res


def suite_meeting(cfg: RunConfig, rng: np.random.Generator) -> SuiteResult:
    res = SuiteResult("meeting_points", tolerances={"phase_rad": 1e-6})
    p = SystemParams(G=204.0)
    lo, hi = meeting_delta(p)
    for d in (lo, hi):
        phases = branch_phases(p.replace(delta=d), 0)
        ok = phases is not None and abs(phases[0] - phases[1]) < 1e-6
        res.check(ok, delta=d, phases=phases)
    near = branch_phases(p.replace(delta=hi * (1 - 1e-8)), 0)
    res.check(near is not None and abs(near[0] - near[1]) < 1e-3, delta=hi, phases=near)
    res.check(abs(hi - 32_012.0) / 32_012.0 < 1e-3, delta=hi)
    res.observations["meeting_delta"] = [lo, hi]
    return res


# ════════════════════════════════════════════════════════════
# GAIN
# ════════════════════════════════════════════════════════════


def suite_gain_oracle(cfg: RunConfig, rng: np.random.Generator) -> SuiteResult:
    res = SuiteResult("gain_oracle", tolerances={"balanced_band_over_K": BALANCE_TOL})
    skipped = 0
    for _ in range(cfg.verify.gain_draws):
        p = SystemParams(
            kappa=_log_uniform(rng, 0.1, 10.0),
            gamma=_log_uniform(rng, 0.1, 10.0),
            delta=float(rng.uniform(-50.0, 50.0)),
            G=_log_uniform(rng, 0.1, 100.0),
            phi=float(rng.uniform(0.0, 2 * math.pi)),
        )
        x = float(rng.uniform(-10.0, 10.0))
        rate = net_gain_rate(p, x)
        if abs(rate) <= BALANCE_TOL * (p.kappa + p.gamma):
            skipped += 1
            continue
        margin = gain_margin(p, x)
        res.check((margin > 0) == (rate > 0), G=p.G, phi=p.phi, x=x, margin=margin, rate=rate)
    res.observations["balanced_skipped"] = skipped
    return res


def suite_contour_centers(cfg: RunConfig, rng: np.random.Generator) -> SuiteResult:
    n = cfg.verify.contour_grid
    res = SuiteResult("contour_centers", tolerances={"grid_cells": 1.0})
    p = SystemParams(G=1000.0)
    rows = SweepAxis(name="delta", min=-1e6, max=1e6, count=n)
    cols = SweepAxis(name="phi", min=0.0, max=math.pi, count=n)
    grid = gain_map(p, rows, cols)
    i0 = int(np.argmin(np.abs(grid.rows)))
    j = int(np.argmax(grid.margin[i0]))
    phi_star = float(grid.cols[j])
    cell = float(grid.cols[1] - grid.cols[0])
    centers = [gain_center_phi(p, k, s) for k in range(-1, 3) for s in (1, -1)]
    nearest = min(centers, key=lambda c: abs(c - phi_star))
    res.check(abs(nearest - phi_star) <= cell, phi=phi_star, center=nearest, cell=cell)
    res.check(bool(np.any(grid.classification[i0] == "NetGain")), row=i0)
    res.observations.update({"argmax_phi": phi_star, "nearest_center": nearest})
    return res


# ════════════════════════════════════════════════════════════
# HYSTERESIS
# ════════════════════════════════════════════════════════════


def suite_hysteresis(cfg: RunConfig, rng: np.random.Generator) -> SuiteResult:
    """Fold criterion vs brute force, inversion residuals, 1-3-1 counts; counts reported."""
    h = cfg.hysteresis
    res = SuiteResult(
        "hysteresis",
        tolerances={"inversion_residual": 1e-9, "distinct_roots": 1e-8},
    )
    for d in h.deltas:
        p = SystemParams(G=h.G, delta=float(d))
        tag = f"{d:+g}"
        edges: list[float] = []
        for branch in (Branch.UPPER, Branch.LOWER):
            phi0 = branch_phases(p, h.k, h.convention)[0 if branch is Branch.UPPER else 1]
            c3, c1 = cubic_coefficients(p, phi0)
            fold = fold_interval(c3, c1)
            x_in = 0.5 * fold[1] if fold else 0.0
            brute = _sign_changes(p, phi0, x_in, c3, c1)
            res.check(len(invert_map(p, phi0, x_in)) == brute, delta=d, branch=branch)
            res.check((fold is not None) == (c3 * c1 < 0), delta=d, branch=branch)
            for xb in (-x_in, x_in, 1e-3, 10.0):
                for r in invert_map(p, phi0, xb):
                    err = abs(quadrature_map(p, phi0, r) - xb)
                    res.check(err < 1e-9 * max(1.0, abs(xb)), delta=d, X_b=xb, err=err)
            if fold:
                edges.append(fold[1])
                seq = [len(invert_map(p, phi0, s * fold[1])) for s in (-2.0, 0.0, 2.0)]
                res.check(seq == [1, 3, 1], delta=d, branch=branch, seq=seq)

        reach = 1.5 * max(edges) if edges else 1.0
        totals, stable = [], []
        for xb in np.linspace(-reach, reach, 401):
            m = multistability_count(p, h.k, float(xb), h.convention)
            totals.append(m.total)
            stable.append(m.stable_count)
        res.observations[tag] = {
            "folds": len(edges),
            "max_total": max(totals),
            "max_stable_count": max(stable),
            "min_total": min(totals),
        }
    _check_tangent_folds(res)
    return res


# Reference multistability point: G = 345 MHz at delta = 0 and +-1.5 MHz
TANGENT_G = 345.0
TANGENT_DELTA = 1.5


def _check_tangent_folds(res: SuiteResult) -> None:
    """Fold pattern of the closed arctangent phases (k = 0) at the reference point.

    On resonance only Upper folds and X_b = 0 has three stable roots. Off resonance the
    pattern is mirrored: both branches fold at +delta and neither does at -delta.
    """
    tangent = PhaseConvention.TANGENT
    summary: dict[str, dict[str, int]] = {}
    for d in (0.0, TANGENT_DELTA, -TANGENT_DELTA):
        p = SystemParams(G=TANGENT_G, delta=d)
        upper, lower = branch_phases(p, 0, tangent)
        folded = {
            b.value: fold_interval(*cubic_coefficients(p, phi0)) is not None
            for b, phi0 in ((Branch.UPPER, upper), (Branch.LOWER, lower))
        }
        m = multistability_count(p, 0, 0.0, tangent)
        summary[f"{d:+g}"] = {
            "folds": sum(folded.values()),
            "total": m.total,
            "stable_count": m.stable_count,
        }
        if d == 0:
            res.check(folded["Upper"] and not folded["Lower"], delta=d, folded=folded)
            res.check(m.stable_count == 3, delta=d, stable=m.stable_count)
    plus = summary[f"{TANGENT_DELTA:+g}"]
    minus = summary[f"{-TANGENT_DELTA:+g}"]
    res.check(plus["folds"] == 2 and minus["folds"] == 0, plus=plus, minus=minus)
    res.check(plus["total"] != minus["total"], plus=plus, minus=minus)
    res.observations["tangent_k0"] = summary


def _sign_changes(p: SystemParams, phi0: float, X_b: float, c3: float, c1: float) -> int:
    """Roots of the cubic at X_b counted by sign changes on 1e5 samples."""
    t = math.sqrt(abs(c1 / c3)) if c3 else 1.0
    reach = 4.0 * max(t, abs(X_b / c3) ** (1 / 3) if c3 else abs(X_b / c1))
    # Slightly asymmetric grid so that no sample lands on a root
    X = np.linspace(-reach, 1.000123 * reach, 100_000)
    s = np.sign(quadrature_map(p, phi0, X) - X_b)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


# ════════════════════════════════════════════════════════════
# DYNAMICS
# ════════════════════════════════════════════════════════════


def _random_state(rng: np.random.Generator, scale: float) -> ModeState:
    z = rng.normal(size=4) * scale
    return ModeState(a=complex(z[0], z[1]), b=complex(z[2], z[3]))


def suite_linear_oracle(cfg: RunConfig, rng: np.random.Generator) -> SuiteResult:
    res = SuiteResult("dynamics_linear_oracle", tolerances={"relative": 1e-6})
    for _ in range(5):
        p = SystemParams(
            kappa=float(rng.uniform(0.5, 3.0)),
            gamma=float(rng.uniform(0.5, 3.0)),
            delta=float(rng.uniform(-2.0, 2.0)),
            G=float(rng.uniform(0.2, 2.0)),
            phi=float(rng.uniform(0.0, math.pi)),
            eta=0.0,
        )
        s0 = _random_state(rng, 1.0)
        T = 10.0 / min(p.kappa, p.gamma)
        dt = 0.01 / max(p.kappa, p.gamma, abs(p.delta), p.G)
        traj = integrate(p, s0, dt, T, stride=50)
        exact = linear_solution(p, s0, traj.times)
        err = float(np.max(np.abs(traj.states[:, :2] - exact)))
        rel = err / float(np.max(np.abs(exact)))
        res.check(rel < 1e-6, kappa=p.kappa, gamma=p.gamma, rel=rel)
    return res


def suite_convergence(cfg: RunConfig, rng: np.random.Generator) -> SuiteResult:
    res = SuiteResult("dynamics_convergence", tolerances={"ratio_min": 12.0, "ratio_max": 20.0})
    p = SystemParams(kappa=1.3, gamma=3.0, delta=1.0, G=1.5, phi=0.3, eta=0.0)
    s0 = ModeState(a=1.0 + 0j)
    T = 2.0
    errors = []
    for dt in (0.05, 0.025):
        traj = integrate(p, s0, dt, T, stride=10_000)
        exact = linear_solution(p, s0, traj.times[-1])[0]
        errors.append(float(np.max(np.abs(traj.states[-1, :2] - exact))))
    ratio = errors[0] / errors[1]
    res.check(12.0 <= ratio <= 20.0, ratio=ratio)
    res.observations["ratio"] = ratio
    return res


def suite_settle_coherence(cfg: RunConfig, rng: np.random.Generator) -> SuiteResult:
    """settle() outcome vs spectral class in the linearized regime (tiny beta, mirror at rest)."""
    res = SuiteResult("dynamics_settle_coherence", tolerances={"min_rate_over_K": 0.2})
    drawn = 0
    while drawn < cfg.verify.settle_draws:
        p = SystemParams(
            kappa=_log_uniform(rng, 0.5, 5.0),
            gamma=_log_uniform(rng, 0.5, 5.0),
            delta=float(rng.uniform(-5.0, 5.0)),
            G=_log_uniform(rng, 0.1, 10.0),
            phi=float(rng.uniform(0.0, math.pi)),
            beta=1e-24,
            Gamma_m=1.0,
            omega_M=1.0,
        )
        rate = net_gain_rate(p, 0.0)
        if abs(rate) < 0.2 * (p.kappa + p.gamma):
            continue
        drawn += 1
        s0 = _random_state(rng, 1e-3)
        dt = 0.05 / max(p.kappa, p.gamma, abs(p.delta), p.G, p.omega_M)
        out = settle(p, s0, T_max=40.0 / abs(rate), dt=dt)
        expected = Terminal.DIVERGED if rate > 0 else Terminal.DECAYED
        res.check(out.terminal is expected, rate=rate, terminal=out.terminal)
    return res


def suite_fixed_points(cfg: RunConfig, rng: np.random.Generator) -> SuiteResult:
    res = SuiteResult("dynamics_fixed_points", tolerances={"derivative_over_K_norm": 1e-8})
    for _ in range(50):
        p = _draw_above_threshold(rng)
        sol = next(s for s in steady_states(p) if s.branch is Branch.UPPER)
        a, b = steady_amplitudes(p, sol)
        q = p.replace(phi=sol.phi0)
        s = ModeState(a=a, b=b, x=sol.x_ss)
        ratio = derivatives(q, s).norm() / ((p.kappa + p.gamma) * s.norm())
        res.check(ratio < 1e-8, G=p.G, delta=p.delta, ratio=ratio)
    return res


# ════════════════════════════════════════════════════════════
# RUNNER
# ════════════════════════════════════════════════════════════

SUITES: list[tuple[str, Callable[[RunConfig, np.random.Generator], SuiteResult]]] = [
    ("branch_threshold", suite_threshold),
    ("balance_residual", suite_balance),
    ("gain_oracle", suite_gain_oracle),
    ("steady_equality", suite_steady_equality),
    ("hysteresis", suite_hysteresis),
    ("meeting_points", suite_meeting),
    ("contour_centers", suite_contour_centers),
    ("dynamics_linear_oracle", suite_linear_oracle),
    ("dynamics_convergence", suite_convergence),
    ("dynamics_settle_coherence", suite_settle_coherence),
    ("dynamics_fixed_points", suite_fixed_points),
]


def run_suites(cfg: RunConfig, only: list[str] | None = None) -> dict[str, Any]:
    """Run the selected suites and return the report document."""
    seed = cfg.verify.seed
    results = []
    for index, (name, fn) in enumerate(SUITES):
        if only and name not in only:
            continue
        res = fn(cfg, np.random.default_rng([seed, index]))
        level = "INFO" if res.failures == 0 else "WARNING"
        logger.log(level, f"suite {name}: {res.cases} cases, {res.failures} failures")
        results.append(res.as_dict())
    return {
        "version": __version__,
        "seed": seed,
        "suites": results,
        "cases": sum(r["cases"] for r in results),
        "failures": sum(r["failures"] for r in results),
    }

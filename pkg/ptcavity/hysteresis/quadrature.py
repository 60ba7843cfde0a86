"""Input-output hysteresis between the atomic and cavity quadratures.

With the common phase of the steady amplitudes fixed to zero, the atomic quadrature
X_b depends on the cavity quadrature X_a through the odd cubic

    X_b = c3 X_a^3 + c1 X_a,    c3 = beta cos(phi0) / (4G),    c1 = kappa sin(phi0) / G

Reading X_b as the input, the cubic folds (three real X_a) when c3 * c1 < 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from ptcavity.errors import BelowThreshold, ZeroCoupling
from ptcavity.model.steady import branch_solution, compute_rho, tangent_phase
from ptcavity.model.types import Branch, PhaseConvention, SystemParams

# Roots closer than this (quadrature units) are the same valuation
DISTINCT_TOL = 1e-8


class RootTag(str, Enum):
    """Position of a root in the inversion of one branch cubic."""

    OUTER = "outer"
    INNER = "inner"
    MONO = "mono"


@dataclass(frozen=True, slots=True)
class QuadratureRoot:
    value: float
    tag: RootTag


@dataclass(frozen=True)
class HysteresisCurve:
    """Sampled X_b(X_a) relation of one branch at period index k."""

    branch: Branch
    k: int
    phi0: float
    c3: float
    c1: float
    samples: np.ndarray  # shape (n, 2): columns X_a, X_b
    fold: tuple[float, float] | None

    @property
    def turning_points(self) -> tuple[float, float] | None:
        if self.fold is None:
            return None
        t = math.sqrt(-self.c1 / (3 * self.c3))
        return -t, t


@dataclass(frozen=True)
class Multistability:
    """Inversions of both branch cubics at one input quadrature."""

    X_b: float
    per_branch: dict[Branch, list[QuadratureRoot]] = field(default_factory=dict)
    union: list[float] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.union)

    @property
    def stable_count(self) -> int:
        """Distinct outer and mono roots; the middle root of a fold is left out."""
        kept = [
            r.value
            for roots in self.per_branch.values()
            for r in roots
            if r.tag is not RootTag.INNER
        ]
        return len(_distinct(kept))


# ════════════════════════════════════════════════════════════
# AMPLITUDE AND QUADRATURE RELATIONS
# ════════════════════════════════════════════════════════════


def b_from_a(p: SystemParams, a: complex) -> complex:
    """Steady atomic amplitude for cavity amplitude a: (beta|a|^2 + i kappa) a / (G e^{i phi})."""
    if p.G == 0:
        raise ZeroCoupling()
    return (p.beta_eff * abs(a) ** 2 + 1j * p.kappa) * a / p.coupling


def cubic_coefficients(p: SystemParams, phi0: float) -> tuple[float, float]:
    """(c3, c1) of the quadrature cubic at matching phase phi0."""
    if p.G == 0:
        raise ZeroCoupling()
    return p.beta_eff * math.cos(phi0) / (4 * p.G), p.kappa * math.sin(phi0) / p.G


def quadrature_map(p: SystemParams, phi0: float, X_a: float | np.ndarray) -> float | np.ndarray:
    """Atomic quadrature X_b for cavity quadrature X_a."""
    c3, c1 = cubic_coefficients(p, phi0)
    return X_a * (c3 * X_a * X_a + c1)


def fold_interval(c3: float, c1: float) -> tuple[float, float] | None:
    """Input interval (X_b_low, X_b_high) with three inversions, or None without a fold."""
    if c3 * c1 >= 0:
        return None
    t = math.sqrt(-c1 / (3 * c3))
    edge = abs(2.0 / 3.0 * c1 * t)
    return -edge, edge


def _distinct(values: list[float]) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or abs(v - out[-1]) > DISTINCT_TOL:
            out.append(v)
    return out


def _cubic_roots(c3: float, c1: float, X_b: float) -> list[float]:
    """Real roots of c3 X^3 + c1 X - X_b, bracketed between turning points and polished."""
    if c3 == 0:
        if c1 == 0:
            return [0.0] if X_b == 0 else []
        return [X_b / c1]

    def f(X: float) -> float:
        return X * (c3 * X * X + c1) - X_b

    bound = 1.0 + max(abs(c1 / c3), abs(X_b / c3)) ** 0.5 + abs(X_b / c3) ** (1 / 3)
    if c3 * c1 < 0:
        t = math.sqrt(-c1 / (3 * c3))
        knots = [-bound - t, -t, t, bound + t]
    else:
        t = 0.0
        knots = [-bound, bound]

    scale = max(abs(X_b), abs(c1) * max(t, 1.0), abs(c3) * max(t, 1.0) ** 3)
    values = [f(knot) for knot in knots]
    # A turning point within rounding of X_b is a double root
    for i in range(1, len(knots) - 1):
        if abs(values[i]) <= 1e-12 * scale:
            values[i] = 0.0
    roots: list[float] = []
    for i in range(len(knots) - 1):
        lo, hi = knots[i], knots[i + 1]
        flo, fhi = values[i], values[i + 1]
        if flo == 0:
            roots.append(lo)
        elif flo * fhi < 0:
            roots.append(brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))
    if values[-1] == 0:
        roots.append(knots[-1])

    merge = 1e-9 * max(1.0, t)
    out: list[float] = []
    for r in sorted(roots):
        if not out or abs(r - out[-1]) > merge:
            out.append(r)
    return out


def invert_map(p: SystemParams, phi0: float, X_b: float) -> list[float]:
    """All real X_a with quadrature_map(X_a) = X_b, ascending (1, 2 or 3 values)."""
    c3, c1 = cubic_coefficients(p, phi0)
    return _cubic_roots(c3, c1, X_b)


def tag_roots(roots: list[float]) -> list[QuadratureRoot]:
    """Tag a lone root mono; in a fold the middle root is inner and the others outer."""
    if len(roots) == 1:
        return [QuadratureRoot(roots[0], RootTag.MONO)]
    return [
        QuadratureRoot(r, RootTag.INNER if len(roots) == 3 and i == 1 else RootTag.OUTER)
        for i, r in enumerate(roots)
    ]


# ════════════════════════════════════════════════════════════
# BRANCH-LEVEL
# ════════════════════════════════════════════════════════════


def branch_phase(
    p: SystemParams,
    branch: Branch,
    k: int = 0,
    convention: PhaseConvention = PhaseConvention.EXACT,
) -> float:
    """Matching phase of a non-zero branch under the chosen convention."""
    rho = compute_rho(p)
    if rho <= 1.0:
        raise BelowThreshold(rho)
    if convention is PhaseConvention.TANGENT:
        return tangent_phase(p, branch, k)
    return branch_solution(p, branch, k).phi0


def multistability_count(
    p: SystemParams,
    k: int,
    X_b: float,
    convention: PhaseConvention = PhaseConvention.EXACT,
) -> Multistability:
    """Invert both branch cubics at X_b and merge the roots.

    Raises
    ------
    BelowThreshold
        When rho <= 1.
    """
    per_branch: dict[Branch, list[QuadratureRoot]] = {}
    for branch in (Branch.UPPER, Branch.LOWER):
        phi0 = branch_phase(p, branch, k, convention)
        per_branch[branch] = tag_roots(invert_map(p, phi0, X_b))
    union = _distinct([r.value for roots in per_branch.values() for r in roots])
    return Multistability(X_b=X_b, per_branch=per_branch, union=union)


def trace_curve(
    p: SystemParams,
    branch: Branch,
    k: int = 0,
    x_a_range: tuple[float, float] | None = None,
    n: int = 401,
    convention: PhaseConvention = PhaseConvention.EXACT,
) -> HysteresisCurve:
    """Uniformly sampled X_b(X_a) curve of one branch with its fold annotation.

    The default X_a range is symmetric and spans three times the turning point
    (or the crossover scale sqrt(|c1/c3|) without a fold).
    """
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    phi0 = branch_phase(p, branch, k, convention)
    c3, c1 = cubic_coefficients(p, phi0)
    fold = fold_interval(c3, c1)
    if x_a_range is None:
        reach = 3.0 * math.sqrt(abs(c1 / c3) / (3 if fold else 1)) if c3 else 1.0
        x_a_range = (-reach, reach)
    X_a = np.linspace(x_a_range[0], x_a_range[1], n)
    X_b = X_a * (c3 * X_a * X_a + c1)
    logger.debug(
        f"trace_curve {branch.value} k={k}: phi0={phi0:.6f} rad, "
        f"c3={c3:.4e}, c1={c1:.4e}, fold={fold}"
    )
    return HysteresisCurve(
        branch=branch,
        k=k,
        phi0=phi0,
        c3=c3,
        c1=c1,
        samples=np.column_stack([X_a, X_b]),
        fold=fold,
    )

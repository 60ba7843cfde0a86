"""Laplace-domain gain analysis of the coupled cavity and atomic modes.

The denominator of the transformed cavity response is the monic quadratic

    s^2 + [kappa + gamma + i(delta - eta x)] s
        + delta eta x + kappa gamma + i(delta kappa - gamma eta x) + G^2 e^{2i phi}

whose root with the largest real part decides between amplification (net gain) and
attenuation (net loss) of the cavity field.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Literal

import contourpy
import numpy as np
from loguru import logger
from pydantic import BaseModel, Field, model_validator

from ptcavity.errors import DegenerateDiscriminant
from ptcavity.model.types import SystemParams

# Balanced band half-width relative to kappa + gamma
BALANCE_TOL = 1e-6


class GainClass(str, Enum):
    NET_GAIN = "NetGain"
    NET_LOSS = "NetLoss"
    BALANCED = "Balanced"


@dataclass(frozen=True, slots=True)
class GainSample:
    """One evaluated point of the net-gain inequality."""

    delta: float
    G: float
    phi: float
    x: float
    margin: float
    roots: tuple[complex, complex]
    classification: GainClass


# ════════════════════════════════════════════════════════════
# POINTWISE
# ════════════════════════════════════════════════════════════


def char_quadratic(p: SystemParams, x: float) -> tuple[complex, complex, complex]:
    """Coefficients (1, b, c) of the characteristic quadratic at mirror coordinate x."""
    ex = p.eta * x
    b = complex(p.kappa + p.gamma, p.delta - ex)
    c = complex(p.delta * ex + p.kappa * p.gamma, p.delta * p.kappa - p.gamma * ex) + (
        p.G * p.G * cmath.exp(2j * p.phi)
    )
    return 1 + 0j, b, c


def discriminant(p: SystemParams, x: float) -> complex:
    """Complex discriminant written out in rectangular form."""
    kg = p.kappa - p.gamma
    de = p.delta + p.eta * x
    G2 = p.G * p.G
    c2, s2 = math.cos(2 * p.phi), math.sin(2 * p.phi)
    return complex(kg * kg - de * de - 4 * G2 * c2, -2 * (kg * de + 2 * G2 * s2))


def _theta_terms(p: SystemParams, x: float) -> tuple[float, float]:
    """(numerator, denominator) of the polar-angle arctangent."""
    kg = p.kappa - p.gamma
    de = p.delta + p.eta * x
    G2 = p.G * p.G
    num = 2 * kg * de + 4 * G2 * math.sin(2 * p.phi)
    den = kg * kg - de * de - 4 * G2 * math.cos(2 * p.phi)
    return num, den


def theta_angle(p: SystemParams, x: float, k: int = 0) -> float:
    """Polar angle theta = arctan(num/den) + k*pi with a principal arctangent.

    The discriminant reads |D| e^{-i theta} when its real part is positive; for a
    negative real part the principal arctangent is off by pi and ``sqrt_discriminant``
    should be used for the root itself.

    Raises
    ------
    DegenerateDiscriminant
        When |D| < 1e-12 (kappa + gamma)^2.
    """
    modulus = abs(discriminant(p, x))
    if modulus < 1e-12 * (p.kappa + p.gamma) ** 2:
        raise DegenerateDiscriminant(modulus)
    num, den = _theta_terms(p, x)
    base = math.copysign(math.pi / 2, num) if den == 0 else math.atan(num / den)
    return base + k * math.pi


def sqrt_discriminant(p: SystemParams, x: float, k: int = 0) -> complex:
    """sqrt(D) with the k-parity sign: principal root for even k, its negative for odd k."""
    num, den = _theta_terms(p, x)
    theta0 = math.atan2(num, den)
    root = math.sqrt(abs(discriminant(p, x))) * cmath.exp(-0.5j * theta0)
    return root if k % 2 == 0 else -root


def discriminant_polar(p: SystemParams, x: float) -> tuple[float, float]:
    """(|D|, theta) from the polar form 4G^2 sqrt(1 - [...] + (...)^2)."""
    kg = p.kappa - p.gamma
    de = p.delta + p.eta * x
    G2 = p.G * p.G
    if G2 == 0:
        modulus = abs(discriminant(p, x))
    else:
        bracket = (kg * kg - de * de) / (2 * G2) * math.cos(2 * p.phi) - (
            kg * de / G2
        ) * math.sin(2 * p.phi)
        tail = ((kg * kg + de * de) / (4 * G2)) ** 2
        modulus = 4 * G2 * math.sqrt(max(1 - bracket + tail, 0.0))
    num, den = _theta_terms(p, x)
    return modulus, math.atan2(num, den)


def _stable_roots(b: complex, c: complex) -> tuple[complex, complex]:
    """Roots of s^2 + b s + c, larger-magnitude root first, the other from the product."""
    sq = cmath.sqrt(b * b - 4 * c)
    if (b.conjugate() * sq).real < 0:
        sq = -sq
    q = -0.5 * (b + sq)
    if q == 0:
        return 0j, 0j
    return q, c / q


def char_roots(p: SystemParams, x: float) -> tuple[complex, complex]:
    """Zeros of the characteristic quadratic."""
    _, b, c = char_quadratic(p, x)
    return _stable_roots(b, c)


def net_gain_rate(p: SystemParams, x: float) -> float:
    """Largest real part of the characteristic roots, MHz."""
    return max(r.real for r in char_roots(p, x))


def gain_margin(p: SystemParams, x: float) -> float:
    """Undivided left-minus-right of the net-gain inequality, MHz^4.

    Non-negative exactly when a characteristic root has a non-negative real part.
    """
    K = p.kappa + p.gamma
    de = p.delta + p.eta * x
    G2 = p.G * p.G
    gs = G2 * math.sin(2 * p.phi)
    return (
        gs * gs
        + (p.kappa - p.gamma) * de * gs
        - K * K * G2 * math.cos(2 * p.phi)
        - p.kappa * p.gamma * (K * K + de * de)
    )


def _classify_rate(rate: float, tol: float) -> GainClass:
    if rate > tol:
        return GainClass.NET_GAIN
    if rate < -tol:
        return GainClass.NET_LOSS
    return GainClass.BALANCED


def classify(p: SystemParams, x: float) -> GainClass:
    """Three-way classification by the largest root real part against +-tol."""
    return _classify_rate(net_gain_rate(p, x), BALANCE_TOL * (p.kappa + p.gamma))


def gain_sample(p: SystemParams, x: float) -> GainSample:
    roots = char_roots(p, x)
    rate = max(r.real for r in roots)
    return GainSample(
        delta=p.delta,
        G=p.G,
        phi=p.phi,
        x=x,
        margin=gain_margin(p, x),
        roots=roots,
        classification=_classify_rate(rate, BALANCE_TOL * (p.kappa + p.gamma)),
    )


def gain_center_phi(p: SystemParams, k: int = 0, sign: int = 1) -> float:
    """Resonance centre [+-arctan(G^2/(kappa gamma)) + k pi]/2 of a net-gain region."""
    return 0.5 * (sign * math.atan(p.G * p.G / (p.kappa * p.gamma)) + k * math.pi)


# ════════════════════════════════════════════════════════════
# GRID SWEEPS
# ════════════════════════════════════════════════════════════

AxisName = Literal["delta", "G", "phi"]


class SweepAxis(BaseModel):
    """One swept parameter: name, bounds, point count and spacing."""

    name: AxisName
    min: float
    max: float
    count: int = Field(ge=2)
    scale: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def _check_bounds(self) -> SweepAxis:
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ValueError(f"axis {self.name}: bounds must be finite")
        if self.min == self.max:
            raise ValueError(f"axis {self.name}: empty range")
        if self.scale == "log" and (self.min <= 0 or self.max <= 0):
            raise ValueError(f"axis {self.name}: log spacing needs positive bounds")
        return self

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.logspace(math.log10(self.min), math.log10(self.max), self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class GainGrid:
    """Row-major grid: rows follow ``axes[0]``, columns ``axes[1]``."""

    axes: tuple[SweepAxis, SweepAxis]
    rows: np.ndarray
    cols: np.ndarray
    base: SystemParams
    x: float
    margin: np.ndarray
    rate: np.ndarray
    classification: np.ndarray

    def samples(self) -> list[GainSample]:
        """Materialize every cell as a GainSample, row-major."""
        out: list[GainSample] = []
        for i in range(len(self.rows)):
            for j in range(len(self.cols)):
                out.append(gain_sample(self.point(i, j), self.x))
        return out

    def point(self, i: int, j: int) -> SystemParams:
        return self.base.replace(
            **{self.axes[0].name: float(self.rows[i]), self.axes[1].name: float(self.cols[j])}
        )


def gain_map(
    base: SystemParams, rows: SweepAxis, cols: SweepAxis, x: float = 0.0
) -> GainGrid:
    """Evaluate margin and root classification on a (rows x cols) grid.

    The unswept parameter keeps its value from ``base``. delta + eta*x is the only
    place x enters, so a non-zero x shifts the delta axis.
    """
    if rows.name == cols.name:
        raise ValueError(f"both sweep axes are '{rows.name}'")
    rv, cv = rows.values(), cols.values()
    grid = {"delta": base.delta, "G": base.G, "phi": base.phi}
    R, C = np.meshgrid(rv, cv, indexing="ij")
    grid[rows.name] = R
    grid[cols.name] = C
    delta = np.broadcast_to(np.asarray(grid["delta"], dtype=float), R.shape)
    G = np.broadcast_to(np.asarray(grid["G"], dtype=float), R.shape)
    phi = np.broadcast_to(np.asarray(grid["phi"], dtype=float), R.shape)

    kappa, gamma, ex = base.kappa, base.gamma, base.eta * x
    K = kappa + gamma
    G2 = G * G
    de = delta + ex
    gs = G2 * np.sin(2 * phi)
    margin = gs * gs + (kappa - gamma) * de * gs - K * K * G2 * np.cos(2 * phi) - (
        kappa * gamma * (K * K + de * de)
    )

    b = K + 1j * (delta - ex)
    c = (delta * ex + kappa * gamma) + 1j * (delta * kappa - gamma * ex) + G2 * np.exp(2j * phi)
    sq = np.sqrt(b * b - 4 * c)
    sq = np.where((np.conj(b) * sq).real < 0, -sq, sq)
    q = -0.5 * (b + sq)
    safe_q = np.where(q == 0, 1.0, q)
    r2 = np.where(q == 0, 0.0, c / safe_q)
    rate = np.maximum(q.real, r2.real)

    tol = BALANCE_TOL * K
    classification = np.full(R.shape, GainClass.BALANCED.value, dtype=object)
    classification[rate > tol] = GainClass.NET_GAIN.value
    classification[rate < -tol] = GainClass.NET_LOSS.value

    n_gain = int(np.count_nonzero(rate > tol))
    logger.debug(
        f"gain_map {rows.name}x{cols.name} {rows.count}x{cols.count}: {n_gain} NetGain cells"
    )
    return GainGrid(
        axes=(rows, cols),
        rows=rv,
        cols=cv,
        base=base,
        x=x,
        margin=margin,
        rate=rate,
        classification=classification,
    )


def zero_contour(grid: GainGrid) -> list[np.ndarray]:
    """Zero-level polylines of the margin as (row_value, col_value) point arrays."""
    gen = contourpy.contour_generator(x=grid.cols, y=grid.rows, z=grid.margin)
    lines = gen.lines(0.0)
    return [np.asarray(line)[:, ::-1] for line in lines]

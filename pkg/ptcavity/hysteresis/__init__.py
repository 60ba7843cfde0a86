"""Cubic relation between the atomic and cavity quadratures and its folds."""

from ptcavity.hysteresis.quadrature import (
    HysteresisCurve,
    Multistability,
    QuadratureRoot,
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

__all__ = [
    "HysteresisCurve",
    "Multistability",
    "QuadratureRoot",
    "RootTag",
    "b_from_a",
    "branch_phase",
    "cubic_coefficients",
    "fold_interval",
    "invert_map",
    "multistability_count",
    "quadrature_map",
    "tag_roots",
    "trace_curve",
]

"""Net-gain analysis through the characteristic quadratic."""

from ptcavity.spectral.gain import (
    GainClass,
    GainGrid,
    GainSample,
    SweepAxis,
    char_quadratic,
    char_roots,
    classify,
    discriminant,
    discriminant_polar,
    gain_center_phi,
    gain_map,
    gain_margin,
    gain_sample,
    net_gain_rate,
    sqrt_discriminant,
    theta_angle,
    zero_contour,
)

__all__ = [
    "GainClass",
    "GainGrid",
    "GainSample",
    "SweepAxis",
    "char_quadratic",
    "char_roots",
    "classify",
    "discriminant",
    "discriminant_polar",
    "gain_center_phi",
    "gain_map",
    "gain_margin",
    "gain_sample",
    "net_gain_rate",
    "sqrt_discriminant",
    "theta_angle",
    "zero_contour",
]

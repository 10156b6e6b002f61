"""Frequency-stepping reconstruction of a dielectric coefficient from
backscatter data, backed by the C++ core."""

from ._freqinv import (
    ConfigError,
    ForwardResult,
    FreqinvError,
    Inclusion,
    InversionResult,
    Scenario,
    forward,
    invert,
    ladder,
    load_scenario,
    parse_scenario,
    plane_wave_error,
    verify,
    write_field_vtk,
)


def pipeline(scenario, coupling="implicit"):
    """Forward solve followed by the inversion; returns both results."""
    fwd = forward(scenario)
    return fwd, invert(scenario, fwd, coupling=coupling)


__all__ = [
    "ConfigError",
    "ForwardResult",
    "FreqinvError",
    "Inclusion",
    "InversionResult",
    "Scenario",
    "forward",
    "invert",
    "ladder",
    "load_scenario",
    "parse_scenario",
    "pipeline",
    "plane_wave_error",
    "verify",
    "write_field_vtk",
]

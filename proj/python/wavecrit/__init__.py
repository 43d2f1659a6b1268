"""Critical traveling waves of the diffusive SIR model with incidence beta S I / (S + I).

Thin wrapper over the C++ library: spectral constants, certified bounds,
the fixed-point wave solver with its diagnostics, and the PDE simulator.
"""

from ._core import (
    BoundSet,
    ModelParams,
    SpectralData,
    WavecritError,
    certify,
    critical_speed,
    derive_spectral,
    diagnose,
    ode_residual,
    select_constants,
    simulate,
    solve,
)

__all__ = [
    "BoundSet",
    "ModelParams",
    "SpectralData",
    "WavecritError",
    "certify",
    "critical_speed",
    "derive_spectral",
    "diagnose",
    "ode_residual",
    "select_constants",
    "simulate",
    "solve",
]

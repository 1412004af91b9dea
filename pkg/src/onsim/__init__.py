"""Simulation of a cubic phase gate driven by an approximate 03 resource state."""

__version__ = "0.1.0"

from .grid import BoundaryMassError, DensitySamples, Grid, NumericalGuardError  # noqa: E402
from .fock import CutoffWarning  # noqa: E402

__all__ = [
    "__version__",
    "Grid",
    "DensitySamples",
    "NumericalGuardError",
    "BoundaryMassError",
    "CutoffWarning",
]

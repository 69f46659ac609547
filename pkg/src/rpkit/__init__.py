"""Integrability analysis and numerics for the dimensionless Rayleigh-Plesset equation."""

__version__ = "0.1.0"

from .core_model import (
    Constant,
    DimensionalParams,
    PowerLaw,
    RpeParams,
    State,
    nondimensionalize,
    pressure,
    residual,
    rhs,
)
from .errors import DomainError, UnsupportedForcing

__all__ = [
    "__version__", "Constant", "DimensionalParams", "PowerLaw", "RpeParams", "State",
    "nondimensionalize", "pressure", "residual", "rhs", "DomainError", "UnsupportedForcing",
]

"""Independence-preserving maps of beta variables, 2x2 beta matrices and
related stochastic equations, with Monte Carlo verification tools."""
from .errors import DomainError, UsageError
from .rng import RngStream

__version__ = "0.1.0"

__all__ = ["DomainError", "UsageError", "RngStream", "__version__"]

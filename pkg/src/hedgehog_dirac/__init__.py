"""Dirac operators for fermions on O(3) sigma-model hedgehogs.

The package reduces H(n(F)) to radial sector operators, estimates their
lowest spectral points and evaluates the two sufficient conditions for a
discrete ground state and for non-vanishing positive/negative energies.
"""

__version__ = "0.1.0"

from .errors import DomainError, PreconditionError
from .profile import Hedgehog, Profile
from .radial import RadialGrid, RadialVec

__all__ = [
    "DomainError",
    "Hedgehog",
    "PreconditionError",
    "Profile",
    "RadialGrid",
    "RadialVec",
    "__version__",
]

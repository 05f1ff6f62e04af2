"""Time-varying quantum channels, capacity limits and small-code decoding."""

from ._kernels import BACKEND
from .channels import DomainError, PauliChannelParams
from .pauli import PauliString

__version__ = "0.1.0"

__all__ = ["BACKEND", "DomainError", "PauliChannelParams", "PauliString", "__version__"]

"""Covering arrays by entropy compression: an invertible randomized
constructor and the upper bounds on d(t, v) it yields."""

from .core import CAParams, PartialArray, is_a_covering, phi, verify_ca
from .engine import InputStream, run, run_until_success

__all__ = [
    "CAParams", "PartialArray", "InputStream",
    "is_a_covering", "phi", "verify_ca", "run", "run_until_success",
]
__version__ = "0.1.0"

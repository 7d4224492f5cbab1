"""Exact-diagonalization toolkit for fragmentation in truncated lattice
gauge ladders and chains."""

from .errors import ConfigError, NumericalError
from .operator import SymmetricOperator

__version__ = "0.1.0"

__all__ = ["ConfigError", "NumericalError", "SymmetricOperator", "__version__"]

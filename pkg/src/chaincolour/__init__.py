"""Exact counting of chain-free colourings of set families in the Boolean lattice."""
from __future__ import annotations

from .counting import count, count_backtrack, count_bruteforce, count_layered, is_valid
from .errors import CapabilityError, ChainColourError, PreconditionError, UsageError, VerificationFailure
from .lattice import SetFamily, full_lattice, level, levels, m_levels

__version__ = "0.1.0"

__all__ = [
    "CapabilityError", "ChainColourError", "PreconditionError", "SetFamily", "UsageError",
    "VerificationFailure", "count", "count_backtrack", "count_bruteforce", "count_layered",
    "full_lattice", "is_valid", "level", "levels", "m_levels", "__version__",
]

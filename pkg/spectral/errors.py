"""
Spectral Errors

Exceptions raised by the spectral layer.
"""


class GridError(ValueError):
    """Invalid grid parameters or mismatched grids."""


class SymmetryError(ValueError):
    """Spectral state is not Hermitian to the allowed tolerance."""


class NonFiniteError(ValueError):
    """NaN or infinite values where finite data is required."""


class MultiplierError(ValueError):
    """Symbol parameters out of range or non-finite symbol values."""

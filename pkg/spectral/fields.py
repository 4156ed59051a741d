"""
Field Types

Immutable value types for scalar and velocity fields on a grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError, NonFiniteError
from .grid import Grid


@dataclass(frozen=True)
class RealField:
    """Real samples on the n x n collocation lattice, indexed [i1, i2]."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (self.grid.n, self.grid.n):
            raise GridError(
                f"values shape {values.shape} does not match n={self.grid.n}"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteError("real field contains non-finite values")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SpectralField:
    """
    Fourier coefficients theta_hat(k) in FFT index order.

    Coefficients use the mean-style convention, so coeffs[0, 0] is the
    field mean. Instances are values: the array is never mutated.
    """

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=np.complex128)
        if coeffs.shape != (self.grid.n, self.grid.n):
            raise GridError(
                f"coeffs shape {coeffs.shape} does not match n={self.grid.n}"
            )
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zeros(cls, grid: Grid) -> "SpectralField":
        return cls(grid, np.zeros((grid.n, grid.n), dtype=np.complex128))

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, coeffs)

    @property
    def mean(self) -> float:
        return float(self.coeffs[0, 0].real)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.coeffs)))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        require_same_grid(self, other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        require_same_grid(self, other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def scaled(self, factor: float) -> "SpectralField":
        return self.with_coeffs(factor * self.coeffs)


@dataclass(frozen=True)
class VelocityField:
    """Two spectral components (u1, u2) of a divergence-free velocity."""

    u1: SpectralField
    u2: SpectralField

    @property
    def grid(self) -> Grid:
        return self.u1.grid


def require_same_grid(a: SpectralField, b: SpectralField) -> None:
    """Raise GridError unless both fields live on the same grid."""
    if not a.grid.same_as(b.grid):
        raise GridError(
            f"grid mismatch: n={a.grid.n}/{b.grid.n}, "
            f"length={a.grid.length}/{b.grid.length}, "
            f"shift={a.grid.shift}/{b.grid.shift}"
        )

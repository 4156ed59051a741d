"""
Spectral Grid

Square doubly periodic collocation grid and its wavenumber bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import GridError


MIN_MODES = 8
DEFAULT_LENGTH = 2 * math.pi
DEFAULT_SHIFT = 10.0


@dataclass(frozen=True)
class Wavenumbers:
    """Read-only wavenumber tables for one (n, length) pair."""

    k1: np.ndarray          # integer mode index along x1, shape (n, n)
    k2: np.ndarray          # integer mode index along x2, shape (n, n)
    kmag: np.ndarray        # physical |xi| = 2*pi*|k|/length
    d1: np.ndarray          # derivative wavenumber along x1 (Nyquist zeroed)
    d2: np.ndarray          # derivative wavenumber along x2 (Nyquist zeroed)
    kmax_norm: np.ndarray   # max(|k1|, |k2|) for the 2/3 rule
    neg_index: np.ndarray   # flat index of -k for every k


class Grid(BaseModel):
    """
    Immutable n x n torus grid.

    Wavenumbers follow the FFT index order, with the axis values
    {-n/2+1, ..., n/2}: the Nyquist index carries +n/2.

    Attributes:
        n: Modes per axis (even, >= 8)
        length: Domain period
        shift: Constant a in the (a + |xi|) weights and log(a + Lambda)
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(description="Modes per axis")
    length: float = Field(default=DEFAULT_LENGTH, description="Domain period")
    shift: float = Field(default=DEFAULT_SHIFT, description="Shift constant a")

    @property
    def tables(self) -> Wavenumbers:
        return _wavenumbers(self.n, self.length)

    @property
    def axis(self) -> np.ndarray:
        """Integer mode values along one axis, FFT order."""
        return _axis(self.n)

    @property
    def kmag(self) -> np.ndarray:
        return self.tables.kmag

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def scale(self) -> float:
        """Factor turning integer modes into physical wavenumbers."""
        return 2 * math.pi / self.length

    @property
    def dealias_cutoff(self) -> float:
        return self.n / 3

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Collocation points (x1, x2), indexed [i1, i2]."""
        x = np.arange(self.n) * self.dx
        return np.meshgrid(x, x, indexing="ij")

    def same_as(self, other: "Grid") -> bool:
        return (
            self.n == other.n
            and self.length == other.length
            and self.shift == other.shift
        )


def make_grid(
    n: int,
    length: float = DEFAULT_LENGTH,
    shift: float = DEFAULT_SHIFT,
) -> Grid:
    """
    Create a validated grid.

    Args:
        n: Modes per axis, even and at least 8
        length: Domain period, positive
        shift: Shift constant a, at least 1

    Returns:
        Grid: grid with its wavenumber tables populated

    Raises:
        GridError: If any precondition fails
    """
    if isinstance(n, bool) or int(n) != n:
        raise GridError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n % 2 != 0:
        raise GridError(f"n must be even, got {n}")
    if n < MIN_MODES:
        raise GridError(f"n must be at least {MIN_MODES}, got {n}")
    if not (length > 0 and math.isfinite(length)):
        raise GridError(f"length must be positive, got {length}")
    if not (shift >= 1 and math.isfinite(shift)):
        raise GridError(f"shift must be >= 1, got {shift}")

    grid = Grid(n=n, length=float(length), shift=float(shift))
    grid.tables  # populate the cache
    return grid


@lru_cache(maxsize=None)
def _axis(n: int) -> np.ndarray:
    k = np.fft.fftfreq(n, d=1.0 / n)
    k[n // 2] = n // 2
    k.flags.writeable = False
    return k


@lru_cache(maxsize=32)
def _wavenumbers(n: int, length: float) -> Wavenumbers:
    k = _axis(n)
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    scale = 2 * math.pi / length

    # odd derivatives drop the unpaired Nyquist mode
    d = k.copy()
    d[n // 2] = 0.0
    d1, d2 = np.meshgrid(d * scale, d * scale, indexing="ij")

    idx = np.arange(n)
    neg = (-idx) % n
    neg_index = (neg[:, None] * n + neg[None, :]).ravel()

    tables = Wavenumbers(
        k1=k1,
        k2=k2,
        kmag=scale * np.hypot(k1, k2),
        d1=d1,
        d2=d2,
        kmax_norm=np.maximum(np.abs(k1), np.abs(k2)),
        neg_index=neg_index,
    )
    for arr in (tables.k1, tables.k2, tables.kmag, tables.d1, tables.d2,
                tables.kmax_norm, tables.neg_index):
        arr.flags.writeable = False
    return tables

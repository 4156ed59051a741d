"""
Initial Conditions

Builders for shear, random band-limited and explicit-mode initial data.
Every builder returns a Hermitian spectral field with zero coefficients
above the 2/3 cutoff.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Optional

import numpy as np

from diagnostics import hs_norm
from spectral import Grid, GridError, SpectralField, dealias, enforce_hermitian


class IcKind(str, Enum):
    SHEAR = "shear"
    RANDOM_BAND = "random_band"
    MODES = "modes"


class Normalization(str, Enum):
    HS = "hs"   # shifted H^s norm equals the target
    L2 = "l2"   # spectral L2 norm equals the target


def _index(grid: Grid, k: int) -> int:
    if not abs(k) < grid.n / 2:
        raise GridError(f"mode {k} is outside the resolved band of n={grid.n}")
    return k % grid.n


def shear(grid: Grid, amplitude: float = 1.0, mode: int = 1) -> SpectralField:
    """amplitude * cos(mode * x1), a steady state of every model."""
    c = np.zeros((grid.n, grid.n), dtype=np.complex128)
    c[_index(grid, mode), 0] += 0.5 * amplitude
    c[_index(grid, -mode), 0] += 0.5 * amplitude
    return dealias(SpectralField(grid, c))


def explicit_modes(grid: Grid, modes: Iterable[tuple[int, int, float, float]]) -> SpectralField:
    """
    theta_hat(k) = re + i*im for every (k1, k2, re, im) entry; the
    conjugate partner at -k is implied.
    """
    c = np.zeros((grid.n, grid.n), dtype=np.complex128)
    for k1, k2, re, im in modes:
        amp = complex(re, im)
        c[_index(grid, k1), _index(grid, k2)] = amp
        c[_index(grid, -k1), _index(grid, -k2)] = np.conj(amp)
    return dealias(SpectralField(grid, enforce_hermitian(grid, c)))


def random_band(
    grid: Grid,
    k_min: float,
    k_max: float,
    seed: int,
    target: float = 1.0,
    normalization: Normalization | str = Normalization.HS,
    s: float = 5.0,
) -> SpectralField:
    """
    Complex Gaussian coefficients on k_min <= |k| <= k_max (integer mode
    magnitude), Hermitian and mean free, scaled so the chosen norm equals
    target. The generator is numpy's PCG64 seeded with seed.

    Raises:
        GridError: If the band is empty or exceeds the 2/3 cutoff
    """
    if not 0 <= k_min <= k_max:
        raise GridError(f"band [{k_min}, {k_max}] is not ordered")
    if k_max > grid.dealias_cutoff:
        raise GridError(f"band edge {k_max} exceeds the 2/3 cutoff {grid.dealias_cutoff:g}")

    t = grid.tables
    kint = np.hypot(t.k1, t.k2)
    band = (kint >= k_min) & (kint <= k_max) & (kint > 0)
    if not np.any(band):
        raise GridError(f"band [{k_min}, {k_max}] holds no modes")

    rng = np.random.Generator(np.random.PCG64(seed))
    noise = rng.standard_normal((grid.n, grid.n)) + 1j * rng.standard_normal((grid.n, grid.n))
    c = enforce_hermitian(grid, np.where(band, noise, 0.0))
    field = dealias(SpectralField(grid, c))
    return normalize(field, target, normalization, s)


def normalize(
    field: SpectralField,
    target: float,
    normalization: Normalization | str = Normalization.HS,
    s: Optional[float] = 5.0,
) -> SpectralField:
    """Rescale field so its H^s (or L2) norm equals target; zero stays zero."""
    if Normalization(normalization) is Normalization.L2:
        current = hs_norm(field, 0.0)
    else:
        current = hs_norm(field, s)
    if current == 0.0:
        return field
    return field.scaled(target / current)

"""
Spectral Operators

Dealiasing, derivatives, multiplier application and the Plancherel
pairing. Every operator maps Hermitian input to Hermitian output.
"""

from __future__ import annotations

from enum import Enum
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

from .fields import SpectralField, VelocityField, require_same_grid
from .grid import Grid, make_grid
from .transforms import physical

if TYPE_CHECKING:
    from .multiplier import MultiplierSpec


class DealiasRule(str, Enum):
    """Dealiasing rules for quadratic products."""

    TWO_THIRDS = "two_thirds"
    NONE = "none"


@lru_cache(maxsize=32)
def _two_thirds_mask(grid: Grid) -> np.ndarray:
    mask = grid.tables.kmax_norm <= grid.n / 3
    mask.flags.writeable = False
    return mask


def dealias_mask(grid: Grid, rule: DealiasRule | str) -> np.ndarray | None:
    """Boolean keep-mask for a rule, or None for the identity rule."""
    rule = DealiasRule(rule)
    if rule is DealiasRule.NONE:
        return None
    return _two_thirds_mask(grid)


def dealias(field: SpectralField, rule: DealiasRule | str = DealiasRule.TWO_THIRDS) -> SpectralField:
    """
    Zero every mode with max(|k1|, |k2|) > n/3 under the 2/3 rule.

    The identity rule returns the input unchanged.
    """
    mask = dealias_mask(field.grid, rule)
    if mask is None:
        return field
    return field.with_coeffs(np.where(mask, field.coeffs, 0.0))


def gradient(field: SpectralField) -> tuple[SpectralField, SpectralField]:
    """(d1 theta, d2 theta) as spectral fields."""
    t = field.grid.tables
    c = field.coeffs
    return field.with_coeffs(1j * t.d1 * c), field.with_coeffs(1j * t.d2 * c)


def perp_gradient(field: SpectralField) -> VelocityField:
    """grad-perp theta = (-d2 theta, d1 theta)."""
    t = field.grid.tables
    c = field.coeffs
    return VelocityField(
        u1=field.with_coeffs(-1j * t.d2 * c),
        u2=field.with_coeffs(1j * t.d1 * c),
    )


def divergence(vel: VelocityField) -> SpectralField:
    """Spectral divergence i(k1 u1 + k2 u2) with the derivative wavenumbers."""
    t = vel.grid.tables
    return vel.u1.with_coeffs(1j * (t.d1 * vel.u1.coeffs + t.d2 * vel.u2.coeffs))


def apply_symbol(field: SpectralField, spec: "MultiplierSpec") -> SpectralField:
    """Multiply every mode by gamma(|xi|)."""
    return field.with_coeffs(spec.on_grid(field.grid) * field.coeffs)


def apply_array(field: SpectralField, weights: np.ndarray) -> SpectralField:
    return field.with_coeffs(weights * field.coeffs)


def l2_inner(a: SpectralField, b: SpectralField) -> float:
    """
    Plancherel pairing, equal to the physical integral of a*b over the
    torus: length^2 * sum_k Re(a_hat(k) conj(b_hat(k))).
    """
    require_same_grid(a, b)
    total = np.sum((a.coeffs * np.conj(b.coeffs)).real)
    return float(a.grid.length**2 * total)


def sup_norm(field: SpectralField) -> float:
    return float(np.max(np.abs(physical(field.coeffs))))


def _kept_indices(n_from: int, n_to: int) -> tuple[np.ndarray, np.ndarray]:
    """Source/target indices of modes shared by both grids, Nyquist lines dropped."""
    n_small = min(n_from, n_to)
    k = np.arange(-(n_small // 2) + 1, n_small // 2)
    return k % n_from, k % n_to


def zero_pad(field: SpectralField, m: int) -> SpectralField:
    """
    Resample onto an m x m grid (m >= n) by zero padding.

    Coefficients are resolution independent under the mean-style
    convention, so no rescaling is needed. Nyquist lines are dropped.
    """
    grid = field.grid
    if m < grid.n:
        raise ValueError(f"zero_pad target {m} is smaller than n={grid.n}")
    target = make_grid(m, grid.length, grid.shift)
    src, dst = _kept_indices(grid.n, m)
    out = np.zeros((m, m), dtype=np.complex128)
    out[np.ix_(dst, dst)] = field.coeffs[np.ix_(src, src)]
    return SpectralField(target, out)


def truncate(field: SpectralField, n: int) -> SpectralField:
    """Keep the modes |k_i| < n/2 of a finer field on an n x n grid."""
    grid = field.grid
    if n > grid.n:
        raise ValueError(f"truncate target {n} exceeds n={grid.n}")
    target = make_grid(n, grid.length, grid.shift)
    src, dst = _kept_indices(grid.n, n)
    out = np.zeros((n, n), dtype=np.complex128)
    out[np.ix_(dst, dst)] = field.coeffs[np.ix_(src, src)]
    return SpectralField(target, out)


def max_mode(field: SpectralField, atol: float = 0.0) -> int:
    """Largest max(|k1|, |k2|) carrying a coefficient above atol."""
    mags = np.abs(field.coeffs)
    active = mags > atol
    if not np.any(active):
        return 0
    return int(np.max(field.grid.tables.kmax_norm[active]))


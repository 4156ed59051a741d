"""
Transforms

Real <-> spectral maps on the torus.

Convention: forward is the mean-style sum
    theta_hat(k) = n^-2 sum_x f(x) exp(-i k.x),
and inverse is the plain sum, so theta_hat(0) is the field mean.
"""

from __future__ import annotations

import numpy as np
import scipy.fft

from .errors import NonFiniteError, SymmetryError
from .fields import RealField, SpectralField
from .grid import Grid


SYMMETRY_TOLERANCE = 1e-10

_workers = 1


def set_workers(workers: int) -> None:
    """Set the FFT worker count used by every transform in this process."""
    global _workers
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    _workers = int(workers)


def get_workers() -> int:
    return _workers


def reflect(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Return c(-k) for every k."""
    return coeffs.ravel()[grid.tables.neg_index].reshape(coeffs.shape)


def enforce_hermitian(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Conjugate fold: 0.5 * (c(k) + conj(c(-k))), exactly Hermitian."""
    return 0.5 * (coeffs + np.conj(reflect(grid, coeffs)))


def hermitian_defect(grid: Grid, coeffs: np.ndarray) -> float:
    """Relative size of the anti-Hermitian part of coeffs."""
    scale = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
    if scale == 0.0:
        return 0.0
    defect = np.max(np.abs(coeffs - np.conj(reflect(grid, coeffs))))
    return float(defect) / scale


def fft2(values: np.ndarray) -> np.ndarray:
    return scipy.fft.fft2(values, norm="forward", workers=_workers)


def ifft2(coeffs: np.ndarray) -> np.ndarray:
    return scipy.fft.ifft2(coeffs, norm="forward", workers=_workers)


def forward_transform(f: RealField) -> SpectralField:
    """
    Transform collocation samples to Hermitian spectral coefficients.

    Args:
        f: Real field, finite

    Returns:
        SpectralField: mean-style coefficients, symmetry enforced exactly
    """
    if not np.all(np.isfinite(f.values)):
        raise NonFiniteError("forward_transform received non-finite samples")
    coeffs = fft2(f.values)
    return SpectralField(f.grid, enforce_hermitian(f.grid, coeffs))


def inverse_transform(field: SpectralField) -> RealField:
    """
    Transform Hermitian coefficients back to collocation samples.

    Raises:
        SymmetryError: If the input departs from Hermitian symmetry by more
            than SYMMETRY_TOLERANCE relative
        NonFiniteError: If the coefficients are not finite
    """
    if not field.is_finite():
        raise NonFiniteError("inverse_transform received non-finite coefficients")
    defect = hermitian_defect(field.grid, field.coeffs)
    if defect > SYMMETRY_TOLERANCE:
        raise SymmetryError(
            f"coefficients are not Hermitian (relative defect {defect:.3e})"
        )
    return RealField(field.grid, physical(field.coeffs))


def physical(coeffs: np.ndarray) -> np.ndarray:
    """Real part of the inverse transform, no checks (hot path)."""
    return ifft2(coeffs).real


def spectral(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Hermitian coefficients of real samples, no checks (hot path)."""
    return enforce_hermitian(grid, fft2(values))

"""
Norms

Shifted Sobolev norms (a + |xi|)^s, their log-weighted companions,
Bessel-potential norms, the decreasing exponent schedule and the
distances built on them. All sums run over the spectral coefficients
under the mean-style transform convention.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from spectral import DEFAULT_SHIFT, SpectralField, require_same_grid


# Exponent below which the losing estimate no longer closes
HORIZON_FLOOR = 4.0


def _power(field: SpectralField) -> np.ndarray:
    c = field.coeffs
    return c.real**2 + c.imag**2


def _shift(field: SpectralField, shift: Optional[float]) -> float:
    return field.grid.shift if shift is None else float(shift)


def hs_norm(field: SpectralField, s: float, shift: Optional[float] = None) -> float:
    """
    sqrt(sum_k (a + |xi|)^(2s) |theta_hat(k)|^2).

    Any real s is accepted. The shift defaults to the grid's constant a.
    """
    weights = np.power(_shift(field, shift) + field.grid.kmag, 2 * s)
    return float(np.sqrt(np.sum(weights * _power(field))))


def log_weighted_hs_norm(field: SpectralField, s: float, shift: Optional[float] = None) -> float:
    """hs_norm with an extra log(a + |xi|) inside the sum."""
    base = _shift(field, shift) + field.grid.kmag
    weights = np.power(base, 2 * s) * np.log(base)
    return float(np.sqrt(np.sum(weights * _power(field))))


def sobolev_norm(field: SpectralField, s: float, log_weight: bool = False) -> float:
    """
    Bessel-potential norm sqrt(sum (1 + |xi|^2)^s |theta_hat|^2).

    With log_weight the sum carries log(a + |xi|), a the grid shift.
    """
    kmag = field.grid.kmag
    weights = np.power(1.0 + kmag**2, s)
    if log_weight:
        weights = weights * np.log(field.grid.shift + kmag)
    return float(np.sqrt(np.sum(weights * _power(field))))


def compare_fields(
    a: SpectralField,
    b: SpectralField,
    s: float,
    shift: Optional[float] = None,
) -> float:
    """hs_norm of a - b. Raises GridError on mismatched grids."""
    require_same_grid(a, b)
    return hs_norm(a - b, s, shift)


def uniqueness_metric(
    a: SpectralField,
    b: SpectralField,
    M: float,
    t: float,
    shift: Optional[float] = None,
) -> float:
    """||(a + Lambda)^(-M t) (a - b)||_L2, the decaying-exponent distance."""
    if M < 0:
        raise ValueError(f"M must be nonnegative, got {M}")
    return compare_fields(a, b, -M * t, shift)


# =============================================================================
# EXPONENT SCHEDULE
# =============================================================================

class NormSpec(BaseModel):
    """
    Decreasing exponent schedule s(t) = s0 - M t.

    Attributes:
        s0: Initial exponent, > 4
        M: Decay rate per unit time, >= 0
        log_weight: Also report the log-weighted norm
        shift: Constant a in the (a + |xi|) weights
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    s0: float = Field(default=5.0, description="Initial Sobolev exponent")
    M: float = Field(default=0.0, ge=0.0, description="Exponent decay rate")
    log_weight: bool = True
    shift: float = Field(default=DEFAULT_SHIFT, ge=1.0)

    @field_validator("s0")
    @classmethod
    def _s0_above_floor(cls, v: float) -> float:
        if not v > HORIZON_FLOOR:
            raise ValueError(f"s0 must exceed {HORIZON_FLOOR:g}, got {v}")
        return v

    def horizon(self) -> float:
        """Time at which s(t) reaches the floor; inf when M = 0."""
        if self.M == 0:
            return float("inf")
        return (self.s0 - HORIZON_FLOOR) / self.M


class ScheduledExponent(NamedTuple):
    s: float
    horizon_exceeded: bool


def exponent_schedule(ns: NormSpec, t: float) -> ScheduledExponent:
    """s0 - M t, flagged once it drops to the floor or below."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    s = ns.s0 - ns.M * t
    return ScheduledExponent(s=s, horizon_exceeded=s <= HORIZON_FLOOR)

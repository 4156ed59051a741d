"""
Multiplier Catalog

Radial Fourier symbols gamma(|xi|) used as Biot-Savart laws and
dissipation operators, plus the rescaled difference-quotient symbol and
its logarithmic limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import MultiplierError
from .fields import SpectralField, VelocityField
from .grid import DEFAULT_SHIFT, Grid
from .operators import apply_array, perp_gradient


class SymbolFamily(str, Enum):
    """Radial symbol families."""

    LOG10 = "log10"                  # log(a + r)
    POWER_SHIFT = "power_shift"      # (a + r)^-delta
    RESCALED = "rescaled"            # ((a + r)^-delta - 1) / delta
    LOG_POW = "log_pow"              # log^beta(a + r)
    LOG_OF_LOG = "log_of_log"        # log^alpha(a + log(a + r))
    FRAC_LAP = "frac_lap"            # r^(2 alpha)
    IDENTITY = "identity"            # 1
    LOG_LAPLACIAN = "log_laplacian"  # log^mu(a + r^2)
    TABULATED = "tabulated"          # piecewise linear in log(a + r)


_NEEDS_DELTA = {SymbolFamily.POWER_SHIFT, SymbolFamily.RESCALED}
_NEEDS_ALPHA = {SymbolFamily.LOG_OF_LOG, SymbolFamily.FRAC_LAP}


class MultiplierSpec(BaseModel):
    """
    A parameterized radial symbol.

    Attributes:
        family: Symbol family
        delta: Order for power_shift / rescaled, in (0, 1)
        beta: Log power for log_pow, > 0
        alpha: Exponent for log_of_log / frac_lap, > 0
        mu: Log power for log_laplacian, > 0
        shift: Constant a >= 1
        sign: +1 or -1, applied when the symbol drives a Biot-Savart law
        table: (r, gamma) knots for the tabulated family
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: SymbolFamily
    delta: Optional[float] = None
    beta: Optional[float] = None
    alpha: Optional[float] = None
    mu: Optional[float] = None
    shift: float = Field(default=DEFAULT_SHIFT)
    sign: int = 1
    table: Optional[tuple[tuple[float, float], ...]] = None

    @model_validator(mode="after")
    def _check_parameters(self) -> "MultiplierSpec":
        fam = self.family
        if not (self.shift >= 1 and math.isfinite(self.shift)):
            raise MultiplierError(f"shift must be >= 1, got {self.shift}")
        if self.sign not in (1, -1):
            raise MultiplierError(f"sign must be +1 or -1, got {self.sign}")
        if fam in _NEEDS_DELTA:
            if self.delta is None or not (0 < self.delta < 1):
                raise MultiplierError(f"{fam.value} needs delta in (0, 1), got {self.delta}")
        if fam is SymbolFamily.LOG_POW and (self.beta is None or self.beta <= 0):
            raise MultiplierError(f"log_pow needs beta > 0, got {self.beta}")
        if fam in _NEEDS_ALPHA and (self.alpha is None or self.alpha <= 0):
            raise MultiplierError(f"{fam.value} needs alpha > 0, got {self.alpha}")
        if fam is SymbolFamily.LOG_LAPLACIAN and (self.mu is None or self.mu <= 0):
            raise MultiplierError(f"log_laplacian needs mu > 0, got {self.mu}")
        if fam is SymbolFamily.TABULATED:
            _check_table(self.table)
        return self

    def __call__(self, r: float | np.ndarray) -> float | np.ndarray:
        return eval_symbol(self, r)

    def on_grid(self, grid: Grid) -> np.ndarray:
        return symbol_on_grid(grid, self)

    def with_sign(self, sign: int) -> "MultiplierSpec":
        return self.model_copy(update={"sign": sign})

    def describe(self) -> str:
        params = {
            k: v
            for k, v in (("delta", self.delta), ("beta", self.beta),
                         ("alpha", self.alpha), ("mu", self.mu))
            if v is not None
        }
        inner = ", ".join(f"{k}={v:g}" for k, v in params.items())
        sign = "-" if self.sign < 0 else "+"
        return f"{sign}{self.family.value}({inner})"


def _check_table(table: Optional[tuple[tuple[float, float], ...]]) -> None:
    if table is None or len(table) < 2:
        raise MultiplierError("tabulated symbol needs at least two (r, gamma) knots")
    rs = np.array([p[0] for p in table], dtype=float)
    gs = np.array([p[1] for p in table], dtype=float)
    if not (np.all(np.isfinite(rs)) and np.all(np.isfinite(gs))):
        raise MultiplierError("tabulated knots must be finite")
    if rs[0] != 0.0 or np.any(np.diff(rs) <= 0):
        raise MultiplierError("tabulated r knots must start at 0 and increase strictly")
    steps = np.diff(gs)
    if not (np.all(steps >= 0) or np.all(steps <= 0)):
        raise MultiplierError("tabulated symbol must be monotone")


# =============================================================================
# EVALUATION
# =============================================================================

def eval_symbol(m: MultiplierSpec, r: float | np.ndarray) -> float | np.ndarray:
    """
    Evaluate gamma(r) for r >= 0 (scalar or array). The sign is not applied.

    Raises:
        MultiplierError: If r is negative or the value is not finite
    """
    scalar = np.ndim(r) == 0
    r_arr = np.asarray(r, dtype=np.float64)
    if np.any(r_arr < 0):
        raise MultiplierError("symbol argument must be nonnegative")
    a = m.shift
    fam = m.family

    if fam is SymbolFamily.LOG10:
        out = np.log(a + r_arr)
    elif fam is SymbolFamily.POWER_SHIFT:
        out = np.power(a + r_arr, -m.delta)
    elif fam is SymbolFamily.RESCALED:
        # expm1 keeps the small-delta difference quotient accurate
        out = np.expm1(-m.delta * np.log(a + r_arr)) / m.delta
    elif fam is SymbolFamily.LOG_POW:
        out = np.power(np.log(a + r_arr), m.beta)
    elif fam is SymbolFamily.LOG_OF_LOG:
        out = np.power(np.log(a + np.log(a + r_arr)), m.alpha)
    elif fam is SymbolFamily.FRAC_LAP:
        out = np.power(r_arr, 2 * m.alpha)
    elif fam is SymbolFamily.IDENTITY:
        out = np.ones_like(r_arr)
    elif fam is SymbolFamily.LOG_LAPLACIAN:
        out = np.power(np.log(a + r_arr**2), m.mu)
    elif fam is SymbolFamily.TABULATED:
        knots_r = np.log(a + np.array([p[0] for p in m.table]))
        knots_g = np.array([p[1] for p in m.table])
        out = np.interp(np.log(a + r_arr), knots_r, knots_g)
    else:  # pragma: no cover
        raise MultiplierError(f"unknown family {fam}")

    if not np.all(np.isfinite(out)):
        raise MultiplierError(f"{m.describe()} is not finite on the requested range")
    return float(out) if scalar else out


@lru_cache(maxsize=128)
def symbol_on_grid(grid: Grid, m: MultiplierSpec) -> np.ndarray:
    """gamma(|xi|) on every grid mode; cached, read-only."""
    values = eval_symbol(m, grid.kmag)
    values = np.array(values, dtype=np.float64)
    values.flags.writeable = False
    return values


def velocity_from_scalar(field: SpectralField, law: MultiplierSpec) -> VelocityField:
    """
    u = sign * grad-perp(Gamma theta).

    Args:
        field: Advected scalar
        law: Biot-Savart symbol with its sign

    Returns:
        VelocityField: divergence-free velocity in spectral form
    """
    weights = law.sign * symbol_on_grid(field.grid, law)
    return perp_gradient(apply_array(field, weights))


# =============================================================================
# RESCALED LIMIT
# =============================================================================

@dataclass(frozen=True)
class LimitGapReport:
    """Distance between the rescaled symbol and -log(a + r)."""

    delta: float
    r_max: float
    samples: int
    sup_raw: float
    sup_weighted: float

    @property
    def within_envelope(self) -> bool:
        return self.sup_weighted <= 1.0


def rescaled_limit_gap(
    delta: float,
    r_max: float,
    samples: int = 1001,
    shift: float = DEFAULT_SHIFT,
) -> LimitGapReport:
    """
    Sup over r in [0, r_max] of |gamma_rescaled(r) + log(a + r)|, raw and
    divided by delta * log^2(a + r).

    A single sample evaluates r = 0 only.
    """
    if not (0 < delta < 1):
        raise MultiplierError(f"delta must lie in (0, 1), got {delta}")
    if not r_max > 0:
        raise MultiplierError(f"r_max must be positive, got {r_max}")
    if samples < 1:
        raise MultiplierError(f"samples must be positive, got {samples}")

    r = np.array([0.0]) if samples == 1 else np.linspace(0.0, r_max, samples)
    log_a = np.log(shift + r)
    y = delta * log_a
    # rescaled + log = (expm1(-y) + y) / delta, evaluated without cancellation
    gap = np.abs(np.expm1(-y) + y) / delta
    weighted = gap / (delta * log_a**2)
    return LimitGapReport(
        delta=delta,
        r_max=float(r_max),
        samples=int(r.size),
        sup_raw=float(np.max(gap)),
        sup_weighted=float(np.max(weighted)),
    )


# =============================================================================
# DISSIPATION CONDITIONS
# =============================================================================

def dissipation_margin(grid: Grid, upsilon: MultiplierSpec, xi0: float = 0.0) -> float:
    """min of upsilon(|xi|) / log(a + |xi|) over grid modes with |xi| > xi0."""
    kmag = grid.kmag
    region = kmag > xi0
    if not np.any(region):
        return math.inf
    ratio = symbol_on_grid(grid, upsilon)[region] / np.log(grid.shift + kmag[region])
    return float(np.min(ratio))


def check_dissipation_condition(grid: Grid, psi: MultiplierSpec, xi0: float = 0.0) -> bool:
    """psi(|xi|) >= log(a + |xi|) for every grid mode with |xi| > xi0."""
    return dissipation_margin(grid, psi, xi0) >= 1.0 - 1e-14

"""
Model Specifications

Which active-scalar system is integrated: the Biot-Savart law with its
sign, an optional dissipation operator, the time variable, dealiasing and
the integrating-factor splitting.
"""

from __future__ import annotations

from enum import Enum
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from spectral import DEFAULT_SHIFT, DealiasRule, Grid, MultiplierSpec, SymbolFamily, symbol_on_grid


class Splitting(str, Enum):
    """Integrating-factor RK4 variants."""

    STRANG = "strang"   # half-step factor, RK4 on advection, half-step factor
    LAWSON = "lawson"   # factor folded into every stage


class Dissipation(BaseModel):
    """kappa * Psi, Psi a radial symbol."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kappa: float = Field(gt=0.0)
    symbol: MultiplierSpec


class ModelSpec(BaseModel):
    """
    A model from the log-SQG / delta-SQG family.

    Attributes:
        name: Preset name, or "explicit"
        biot_savart: Velocity symbol, its sign included
        dissipation: Optional kappa * Psi term
        rescaled_time: Integrate in tau = delta * t with the rescaled symbol
        dealias_rule: Rule applied to the nonlinear product
        advection: When False, only the dissipation acts
        splitting: Integrating-factor variant
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "explicit"
    biot_savart: MultiplierSpec
    dissipation: Optional[Dissipation] = None
    rescaled_time: bool = False
    dealias_rule: DealiasRule = DealiasRule.TWO_THIRDS
    advection: bool = True
    splitting: Splitting = Splitting.STRANG

    @model_validator(mode="after")
    def _check_time_variable(self) -> "ModelSpec":
        if self.rescaled_time and self.biot_savart.family is not SymbolFamily.RESCALED:
            raise ValueError("rescaled_time requires the rescaled Biot-Savart symbol")
        return self

    @property
    def delta(self) -> Optional[float]:
        return self.biot_savart.delta

    @property
    def time_scale(self) -> float:
        """d t / d tau: 1/delta in rescaled time, else 1."""
        if self.rescaled_time:
            return 1.0 / self.biot_savart.delta
        return 1.0

    @property
    def kappa(self) -> float:
        return self.dissipation.kappa if self.dissipation else 0.0

    def dissipation_rate(self, grid: Grid) -> Optional[np.ndarray]:
        """Per-mode linear decay rate kappa * psi(|xi|) in the model's time."""
        if self.dissipation is None:
            return None
        psi = symbol_on_grid(grid, self.dissipation.symbol)
        return self.time_scale * self.dissipation.kappa * psi

    def with_options(self, **changes: object) -> "ModelSpec":
        return self.model_validate({**self.model_dump(), **changes})


# =============================================================================
# PRESETS
# =============================================================================

def _log10(shift: float, sign: int = 1) -> MultiplierSpec:
    return MultiplierSpec(family=SymbolFamily.LOG10, shift=shift, sign=sign)


def ohkitani(shift: float = DEFAULT_SHIFT, **options: object) -> ModelSpec:
    """u = -grad-perp log(a + Lambda) theta."""
    return ModelSpec(name="ohkitani", biot_savart=_log10(shift, sign=-1), **options)


def delta_sqg(
    delta: float,
    shift: float = DEFAULT_SHIFT,
    rescaled_time: bool = False,
    **options: object,
) -> ModelSpec:
    """
    u = grad-perp (a + Lambda)^-delta theta.

    In rescaled time the law becomes grad-perp ((a + Lambda)^-delta - 1)/delta;
    the dropped grad-perp theta term does not advect theta.
    """
    family = SymbolFamily.RESCALED if rescaled_time else SymbolFamily.POWER_SHIFT
    law = MultiplierSpec(family=family, delta=delta, shift=shift, sign=1)
    return ModelSpec(name="delta_sqg", biot_savart=law, rescaled_time=rescaled_time, **options)


def dissipative_delta_sqg(
    delta: float,
    kappa: float,
    psi: Optional[MultiplierSpec] = None,
    shift: float = DEFAULT_SHIFT,
    rescaled_time: bool = False,
    **options: object,
) -> ModelSpec:
    """delta-SQG plus kappa * Psi, Psi = log(a + Lambda) unless given."""
    base = delta_sqg(delta, shift, rescaled_time)
    return base.model_copy(update={
        "name": "dissipative_delta_sqg",
        "dissipation": Dissipation(kappa=kappa, symbol=psi or _log10(shift)),
        **options,
    })


def log_dissipative(
    beta: float,
    kappa: float,
    shift: float = DEFAULT_SHIFT,
    **options: object,
) -> ModelSpec:
    """Ohkitani plus kappa * log^beta(a + Lambda)."""
    psi = MultiplierSpec(family=SymbolFamily.LOG_POW, beta=beta, shift=shift)
    return ModelSpec(
        name="log_dissipative",
        biot_savart=_log10(shift, sign=-1),
        dissipation=Dissipation(kappa=kappa, symbol=psi),
        **options,
    )


def general_dissipative(
    kappa: float,
    upsilon: MultiplierSpec,
    shift: float = DEFAULT_SHIFT,
    **options: object,
) -> ModelSpec:
    """Ohkitani plus kappa * Upsilon for an arbitrary radial Upsilon."""
    return ModelSpec(
        name="general_dissipative",
        biot_savart=_log10(shift, sign=-1),
        dissipation=Dissipation(kappa=kappa, symbol=upsilon),
        **options,
    )


def log_laplacian_dissipative(
    mu: float,
    kappa: float,
    alpha: float,
    shift: float = DEFAULT_SHIFT,
    **options: object,
) -> ModelSpec:
    """u = grad-perp log^mu(a - Laplacian) theta with kappa (-Laplacian)^alpha."""
    law = MultiplierSpec(family=SymbolFamily.LOG_LAPLACIAN, mu=mu, shift=shift, sign=1)
    psi = MultiplierSpec(family=SymbolFamily.FRAC_LAP, alpha=alpha, shift=shift)
    return ModelSpec(
        name="log_laplacian_dissipative",
        biot_savart=law,
        dissipation=Dissipation(kappa=kappa, symbol=psi),
        **options,
    )


PRESETS: dict[str, Callable[..., ModelSpec]] = {
    "ohkitani": ohkitani,
    "delta_sqg": delta_sqg,
    "dissipative_delta_sqg": dissipative_delta_sqg,
    "log_dissipative": log_dissipative,
    "general_dissipative": general_dissipative,
    "log_laplacian_dissipative": log_laplacian_dissipative,
}

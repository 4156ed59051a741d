"""
Integrator

Pseudo-spectral right-hand side, integrating-factor RK4 and CFL control.

The nonlinearity u.grad(theta) is formed on the collocation grid and
truncated by the model's dealias rule. Linear dissipation kappa*psi is
integrated exactly through exp(-kappa psi h) factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
import structlog

from spectral import (
    Grid,
    SpectralField,
    dealias_mask,
    physical,
    spectral,
    symbol_on_grid,
)

from .models import ModelSpec, Splitting

logger = structlog.get_logger(__name__)

# Guard against a zero velocity in the CFL formula
MIN_SPEED = 1e-14


@dataclass(frozen=True)
class SimulationState:
    """theta_hat at time t after step_count accepted steps."""

    t: float
    theta: SpectralField
    step_count: int = 0

    @property
    def grid(self) -> Grid:
        return self.theta.grid


class BlowUpError(RuntimeError):
    """
    Raised when a step produces non-finite values or the velocity exceeds
    its ceiling. Carries the last valid state.
    """

    def __init__(self, reason: str, t: float, step: int, last_state: SimulationState) -> None:
        super().__init__(f"blow-up at t={t:.6g} (step {step}): {reason}")
        self.reason = reason
        self.t = t
        self.step = step
        self.last_state = last_state
        self.series = None  # partial diagnostics, attached by the runner
        self.states: list = []


# =============================================================================
# RIGHT-HAND SIDE
# =============================================================================

@dataclass(frozen=True)
class _Operators:
    """Per (grid, model) arrays reused by every stage."""

    law: np.ndarray                      # sign * gamma(|xi|)
    mask: Optional[np.ndarray]           # dealias keep-mask
    rate: Optional[np.ndarray]           # kappa * psi(|xi|), model time
    halves: dict = field(default_factory=dict, compare=False, hash=False)


@lru_cache(maxsize=32)
def _operators(grid: Grid, model: ModelSpec) -> _Operators:
    law = model.biot_savart.sign * symbol_on_grid(grid, model.biot_savart)
    return _Operators(
        law=law,
        mask=dealias_mask(grid, model.dealias_rule),
        rate=model.dissipation_rate(grid),
    )


def _advection(grid: Grid, model: ModelSpec, c: np.ndarray) -> np.ndarray:
    """-P[u . grad theta] for coefficient array c."""
    if not model.advection:
        return np.zeros_like(c)
    ops = _operators(grid, model)
    t = grid.tables
    psi = ops.law * c
    u1 = physical(-1j * t.d2 * psi)
    u2 = physical(1j * t.d1 * psi)
    dtheta1 = physical(1j * t.d1 * c)
    dtheta2 = physical(1j * t.d2 * c)
    out = -spectral(grid, u1 * dtheta1 + u2 * dtheta2)
    if ops.mask is not None:
        out = np.where(ops.mask, out, 0.0)
    # a divergence-free flow never moves the mean
    out[0, 0] = 0.0
    return out


def rhs(state: SimulationState, model: ModelSpec, include_dissipation: bool = True) -> SpectralField:
    """
    d theta_hat / dt for the model.

    Args:
        state: Current state
        model: Model to evaluate
        include_dissipation: Add -kappa psi theta_hat; the stepper leaves
            it to the integrating factor

    Returns:
        SpectralField: Hermitian, dealiased tendency
    """
    grid = state.grid
    c = state.theta.coeffs
    out = _advection(grid, model, c)
    rate = _operators(grid, model).rate
    if include_dissipation and rate is not None:
        out = out - rate * c
    return SpectralField(grid, out)


# =============================================================================
# TIME STEPPING
# =============================================================================

def _decay(grid: Grid, model: ModelSpec, h: float) -> Optional[np.ndarray]:
    """exp(-kappa psi h), cached per step length."""
    ops = _operators(grid, model)
    if ops.rate is None:
        return None
    factor = ops.halves.get(h)
    if factor is None:
        factor = np.exp(-ops.rate * h)
        factor.flags.writeable = False
        if len(ops.halves) > 64:
            ops.halves.clear()
        ops.halves[h] = factor
    return factor


def _rk4(grid: Grid, model: ModelSpec, c: np.ndarray, dt: float) -> np.ndarray:
    k1 = _advection(grid, model, c)
    k2 = _advection(grid, model, c + 0.5 * dt * k1)
    k3 = _advection(grid, model, c + 0.5 * dt * k2)
    k4 = _advection(grid, model, c + dt * k3)
    return c + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _strang(grid: Grid, model: ModelSpec, c: np.ndarray, dt: float) -> np.ndarray:
    half = _decay(grid, model, 0.5 * dt)
    if half is None:
        return _rk4(grid, model, c, dt)
    return half * _rk4(grid, model, half * c, dt)


def _lawson(grid: Grid, model: ModelSpec, c: np.ndarray, dt: float) -> np.ndarray:
    half = _decay(grid, model, 0.5 * dt)
    if half is None:
        return _rk4(grid, model, c, dt)
    full = _decay(grid, model, dt)
    k1 = _advection(grid, model, c)
    k2 = _advection(grid, model, half * (c + 0.5 * dt * k1))
    k3 = _advection(grid, model, half * c + 0.5 * dt * k2)
    k4 = _advection(grid, model, full * c + dt * half * k3)
    return full * c + dt / 6.0 * (full * k1 + 2.0 * half * (k2 + k3) + k4)


def step_rk4(state: SimulationState, model: ModelSpec, dt: float) -> SimulationState:
    """
    Advance one step of length dt.

    Raises:
        ValueError: If dt is not positive
        BlowUpError: If the new coefficients are not finite
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    grid = state.grid
    advance = _lawson if model.splitting is Splitting.LAWSON else _strang
    with np.errstate(over="ignore", invalid="ignore"):
        c = advance(grid, model, state.theta.coeffs, dt)
    if not np.all(np.isfinite(c)):
        t_new = state.t + dt
        logger.warning("run.blowup", t=t_new, step=state.step_count + 1, reason="non-finite")
        raise BlowUpError("non-finite coefficients", t_new, state.step_count + 1, state)
    mask = _operators(grid, model).mask
    if mask is not None:
        c = np.where(mask, c, 0.0)
    return SimulationState(
        t=state.t + dt,
        theta=SpectralField(grid, c),
        step_count=state.step_count + 1,
    )


def velocity_amplitude(state: SimulationState, model: ModelSpec) -> float:
    """max |u| over the collocation points."""
    grid = state.grid
    t = grid.tables
    psi = _operators(grid, model).law * state.theta.coeffs
    u1 = physical(-1j * t.d2 * psi)
    u2 = physical(1j * t.d1 * psi)
    return float(np.max(np.hypot(u1, u2)))


def cfl_dt(state: SimulationState, model: ModelSpec, cfl: float, dt_max: float) -> float:
    """min(dt_max, cfl * dx / max(1e-14, ||u||_inf))."""
    if not (0 < cfl <= 1):
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    speed = max(MIN_SPEED, velocity_amplitude(state, model))
    return min(dt_max, cfl * state.grid.dx / speed)

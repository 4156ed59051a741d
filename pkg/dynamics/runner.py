"""
Runner

Integrates a configured model from its initial condition to t_end,
sampling diagnostics and holding checkpoints in memory. Persistence is
left to the storage layer.
"""

from __future__ import annotations

import dataclasses
from enum import Enum
from typing import TYPE_CHECKING, Callable, NamedTuple, Optional

import structlog

from diagnostics import DiagnosticsSeries, NormSpec, measure
from spectral import SpectralField, dealias

from .integrator import (
    MIN_SPEED,
    BlowUpError,
    SimulationState,
    step_rk4,
    velocity_amplitude,
)
from .models import ModelSpec

if TYPE_CHECKING:
    from storage.config import SimulationConfig

logger = structlog.get_logger(__name__)

# Relative slack when snapping onto a checkpoint time
TIME_SNAP = 1e-12


class TimeMode(str, Enum):
    FIXED = "fixed"
    CFL = "cfl"


class RunResult(NamedTuple):
    checkpoints: list[SimulationState]
    series: DiagnosticsSeries

    @property
    def final(self) -> SimulationState:
        return self.checkpoints[-1]


def run(
    config: "SimulationConfig",
    *,
    theta0: Optional[SpectralField] = None,
    model: Optional[ModelSpec] = None,
    norms: Optional[NormSpec] = None,
    observer: Optional[Callable[[SimulationState], None]] = None,
) -> RunResult:
    """
    Integrate config's model to config.time.t_end.

    Args:
        config: Resolved simulation config
        theta0: Replaces the configured initial condition
        model: Replaces the configured model
        norms: Replaces the configured exponent schedule (required when
            the config asks for M = "auto")
        observer: Called with the state at every record

    Returns:
        RunResult: checkpoints (initial, requested times, final) and the
            diagnostics series

    Raises:
        BlowUpError: Non-finite state or velocity above the ceiling; the
            error carries the last valid state and the partial series
    """
    grid = config.grid.build()
    model = model or config.model.build(grid.shift)
    theta = theta0 if theta0 is not None else config.ic.build(grid)
    theta = dealias(theta, model.dealias_rule)
    norms = norms or config.norms.to_spec(grid.shift)
    timing = config.time
    t_end = timing.t_end
    record_every = config.output.record_every

    targets = sorted({t for t in config.output.checkpoint_times if 0 < t < t_end})
    targets.append(t_end)

    state = SimulationState(t=0.0, theta=theta, step_count=0)
    series = DiagnosticsSeries()
    checkpoints = [state]
    speed = velocity_amplitude(state, model)

    logger.info(
        "run.start",
        model=model.name,
        law=model.biot_savart.describe(),
        n=grid.n,
        t_end=t_end,
        time_mode=timing.mode.value,
    )

    while t_end > 0 and state.t < t_end:
        target = targets[0]
        if timing.mode is TimeMode.CFL:
            dt = min(timing.dt_max, timing.cfl * grid.dx / max(MIN_SPEED, speed))
        else:
            dt = timing.dt
        remaining = target - state.t
        hit = dt >= remaining - TIME_SNAP * max(1.0, target)
        if hit:
            dt = remaining

        if state.step_count % record_every == 0:
            series.append(measure(state.theta, model, norms, state.t, dt))
            if observer is not None:
                observer(state)

        try:
            new = step_rk4(state, model, dt)
        except BlowUpError as exc:
            exc.series = series
            raise
        if hit:
            new = dataclasses.replace(new, t=target)

        speed = velocity_amplitude(new, model)
        if speed > timing.u_max_ceiling:
            logger.warning("run.blowup", t=new.t, step=new.step_count, u_max=speed)
            exc = BlowUpError(
                f"u_max {speed:.6g} exceeds ceiling {timing.u_max_ceiling:g}",
                new.t, new.step_count, state,
            )
            exc.series = series
            raise exc
        state = new

        if hit:
            targets.pop(0)
            if state.t < t_end:
                checkpoints.append(state)
                logger.info("run.checkpoint", t=state.t, step=state.step_count)

    series.append(measure(state.theta, model, norms, state.t, 0.0))
    if observer is not None:
        observer(state)
    if state is not checkpoints[-1]:
        checkpoints.append(state)
    logger.info("run.record", t=state.t, steps=state.step_count, records=len(series))
    return RunResult(checkpoints=checkpoints, series=series)


def trajectory(
    theta0: SpectralField,
    model: ModelSpec,
    dt: float,
    steps: int,
    every: int = 1,
) -> list[SimulationState]:
    """
    Fixed-step integration sampled every `every` steps and at the end.

    Sample times are exactly j * dt, so trajectories with equal dt and
    steps line up without interpolation.

    Raises:
        BlowUpError: With the samples gathered so far attached as .states
    """
    if steps < 0:
        raise ValueError(f"steps must be nonnegative, got {steps}")
    state = SimulationState(t=0.0, theta=dealias(theta0, model.dealias_rule), step_count=0)
    states = [state]
    for j in range(1, steps + 1):
        try:
            state = step_rk4(state, model, dt)
        except BlowUpError as exc:
            exc.states = states
            raise
        state = dataclasses.replace(state, t=j * dt)
        if j % every == 0 or j == steps:
            states.append(state)
    return states

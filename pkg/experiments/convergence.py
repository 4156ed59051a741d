"""
Convergence Study

Compares delta-SQG, integrated in the rescaled time tau = delta t, with
the log-SQG reference trajectory on one shared step grid. Both runs see
the same stage times, so errors are taken without interpolation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import structlog

from diagnostics import HORIZON_FLOOR, compare_fields
from dynamics import (
    BlowUpError,
    SimulationState,
    Splitting,
    delta_sqg,
    ohkitani,
    trajectory,
)
from spectral import DealiasRule, SpectralField
from storage import ConfigError, SimulationConfig

logger = structlog.get_logger(__name__)

# Errors below this are round-off; no order is estimated from them
ERROR_FLOOR = 1e-14
# Smallest acceptable empirical order between adjacent rungs
MIN_ORDER = 0.8


# =============================================================================
# STUDY SPEC
# =============================================================================

@dataclass(frozen=True)
class ConvergenceStudySpec:
    """
    One convergence study.

    The comparison exponent is s(tau) = s0 - m_b * tau, which must stay
    above the floor of 4 up to tau_end.
    """

    deltas: tuple[float, ...]            # strictly decreasing, each in (0, 1)
    tau_end: float
    dt_tau: float
    theta0: SpectralField
    s0: float = 5.0
    m_b: float = 1.0
    seed: int = 0
    refine: bool = False                 # repeat at dt_tau / 2
    workers: int = 1
    every: int = 1                       # sample stride in steps
    dealias_rule: DealiasRule = DealiasRule.TWO_THIRDS
    splitting: Splitting = Splitting.STRANG

    def __post_init__(self) -> None:
        if not self.deltas:
            raise ValueError("delta ladder is empty")
        if any(not (0 < d < 1) for d in self.deltas):
            raise ValueError(f"every delta must lie in (0, 1), got {self.deltas}")
        if any(b >= a for a, b in zip(self.deltas, self.deltas[1:])):
            raise ValueError(f"delta ladder must be strictly decreasing, got {self.deltas}")
        if not (self.tau_end > 0 and self.dt_tau > 0):
            raise ValueError("tau_end and dt_tau must be positive")
        if self.m_b < 0:
            raise ValueError(f"m_b must be nonnegative, got {self.m_b}")
        if not self.exponent(self.tau_end) > HORIZON_FLOOR:
            raise ValueError(
                f"s(tau_end) = {self.exponent(self.tau_end):g} does not stay above {HORIZON_FLOOR:g}"
            )

    @property
    def steps(self) -> int:
        return max(1, round(self.tau_end / self.dt_tau))

    @property
    def dt(self) -> float:
        """Step length that lands exactly on tau_end."""
        return self.tau_end / self.steps

    @property
    def shift(self) -> float:
        return self.theta0.grid.shift

    def exponent(self, tau: float) -> float:
        return self.s0 - self.m_b * tau

    def describe(self) -> dict[str, Any]:
        grid = self.theta0.grid
        return {
            "deltas": list(self.deltas),
            "tau_end": self.tau_end,
            "dt_tau": self.dt,
            "steps": self.steps,
            "s0": self.s0,
            "m_b": self.m_b,
            "seed": self.seed,
            "n": grid.n,
            "length": grid.length,
            "shift": grid.shift,
            "dealias": self.dealias_rule.value,
            "splitting": self.splitting.value,
        }

    @classmethod
    def from_config(
        cls,
        config: SimulationConfig,
        m_b: Optional[float] = None,
        theta0: Optional[SpectralField] = None,
    ) -> "ConvergenceStudySpec":
        """
        Build the study from config.study, config.norms and config.ic.

        Args:
            m_b: Resolved exponent rate, required when study.m_b is "auto"
            theta0: Replaces the configured initial condition
        """
        study = config.study
        if m_b is None:
            if study.m_b == "auto":
                raise ConfigError("study.m_b", "'auto' must be resolved by the losing-exponent probe first")
            m_b = float(study.m_b)
        grid = config.grid.build()
        try:
            return cls(
                deltas=tuple(study.deltas),
                tau_end=study.tau_end,
                dt_tau=study.dt_tau,
                theta0=theta0 if theta0 is not None else config.ic.build(grid),
                s0=config.norms.s0,
                m_b=m_b,
                seed=config.ic.seed,
                refine=study.refine,
                workers=study.workers,
                every=config.output.record_every,
                dealias_rule=config.model.dealias,
                splitting=config.model.splitting,
            )
        except ValueError as exc:
            raise ConfigError("study", str(exc)) from exc


# =============================================================================
# REPORTS
# =============================================================================

@dataclass
class BranchReport:
    """Error curve E_delta(tau_j) of one rung."""

    delta: float
    taus: np.ndarray
    errors: np.ndarray
    status: str = "ok"                   # "ok" or "blowup"
    blowup_t: Optional[float] = None
    refined_errors: Optional[np.ndarray] = None

    @property
    def completed(self) -> bool:
        return self.status == "ok"

    @property
    def sup_error(self) -> float:
        return float(np.max(self.errors)) if self.errors.size else math.nan

    @property
    def refined_sup_error(self) -> Optional[float]:
        if self.refined_errors is None or not self.refined_errors.size:
            return None
        return float(np.max(self.refined_errors))

    def to_dict(self) -> dict[str, Any]:
        return {
            "delta": self.delta,
            "status": self.status,
            "blowup_t": self.blowup_t,
            "sup_error": self.sup_error,
            "refined_sup_error": self.refined_sup_error,
            "samples": int(self.errors.size),
        }


@dataclass
class StudyReport:
    branches: list[BranchReport]
    orders: list[float]
    passed_order: bool
    monotone: bool
    seed: int
    settings: dict[str, Any] = field(default_factory=dict)
    refinement_nonincreasing: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return self.passed_order and self.monotone and all(b.completed for b in self.branches)

    def curves(self) -> list[tuple[float, float, float]]:
        """(delta, tau, error) rows for every rung."""
        return [
            (b.delta, float(tau), float(err))
            for b in self.branches
            for tau, err in zip(b.taus, b.errors)
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "passed_order": self.passed_order,
            "monotone": self.monotone,
            "orders": [None if math.isnan(p) else p for p in self.orders],
            "refinement_nonincreasing": self.refinement_nonincreasing,
            "seed": self.seed,
            "settings": self.settings,
            "branches": [b.to_dict() for b in self.branches],
        }


def empirical_orders(deltas: list[float], sup_errors: list[float]) -> list[float]:
    """
    p_i = log(E_i / E_{i+1}) / log(delta_i / delta_{i+1}).

    NaN where either error is at the round-off floor or not finite.
    """
    orders = []
    for (d0, e0), (d1, e1) in zip(zip(deltas, sup_errors), zip(deltas[1:], sup_errors[1:])):
        usable = all(math.isfinite(e) and e > ERROR_FLOOR for e in (e0, e1))
        orders.append(math.log(e0 / e1) / math.log(d0 / d1) if usable else math.nan)
    return orders


def _monotone(sup_errors: list[float]) -> bool:
    """Errors do not grow as delta shrinks, round-off aside."""
    return all(
        e1 <= e0 or max(e0, e1) <= ERROR_FLOOR
        for e0, e1 in zip(sup_errors, sup_errors[1:])
    )


# =============================================================================
# STUDY
# =============================================================================

def reference_trajectory(spec: ConvergenceStudySpec, dt: float, steps: int, every: int) -> list[SimulationState]:
    """The log-SQG solution on the shared tau grid."""
    model = ohkitani(spec.shift, dealias_rule=spec.dealias_rule, splitting=spec.splitting)
    return trajectory(spec.theta0, model, dt, steps, every)


def _branch_errors(
    spec: ConvergenceStudySpec,
    reference: list[SimulationState],
    delta: float,
    dt: float,
    steps: int,
    every: int,
) -> tuple[np.ndarray, np.ndarray, Optional[float]]:
    model = delta_sqg(
        delta,
        spec.shift,
        rescaled_time=True,
        dealias_rule=spec.dealias_rule,
        splitting=spec.splitting,
    )
    blowup_t = None
    try:
        states = trajectory(spec.theta0, model, dt, steps, every)
    except BlowUpError as exc:
        states = exc.states
        blowup_t = exc.t
    taus = np.array([ref.t for ref in reference[: len(states)]])
    errors = np.array([
        compare_fields(state.theta, ref.theta, spec.exponent(ref.t), spec.shift)
        for state, ref in zip(states, reference)
    ])
    return taus, errors, blowup_t


def _run_branch(
    spec: ConvergenceStudySpec,
    delta: float,
    reference: list[SimulationState],
    fine_reference: Optional[list[SimulationState]],
) -> BranchReport:
    taus, errors, blowup_t = _branch_errors(spec, reference, delta, spec.dt, spec.steps, spec.every)
    report = BranchReport(
        delta=delta,
        taus=taus,
        errors=errors,
        status="ok" if blowup_t is None else "blowup",
        blowup_t=blowup_t,
    )
    if fine_reference is not None and report.completed:
        # half step, sampled at the coarse times
        _, fine, _ = _branch_errors(
            spec, fine_reference, delta, spec.dt / 2, 2 * spec.steps, 2 * spec.every
        )
        report.refined_errors = fine
    logger.info(
        "study.branch_done",
        delta=delta,
        status=report.status,
        sup_error=report.sup_error,
        refined_sup_error=report.refined_sup_error,
    )
    return report


def run_convergence_study(spec: ConvergenceStudySpec) -> StudyReport:
    """
    Error curves E_delta(tau) = ||theta_delta(tau) - theta(tau)||_{H^s(tau)}
    for every rung of the delta ladder.

    The reference trajectory is integrated once and only read by the
    branches, which run on spec.workers threads. A branch that blows up
    keeps the errors gathered before the blow-up.

    Raises:
        BlowUpError: If the reference trajectory itself blows up
    """
    reference = reference_trajectory(spec, spec.dt, spec.steps, spec.every)
    fine_reference = None
    if spec.refine:
        fine_reference = reference_trajectory(spec, spec.dt / 2, 2 * spec.steps, 2 * spec.every)

    with ThreadPoolExecutor(max_workers=spec.workers) as pool:
        branches = list(pool.map(
            lambda d: _run_branch(spec, d, reference, fine_reference),
            spec.deltas,
        ))

    sup_errors = [b.sup_error for b in branches]
    orders = empirical_orders(list(spec.deltas), sup_errors)
    refinement = None
    if spec.refine:
        refinement = all(
            b.refined_sup_error <= b.sup_error or b.sup_error <= ERROR_FLOOR
            for b in branches
            if b.completed and b.refined_sup_error is not None
        )

    return StudyReport(
        branches=branches,
        orders=orders,
        passed_order=all(p >= MIN_ORDER for p in orders if not math.isnan(p)),
        monotone=_monotone(sup_errors),
        seed=spec.seed,
        settings=spec.describe(),
        refinement_nonincreasing=refinement,
    )

"""
Probes

Desk-scale checks of the well-posedness statements:

- losing-exponent probe: the inviscid log-SQG norm in H^{s0 - M t}
  stays bounded for some finite M
- dissipative global probe: dissipative delta-SQG stays below twice its
  initial H^s norm, and the largest such delta on a ladder
- log-dissipative probe: a log^beta dissipation keeps H^s bounded
- uniqueness probe: the decaying-exponent distance between two nearby
  solutions
- resolution study: the same run on n and 2n
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import structlog

from diagnostics import HORIZON_FLOOR, NormSpec, hs_norm, uniqueness_metric
from dynamics import (
    BlowUpError,
    ModelSpec,
    Normalization,
    SimulationState,
    TimeMode,
    dissipative_delta_sqg,
    general_dissipative,
    log_dissipative,
    ohkitani,
    random_band,
    run,
    trajectory,
)
from spectral import (
    MultiplierSpec,
    SpectralField,
    SymbolFamily,
    check_dissipation_condition,
    dissipation_margin,
    truncate,
    zero_pad,
)
from storage import ConfigError, SimulationConfig

logger = structlog.get_logger(__name__)


@dataclass
class ProbeReport:
    """Outcome of one probe with the traces it was decided on."""

    probe: str                           # losing_exponent, dissipative_global, ...
    status: str
    passed: bool
    seed: int
    details: dict[str, Any] = field(default_factory=dict)
    traces: dict[str, list[float]] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "probe": self.probe,
            "status": self.status,
            "passed": self.passed,
            "seed": self.seed,
            "flags": list(self.flags),
            "details": self.details,
            "traces": self.traces,
            "config": self.config,
        }

    def curves(self) -> tuple[list[str], list[tuple[float, ...]]]:
        """Traces as a (columns, rows) table; traces share the time axis."""
        columns = list(self.traces)
        return columns, list(zip(*(self.traces[c] for c in columns)))


def _emit(report: ProbeReport) -> ProbeReport:
    logger.info(
        "probe.result",
        probe=report.probe,
        status=report.status,
        passed=report.passed,
        flags=report.flags,
    )
    return report


def _options(config: SimulationConfig) -> dict[str, Any]:
    return {"dealias_rule": config.model.dealias, "splitting": config.model.splitting}


def _require(value: Optional[float], key_path: str, probe: str) -> float:
    if value is None:
        raise ConfigError(key_path, f"required by the {probe} probe")
    return value


def _fixed_steps(config: SimulationConfig) -> tuple[float, int]:
    """Step length and count covering [0, t_end] on a uniform grid."""
    timing = config.time
    dt = timing.dt if timing.mode is TimeMode.FIXED else timing.dt_max
    if timing.t_end == 0:
        return 0.0, 0
    steps = max(1, math.ceil(timing.t_end / dt - 1e-9))
    return timing.t_end / steps, steps


def _sampled_run(
    config: SimulationConfig,
    theta0: SpectralField,
    model: ModelSpec,
    s: float,
) -> tuple[list[SimulationState], Optional[BlowUpError]]:
    """States at every record of a fixed-exponent run; the error on blow-up."""
    states: list[SimulationState] = []
    norms = NormSpec(s0=s, M=0.0, log_weight=False, shift=theta0.grid.shift)
    try:
        run(config, theta0=theta0, model=model, norms=norms, observer=states.append)
    except BlowUpError as exc:
        return states, exc
    return states, None


def _sup_hs(states: list[SimulationState], s: float) -> float:
    return max((hs_norm(st.theta, s) for st in states), default=0.0)


# =============================================================================
# LOSING EXPONENT
# =============================================================================

def run_losing_exponent_probe(
    config: SimulationConfig,
    normspec: Optional[NormSpec] = None,
) -> ProbeReport:
    """
    Search for a rate M keeping ||theta(t)||_{H^{s0 - M t}} within
    bound_a * ||theta0||_{H^s0} for the inviscid log-SQG flow.

    One trajectory is integrated; M doubles from probe.m0 until the trace
    is bounded, s(t_end) reaches the floor of 4 (horizon_exceeded) or M
    passes probe.m_ceiling (ceiling_reached). The fixed-exponent trace
    (M = 0) is reported alongside.
    """
    grid = config.grid.build()
    theta0 = config.ic.build(grid)
    probe = config.probe
    s0 = normspec.s0 if normspec is not None else config.norms.s0
    t_end = config.time.t_end
    model = ohkitani(grid.shift, **_options(config))

    hs0 = hs_norm(theta0, s0)
    bound = probe.bound_a * hs0
    states, blowup = _sampled_run(config, theta0, model, s0)
    times = [st.t for st in states]
    details: dict[str, Any] = {"s0": s0, "t_end": t_end, "hs0": hs0, "bound": bound}
    traces: dict[str, list[float]] = {
        "t": times,
        "norm_fixed": [hs_norm(st.theta, s0) for st in states],
    }

    if blowup is not None:
        details["blowup_t"] = blowup.t
        return _emit(ProbeReport(
            probe="losing_exponent", status="blowup", passed=False, seed=config.ic.seed,
            details=details, traces=traces, config=config.model_dump(mode="json"),
        ))

    tried: list[float] = []
    found: Optional[float] = None
    status = "ceiling_reached"
    M = probe.m0
    while M <= probe.m_ceiling:
        if s0 - M * t_end <= HORIZON_FLOOR:
            status = "horizon_exceeded"
            break
        tried.append(M)
        trace = [hs_norm(st.theta, s0 - M * st.t) for st in states]
        if max(trace) <= bound:
            found = M
            status = "bounded"
            traces["norm_losing"] = trace
            break
        M *= 2

    details.update({"M": found, "tried": tried, "fixed_sup": max(traces["norm_fixed"])})
    return _emit(ProbeReport(
        probe="losing_exponent", status=status, passed=found is not None, seed=config.ic.seed,
        details=details, traces=traces, config=config.model_dump(mode="json"),
    ))


# =============================================================================
# DISSIPATIVE GLOBAL
# =============================================================================

@dataclass(frozen=True)
class LadderRung:
    delta: float
    sup: float
    blowup_t: Optional[float]

    def within(self, hs0: float, bound: float) -> bool:
        return self.blowup_t is None and self.sup <= bound * hs0


def _dissipative_rung(
    config: SimulationConfig,
    theta0: SpectralField,
    delta: float,
    kappa: float,
    psi: MultiplierSpec,
    s: float,
) -> LadderRung:
    model = dissipative_delta_sqg(delta, kappa, psi, theta0.grid.shift, **_options(config))
    states, blowup = _sampled_run(config, theta0, model, s)
    return LadderRung(delta=delta, sup=_sup_hs(states, s), blowup_t=None if blowup is None else blowup.t)


def largest_passing_delta(rungs: list[LadderRung], hs0: float, bound: float) -> Optional[float]:
    """Largest delta such that it and every smaller rung stay within bound."""
    best = None
    for rung in sorted(rungs, key=lambda r: r.delta):
        if not rung.within(hs0, bound):
            break
        best = rung.delta
    return best


def delta_star_shrinks(star: Optional[float], star_scaled: Optional[float], strict: bool = True) -> bool:
    """Scaled datum admits a smaller delta*; a missing delta* on either side is never a shrink."""
    if star is None or star_scaled is None:
        return False
    return star_scaled < star if strict else star_scaled <= star


def _ladder(
    config: SimulationConfig,
    theta0: SpectralField,
    kappa: float,
    psi: MultiplierSpec,
    s: float,
) -> list[LadderRung]:
    with ThreadPoolExecutor(max_workers=config.study.workers) as pool:
        return list(pool.map(
            lambda d: _dissipative_rung(config, theta0, d, kappa, psi, s),
            config.probe.deltas,
        ))


def run_dissipative_global_probe(config: SimulationConfig, ladder: bool = True) -> ProbeReport:
    """
    sup_t ||theta_delta(t)||_{H^s} <= bound_c * ||theta0||_{H^s} for
    dissipative delta-SQG with model.delta, model.kappa and model.psi
    (log(a + |xi|) when unset), s = norms.s0.

    With ladder, every probe.deltas rung is run for theta0 and for
    scale_factor * theta0; the largest passing delta of each is the
    empirical delta*, and kappa / (10 delta* ||theta0||) the implied
    constant.
    """
    model_cfg = config.model
    delta = _require(model_cfg.delta, "model.delta", "dissipative global")
    kappa = _require(model_cfg.kappa, "model.kappa", "dissipative global")
    grid = config.grid.build()
    psi = model_cfg.psi or MultiplierSpec(family=SymbolFamily.LOG10, shift=grid.shift)
    probe = config.probe
    s = config.norms.s0
    theta0 = config.ic.build(grid)
    hs0 = hs_norm(theta0, s)

    condition = check_dissipation_condition(grid, psi, probe.xi0)
    flags = [] if condition else ["dissipation_condition_violated"]

    model = dissipative_delta_sqg(delta, kappa, psi, grid.shift, **_options(config))
    states, blowup = _sampled_run(config, theta0, model, s)
    sup = _sup_hs(states, s)
    main = LadderRung(delta=delta, sup=sup, blowup_t=None if blowup is None else blowup.t)
    passed = main.within(hs0, probe.bound_c)

    details: dict[str, Any] = {
        "delta": delta,
        "kappa": kappa,
        "psi": psi.describe(),
        "s": s,
        "hs0": hs0,
        "sup_hs": sup,
        "ratio": sup / hs0 if hs0 > 0 else 0.0,
        "bound": probe.bound_c,
        "dissipation_condition": condition,
        "xi0": probe.xi0,
    }
    if blowup is not None:
        details["blowup_t"] = blowup.t

    if ladder:
        scaled = theta0.scaled(probe.scale_factor)
        rungs = _ladder(config, theta0, kappa, psi, s)
        rungs_scaled = _ladder(config, scaled, kappa, psi, s)
        star = largest_passing_delta(rungs, hs0, probe.bound_c)
        star_scaled = largest_passing_delta(rungs_scaled, probe.scale_factor * hs0, probe.bound_c)
        details.update({
            "ladder": [r.delta for r in rungs],
            "ladder_sup": [r.sup for r in rungs],
            "ladder_sup_scaled": [r.sup for r in rungs_scaled],
            "delta_star": star,
            "delta_star_scaled": star_scaled,
            "scale_factor": probe.scale_factor,
            "empirical_constant": (
                kappa / (10.0 * star * hs0) if star is not None and hs0 > 0 else None
            ),
            "delta_star_decreases": delta_star_shrinks(star, star_scaled),
            "delta_star_nonincreasing": delta_star_shrinks(star, star_scaled, strict=False),
        })

    return _emit(ProbeReport(
        probe="dissipative_global",
        status="blowup" if blowup is not None else ("passed" if passed else "failed"),
        passed=passed,
        seed=config.ic.seed,
        details=details,
        traces={"t": [st.t for st in states], "hs": [hs_norm(st.theta, s) for st in states]},
        flags=flags,
        config=config.model_dump(mode="json"),
    ))


# =============================================================================
# LOG DISSIPATIVE
# =============================================================================

def run_logdiss_wellposedness_probe(config: SimulationConfig) -> ProbeReport:
    """
    ||theta(t)||_{H^s} <= bound_d * ||theta0||_{H^s} on [0, t_end] for
    log-SQG with kappa * log^beta(a + Lambda) dissipation, s = norms.s0.

    beta <= 1 runs are allowed and flagged outside_hypothesis. When
    model.upsilon is set, the run uses kappa * Upsilon instead and the
    report carries min Upsilon / log(a + |xi|) over the grid.
    """
    model_cfg = config.model
    kappa = _require(model_cfg.kappa, "model.kappa", "log-dissipative")
    grid = config.grid.build()
    probe = config.probe
    s = config.norms.s0
    flags: list[str] = []
    details: dict[str, Any] = {"kappa": kappa, "s": s, "bound": probe.bound_d}

    if model_cfg.upsilon is not None:
        model = general_dissipative(kappa, model_cfg.upsilon, grid.shift, **_options(config))
        details["upsilon"] = model_cfg.upsilon.describe()
        details["dissipation_margin"] = dissipation_margin(grid, model_cfg.upsilon, probe.xi0)
    else:
        beta = _require(model_cfg.beta, "model.beta", "log-dissipative")
        model = log_dissipative(beta, kappa, grid.shift, **_options(config))
        details["beta"] = beta
        if beta <= 1:
            flags.append("outside_hypothesis")
            details["note"] = "the well-posedness statement needs beta > 1"

    theta0 = config.ic.build(grid)
    hs0 = hs_norm(theta0, s)
    states, blowup = _sampled_run(config, theta0, model, s)
    trace = [hs_norm(st.theta, s) for st in states]
    sup = max(trace, default=0.0)
    passed = blowup is None and sup <= probe.bound_d * hs0
    details.update({"hs0": hs0, "sup_hs": sup, "ratio": sup / hs0 if hs0 > 0 else 0.0})
    if blowup is not None:
        details["blowup_t"] = blowup.t

    return _emit(ProbeReport(
        probe="log_dissipative",
        status="blowup" if blowup is not None else ("passed" if passed else "failed"),
        passed=passed,
        seed=config.ic.seed,
        details=details,
        traces={"t": [st.t for st in states], "hs": trace},
        flags=flags,
        config=config.model_dump(mode="json"),
    ))


# =============================================================================
# UNIQUENESS
# =============================================================================

def run_uniqueness_probe(
    config: SimulationConfig,
    perturbation: Optional[float] = None,
    M: Optional[float] = None,
) -> ProbeReport:
    """
    Trace of ||(a + Lambda)^(-M t) (theta - theta_eps)||_L2 for two
    inviscid log-SQG runs from theta0 and theta0 + eps * phi, phi a
    unit-L2 random field from the next seed. A repeated run from theta0
    must give a distance of exactly zero.
    """
    grid = config.grid.build()
    probe = config.probe
    eps = probe.perturbation if perturbation is None else perturbation
    M = probe.uniqueness_m if M is None else M
    ic = config.ic
    theta0 = ic.build(grid)
    k_max = min(ic.band[1], grid.dealias_cutoff)
    k_min = min(ic.band[0], k_max)
    phi = random_band(grid, k_min, k_max, ic.seed + 1, target=1.0, normalization=Normalization.L2)
    model = ohkitani(grid.shift, **_options(config))
    dt, steps = _fixed_steps(config)
    every = config.output.record_every

    try:
        base = trajectory(theta0, model, dt, steps, every)
        again = trajectory(theta0, model, dt, steps, every)
        moved = trajectory(theta0 + phi.scaled(eps), model, dt, steps, every)
    except BlowUpError as exc:
        return _emit(ProbeReport(
            probe="uniqueness", status="blowup", passed=False, seed=ic.seed,
            details={"blowup_t": exc.t, "epsilon": eps, "M": M},
            config=config.model_dump(mode="json"),
        ))

    distance = [uniqueness_metric(a.theta, b.theta, M, a.t) for a, b in zip(base, moved)]
    repeat = [uniqueness_metric(a.theta, b.theta, M, a.t) for a, b in zip(base, again)]
    identical_zero = all(d == 0.0 for d in repeat)
    finite = all(math.isfinite(d) for d in distance)
    initial = distance[0]
    return _emit(ProbeReport(
        probe="uniqueness",
        status="passed" if identical_zero and finite else "failed",
        passed=identical_zero and finite,
        seed=ic.seed,
        details={
            "epsilon": eps,
            "M": M,
            "dt": dt,
            "steps": steps,
            "initial_distance": initial,
            "max_distance": max(distance),
            "growth": max(distance) / initial if initial > 0 else 0.0,
            "identical_zero": identical_zero,
        },
        traces={"t": [st.t for st in base], "distance": distance},
        config=config.model_dump(mode="json"),
    ))


# =============================================================================
# RESOLUTION
# =============================================================================

def run_resolution_study(config: SimulationConfig) -> ProbeReport:
    """
    The configured model on n and 2n from the same band-limited datum,
    compared in H^s0 after truncating the fine run back to n. The run is
    resolved when the relative difference stays below probe.resolution_tol.
    """
    grid = config.grid.build()
    model = config.model.build(grid.shift)
    s = config.norms.s0
    theta0 = config.ic.build(grid)
    fine0 = zero_pad(theta0, 2 * grid.n)
    dt, steps = _fixed_steps(config)
    every = config.output.record_every

    try:
        coarse = trajectory(theta0, model, dt, steps, every)
        fine = trajectory(fine0, model, dt, steps, every)
    except BlowUpError as exc:
        return _emit(ProbeReport(
            probe="resolution", status="blowup", passed=False, seed=config.ic.seed,
            details={"blowup_t": exc.t, "n": grid.n}, config=config.model_dump(mode="json"),
        ))

    relative = []
    for a, b in zip(coarse, fine):
        diff = hs_norm(truncate(b.theta, grid.n) - a.theta, s)
        scale = hs_norm(a.theta, s)
        relative.append(diff / scale if scale > 0 else diff)
    worst = float(np.max(relative))
    resolved = worst <= config.probe.resolution_tol
    return _emit(ProbeReport(
        probe="resolution",
        status="resolved" if resolved else "under_resolved",
        passed=resolved,
        seed=config.ic.seed,
        details={
            "n": grid.n,
            "n_fine": 2 * grid.n,
            "s": s,
            "dt": dt,
            "steps": steps,
            "max_relative_difference": worst,
            "tolerance": config.probe.resolution_tol,
        },
        traces={"t": [st.t for st in coarse], "relative_difference": relative},
        config=config.model_dump(mode="json"),
    ))

"""
Pointwise Inequality Oracles

Randomized and grid checks of the elementary power inequality, the
Taylor bounds on the shifted power symbol, and the Riccati comparison.
"""

from __future__ import annotations

import math
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np
from scipy.integrate import trapezoid

from spectral import DEFAULT_SHIFT

from .report import Oracle, OracleInputError, OracleReport


# =============================================================================
# ELEMENTARY INEQUALITY
# =============================================================================

DEGENERATE_DENOMINATOR = 1e-12


def elementary_terms(xi: np.ndarray, eta: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Left and right sides for vectors xi, eta of shape (..., 2):

        | |xi|^s - |eta|^s - |xi-eta|^s - s (xi-eta).eta |xi-eta|^(s-2) |
        |eta|^2 |xi-eta|^(s-2) + |xi-eta| |eta|^(s-1)
    """
    xi = np.asarray(xi, dtype=np.float64)
    eta = np.asarray(eta, dtype=np.float64)
    diff = xi - eta
    a = np.linalg.norm(xi, axis=-1)
    b = np.linalg.norm(eta, axis=-1)
    c = np.linalg.norm(diff, axis=-1)
    dot = np.sum(diff * eta, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        c_s2 = np.where(c > 0, np.power(c, s - 2), 0.0)
    lhs = np.abs(a**s - b**s - c**s - s * dot * c_s2)
    rhs = b**2 * c_s2 + c * np.power(b, s - 1)
    return lhs, rhs


def _log_uniform_vectors(rng: np.random.Generator, size: int, lo: float, hi: float) -> np.ndarray:
    mag = np.exp(rng.uniform(math.log(lo), math.log(hi), size))
    angle = rng.uniform(0.0, 2 * math.pi, size)
    return np.stack([mag * np.cos(angle), mag * np.sin(angle)], axis=-1)


def check_elementary_inequality(
    s: float,
    samples: int,
    seed: int = 0,
    batch: int = 100_000,
    magnitude_range: tuple[float, float] = (1e-3, 1e3),
) -> OracleReport:
    """
    Empirical C_s = sup LHS/RHS over random xi, eta in R^2 with
    log-uniform magnitudes and uniform angles.

    Raises:
        OracleInputError: If s < 3 or samples < 1
    """
    if s < 3:
        raise OracleInputError(f"s must be >= 3, got {s}")
    if samples < 1:
        raise OracleInputError(f"samples must be positive, got {samples}")

    rng = np.random.Generator(np.random.PCG64(seed))
    lo, hi = magnitude_range
    worst = 0.0
    skipped = 0
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        xi = _log_uniform_vectors(rng, size, lo, hi)
        eta = _log_uniform_vectors(rng, size, lo, hi)
        lhs, rhs = elementary_terms(xi, eta, s)
        ok = rhs >= DEGENERATE_DENOMINATOR
        skipped += int(size - np.count_nonzero(ok))
        if np.any(ok):
            worst = max(worst, float(np.max(lhs[ok] / rhs[ok])))
        done += size

    return OracleReport(
        lemma="2.1",
        samples=samples,
        worst_ratio=worst,
        empirical_constant=worst,
        passed=math.isfinite(worst),
        seed=seed,
        skipped=skipped,
        details={"s": s, "magnitude_range": list(magnitude_range)},
    )


class ElementaryInequalityOracle(Oracle):
    lemma_id = "2.1"
    description = "Power-difference inequality with constant C_s, randomized over R^2"

    S_VALUES = (3.0, 4.0, 5.0)
    DEFAULT_SAMPLES = 100_000

    def run(self, **kwargs: Any) -> OracleReport:
        action = kwargs.get("action", "check")
        seed = kwargs.get("seed", 0)
        samples = kwargs.get("samples", self.DEFAULT_SAMPLES)

        if action == "check":
            return self._emit(check_elementary_inequality(kwargs.get("s", 3.0), samples, seed))

        elif action == "stability":
            # sup ratio at samples and 10x samples, same seed
            s = kwargs.get("s", 3.0)
            small = check_elementary_inequality(s, samples, seed)
            large = check_elementary_inequality(s, 10 * samples, seed)
            growth = large.worst_ratio / small.worst_ratio if small.worst_ratio > 0 else 1.0
            large.details.update(small_sup=small.worst_ratio, growth=growth)
            large.passed = large.passed and growth < 2.0
            return self._emit(large)

        raise OracleInputError(f"unknown action {action!r}")


# =============================================================================
# TAYLOR SYMBOL BOUNDS
# =============================================================================

def default_r_grid(r_max: float = 1e4, points: int = 2001) -> np.ndarray:
    return np.concatenate([[0.0], np.logspace(-3, math.log10(r_max), points - 1)])


def taylor_terms(delta: float, r: np.ndarray, shift: float = DEFAULT_SHIFT) -> dict[str, np.ndarray]:
    """
    Both Taylor bounds per point, with y = delta * log(a + r):

        |y - 1 + (a + r)^-delta| <= y^2
        |(a + r)^-delta - 1|     <= y
    """
    y = delta * np.log(shift + np.asarray(r, dtype=np.float64))
    em = np.expm1(-y)
    return {
        "lhs_second": np.abs(em + y),
        "rhs_second": y**2,
        "lhs_first": np.abs(em),
        "rhs_first": y,
    }


def check_taylor_symbol_bounds(
    delta: float,
    r_grid: Optional[np.ndarray] = None,
    shift: float = DEFAULT_SHIFT,
) -> OracleReport:
    """
    Pointwise check of both Taylor bounds; any violation fails.

    Raises:
        OracleInputError: If delta is outside (0, 1)
    """
    if not (0 < delta < 1):
        raise OracleInputError(f"delta must lie in (0, 1), got {delta}")
    r = default_r_grid() if r_grid is None else np.asarray(r_grid, dtype=np.float64)
    if np.any(r < 0):
        raise OracleInputError("r_grid must be nonnegative")

    terms = taylor_terms(delta, r, shift)
    y = terms["rhs_first"]
    slack = 4 * np.finfo(np.float64).eps * np.maximum(y, 1.0)
    violations = int(
        np.count_nonzero(terms["lhs_second"] > terms["rhs_second"] + slack)
        + np.count_nonzero(terms["lhs_first"] > terms["rhs_first"] + slack)
    )
    positive = terms["rhs_second"] > 0
    worst = 0.0
    if np.any(positive):
        worst = float(np.max(terms["lhs_second"][positive] / terms["rhs_second"][positive]))
    worst_first = 0.0
    if np.any(positive):
        worst_first = float(np.max(terms["lhs_first"][positive] / terms["rhs_first"][positive]))

    return OracleReport(
        lemma="2.3",
        samples=int(r.size),
        worst_ratio=max(worst, worst_first),
        empirical_constant=worst,
        passed=violations == 0,
        ceiling=1.0,
        build_breaking=True,
        details={
            "delta": delta,
            "violations": violations,
            "worst_second_order": worst,
            "worst_first_order": worst_first,
            "r_max": float(r.max()) if r.size else 0.0,
        },
    )


class TaylorSymbolOracle(Oracle):
    lemma_id = "2.3"
    description = "Taylor bounds relating the shifted power symbol to its logarithm"
    build_breaking = True

    DELTAS = (1e-1, 1e-2, 1e-3)

    def run(self, **kwargs: Any) -> OracleReport:
        deltas = kwargs.get("deltas", self.DELTAS)
        r_grid = kwargs.get("r_grid")
        shift = kwargs.get("shift", DEFAULT_SHIFT)
        reports = [check_taylor_symbol_bounds(d, r_grid, shift) for d in deltas]
        merged = OracleReport(
            lemma=self.lemma_id,
            samples=sum(r.samples for r in reports),
            worst_ratio=max(r.worst_ratio for r in reports),
            empirical_constant=max(r.empirical_constant for r in reports),
            passed=all(r.passed for r in reports),
            ceiling=1.0,
            build_breaking=True,
            details={"per_delta": [r.details for r in reports]},
        )
        return self._emit(merged)


# =============================================================================
# RICCATI COMPARISON
# =============================================================================

RICCATI_TOLERANCE = 1e-8

Forcing = Union[Callable[[np.ndarray], np.ndarray], Sequence[float], np.ndarray]


def _forcing(F: Forcing, T: float) -> Callable[[np.ndarray], np.ndarray]:
    if callable(F):
        return lambda t: np.broadcast_to(np.asarray(F(t), dtype=np.float64), np.shape(t))
    samples = np.asarray(F, dtype=np.float64)
    if samples.ndim != 1 or samples.size < 2:
        raise OracleInputError("sampled F needs at least two values on a uniform grid")
    knots = np.linspace(0.0, T, samples.size)
    return lambda t: np.interp(t, knots, samples)


def integrate_riccati(
    nu: float,
    G: float,
    F: Callable[[np.ndarray], np.ndarray],
    T: float,
    steps: int,
) -> tuple[np.ndarray, np.ndarray]:
    """RK4 for y' = nu F(t) + G y^2, y(0) = 0. Returns (t, y)."""
    h = T / steps
    t = np.linspace(0.0, T, steps + 1)
    y = np.zeros(steps + 1)

    def f(tt: float, yy: float) -> float:
        return nu * float(F(np.asarray(tt))) + G * yy * yy

    for j in range(steps):
        tj, yj = t[j], y[j]
        k1 = f(tj, yj)
        k2 = f(tj + 0.5 * h, yj + 0.5 * h * k1)
        k3 = f(tj + 0.5 * h, yj + 0.5 * h * k2)
        k4 = f(tj + h, yj + h * k3)
        y[j + 1] = yj + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return t, y


def check_riccati_bound(
    nu: float,
    T: float,
    G: float,
    F: Forcing,
    steps: int = 10_000,
) -> OracleReport:
    """
    Integrate the equality case of y' <= nu F + G y^2 and compare its
    maximum against min{3/(2 T G), 12 nu int_0^T F}.

    Raises:
        OracleInputError: If (nu, T, G, F) is not admissible; the message
            names the violated condition
    """
    if nu < 0:
        raise OracleInputError(f"nu must be nonnegative, got {nu}")
    if not T > 0:
        raise OracleInputError(f"T must be positive, got {T}")
    if not G > 0:
        raise OracleInputError(f"G must be positive, got {G}")
    forcing = _forcing(F, T)
    t_fine = np.linspace(0.0, T, steps + 1)
    f_fine = forcing(t_fine)
    if np.any(f_fine < 0) or not np.all(np.isfinite(f_fine)):
        raise OracleInputError("F must be finite and nonnegative")
    integral = float(trapezoid(f_fine, t_fine))
    admissibility = 8 * nu * T * G * integral
    if admissibility > 1 + 1e-12:
        raise OracleInputError(f"inadmissible: 8 nu T G int F = {admissibility:.6g} > 1")

    _, y = integrate_riccati(nu, G, forcing, T, steps)
    bound = min(3.0 / (2.0 * T * G), 12.0 * nu * integral)
    y_max = float(np.max(y))
    ratio = y_max / bound if bound > 0 else 0.0
    return OracleReport(
        lemma="2.5",
        samples=1,
        worst_ratio=ratio,
        empirical_constant=ratio,
        passed=y_max <= bound + RICCATI_TOLERANCE,
        ceiling=1.0,
        build_breaking=True,
        details={
            "nu": nu,
            "T": T,
            "G": G,
            "int_F": integral,
            "admissibility": admissibility,
            "y_end": float(y[-1]),
            "y_max": y_max,
            "bound": bound,
        },
    )


def random_admissible_tuples(count: int, seed: int) -> list[tuple[float, float, float, Callable]]:
    """Random (nu, T, G, F) with F = A (1 + b sin(w t + phi)) and 8 nu T G int F in (0, 1]."""
    rng = np.random.Generator(np.random.PCG64(seed))
    tuples = []
    for _ in range(count):
        T = rng.uniform(0.1, 2.0)
        G = math.exp(rng.uniform(math.log(0.1), math.log(10.0)))
        A = rng.uniform(0.1, 5.0)
        b = rng.uniform(0.0, 1.0)
        w = rng.uniform(0.0, 20.0)
        phi = rng.uniform(0.0, 2 * math.pi)
        u = rng.uniform(1e-3, 1.0)

        def F(t: np.ndarray, A: float = A, b: float = b, w: float = w, phi: float = phi) -> np.ndarray:
            return A * (1.0 + b * np.sin(w * t + phi))

        grid = np.linspace(0.0, T, 10_001)
        integral = float(trapezoid(F(grid), grid))
        nu = u / (8.0 * T * G * integral)
        tuples.append((nu, T, G, F))
    return tuples


class RiccatiOracle(Oracle):
    lemma_id = "2.5"
    description = "Riccati comparison bound under the admissibility condition"
    build_breaking = True

    RANDOM_TUPLES = 100
    STEPS = 10_000

    def run(self, **kwargs: Any) -> OracleReport:
        action = kwargs.get("action", "sweep")
        steps = kwargs.get("steps", self.STEPS)

        if action == "check":
            report = check_riccati_bound(
                kwargs["nu"], kwargs["T"], kwargs["G"], kwargs["F"], steps=steps
            )
            return self._emit(report)

        elif action == "sweep":
            seed = kwargs.get("seed", 0)
            count = kwargs.get("count", self.RANDOM_TUPLES)
            closed = check_riccati_bound(0.1, 1.0, 1.0, lambda t: np.ones_like(t), steps=steps)
            reports = [closed] + [
                check_riccati_bound(nu, T, G, F, steps=steps)
                for nu, T, G, F in random_admissible_tuples(count, seed)
            ]
            worst = max(r.worst_ratio for r in reports)
            merged = OracleReport(
                lemma=self.lemma_id,
                samples=len(reports),
                worst_ratio=worst,
                empirical_constant=worst,
                passed=all(r.passed for r in reports),
                seed=seed,
                ceiling=1.0,
                build_breaking=True,
                details={
                    "closed_form_y_end": closed.details["y_end"],
                    "closed_form_bound": closed.details["bound"],
                    "failures": sum(not r.passed for r in reports),
                },
            )
            return self._emit(merged)

        raise OracleInputError(f"unknown action {action!r}")

"""
Commutator Oracles

Spectral evaluation of the Kato-Ponce commutator and the square-root
symbol commutator. Products are formed on a grid twice as fine, so inputs
band-limited to n/3 multiply without aliasing.
"""

from __future__ import annotations

import math
from typing import Any, Optional, Sequence

import numpy as np

from diagnostics import sobolev_norm
from spectral import Grid, SpectralField, make_grid, max_mode, physical, spectral, zero_pad

from .report import Oracle, OracleInputError, OracleReport

BAND_TOLERANCE = 1e-13
STABILITY_TOL = 0.1


def _require_band_limited(*fields: SpectralField) -> None:
    for f in fields:
        scale = float(np.max(np.abs(f.coeffs))) if f.coeffs.size else 0.0
        top = max_mode(f, atol=BAND_TOLERANCE * max(scale, 1.0))
        if top > f.grid.n / 3:
            raise OracleInputError(
                f"input carries mode {top} above the band limit n/3 = {f.grid.n / 3:g}"
            )


def _refine(f: SpectralField, g: SpectralField) -> tuple[SpectralField, SpectralField]:
    if not f.grid.same_as(g.grid):
        raise OracleInputError("f and g must share a grid")
    _require_band_limited(f, g)
    m = 2 * f.grid.n
    return zero_pad(f, m), zero_pad(g, m)


def _product(grid: Grid, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return spectral(grid, physical(a) * physical(b))


def _l2(c: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(c) ** 2)))


def _is_constant(field: SpectralField) -> bool:
    """Only the k = 0 coefficient is nonzero; such an f commutes with every multiplier."""
    return not np.any(field.coeffs.ravel()[1:])


def relative_change(ratio: float, refined: float) -> float:
    """|refined - ratio| / ratio, or |refined| when ratio is zero."""
    return abs(refined - ratio) / ratio if ratio > 0 else abs(refined)


def _homogeneous_norm(field: SpectralField, p: float) -> float:
    """||Lambda^p f||_L2, the zero mode dropped."""
    kmag = field.grid.kmag
    weights = np.where(kmag > 0, np.power(np.where(kmag > 0, kmag, 1.0), 2 * p), 0.0)
    return float(np.sqrt(np.sum(weights * np.abs(field.coeffs) ** 2)))


def kato_ponce_ratio(f: SpectralField, g: SpectralField, s: float, eps: float) -> tuple[float, float, float]:
    """
    (ratio, numerator, denominator) for

        ||[Lambda^s, f] g|| / (||f||_H^(2+eps) ||Lambda^(s-1) g|| + ||Lambda^s f|| ||g||_H^(1+eps))
    """
    F, G = _refine(f, g)
    grid = F.grid
    den = (
        sobolev_norm(F, 2 + eps) * _homogeneous_norm(G, s - 1)
        + _homogeneous_norm(F, s) * sobolev_norm(G, 1 + eps)
    )
    if _is_constant(F):
        return 0.0, 0.0, den
    lam_s = np.power(grid.kmag, s)
    comm = lam_s * _product(grid, F.coeffs, G.coeffs) - _product(grid, F.coeffs, lam_s * G.coeffs)
    num = _l2(comm)
    if num == 0.0:
        return 0.0, num, den
    return num / den, num, den


def check_kato_ponce(
    f: SpectralField,
    g: SpectralField,
    s: float,
    eps: float,
    ceiling: float = 10.0,
    stability: float = STABILITY_TOL,
) -> OracleReport:
    """
    Commutator ratio at the inputs' resolution and again at twice that
    resolution; band-limited inputs should give the same ratio.

    Raises:
        OracleInputError: If s or eps is not positive, or inputs exceed n/3
    """
    if not s > 0:
        raise OracleInputError(f"s must be positive, got {s}")
    if not eps > 0:
        raise OracleInputError(f"eps must be positive, got {eps}")
    ratio, num, den = kato_ponce_ratio(f, g, s, eps)
    m = 2 * f.grid.n
    refined, _, _ = kato_ponce_ratio(zero_pad(f, m), zero_pad(g, m), s, eps)
    change = relative_change(ratio, refined)
    return OracleReport(
        lemma="2.2",
        samples=1,
        worst_ratio=max(ratio, refined),
        empirical_constant=ratio,
        passed=math.isfinite(ratio) and ratio <= ceiling and change <= stability,
        ceiling=ceiling,
        details={
            "s": s,
            "eps": eps,
            "n": f.grid.n,
            "numerator": num,
            "denominator": den,
            "ratio_refined": refined,
            "relative_change": change,
        },
    )


def sqrt_commutator_ratio(
    f: SpectralField,
    g: SpectralField,
    s: float,
    delta: float,
    eps: float,
) -> tuple[float, float, float]:
    """
    (ratio, numerator, denominator) for the commutator of
    T_j = d_j (1 - (a + Lambda)^-delta)^(1/2) with f acting on Lambda^s g,
    j = 1, 2 combined in l2, against delta^(1/2) ||f||_H^(2+eps)
    ||log^(1/2)(a + Lambda) g||_H^s.
    """
    F, G = _refine(f, g)
    grid = F.grid
    den = math.sqrt(delta) * sobolev_norm(F, 2 + eps) * sobolev_norm(G, s, log_weight=True)
    if _is_constant(F):
        return 0.0, 0.0, den
    t = grid.tables
    root = np.sqrt(1.0 - np.power(grid.shift + grid.kmag, -delta))
    h = np.power(grid.kmag, s) * G.coeffs
    total = 0.0
    for d in (t.d1, t.d2):
        sym = 1j * d * root
        comm = sym * _product(grid, F.coeffs, h) - _product(grid, F.coeffs, sym * h)
        total += _l2(comm) ** 2
    num = math.sqrt(total)
    if num == 0.0:
        return 0.0, num, den
    return num / den, num, den


def check_sqrt_commutator(
    f: SpectralField,
    g: SpectralField,
    s: float,
    delta: float,
    eps: float,
    stability: float = STABILITY_TOL,
) -> OracleReport:
    """
    Ratio at the inputs' resolution and at twice that resolution.
    Passes when finite and the two agree to within stability.

    Raises:
        OracleInputError: On delta outside (0, 1), nonpositive s or eps,
            or inputs exceeding n/3
    """
    if not (0 < delta < 1):
        raise OracleInputError(f"delta must lie in (0, 1), got {delta}")
    if not s > 0 or not eps > 0:
        raise OracleInputError("s and eps must be positive")
    ratio, num, den = sqrt_commutator_ratio(f, g, s, delta, eps)
    m = 2 * f.grid.n
    refined, _, _ = sqrt_commutator_ratio(zero_pad(f, m), zero_pad(g, m), s, delta, eps)
    change = relative_change(ratio, refined)
    return OracleReport(
        lemma="2.4",
        samples=1,
        worst_ratio=ratio,
        empirical_constant=ratio,
        passed=math.isfinite(ratio) and math.isfinite(refined) and change <= stability,
        details={"s": s, "eps": eps, "delta": delta, "n": f.grid.n,
                 "numerator": num, "denominator": den,
                 "ratio_refined": refined, "relative_change": change},
    )


def sqrt_commutator_ladder(
    f: SpectralField,
    g: SpectralField,
    s: float,
    eps: float,
    deltas: Sequence[float] = (0.4, 0.2, 0.1, 0.05),
    growth_limit: float = 1.2,
) -> OracleReport:
    """
    Ratios across a decreasing delta ladder. Passes when no step
    ratio(delta_next)/ratio(delta) exceeds growth_limit and every rung
    is stable under resolution doubling.
    """
    reports = [check_sqrt_commutator(f, g, s, d, eps) for d in deltas]
    ratios = [r.worst_ratio for r in reports]
    steps = [b / a if a > 0 else 1.0 for a, b in zip(ratios, ratios[1:])]
    worst = max(ratios)
    return OracleReport(
        lemma="2.4",
        samples=len(reports),
        worst_ratio=worst,
        empirical_constant=worst,
        passed=all(r.passed for r in reports) and all(x <= growth_limit for x in steps),
        ceiling=growth_limit,
        details={
            "deltas": list(deltas),
            "ratios": ratios,
            "steps": steps,
            "relative_changes": [r.details["relative_change"] for r in reports],
            "s": s,
            "eps": eps,
        },
    )


def reference_pair(n: int, shift: Optional[float] = None) -> tuple[SpectralField, SpectralField]:
    """f = cos x1, g = cos x2 on an n x n grid."""
    grid = make_grid(n) if shift is None else make_grid(n, shift=shift)
    f = np.zeros((n, n), dtype=np.complex128)
    g = np.zeros((n, n), dtype=np.complex128)
    f[1, 0] = f[-1, 0] = 0.5
    g[0, 1] = g[0, -1] = 0.5
    return SpectralField(grid, f), SpectralField(grid, g)


class KatoPonceOracle(Oracle):
    lemma_id = "2.2"
    description = "Kato-Ponce commutator ratio with resolution stability"

    CEILING = 10.0

    def run(self, **kwargs: Any) -> OracleReport:
        n = kwargs.get("n", 64)
        f, g = kwargs.get("f"), kwargs.get("g")
        if f is None or g is None:
            f, g = reference_pair(n)
        report = check_kato_ponce(
            f, g, kwargs.get("s", 2.0), kwargs.get("eps", 0.5), kwargs.get("ceiling", self.CEILING)
        )
        return self._emit(report)


class SqrtCommutatorOracle(Oracle):
    lemma_id = "2.4"
    description = "Square-root symbol commutator ratio across a delta ladder"

    DELTAS = (0.4, 0.2, 0.1, 0.05)
    GROWTH_LIMIT = 1.2

    def run(self, **kwargs: Any) -> OracleReport:
        n = kwargs.get("n", 64)
        f, g = kwargs.get("f"), kwargs.get("g")
        if f is None or g is None:
            f, g = reference_pair(n)
        report = sqrt_commutator_ladder(
            f,
            g,
            kwargs.get("s", 2.0),
            kwargs.get("eps", 0.5),
            kwargs.get("deltas", self.DELTAS),
            self.GROWTH_LIMIT,
        )
        return self._emit(report)

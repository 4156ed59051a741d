"""
Oracle Battery

The `verify` command's set of oracles, keyed by lemma id.
"""

from __future__ import annotations

from typing import Optional

from .commutators import KatoPonceOracle, SqrtCommutatorOracle
from .inequalities import ElementaryInequalityOracle, RiccatiOracle, TaylorSymbolOracle
from .report import Oracle, OracleInputError, OracleReport

ORACLES: dict[str, type[Oracle]] = {
    "2.1": ElementaryInequalityOracle,
    "2.2": KatoPonceOracle,
    "2.3": TaylorSymbolOracle,
    "2.4": SqrtCommutatorOracle,
    "2.5": RiccatiOracle,
}


def run_lemma(lemma: str, seed: int = 0, samples: Optional[int] = None) -> list[OracleReport]:
    """Reports for one lemma id; 2.1 yields one report per default s."""
    if lemma not in ORACLES:
        raise OracleInputError(f"unknown lemma {lemma!r}; expected one of {sorted(ORACLES)}")
    oracle = ORACLES[lemma]()
    if isinstance(oracle, ElementaryInequalityOracle):
        n = samples or oracle.DEFAULT_SAMPLES
        return [oracle.run(s=s, samples=n, seed=seed) for s in oracle.S_VALUES]
    if isinstance(oracle, RiccatiOracle):
        return [oracle.run(action="sweep", seed=seed)]
    return [oracle.run()]


def run_all(seed: int = 0, samples: Optional[int] = None) -> list[OracleReport]:
    reports: list[OracleReport] = []
    for lemma in ORACLES:
        reports.extend(run_lemma(lemma, seed, samples))
    return reports


def build_broken(reports: list[OracleReport]) -> bool:
    return any(r.breaks_build for r in reports)

"""
Oracle Reports

Common result type and base class for the inequality oracles.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

import structlog

logger = structlog.get_logger(__name__)


class OracleInputError(ValueError):
    """Inputs outside an oracle's hypotheses."""


@dataclass
class OracleReport:
    """
    Outcome of one oracle run.

    worst_ratio is LHS/RHS with the unknown constant stripped; for the
    sampled lemmas it doubles as the empirical constant.
    """

    lemma: str
    samples: int
    worst_ratio: float
    empirical_constant: float
    passed: bool
    seed: Optional[int] = None
    ceiling: Optional[float] = None
    build_breaking: bool = False
    skipped: int = 0
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not math.isfinite(self.worst_ratio):
            self.passed = False

    @property
    def breaks_build(self) -> bool:
        return self.build_breaking and not self.passed

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


class Oracle:
    """
    Base class for oracles. Subclasses set lemma_id and description and
    implement run(**kwargs) -> OracleReport.
    """

    lemma_id: str = ""
    description: str = ""
    build_breaking: bool = False

    def run(self, **kwargs: Any) -> OracleReport:  # pragma: no cover
        raise NotImplementedError

    def _emit(self, report: OracleReport) -> OracleReport:
        logger.info(
            "oracle.report",
            lemma=report.lemma,
            samples=report.samples,
            worst_ratio=report.worst_ratio,
            passed=report.passed,
            seed=report.seed,
        )
        return report

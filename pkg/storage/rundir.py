"""
Run Directories

Each run writes its resolved config, run metadata, diagnostics CSV and
checkpoints into one directory. Nothing is shared across directories.
"""

from __future__ import annotations

import json
from importlib import metadata
from pathlib import Path
from typing import Any, Optional

import structlog

from diagnostics import DiagnosticsSeries
from dynamics import ModelSpec, SimulationState
from spectral import get_workers

from .checkpoint import CHECKPOINT_VERSION, write_checkpoint
from .config import CONFIG_VERSION, SimulationConfig, serialize_config
from .csv_io import CSV_VERSION, emit_curves, emit_diagnostics

logger = structlog.get_logger(__name__)

PACKAGE_NAME = "logsqg"


def package_version() -> str:
    try:
        return metadata.version(PACKAGE_NAME)
    except metadata.PackageNotFoundError:
        return "0+unknown"


def run_metadata(
    config: SimulationConfig,
    status: str,
    extra: Optional[dict[str, Any]] = None,
) -> dict[str, Any]:
    """Everything besides the config needed to reproduce the run bit for bit."""
    meta = {
        "status": status,
        "seed": config.ic.seed,
        "threads": get_workers(),
        "package_version": package_version(),
        "config_version": CONFIG_VERSION,
        "checkpoint_version": CHECKPOINT_VERSION,
        "csv_version": CSV_VERSION,
    }
    if extra:
        meta.update(extra)
    return meta


def write_run_directory(
    path: str | Path,
    config: SimulationConfig,
    checkpoints: list[SimulationState],
    series: DiagnosticsSeries,
    model: Optional[ModelSpec] = None,
    status: str = "ok",
    extra: Optional[dict[str, Any]] = None,
) -> Path:
    """
    Write config.json, run.json, diagnostics.csv and checkpoint_<k>.gsqg.

    Returns:
        Path: The run directory
    """
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    (root / "config.json").write_text(serialize_config(config), encoding="utf-8")
    emit_diagnostics(series, root / "diagnostics.csv")
    for k, state in enumerate(checkpoints):
        write_checkpoint(state, root / f"checkpoint_{k}.gsqg", model=model, seed=config.ic.seed)
    meta = run_metadata(config, status, extra)
    meta["checkpoints"] = [
        {"file": f"checkpoint_{k}.gsqg", "t": s.t, "step": s.step_count}
        for k, s in enumerate(checkpoints)
    ]
    (root / "run.json").write_text(json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8")
    logger.info("run.written", path=str(root), status=status, checkpoints=len(checkpoints))
    return root


def write_report_directory(
    path: str | Path,
    config: SimulationConfig,
    summary: dict[str, Any],
    curves: Optional[dict[str, tuple[list[str], list[tuple[float, ...]]]]] = None,
    status: str = "ok",
) -> Path:
    """
    Write config.json, report.json (summary plus run metadata) and one
    <name>.csv per curve table.
    """
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    (root / "config.json").write_text(serialize_config(config), encoding="utf-8")
    for name, (columns, rows) in (curves or {}).items():
        emit_curves(columns, rows, root / f"{name}.csv")
    report = {"metadata": run_metadata(config, status), "summary": summary}
    (root / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True, default=str), encoding="utf-8"
    )
    logger.info("report.written", path=str(root), status=status, curves=len(curves or {}))
    return root

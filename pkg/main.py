"""
logsqg - Pseudo-spectral toolkit for log-SQG and delta-SQG

Main entry point: run, sweep, compare, verify and probe commands.
Results go to stdout as JSON; errors go to stderr as JSON.
"""

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Optional

import structlog

# Load environment variables
try:
    from dotenv import load_dotenv

    load_dotenv()
except ImportError:
    pass  # dotenv not installed, rely on system env vars

# Local imports
from diagnostics import DiagnosticsSeries
from dynamics import BlowUpError, SimulationState, run
from experiments import (
    ConvergenceStudySpec,
    ProbeReport,
    run_convergence_study,
    run_dissipative_global_probe,
    run_logdiss_wellposedness_probe,
    run_losing_exponent_probe,
    run_resolution_study,
    run_uniqueness_probe,
)
from oracles import ORACLES, OracleInputError, build_broken, run_all, run_lemma
from spectral import GridError, MultiplierError, set_workers
from storage import (
    CheckpointError,
    ConfigError,
    DiagnosticsFormatError,
    SimulationConfig,
    override,
    parse_config,
    write_report_directory,
    write_run_directory,
)

logger = structlog.get_logger("logsqg")

# Exit codes
EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_ORACLE = 4


def get_config() -> dict:
    """
    Load process configuration from environment variables.

    Returns:
        dict: Thread count, logging and output settings
    """
    return {
        "threads": os.getenv("GSQG_THREADS", "1"),
        "log_level": os.getenv("GSQG_LOG_LEVEL", "INFO").upper(),
        "log_json": os.getenv("GSQG_LOG_JSON", "false").lower() == "true",
        "output_dir": os.getenv("GSQG_OUTPUT_DIR", "runs"),
    }


def configure_logging(level: str = "INFO", json_logs: bool = False) -> None:
    """Route structlog to stderr; stdout carries command results only."""
    level_no = logging.getLevelName(level)
    if not isinstance(level_no, int):
        level_no = logging.INFO
    renderer = (
        structlog.processors.JSONRenderer()
        if json_logs
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.format_exc_info,
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level_no),
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )


def _stderr_logger(*args: Any) -> structlog.PrintLogger:
    # sys.stderr is resolved at each bind
    return structlog.PrintLogger(file=sys.stderr)


def _emit(payload: Any) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True, default=str))


def _fail(code: int, kind: str, message: str, **extra: Any) -> int:
    print(json.dumps({"error": kind, "message": message, "exit_code": code, **extra}), file=sys.stderr)
    return code


def _load(args: argparse.Namespace) -> SimulationConfig:
    config = parse_config(args.config)
    for item in getattr(args, "set", None) or []:
        key, _, raw = item.partition("=")
        config = override(config, key, _parse_value(raw))
    return config


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _out_dir(args: argparse.Namespace, settings: dict, default: str) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    return Path(settings["output_dir"]) / default


def _resolve_m(config: SimulationConfig, auto: bool) -> Optional[float]:
    """Rate from the losing-exponent probe when the config asks for "auto"."""
    if not auto:
        return None
    report = run_losing_exponent_probe(config)
    if report.details.get("M") is None:
        raise ConfigError("norms.M", f"losing-exponent probe found no rate ({report.status})")
    return float(report.details["M"])


# =============================================================================
# COMMANDS
# =============================================================================

def run_config(config: SimulationConfig, out: Path) -> dict:
    """
    Run one config into its own directory.

    A blow-up still writes the directory (status "blowup", the initial and
    last valid states, the partial series) before re-raising.
    """
    grid = config.grid.build()
    model = config.model.build(grid.shift)
    M = _resolve_m(config, config.norms.auto)
    norms = config.norms.to_spec(grid.shift, M=M)
    try:
        result = run(config, model=model, norms=norms)
    except BlowUpError as exc:
        series = exc.series if exc.series is not None else DiagnosticsSeries()
        theta0 = config.ic.build(grid)
        checkpoints = [SimulationState(t=0.0, theta=theta0), exc.last_state]
        write_run_directory(
            out, config, checkpoints, series, model=model, status="blowup",
            extra={"blowup": {"t": exc.t, "step": exc.step, "reason": exc.reason}},
        )
        raise
    write_run_directory(out, config, result.checkpoints, result.series, model=model, extra={"M": norms.M})
    return {
        "status": "ok",
        "directory": str(out),
        "t_final": result.final.t,
        "steps": result.final.step_count,
        "records": len(result.series),
        "checkpoints": len(result.checkpoints),
    }


def cmd_run(args: argparse.Namespace, settings: dict) -> int:
    config = _load(args)
    _emit(run_config(config, _out_dir(args, settings, Path(args.config).stem)))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, settings: dict) -> int:
    base = _load(args)
    values = [_parse_value(v) for v in args.values]
    configs = [override(base, args.param, v) for v in values]
    root = _out_dir(args, settings, f"{Path(args.config).stem}-sweep")

    def branch(item: tuple[Any, SimulationConfig]) -> dict:
        value, config = item
        out = root / f"{args.param}={value}"
        logger.info("sweep.branch", param=args.param, value=value, directory=str(out))
        try:
            return {"value": value, **run_config(config, out)}
        except BlowUpError as exc:
            return {"value": value, "status": "blowup", "directory": str(out), "t": exc.t}

    with ThreadPoolExecutor(max_workers=base.study.workers) as pool:
        results = list(pool.map(branch, zip(values, configs)))
    _emit({"param": args.param, "branches": results})
    return EXIT_BLOWUP if any(r["status"] == "blowup" for r in results) else EXIT_OK


def cmd_compare(args: argparse.Namespace, settings: dict) -> int:
    config = _load(args)
    m_b = _resolve_m(config, config.study.m_b == "auto")
    spec = ConvergenceStudySpec.from_config(config, m_b=m_b)
    report = run_convergence_study(spec)
    summary = report.to_dict()
    out = write_report_directory(
        _out_dir(args, settings, f"{Path(args.config).stem}-compare"),
        config,
        summary,
        curves={"curves": (["delta", "tau", "error"], report.curves())},
        status="passed" if report.passed else "failed",
    )
    _emit({**summary, "directory": str(out)})
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, settings: dict) -> int:
    if args.lemma == "all":
        reports = run_all(seed=args.seed, samples=args.samples)
    else:
        reports = run_lemma(args.lemma, seed=args.seed, samples=args.samples)
    _emit([r.to_dict() for r in reports])
    return EXIT_ORACLE if build_broken(reports) else EXIT_OK


PROBES: dict[str, Callable[..., ProbeReport]] = {
    "A": run_losing_exponent_probe,
    "C": run_dissipative_global_probe,
    "D": run_logdiss_wellposedness_probe,
    "U": run_uniqueness_probe,
    "R": run_resolution_study,
}


def cmd_probe(args: argparse.Namespace, settings: dict) -> int:
    config = _load(args)
    if args.probe == "C":
        report = run_dissipative_global_probe(config, ladder=not args.no_ladder)
    else:
        report = PROBES[args.probe](config)
    summary = report.to_dict()
    out = write_report_directory(
        _out_dir(args, settings, f"{Path(args.config).stem}-probe-{args.probe}"),
        config,
        summary,
        curves={"traces": report.curves()} if report.traces else None,
        status=report.status,
    )
    _emit({**summary, "directory": str(out)})
    return EXIT_BLOWUP if report.status == "blowup" else EXIT_OK


# =============================================================================
# ARGUMENTS
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="logsqg", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p: argparse.ArgumentParser) -> None:
        p.add_argument("config", help="JSON run configuration")
        p.add_argument("--out", help="Output directory (default: $GSQG_OUTPUT_DIR/<config name>)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="Override a config key")

    p = sub.add_parser("run", help="Integrate one configuration")
    with_config(p)
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("sweep", help="One run per parameter value")
    with_config(p)
    p.add_argument("--param", required=True, help="Dotted config key, e.g. model.delta")
    p.add_argument("--values", required=True, nargs="+", help="Values (parsed as JSON)")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("compare", help="Convergence study over the delta ladder")
    with_config(p)
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("verify", help="Run the inequality oracles")
    p.add_argument("--lemma", default="all", choices=["all", *ORACLES])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=None)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("probe", help="Well-posedness probes")
    p.add_argument("probe", choices=sorted(PROBES), help="Probe id")
    with_config(p)
    p.add_argument("--no-ladder", action="store_true", help="Skip the delta ladder of probe C")
    p.set_defaults(handler=cmd_probe)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """
    Main entry point for the logsqg command line.

    Returns:
        int: Exit code
    """
    settings = get_config()
    configure_logging(settings["log_level"], settings["log_json"])
    args = build_parser().parse_args(argv)
    try:
        set_workers(int(settings["threads"]))
        return args.handler(args, settings)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", exc.message, key_path=exc.key_path)
    except BlowUpError as exc:
        return _fail(EXIT_BLOWUP, "blowup", str(exc), t=exc.t, step=exc.step)
    except (GridError, MultiplierError, OracleInputError, CheckpointError, DiagnosticsFormatError, ValueError) as exc:
        return _fail(EXIT_CONFIG, "input", str(exc))
    except Exception as exc:  # pragma: no cover - last resort
        logger.exception("command.failed", command=args.command)
        return _fail(EXIT_UNEXPECTED, "unexpected", f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())

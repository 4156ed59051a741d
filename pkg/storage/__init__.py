"""
Storage Module

Config schema, checkpoint codec, diagnostics CSV and run directories.
"""

from .checkpoint import (
    CHECKPOINT_VERSION,
    MAGIC,
    Checkpoint,
    decode_checkpoint,
    encode_checkpoint,
    read_checkpoint,
    write_checkpoint,
)
from .config import (
    CONFIG_VERSION,
    SimulationConfig,
    override,
    parse_config,
    serialize_config,
    validate_config,
)
from .csv_io import CSV_VERSION, HEADER, emit_curves, emit_diagnostics, read_diagnostics
from .errors import CheckpointError, ConfigError, DiagnosticsFormatError
from .rundir import package_version, run_metadata, write_report_directory, write_run_directory

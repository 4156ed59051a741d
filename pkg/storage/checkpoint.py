"""
Checkpoint Codec

Binary layout, all little-endian:

    magic      5 bytes   b"GSQG1"
    version    uint16
    n          uint32
    length     float64
    shift      float64
    t          float64
    step       uint64
    seed       int64     (-1 when unknown)
    desc_len   uint32
    desc       desc_len bytes of UTF-8 JSON model descriptor
    payload    n * (n/2 + 1) complex128, row-major over (k1 index, k2 index
               0..n/2); the other half follows from Hermitian symmetry
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import structlog

from dynamics import ModelSpec, SimulationState
from spectral import SpectralField, make_grid

from .errors import CheckpointError

logger = structlog.get_logger(__name__)

MAGIC = b"GSQG1"
CHECKPOINT_VERSION = 1
HEADER = struct.Struct("<5sHIdddQqI")
PAYLOAD_DTYPE = np.dtype("<c16")


@dataclass(frozen=True)
class Checkpoint:
    state: SimulationState
    model: dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    version: int = CHECKPOINT_VERSION


def _half(coeffs: np.ndarray) -> np.ndarray:
    n = coeffs.shape[0]
    return np.ascontiguousarray(coeffs[:, : n // 2 + 1], dtype=PAYLOAD_DTYPE)


def _full(half: np.ndarray, n: int) -> np.ndarray:
    h = n // 2 + 1
    neg_rows = (-np.arange(n)) % n
    cols = n - np.arange(h, n)
    full = np.empty((n, n), dtype=np.complex128)
    full[:, :h] = half
    full[:, h:] = np.conj(half[neg_rows][:, cols])
    return full


def encode_checkpoint(
    state: SimulationState,
    model: Optional[ModelSpec] = None,
    seed: Optional[int] = None,
) -> bytes:
    grid = state.grid
    desc = model.model_dump_json().encode("utf-8") if model is not None else b"{}"
    header = HEADER.pack(
        MAGIC,
        CHECKPOINT_VERSION,
        grid.n,
        grid.length,
        grid.shift,
        state.t,
        state.step_count,
        -1 if seed is None else seed,
        len(desc),
    )
    return header + desc + _half(state.theta.coeffs).tobytes()


def decode_checkpoint(blob: bytes) -> Checkpoint:
    """
    Raises:
        CheckpointError: On a foreign tag, unknown version or wrong length
    """
    if len(blob) < HEADER.size:
        raise CheckpointError(f"truncated header ({len(blob)} bytes)")
    magic, version, n, length, shift, t, step, seed, desc_len = HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise CheckpointError(f"bad format tag {magic!r}")
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")

    offset = HEADER.size
    desc = blob[offset : offset + desc_len]
    if len(desc) != desc_len:
        raise CheckpointError("truncated model descriptor")
    offset += desc_len
    expected = n * (n // 2 + 1) * PAYLOAD_DTYPE.itemsize
    payload = blob[offset:]
    if len(payload) != expected:
        raise CheckpointError(f"payload holds {len(payload)} bytes, expected {expected}")

    try:
        grid = make_grid(n, length, shift)
        model = json.loads(desc.decode("utf-8")) if desc_len else {}
    except ValueError as exc:
        raise CheckpointError(f"corrupt header: {exc}") from exc

    half = np.frombuffer(payload, dtype=PAYLOAD_DTYPE).reshape(n, n // 2 + 1)
    state = SimulationState(t=t, theta=SpectralField(grid, _full(half, n)), step_count=step)
    return Checkpoint(state=state, model=model, seed=None if seed < 0 else seed, version=version)


def write_checkpoint(
    state: SimulationState,
    path: str | Path,
    model: Optional[ModelSpec] = None,
    seed: Optional[int] = None,
) -> Path:
    path = Path(path)
    path.write_bytes(encode_checkpoint(state, model, seed))
    logger.debug("checkpoint.write", path=str(path), t=state.t, step=state.step_count)
    return path


def read_checkpoint(path: str | Path) -> Checkpoint:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read {path}: {exc}") from exc
    return decode_checkpoint(blob)

"""
Simulation Config

JSON run configuration validated by pydantic. Unknown keys are errors and
every error names its dotted key path.
"""

from __future__ import annotations

import copy
import json
import math
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from diagnostics import HORIZON_FLOOR, NormSpec
from dynamics import (
    PRESETS,
    Dissipation,
    IcKind,
    ModelSpec,
    Normalization,
    Splitting,
    TimeMode,
    explicit_modes,
    random_band,
    shear,
)
from spectral import (
    DEFAULT_LENGTH,
    DEFAULT_SHIFT,
    DealiasRule,
    Grid,
    MultiplierSpec,
    SpectralField,
    make_grid,
)

from .errors import ConfigError

CONFIG_VERSION = 1

_STRICT = ConfigDict(frozen=True, extra="forbid")


class GridSection(BaseModel):
    model_config = _STRICT

    n: int = 128
    length: float = DEFAULT_LENGTH
    shift: float = DEFAULT_SHIFT

    @model_validator(mode="after")
    def _valid_grid(self) -> "GridSection":
        self.build()
        return self

    def build(self) -> Grid:
        return make_grid(self.n, self.length, self.shift)


# parameters each preset needs, besides the shift
_PRESET_PARAMS: dict[str, tuple[str, ...]] = {
    "ohkitani": (),
    "delta_sqg": ("delta",),
    "dissipative_delta_sqg": ("delta", "kappa"),
    "log_dissipative": ("beta", "kappa"),
    "general_dissipative": ("kappa", "upsilon"),
    "log_laplacian_dissipative": ("mu", "kappa", "alpha"),
    "explicit": ("biot_savart",),
}


class ModelSection(BaseModel):
    """
    Either a named preset with its parameters, or preset "explicit" with
    biot_savart (and optionally dissipation) given as symbol specs.
    """

    model_config = _STRICT

    preset: Literal[
        "ohkitani",
        "delta_sqg",
        "dissipative_delta_sqg",
        "log_dissipative",
        "general_dissipative",
        "log_laplacian_dissipative",
        "explicit",
    ] = "ohkitani"
    delta: Optional[float] = None
    kappa: Optional[float] = None
    beta: Optional[float] = None
    alpha: Optional[float] = None
    mu: Optional[float] = None
    psi: Optional[MultiplierSpec] = None
    upsilon: Optional[MultiplierSpec] = None
    biot_savart: Optional[MultiplierSpec] = None
    dissipation: Optional[Dissipation] = None
    rescaled_time: bool = False
    dealias: DealiasRule = DealiasRule.TWO_THIRDS
    advection: bool = True
    splitting: Splitting = Splitting.STRANG

    @model_validator(mode="after")
    def _preset_parameters(self) -> "ModelSection":
        for name in _PRESET_PARAMS[self.preset]:
            if getattr(self, name) is None:
                raise ConfigError(name, f"required by preset {self.preset!r}")
        if self.delta is not None and not (0 < self.delta < 1):
            raise ConfigError("delta", f"must lie in (0, 1), got {self.delta}")
        if self.kappa is not None and not self.kappa > 0:
            raise ConfigError("kappa", f"must be positive, got {self.kappa}")
        if self.rescaled_time and self.preset not in ("delta_sqg", "dissipative_delta_sqg", "explicit"):
            raise ConfigError("rescaled_time", f"not available for preset {self.preset!r}")
        return self

    def build(self, shift: float = DEFAULT_SHIFT) -> ModelSpec:
        options = {
            "dealias_rule": self.dealias,
            "advection": self.advection,
            "splitting": self.splitting,
        }
        if self.preset == "explicit":
            return ModelSpec(
                biot_savart=self.biot_savart,
                dissipation=self.dissipation,
                rescaled_time=self.rescaled_time,
                **options,
            )
        params: dict[str, Any] = {"shift": shift}
        for name in _PRESET_PARAMS[self.preset]:
            params[name] = getattr(self, name)
        if self.preset in ("delta_sqg", "dissipative_delta_sqg"):
            params["rescaled_time"] = self.rescaled_time
        if self.preset == "dissipative_delta_sqg" and self.psi is not None:
            params["psi"] = self.psi
        return PRESETS[self.preset](**params, **options)


class TimeSection(BaseModel):
    model_config = _STRICT

    mode: TimeMode = TimeMode.CFL
    dt: Optional[float] = Field(default=None, gt=0.0)
    cfl: float = Field(default=0.5, gt=0.0, le=1.0)
    dt_max: float = Field(default=0.01, gt=0.0)
    t_end: float = Field(default=1.0, ge=0.0)
    u_max_ceiling: float = Field(default=1e6, gt=0.0)

    @model_validator(mode="after")
    def _dt_for_fixed(self) -> "TimeSection":
        if self.mode is TimeMode.FIXED and self.dt is None:
            raise ConfigError("dt", "required when mode is 'fixed'")
        return self


class IcSection(BaseModel):
    """
    Initial condition recipe. amplitude is the shear amplitude, or the
    target norm of a random band.
    """

    model_config = _STRICT

    kind: IcKind = IcKind.RANDOM_BAND
    band: tuple[float, float] = (1.0, 10.0)
    amplitude: float = 1.0
    normalization: Normalization = Normalization.HS
    norm_s: float = 5.0
    seed: int = Field(default=0, ge=0)
    mode: int = 1
    modes: list[tuple[int, int, float, float]] = Field(default_factory=list)

    def build(self, grid: Grid) -> SpectralField:
        if self.kind is IcKind.SHEAR:
            return shear(grid, self.amplitude, self.mode)
        if self.kind is IcKind.MODES:
            return explicit_modes(grid, self.modes)
        return random_band(
            grid,
            self.band[0],
            self.band[1],
            self.seed,
            target=self.amplitude,
            normalization=self.normalization,
            s=self.norm_s,
        )


class OutputSection(BaseModel):
    model_config = _STRICT

    record_every: int = Field(default=1, ge=1)
    checkpoint_times: list[float] = Field(default_factory=list)


class NormsSection(BaseModel):
    model_config = _STRICT

    s0: float = 5.0
    M: Union[float, Literal["auto"]] = 0.0
    log_weight: bool = True

    @model_validator(mode="after")
    def _check(self) -> "NormsSection":
        if not self.s0 > HORIZON_FLOOR:
            raise ConfigError("s0", f"must exceed {HORIZON_FLOOR:g}, got {self.s0}")
        if self.M != "auto" and not self.M >= 0:
            raise ConfigError("M", f"must be nonnegative or 'auto', got {self.M}")
        return self

    @property
    def auto(self) -> bool:
        return self.M == "auto"

    def to_spec(self, shift: float = DEFAULT_SHIFT, M: Optional[float] = None) -> NormSpec:
        if M is None:
            if self.auto:
                raise ConfigError("norms.M", "'auto' must be resolved by the losing-exponent probe first")
            M = float(self.M)
        return NormSpec(s0=self.s0, M=M, log_weight=self.log_weight, shift=shift)


class StudySection(BaseModel):
    """Singular-limit convergence study in rescaled time."""

    model_config = _STRICT

    deltas: list[float] = Field(default_factory=lambda: [0.4, 0.2, 0.1])
    tau_end: float = Field(default=0.5, gt=0.0)
    dt_tau: float = Field(default=0.005, gt=0.0)
    m_b: Union[float, Literal["auto"]] = 1.0
    refine: bool = False
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _ladder(self) -> "StudySection":
        if not self.deltas:
            raise ConfigError("deltas", "ladder is empty")
        if any(not (0 < d < 1) for d in self.deltas):
            raise ConfigError("deltas", "every delta must lie in (0, 1)")
        if any(b >= a for a, b in zip(self.deltas, self.deltas[1:])):
            raise ConfigError("deltas", "ladder must be strictly decreasing")
        return self


class ProbeSection(BaseModel):
    """Knobs of the losing-exponent, dissipative, uniqueness and resolution probes."""

    model_config = _STRICT

    m0: float = Field(default=1.0, gt=0.0)
    m_ceiling: float = Field(default=1024.0, gt=0.0)
    bound_a: float = Field(default=1.1, gt=0.0)
    deltas: list[float] = Field(default_factory=lambda: [0.4, 0.2, 0.1, 0.05, 0.025])
    bound_c: float = Field(default=2.0, gt=0.0)
    scale_factor: float = Field(default=4.0, gt=0.0)
    xi0: float = Field(default=0.0, ge=0.0)
    bound_d: float = Field(default=1.5, gt=0.0)
    perturbation: float = Field(default=1e-3, ge=0.0)
    uniqueness_m: float = Field(default=1.0, ge=0.0)
    resolution_tol: float = Field(default=1e-3, gt=0.0)


class SimulationConfig(BaseModel):
    """Complete run description. Sections default to the Ohkitani setup."""

    model_config = _STRICT

    version: int = CONFIG_VERSION
    grid: GridSection = Field(default_factory=GridSection)
    model: ModelSection = Field(default_factory=ModelSection)
    time: TimeSection = Field(default_factory=TimeSection)
    ic: IcSection = Field(default_factory=IcSection)
    output: OutputSection = Field(default_factory=OutputSection)
    norms: NormsSection = Field(default_factory=NormsSection)
    study: StudySection = Field(default_factory=StudySection)
    probe: ProbeSection = Field(default_factory=ProbeSection)

    @model_validator(mode="after")
    def _cross_sections(self) -> "SimulationConfig":
        if self.version != CONFIG_VERSION:
            raise ConfigError("version", f"unsupported config version {self.version}")
        n = self.grid.n
        if self.ic.kind is IcKind.RANDOM_BAND:
            k_min, k_max = self.ic.band
            if not 0 <= k_min <= k_max:
                raise ConfigError("ic.band", f"band [{k_min}, {k_max}] is not ordered")
            if k_max > n / 3:
                raise ConfigError("ic.band", f"band edge {k_max} exceeds n/3 = {n / 3:g}")
        if self.ic.kind is IcKind.SHEAR and not abs(self.ic.mode) <= n / 3:
            raise ConfigError("ic.mode", f"mode {self.ic.mode} exceeds n/3 = {n / 3:g}")
        for k1, k2, _, _ in self.ic.modes:
            if max(abs(k1), abs(k2)) > n / 3:
                raise ConfigError("ic.modes", f"mode ({k1}, {k2}) exceeds n/3 = {n / 3:g}")
        for t in self.output.checkpoint_times:
            if not (0 <= t <= self.time.t_end and math.isfinite(t)):
                raise ConfigError("output.checkpoint_times", f"{t} lies outside [0, t_end]")
        return self


# =============================================================================
# PARSING
# =============================================================================

def _key_path(error: dict[str, Any]) -> str:
    parts = [str(p) for p in error.get("loc", ())]
    cause = error.get("ctx", {}).get("error")
    if isinstance(cause, ConfigError) and cause.key_path:
        parts.append(cause.key_path)
    return ".".join(parts)


def _message(error: dict[str, Any]) -> str:
    cause = error.get("ctx", {}).get("error")
    if isinstance(cause, ConfigError):
        return cause.message
    return error.get("msg", "invalid value")


def validate_config(data: Any) -> SimulationConfig:
    """
    Validate a decoded JSON document.

    Raises:
        ConfigError: On the first error, with its dotted key path
    """
    try:
        return SimulationConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigError(_key_path(first), _message(first)) from exc


def parse_config(path: str | Path) -> SimulationConfig:
    """Read and validate a JSON config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"{path} is not valid JSON: {exc}") from exc
    return validate_config(data)


def serialize_config(config: SimulationConfig) -> str:
    """Resolved config as indented JSON; parses back to an equal config."""
    return config.model_dump_json(indent=2)


def override(config: SimulationConfig, key_path: str, value: Any) -> SimulationConfig:
    """Copy of config with one dotted key replaced and revalidated."""
    data = copy.deepcopy(config.model_dump(mode="json"))
    node = data
    parts = key_path.split(".")
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            raise ConfigError(key_path, "no such section")
        node = node[part]
    if parts[-1] not in node:
        raise ConfigError(key_path, "no such key")
    node[parts[-1]] = value
    return validate_config(data)

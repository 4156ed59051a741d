"""
Diagnostics Records

Per-sample diagnostics and the series a run accumulates.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import TYPE_CHECKING, Iterator, NamedTuple

import numpy as np

from spectral import SpectralField, physical, symbol_on_grid, velocity_from_scalar

from .norms import NormSpec, exponent_schedule, hs_norm, log_weighted_hs_norm

if TYPE_CHECKING:
    from dynamics.models import ModelSpec


class ConservedQuantities(NamedTuple):
    l2: float
    gamma_energy: float
    u_max: float


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One time sample of a trajectory."""

    t: float
    l2: float               # ||theta||_L2, spectral convention
    gamma_energy: float     # ||Gamma^(1/2) theta||_L2
    hs: float               # ||theta||_H^s(t)
    hs_log: float           # log-weighted companion of hs
    u_max: float            # sup |u| on the collocation grid
    dt: float               # step about to be taken (0 at the final sample)
    s_t: float              # current exponent

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in asdict(self).values())


COLUMNS: tuple[str, ...] = tuple(f.name for f in fields(DiagnosticsRecord))


@dataclass
class DiagnosticsSeries:
    """Ordered records of one run."""

    records: list[DiagnosticsRecord] = field(default_factory=list)

    def append(self, record: DiagnosticsRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[DiagnosticsRecord]:
        return iter(self.records)

    def __getitem__(self, index: int) -> DiagnosticsRecord:
        return self.records[index]

    def column(self, name: str) -> np.ndarray:
        if name not in COLUMNS:
            raise KeyError(f"unknown diagnostics column {name!r}")
        return np.array([getattr(r, name) for r in self.records], dtype=np.float64)

    def max_of(self, name: str) -> float:
        values = self.column(name)
        return float(values.max()) if values.size else 0.0

    def relative_drift(self, name: str) -> float:
        """max_j |q_j - q_0| / |q_0|; absolute when q_0 is zero."""
        values = self.column(name)
        if values.size == 0:
            return 0.0
        ref = abs(values[0])
        drift = float(np.max(np.abs(values - values[0])))
        return drift / ref if ref > 0 else drift


def conserved_quantities(theta: SpectralField, model: "ModelSpec") -> ConservedQuantities:
    """
    L2 norm, Gamma-energy and velocity amplitude.

    The Gamma-energy uses |gamma(|xi|)|^(1/2) weights from the model's
    Biot-Savart symbol.
    """
    power = np.abs(theta.coeffs) ** 2
    gamma = np.abs(symbol_on_grid(theta.grid, model.biot_savart))
    vel = velocity_from_scalar(theta, model.biot_savart)
    speed = np.hypot(physical(vel.u1.coeffs), physical(vel.u2.coeffs))
    return ConservedQuantities(
        l2=float(np.sqrt(np.sum(power))),
        gamma_energy=float(np.sqrt(np.sum(gamma * power))),
        u_max=float(np.max(speed)),
    )


def measure(
    theta: SpectralField,
    model: "ModelSpec",
    norms: NormSpec,
    t: float,
    dt: float,
) -> DiagnosticsRecord:
    """Build the record for theta at time t under the exponent schedule."""
    q = conserved_quantities(theta, model)
    s_t = exponent_schedule(norms, t).s
    hs_log = log_weighted_hs_norm(theta, s_t, norms.shift) if norms.log_weight else 0.0
    return DiagnosticsRecord(
        t=t,
        l2=q.l2,
        gamma_energy=q.gamma_energy,
        hs=hs_norm(theta, s_t, norms.shift),
        hs_log=hs_log,
        u_max=q.u_max,
        dt=dt,
        s_t=s_t,
    )

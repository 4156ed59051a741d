"""
Dynamics Module

Model presets, the pseudo-spectral right-hand side, integrating-factor
RK4 stepping and trajectory production.
"""

from .initial import IcKind, Normalization, explicit_modes, normalize, random_band, shear
from .integrator import (
    BlowUpError,
    SimulationState,
    cfl_dt,
    rhs,
    step_rk4,
    velocity_amplitude,
)
from .models import (
    PRESETS,
    Dissipation,
    ModelSpec,
    Splitting,
    delta_sqg,
    dissipative_delta_sqg,
    general_dissipative,
    log_dissipative,
    log_laplacian_dissipative,
    ohkitani,
)
from .runner import RunResult, TimeMode, run, trajectory

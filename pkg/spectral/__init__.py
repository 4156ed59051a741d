"""
Spectral Layer

Grid, field types, transforms, operators and the radial symbol catalog
for scalar fields on the square torus.
"""

from .errors import GridError, MultiplierError, NonFiniteError, SymmetryError
from .fields import RealField, SpectralField, VelocityField, require_same_grid
from .grid import DEFAULT_LENGTH, DEFAULT_SHIFT, MIN_MODES, Grid, make_grid
from .multiplier import (
    LimitGapReport,
    MultiplierSpec,
    SymbolFamily,
    check_dissipation_condition,
    dissipation_margin,
    eval_symbol,
    rescaled_limit_gap,
    symbol_on_grid,
    velocity_from_scalar,
)
from .operators import (
    DealiasRule,
    apply_array,
    apply_symbol,
    dealias,
    dealias_mask,
    divergence,
    gradient,
    l2_inner,
    max_mode,
    perp_gradient,
    sup_norm,
    truncate,
    zero_pad,
)
from .transforms import (
    SYMMETRY_TOLERANCE,
    enforce_hermitian,
    forward_transform,
    get_workers,
    hermitian_defect,
    inverse_transform,
    physical,
    set_workers,
    spectral,
)

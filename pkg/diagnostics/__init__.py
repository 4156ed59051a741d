"""
Diagnostics Module

Norms, exponent schedules, conserved quantities and trajectory records.
"""

from .norms import (
    HORIZON_FLOOR,
    NormSpec,
    ScheduledExponent,
    compare_fields,
    exponent_schedule,
    hs_norm,
    log_weighted_hs_norm,
    sobolev_norm,
    uniqueness_metric,
)
from .records import (
    COLUMNS,
    ConservedQuantities,
    DiagnosticsRecord,
    DiagnosticsSeries,
    conserved_quantities,
    measure,
)

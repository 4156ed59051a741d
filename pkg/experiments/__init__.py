"""
Experiments Module

Convergence study in rescaled time and the well-posedness probes.
"""

from .convergence import (
    ERROR_FLOOR,
    MIN_ORDER,
    BranchReport,
    ConvergenceStudySpec,
    StudyReport,
    empirical_orders,
    reference_trajectory,
    run_convergence_study,
)
from .probes import (
    LadderRung,
    ProbeReport,
    delta_star_shrinks,
    largest_passing_delta,
    run_dissipative_global_probe,
    run_logdiss_wellposedness_probe,
    run_losing_exponent_probe,
    run_resolution_study,
    run_uniqueness_probe,
)

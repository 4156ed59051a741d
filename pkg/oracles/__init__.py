"""
Oracles Module

Numerical checks of the inequalities the well-posedness theory rests on,
independent of the solver.
"""

from .battery import ORACLES, build_broken, run_all, run_lemma
from .commutators import (
    KatoPonceOracle,
    SqrtCommutatorOracle,
    check_kato_ponce,
    check_sqrt_commutator,
    kato_ponce_ratio,
    reference_pair,
    relative_change,
    sqrt_commutator_ladder,
    sqrt_commutator_ratio,
)
from .inequalities import (
    ElementaryInequalityOracle,
    RiccatiOracle,
    TaylorSymbolOracle,
    check_elementary_inequality,
    check_riccati_bound,
    check_taylor_symbol_bounds,
    elementary_terms,
    integrate_riccati,
    random_admissible_tuples,
    taylor_terms,
)
from .report import Oracle, OracleInputError, OracleReport

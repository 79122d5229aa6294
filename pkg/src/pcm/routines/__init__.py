"""One-dimensional coordinate-minimization routines."""

from .base import BUDGET, PRECISION, Routine, RoutineOutcome
from .rwt import (
    Move,
    RwtConfig,
    RwtRoutine,
    SignTest,
    Verdict,
    confidence_radius,
    run_rwt,
    rwt_init_depth,
    rwt_n0,
    sample_cap,
    sequential_test,
    walk_bias,
    walk_transition,
)
from .sgd import SgdConfig, SgdRoutine, run_sgd, sgd_termination, update_mu0

__all__ = [
    "BUDGET",
    "PRECISION",
    "Move",
    "Routine",
    "RoutineOutcome",
    "RwtConfig",
    "RwtRoutine",
    "SgdConfig",
    "SgdRoutine",
    "SignTest",
    "Verdict",
    "confidence_radius",
    "run_rwt",
    "run_sgd",
    "rwt_init_depth",
    "rwt_n0",
    "sample_cap",
    "sequential_test",
    "sgd_termination",
    "update_mu0",
    "walk_bias",
    "walk_transition",
]

"""Progressive coordinate minimization for stochastic convex optimization."""

from .controller import (
    PcmRun,
    PrecisionSchedule,
    ScheduleError,
    ScheduleViolation,
    gamma_lower_bound,
    run_parallel_pcm,
    run_pcm,
    validate_schedule,
)
from .objectives import (
    BoxDomain,
    Dataset,
    HeavyTailed,
    SubGaussian,
    make_hinge,
    make_l1_quadratic,
    make_quadratic,
    reference_quadratic,
)
from .routines import RwtRoutine, SgdRoutine

__version__ = "0.1.0"

__all__ = [
    "BoxDomain",
    "Dataset",
    "HeavyTailed",
    "PcmRun",
    "PrecisionSchedule",
    "RwtRoutine",
    "ScheduleError",
    "ScheduleViolation",
    "SgdRoutine",
    "SubGaussian",
    "gamma_lower_bound",
    "make_hinge",
    "make_l1_quadratic",
    "make_quadratic",
    "reference_quadratic",
    "run_parallel_pcm",
    "run_pcm",
    "validate_schedule",
]

"""Descent solver for locally Lipschitz functions built on min-norm
subgradient bundles over shrinking balls, plus a benchmark harness."""

from .core import (
    Control,
    Controls,
    DimensionMismatch,
    DomainError,
    InvalidConfig,
    IterationRecord,
    Oracle,
    Params,
    RadiusReset,
    Trace,
    as_point,
    default_controls,
    eval_control,
    validate_params,
)
from .metric import Metric, NotSymmetric, SingularMetric, hessian_metric, regularize_spd
from .minnorm import (
    BundleTooLarge,
    EmptyBundle,
    SimplexSolution,
    brute_force_min_norm,
    min_norm_point,
)
from .segsearch import CutResult, NonTermination, find_cutting_gradient
from .bundle import (
    DirectionOutcome,
    InnerBudgetExhausted,
    SegmentSearchFailed,
    approximate_direction,
    update_bundle,
)
from .solver import SolveObserver, line_search, next_radius, solve
from .benchmarks import Benchmark, InvalidDimension, benchmark_names, get_benchmark, run_benchmark

__version__ = "0.1.0"

__all__ = [
    "Control", "Controls", "DimensionMismatch", "DomainError", "InvalidConfig",
    "IterationRecord", "Oracle", "Params", "RadiusReset", "Trace", "as_point",
    "default_controls", "eval_control", "validate_params",
    "Metric", "NotSymmetric", "SingularMetric", "hessian_metric", "regularize_spd",
    "BundleTooLarge", "EmptyBundle", "SimplexSolution", "brute_force_min_norm",
    "min_norm_point",
    "CutResult", "NonTermination", "find_cutting_gradient",
    "DirectionOutcome", "InnerBudgetExhausted", "SegmentSearchFailed",
    "approximate_direction", "update_bundle",
    "SolveObserver", "line_search", "next_radius", "solve",
    "Benchmark", "InvalidDimension", "benchmark_names", "get_benchmark",
    "run_benchmark",
]

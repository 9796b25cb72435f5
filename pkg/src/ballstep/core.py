"""Shared domain types: points, oracles, control functions, solver
parameters, and iteration traces.

Everything here is immutable after construction and safe to share across
threads. Oracles are expected to be pure: repeated evaluation at the same
point must return identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "DomainError",
    "DimensionMismatch",
    "InvalidConfig",
    "Control",
    "RadiusReset",
    "Controls",
    "Oracle",
    "Params",
    "IterationRecord",
    "Trace",
    "as_point",
    "eval_control",
    "default_controls",
    "validate_params",
    "config_violations",
    "STATUS_CONVERGED_RADIUS",
    "STATUS_CONVERGED_TARGET",
    "STATUS_BUDGET",
    "STATUS_SEGMENT_FAILED",
    "ALL_STATUSES",
]


class DomainError(ValueError):
    """A control function was evaluated outside its domain (args must be > 0)."""


class DimensionMismatch(ValueError):
    """Vectors of different dimensions were mixed in one computation."""


class InvalidConfig(ValueError):
    """Solver configuration violates one or more constraints."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


STATUS_CONVERGED_RADIUS = "converged-radius"
STATUS_CONVERGED_TARGET = "converged-target"
STATUS_BUDGET = "budget-exhausted"
STATUS_SEGMENT_FAILED = "segment-search-failed"
ALL_STATUSES = (
    STATUS_CONVERGED_RADIUS,
    STATUS_CONVERGED_TARGET,
    STATUS_BUDGET,
    STATUS_SEGMENT_FAILED,
)


def as_point(x, dimension: Optional[int] = None) -> np.ndarray:
    """Validate and convert ``x`` to a finite 1-d float array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"point must be a 1-d sequence, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point has non-finite coordinates")
    if dimension is not None and arr.size != dimension:
        raise DimensionMismatch(f"expected dimension {dimension}, got {arr.size}")
    return arr


@dataclass(frozen=True)
class Control:
    """One-argument control map, non-decreasing and positive on (0, inf).

    Families:
      ``linear``    t -> scale * t     (used for the null-step threshold,
                                        and for geometric radius shrinking
                                        when scale < 1)
      ``rational``  t -> t / (1 + t)   (shrink family with harmonic decay)
    """

    family: str
    scale: float = 1.0

    def __call__(self, t: float) -> float:
        if t <= 0.0:
            raise DomainError(f"control argument must be positive, got {t}")
        if self.family == "linear":
            return self.scale * t
        if self.family == "rational":
            return t / (1.0 + t)
        raise DomainError(f"unknown control family {self.family!r}")


@dataclass(frozen=True)
class RadiusReset:
    """Two-argument control picking the fresh radius from (gradient norm, old radius).

    Families: ``second`` (x, y) -> y, ``first`` (x, y) -> x,
    ``max`` -> max(constant, y), ``min`` -> min(constant, y),
    ``const`` -> constant.

    Each family is known structurally to satisfy one of the two admissible
    asymptotic properties (recorded in :attr:`assumption_property`): (a) the
    value vanishing forces the first argument to vanish, or (b) for small
    second arguments the value dominates it.
    """

    family: str
    constant: float = 0.0

    def __call__(self, x: float, y: float) -> float:
        if x <= 0.0 or y <= 0.0:
            raise DomainError(f"radius reset arguments must be positive, got ({x}, {y})")
        if self.family == "second":
            return y
        if self.family == "first":
            return x
        if self.family == "max":
            return max(self.constant, y)
        if self.family == "min":
            return min(self.constant, y)
        if self.family == "const":
            return self.constant
        raise DomainError(f"unknown radius reset family {self.family!r}")

    @property
    def assumption_property(self) -> str:
        return {"second": "b", "first": "a", "max": "a", "min": "b", "const": "a"}[
            self.family
        ]


def eval_control(control, *args) -> float:
    """Evaluate a control family member on positive arguments."""
    return control(*args)


@dataclass(frozen=True)
class Controls:
    """The three control functions steering the outer loop.

    ``t1`` sets the null-step threshold on the bundle min-norm, ``t2`` shrinks
    the ball radius after a null step, and ``g`` picks the fresh radius at the
    start of every outer iteration.
    """

    t1: Control
    t2: Control
    g: RadiusReset


@dataclass(frozen=True)
class Oracle:
    """First-order oracle: function value and one subgradient (Euclidean).

    ``value`` and ``subgradient`` must be deterministic and side-effect free;
    ``subgradient`` returns one element of the generalized gradient as a
    vector of the oracle's dimension.
    """

    dimension: int
    value: Callable[[np.ndarray], float]
    subgradient: Callable[[np.ndarray], np.ndarray]


POLICY_ARMIJO_EXPAND = "armijo-expand"
POLICY_FIRST_NON_DECREASE = "first-non-decrease"
BUNDLE_KEEP_CUTS = "keep-cuts"
BUNDLE_KEEP_MIN_NORMS = "keep-min-norms"


@dataclass(frozen=True)
class Params:
    """Solver parameters. Defaults follow the reference configuration
    delta = 0.3, delta_prime = 0.35, geometric radius shrink 0.35."""

    eps0: float = 1.0
    delta: float = 0.3
    delta_prime: float = 0.35
    bundle_m: int = 10
    bundle_policy: str = BUNDLE_KEEP_CUTS
    max_iterations: int = 10**6
    max_gradient_evals: int = 10**7
    max_bisections: int = 60
    max_inner_steps: int = 500
    max_step_doublings: int = 30
    eps_tol: float = 1e-12
    f_target: Optional[float] = None
    gap_tol: float = 1e-8
    line_search_policy: str = POLICY_FIRST_NON_DECREASE
    sigma_growth: float = 2.0
    variant: str = "A"
    # reset the fresh radius from the previous iteration's gradient norm
    # instead of the current one (off by default)
    radius_reset_uses_previous: bool = False


def default_controls(params: Params) -> Controls:
    """Reference controls for the given parameters.

    Variant A: threshold t1(x) = x/eps0, shrink t2(x) = 0.35 x, reset = old
    radius. Variant B: t1(x) = 0.5 x (any slope below one works), same shrink,
    reset = gradient norm.
    """
    t2 = Control("linear", 0.35)
    if params.variant == "B":
        return Controls(t1=Control("linear", 0.5), t2=t2, g=RadiusReset("first"))
    return Controls(t1=Control("linear", 1.0 / params.eps0), t2=t2, g=RadiusReset("second"))


def config_violations(params: Params, controls: Controls) -> list[str]:
    """Names of all constraints the configuration violates (empty if valid)."""
    v = []
    if not (0.0 < params.delta < 1.0):
        v.append("delta must lie in (0, 1)")
    if not (params.delta < params.delta_prime):
        v.append("delta < delta_prime")
    if not (params.delta_prime < 1.0):
        v.append("delta_prime must lie below 1")
    if not (params.eps0 > 0.0):
        v.append("eps0 must be positive")
    if not (params.eps_tol > 0.0):
        v.append("eps_tol must be positive")
    if not (params.gap_tol > 0.0):
        v.append("gap_tol must be positive")
    if not (params.sigma_growth > 1.0):
        v.append("sigma_growth must exceed 1")
    for name in ("bundle_m", "max_iterations", "max_gradient_evals",
                 "max_bisections", "max_inner_steps", "max_step_doublings"):
        if getattr(params, name) < 1:
            v.append(f"{name} must be positive")
    if params.bundle_policy not in (BUNDLE_KEEP_CUTS, BUNDLE_KEEP_MIN_NORMS):
        v.append("unknown bundle_policy")
    if params.line_search_policy not in (POLICY_ARMIJO_EXPAND, POLICY_FIRST_NON_DECREASE):
        v.append("unknown line_search_policy")
    if params.variant not in ("A", "B"):
        v.append("variant must be A or B")

    if controls.t1.family != "linear":
        v.append("t1 must be from the linear family")
    elif controls.t1.scale <= 0.0:
        v.append("t1 scale must be positive")
    if controls.t2.family == "linear":
        if controls.t2.scale <= 0.0:
            v.append("t2 scale must be positive")
        elif controls.t2.scale >= 1.0:
            v.append("t2 iterates must vanish")
    elif controls.t2.family != "rational":
        v.append("unknown t2 family")
    if controls.g.family not in ("second", "first", "max", "min", "const"):
        v.append("unknown g family")
    elif controls.g.family in ("max", "min", "const") and controls.g.constant <= 0.0:
        v.append("g constant must be positive")
    return v


def validate_params(params: Params, controls: Controls) -> tuple[Params, Controls]:
    """Validate a configuration, raising :class:`InvalidConfig` with every
    violated constraint named."""
    violations = config_violations(params, controls)
    if violations:
        raise InvalidConfig(violations)
    return params, controls


@dataclass
class IterationRecord:
    """One outer iteration: the iterate, its value, the radius schedule the
    iteration went through, and cumulative evaluation counters."""

    k: int
    x: np.ndarray
    f: float
    eps_entry: float
    eps_inner: list = field(default_factory=list)
    branches: list = field(default_factory=list)
    a_norms: list = field(default_factory=list)
    sigma: Optional[float] = None
    metric_cond: float = 1.0
    grad_evals: int = 0
    value_evals: int = 0


@dataclass
class Trace:
    """Full per-iteration history of one solve."""

    records: list
    status: str
    gradient_evals: int
    value_evals: int

    @property
    def final_x(self) -> np.ndarray:
        return self.records[-1].x

    @property
    def final_f(self) -> float:
        return self.records[-1].f

    @property
    def iterations(self) -> int:
        return len(self.records) - 1 if len(self.records) > 0 else 0

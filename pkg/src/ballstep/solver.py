"""Outer descent loop: per-iteration metric selection, fresh-radius choice,
inner bundle calls, step-size line search, and termination bookkeeping.

Each outer iteration k samples one subgradient at x_k, picks a radius
eps_{k,0} = G(||a_k||_k, eps_k), and asks the bundle loop for a direction. A
null step shrinks the radius (eps <- T2(eps)) and retries; a descent outcome
is extended by a line search keeping the Armijo-type certificate
f(x - sigma h) - f(x) <= -delta ||a||_k sigma, and the accepted radius is
carried into the next iteration. Function values are strictly decreasing
across iterations by construction.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .core import (
    POLICY_ARMIJO_EXPAND,
    POLICY_FIRST_NON_DECREASE,
    STATUS_BUDGET,
    STATUS_CONVERGED_RADIUS,
    STATUS_CONVERGED_TARGET,
    STATUS_SEGMENT_FAILED,
    Controls,
    DomainError,
    InvalidConfig,
    IterationRecord,
    Oracle,
    Params,
    RadiusReset,
    Trace,
    as_point,
    default_controls,
    validate_params,
)
from .bundle import DESCENT, NULL_STEP, InnerBudgetExhausted, SegmentSearchFailed, approximate_direction
from .metric import Metric, hessian_metric

__all__ = ["SolveObserver", "next_radius", "line_search", "solve"]


class SolveObserver:
    """No-op instrumentation hooks; subclass to assert invariants in tests.

    All callbacks are optional to override. One observer instance belongs to
    one solve call.
    """

    def on_metric(self, k: int, metric: Metric):
        pass

    def on_branch(self, k: int, i: int, eps: float, kind: str, a_norm: float,
                  threshold: float):
        pass

    def on_cut(self, metric: Metric, a, b):
        pass

    def on_inner_step(self, metric: Metric, a, b, a_next):
        pass

    def on_bisection(self, level: int, lo, hi, f_lo, f_hi, seg_len: float,
                     a_norm: float, metric: Metric):
        pass

    def on_accept(self, k: int, x, f_x: float, x_new, f_new: float,
                  sigma: float, eps: float, a_norm: float):
        pass


class _GradientBudgetExceeded(RuntimeError):
    pass


class _CountingOracle:
    """Wraps a user oracle with evaluation counters and the gradient budget."""

    __slots__ = ("dimension", "_value", "_subgradient", "max_grads", "grads", "values")

    def __init__(self, oracle: Oracle, max_grads: int):
        self.dimension = oracle.dimension
        self._value = oracle.value
        self._subgradient = oracle.subgradient
        self.max_grads = max_grads
        self.grads = 0
        self.values = 0

    def value(self, x):
        self.values += 1
        return self._value(x)

    def subgradient(self, x):
        if self.grads >= self.max_grads:
            raise _GradientBudgetExceeded()
        self.grads += 1
        return self._subgradient(x)


def next_radius(a_norm: float, eps: float, g: RadiusReset) -> float:
    """Fresh radius for a new outer iteration: G(||a||_k, eps), exactly."""
    if a_norm <= 0.0 or eps <= 0.0:
        raise DomainError(f"next_radius needs positive inputs, got ({a_norm}, {eps})")
    return g(a_norm, eps)


_GOLDEN = 0.6180339887498949
_REFINE_STEPS = 40


def line_search(
    x: np.ndarray,
    h: np.ndarray,
    eps: float,
    a_norm: float,
    delta: float,
    value: Callable[[np.ndarray], float],
    policy: str = POLICY_FIRST_NON_DECREASE,
    growth: float = 2.0,
    max_doublings: int = 30,
    f_x: Optional[float] = None,
    f_eps: Optional[float] = None,
) -> tuple[float, np.ndarray, float]:
    """Extend the verified step eps along -h; returns (sigma, point, value).

    Candidates are sigma = eps * growth**p. ``armijo-expand`` keeps the last
    candidate satisfying the descent certificate and stops at the first
    failure. ``first-non-decrease`` stops at the first candidate where the
    value stops decreasing and then approximates that point numerically
    (golden-section refinement inside the bracketing interval), returning the
    best refined step that still carries the descent certificate. The
    fallback sigma = eps is always valid because the caller verified the
    certificate there.
    """
    if f_x is None:
        f_x = float(value(x))
    point = x - eps * h
    if f_eps is None:
        f_eps = float(value(point))
    fallback = (eps, point, f_eps)

    def certified(sigma: float, f_sigma: float) -> bool:
        return f_sigma - f_x <= -delta * a_norm * sigma

    if policy == POLICY_ARMIJO_EXPAND:
        best = fallback
        for p in range(1, max_doublings + 1):
            sigma = eps * growth**p
            trial = x - sigma * h
            f_t = float(value(trial))
            if certified(sigma, f_t):
                best = (sigma, trial, f_t)
            else:
                break
        return best

    if policy != POLICY_FIRST_NON_DECREASE:
        raise InvalidConfig([f"unknown line_search_policy {policy!r}"])

    sigmas = [eps]
    vals = [f_eps]
    stopped = None
    for p in range(1, max_doublings + 1):
        sigma = eps * growth**p
        f_t = float(value(x - sigma * h))
        sigmas.append(sigma)
        vals.append(f_t)
        if not (f_t < vals[-2]):
            stopped = p
            break
    candidates = list(zip(sigmas, vals))

    if stopped is not None:
        # the value stopped decreasing inside (sigma_{p-2}, sigma_p);
        # approximate the turning point by golden-section refinement
        lo = sigmas[stopped - 2] if stopped >= 2 else eps
        hi = sigmas[stopped]
        a, b = lo, hi
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        fc = float(value(x - c * h))
        fd = float(value(x - d * h))
        for _ in range(_REFINE_STEPS):
            if fc <= fd:
                b, d, fd = d, c, fc
                c = b - _GOLDEN * (b - a)
                fc = float(value(x - c * h))
            else:
                a, c, fc = c, d, fd
                d = a + _GOLDEN * (b - a)
                fd = float(value(x - d * h))
        candidates.extend([(c, fc), (d, fd)])

    feasible = [(s, v) for s, v in candidates if s >= eps and certified(s, v)]
    if not feasible:
        return fallback
    s, v = min(feasible, key=lambda t: (t[1], t[0]))
    return (s, x - s * h, v)


def solve(
    oracle: Oracle,
    x0,
    params: Params,
    controls: Optional[Controls] = None,
    metric_provider: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    observer: Optional[SolveObserver] = None,
) -> Trace:
    """Minimize the oracle from x0; returns the full iteration Trace.

    Terminates with status converged-radius (null step at a radius below
    eps_tol), converged-target (f within gap_tol of f_target), or
    budget-exhausted. Segment-search failure raises SegmentSearchFailed with
    the partial trace attached; the inner-step budget raises
    InnerBudgetExhausted likewise. metric_provider maps an iterate to a
    symmetric matrix (a Hessian) and is required for variant B, where the
    per-iteration norm is the quadratic form it induces after clamping.
    """
    if controls is None:
        controls = default_controls(params)
    validate_params(params, controls)
    if params.variant == "B" and metric_provider is None:
        raise InvalidConfig(["variant B requires a metric_provider"])

    x = as_point(x0, oracle.dimension)
    counted = _CountingOracle(oracle, params.max_gradient_evals)
    identity = Metric.identity(oracle.dimension)
    records: list[IterationRecord] = []

    def finish(status: str) -> Trace:
        if records:
            records[-1].grad_evals = counted.grads
            records[-1].value_evals = counted.values
        return Trace(records=records, status=status,
                     gradient_evals=counted.grads, value_evals=counted.values)

    f_x = float(counted.value(x))
    eps_k = params.eps0
    prev_a_norm: Optional[float] = None
    metric = identity

    if params.f_target is not None and f_x - params.f_target < params.gap_tol:
        records.append(IterationRecord(k=0, x=x.copy(), f=f_x, eps_entry=eps_k))
        return finish(STATUS_CONVERGED_TARGET)

    try:
        for k in range(params.max_iterations):
            if params.variant == "B":
                metric = hessian_metric(np.asarray(metric_provider(x), dtype=float))
            else:
                metric = identity
            if observer is not None:
                observer.on_metric(k, metric)
            record = IterationRecord(k=k, x=x.copy(), f=f_x, eps_entry=eps_k,
                                     metric_cond=metric.condition)
            records.append(record)

            a_k = metric.representer(np.asarray(counted.subgradient(x), dtype=float))
            a_norm_k = metric.norm(a_k)
            reset_arg = a_norm_k
            if params.radius_reset_uses_previous and prev_a_norm is not None:
                reset_arg = prev_a_norm
            if params.variant == "B" and metric.is_identity:
                # unusable curvature this iteration: the gradient norm is no
                # step-length estimate, so keep the previous radius instead
                eps_ki = eps_k
            elif reset_arg > 0.0:
                eps_ki = controls.g(reset_arg, eps_k)
            else:
                # stationary iterate: the reset control is undefined at
                # gradient norm zero; shrink from the old radius instead
                eps_ki = eps_k
            prev_a_norm = a_norm_k

            outcome = None
            while True:
                outcome = approximate_direction(
                    x, f_x, eps_ki, a_k, metric, counted, controls, params, observer
                )
                record.eps_inner.append(eps_ki)
                record.branches.append(outcome.kind)
                record.a_norms.append(outcome.a_norm)
                if observer is not None:
                    observer.on_branch(k, len(record.branches) - 1, eps_ki,
                                       outcome.kind, outcome.a_norm, controls.t1(eps_ki))
                if outcome.kind == NULL_STEP:
                    if eps_ki <= params.eps_tol:
                        return finish(STATUS_CONVERGED_RADIUS)
                    eps_ki = controls.t2(eps_ki)
                    continue
                break

            sigma, x_new, f_new = line_search(
                x, outcome.h, eps_ki, outcome.a_norm, params.delta, counted.value,
                params.line_search_policy, params.sigma_growth,
                params.max_step_doublings, f_x=f_x, f_eps=outcome.f_trial,
            )
            record.sigma = sigma
            record.grad_evals = counted.grads
            record.value_evals = counted.values
            if observer is not None:
                observer.on_accept(k, x, f_x, x_new, f_new, sigma, eps_ki, outcome.a_norm)
            x, f_x = x_new, f_new
            eps_k = eps_ki

            if params.f_target is not None and f_x - params.f_target < params.gap_tol:
                records.append(IterationRecord(k=k + 1, x=x.copy(), f=f_x,
                                               eps_entry=eps_k,
                                               metric_cond=metric.condition))
                return finish(STATUS_CONVERGED_TARGET)
    except _GradientBudgetExceeded:
        return finish(STATUS_BUDGET)
    except (SegmentSearchFailed, InnerBudgetExhausted) as exc:
        status = STATUS_SEGMENT_FAILED if isinstance(exc, SegmentSearchFailed) else STATUS_BUDGET
        exc.trace = finish(status)
        raise

    # iteration budget: record the last accepted iterate before returning
    records.append(IterationRecord(k=params.max_iterations, x=x.copy(), f=f_x,
                                   eps_entry=eps_k, metric_cond=metric.condition))
    return finish(STATUS_BUDGET)

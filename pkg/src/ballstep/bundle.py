"""Inner approximation of the ball subdifferential at a fixed iterate and
radius: iterate min-norm points over a retained bundle of subgradients until
either the null-step condition  ||a||_k < T1(eps)  or sufficient descent
f(x - eps h) - f(x) <= -delta ||a||_k eps  holds.

Each failed round asks the segment search for a cutting subgradient, which
guarantees the bundle's min-norm point shrinks geometrically, so one of the
two exits is reached after finitely many steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    BUNDLE_KEEP_CUTS,
    BUNDLE_KEEP_MIN_NORMS,
    Controls,
    Oracle,
    Params,
)
from .metric import Metric
from .minnorm import min_norm_point
from .segsearch import NonTermination, find_cutting_gradient

__all__ = [
    "InnerBudgetExhausted",
    "SegmentSearchFailed",
    "DirectionOutcome",
    "update_bundle",
    "approximate_direction",
]

NULL_STEP = "null"
DESCENT = "descent"


class InnerBudgetExhausted(RuntimeError):
    """The inner loop hit max_inner_steps without reaching either exit."""

    def __init__(self, inner_steps: int, eps: float, a_norm: float):
        self.inner_steps = inner_steps
        self.eps = eps
        self.a_norm = a_norm
        self.trace = None
        super().__init__(
            f"inner approximation exceeded {inner_steps} steps at radius "
            f"{eps:.3e} with bundle min-norm {a_norm:.3e}"
        )


class SegmentSearchFailed(RuntimeError):
    """Wraps segment-search NonTermination with the offending state."""

    def __init__(self, x: np.ndarray, eps: float, levels: int):
        self.x = x
        self.eps = eps
        self.levels = levels
        self.trace = None
        super().__init__(
            f"segment search failed after {levels} bisections at radius {eps:.3e}"
        )


@dataclass(frozen=True)
class DirectionOutcome:
    """Result of one inner approximation: a null step (small min-norm point)
    or a verified descent direction."""

    kind: str
    a: np.ndarray
    a_norm: float
    h: Optional[np.ndarray]
    f_trial: Optional[float]
    inner_steps: int
    gradient_evals: int
    value_evals: int


def _dedupe(points) -> list:
    seen = set()
    out = []
    for p in points:
        key = p.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def update_bundle(a0, min_norm_history, cut_history, policy: str, m: int) -> list:
    """Retained bundle after the j-th cut (j = len(cut_history) - 1).

    keep-cuts:      {a_0, a_j} plus the last m+1 cutting gradients
    keep-min-norms: {a_0} plus the last m+1 min-norm points plus the last cut
    Both retain the current min-norm point and the newest cut.
    """
    j = len(cut_history) - 1
    if policy == BUNDLE_KEEP_CUTS:
        cand = [a0, min_norm_history[j]] + list(cut_history[max(0, j - m): j + 1])
    elif policy == BUNDLE_KEEP_MIN_NORMS:
        cand = [a0] + list(min_norm_history[max(0, j - m): j + 1]) + [cut_history[j]]
    else:
        raise ValueError(f"unknown bundle policy {policy!r}")
    return _dedupe(cand)


def approximate_direction(
    x: np.ndarray,
    f_x: float,
    eps: float,
    a0: np.ndarray,
    metric: Metric,
    oracle: Oracle,
    controls: Controls,
    params: Params,
    observer=None,
) -> DirectionOutcome:
    """Run the inner bundle loop at iterate ``x`` and radius ``eps``.

    ``a0`` is the warm-start subgradient (k-representer of an element of the
    generalized gradient at x). Returns the first outcome reached; raises
    InnerBudgetExhausted past params.max_inner_steps and SegmentSearchFailed
    when the bisection cannot produce a cut.
    """
    threshold = controls.t1(eps)
    a = a0
    a_hist = [a0]
    cuts: list = []
    grads = 0
    values = 0

    for j in range(params.max_inner_steps + 1):
        a_norm = metric.norm(a)
        if a_norm < threshold:
            return DirectionOutcome(
                kind=NULL_STEP, a=a, a_norm=a_norm, h=None, f_trial=None,
                inner_steps=j, gradient_evals=grads, value_evals=values,
            )
        h = a / a_norm
        trial = x - eps * h
        f_trial = float(oracle.value(trial))
        values += 1
        if f_trial - f_x <= -params.delta * a_norm * eps:
            return DirectionOutcome(
                kind=DESCENT, a=a, a_norm=a_norm, h=h, f_trial=f_trial,
                inner_steps=j, gradient_evals=grads, value_evals=values,
            )
        try:
            cut = find_cutting_gradient(
                x, f_x, eps, a, metric, oracle,
                params.delta, params.delta_prime, params.max_bisections,
                f_trial=f_trial, observer=observer,
            )
        except NonTermination as exc:
            raise SegmentSearchFailed(x, eps, exc.levels) from exc
        grads += cut.gradient_evals
        values += cut.value_evals
        cuts.append(cut.gradient)
        if observer is not None:
            observer.on_cut(metric, a, cut.gradient)
        retained = update_bundle(a0, a_hist, cuts, params.bundle_policy, params.bundle_m)
        sol = min_norm_point(retained, metric)
        if observer is not None:
            observer.on_inner_step(metric, a, cut.gradient, sol.point)
        a_hist.append(sol.point)
        a = sol.point

    raise InnerBudgetExhausted(params.max_inner_steps, eps, metric.norm(a))

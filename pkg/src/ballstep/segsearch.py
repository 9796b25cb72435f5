"""Bisection along the trial segment for a cutting subgradient.

Given a current bundle point a with unit direction h = a/||a||_k at which
sufficient descent failed on the radius eps, the search keeps nesting halves
of the segment [x, x - 2 eps h] on which the descent condition stays
violated, sampling one subgradient per midpoint, until one satisfies the cut
inequality  <a, b>_k <= delta' ||a||_k^2.

The midpoint of the initial segment is exactly the rejected trial point
x - eps h. Kept segments halve exactly and every sampled point stays within
2 eps (k-norm) of x. Termination is not guaranteed in theory; after
``max_bisections`` halvings the search reports NonTermination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Oracle
from .metric import Metric

__all__ = ["NonTermination", "CutResult", "find_cutting_gradient"]


class NonTermination(RuntimeError):
    """The bisection exhausted its level budget without producing a cut."""

    def __init__(self, levels: int):
        self.levels = levels
        super().__init__(f"no cutting subgradient after {levels} bisection levels")


@dataclass(frozen=True)
class CutResult:
    """A cutting subgradient (as k-metric representer) and where it was found."""

    gradient: np.ndarray
    point: np.ndarray
    level: int
    gradient_evals: int
    value_evals: int


def find_cutting_gradient(
    x: np.ndarray,
    f_x: float,
    eps: float,
    a: np.ndarray,
    metric: Metric,
    oracle: Oracle,
    delta: float,
    delta_prime: float,
    max_bisections: int,
    f_trial: float | None = None,
    observer=None,
) -> CutResult:
    """Search the trial segment for b with <a, b>_k <= delta' ||a||_k^2.

    ``a`` is the current bundle point (k-representer) with ||a||_k > 0; the
    caller must already have seen both the null-step and the sufficient
    descent conditions fail for it. ``f_trial``, if given, is the cached
    value f(x - eps * h) from the failed descent check.
    """
    a_norm = metric.norm(a)
    assert a_norm > 0.0, "cutting search needs a nonzero bundle point"
    h = a / a_norm
    # precondition (debug): sufficient descent failed at the trial point
    assert f_trial is None or f_trial - f_x > -delta * a_norm * eps

    threshold = delta_prime * a_norm * a_norm
    lo, f_lo = x, f_x
    hi = x - (2.0 * eps) * h
    f_hi = float(oracle.value(hi))
    value_evals = 1
    seg_len = 2.0 * eps

    for level in range(max_bisections):
        mid = 0.5 * (lo + hi)
        b = metric.representer(np.asarray(oracle.subgradient(mid), dtype=float))
        if metric.inner(a, b) <= threshold:
            return CutResult(
                gradient=b,
                point=mid,
                level=level,
                gradient_evals=level + 1,
                value_evals=value_evals,
            )
        if level == 0 and f_trial is not None:
            f_mid = f_trial
        else:
            f_mid = float(oracle.value(mid))
            value_evals += 1
        half = 0.5 * seg_len
        if level == 0:
            # forced left keep: the first kept segment is [x, x - eps h],
            # on which descent is violated by the caller's precondition
            hi, f_hi = mid, f_mid
        else:
            # keep a half on which descent stays violated; at least one
            # qualifies, and the left one is preferred
            if f_mid - f_lo > -delta * a_norm * half:
                hi, f_hi = mid, f_mid
            else:
                lo, f_lo = mid, f_mid
        seg_len = half
        if observer is not None:
            observer.on_bisection(level + 1, lo, hi, f_lo, f_hi, seg_len, a_norm, metric)

    raise NonTermination(max_bisections)

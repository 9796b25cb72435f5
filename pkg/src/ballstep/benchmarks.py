"""Benchmark objectives with closed-form values and one-element subgradient
rules, their reference solver configurations, and known optima.

Subgradient selection at kinks is deterministic everywhere: max-type
functions pick the smallest attaining index, and sign(0) is taken as +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Mapping, Optional

import numpy as np

from .core import Control, Controls, Oracle, Params, RadiusReset, Trace
from .solver import solve

__all__ = [
    "InvalidDimension",
    "Benchmark",
    "make_wolfe",
    "make_qmax",
    "make_rosenbrock",
    "make_hilbert",
    "make_nesterov",
    "make_cheb_exp",
    "make_regression",
    "get_benchmark",
    "benchmark_names",
    "run_benchmark",
    "CHEB_REFERENCE",
]


class InvalidDimension(ValueError):
    """Unsupported dimension for a benchmark family."""


@dataclass(frozen=True)
class Benchmark:
    """A benchmark problem: oracle, named starting points, reference solver
    configuration, and (when exactly known) its optimum."""

    name: str
    dimension: int
    oracle: Oracle
    starts: Mapping[str, np.ndarray]
    default_start: str
    params: Params
    controls: Controls
    minimizer: Optional[np.ndarray] = None
    min_value: Optional[float] = None
    best_value: Optional[float] = None
    hessian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    variants: tuple = ("A",)


def _sgn(v: float) -> float:
    return 1.0 if v >= 0.0 else -1.0


def _standard_controls(eps0: float, t1_scale: Optional[float] = None,
                       t2_factor: float = 0.35) -> Controls:
    scale = (1.0 / eps0) if t1_scale is None else t1_scale
    return Controls(t1=Control("linear", scale),
                    t2=Control("linear", t2_factor),
                    g=RadiusReset("second"))


# ---------------------------------------------------------------------------
# Wolfe function (dimension 2, convex, unique minimizer (-1, 0) with value -8)

def make_wolfe() -> Benchmark:
    def value(p):
        x, y = p
        if x <= 0.0:
            return 9.0 * x + 16.0 * abs(y) - x**9
        if x < abs(y):
            return 9.0 * x + 16.0 * abs(y)
        return 5.0 * math.sqrt(9.0 * x * x + 16.0 * y * y)

    def subgradient(p):
        x, y = p
        if x <= 0.0:
            return np.array([9.0 - 9.0 * x**8, 16.0 * _sgn(y)])
        if x < abs(y):
            return np.array([9.0, 16.0 * _sgn(y)])
        r = math.sqrt(9.0 * x * x + 16.0 * y * y)
        return np.array([45.0 * x / r, 80.0 * y / r])

    return Benchmark(
        name="wolfe",
        dimension=2,
        oracle=Oracle(2, value, subgradient),
        starts={"default": np.array([5.0, 4.0])},
        default_start="default",
        params=Params(eps0=0.9, f_target=-8.0, gap_tol=1e-8),
        controls=_standard_controls(0.9),
        minimizer=np.array([-1.0, 0.0]),
        min_value=-8.0,
        best_value=-8.0,
    )


# ---------------------------------------------------------------------------
# q-max: f(x) = max_i x_i^2 (convex, nonsmooth; minimizer 0)

def make_qmax(n: int = 20) -> Benchmark:
    if n < 1:
        raise InvalidDimension("q-max needs n >= 1")

    def value(x):
        return float(np.max(x * x))

    def subgradient(x):
        i = int(np.argmax(x * x))  # smallest attaining index
        g = np.zeros(n)
        g[i] = 2.0 * x[i]
        return g

    u_plus = np.arange(1.0, n + 1.0)
    starts = {"u+": u_plus, "v": 0.1 * u_plus}
    if n % 2 == 0:
        u_pm = u_plus.copy()
        u_pm[n // 2:] *= -1.0
        starts["u+-"] = u_pm

    return Benchmark(
        name="qmax",
        dimension=n,
        oracle=Oracle(n, value, subgradient),
        starts=starts,
        default_start="u+",
        params=Params(eps0=0.5, f_target=0.0, gap_tol=1e-6,
                      line_search_policy="first-non-decrease"),
        controls=_standard_controls(0.5, t1_scale=15.0 / 0.5),
        minimizer=np.zeros(n),
        min_value=0.0,
        best_value=0.0,
    )


# ---------------------------------------------------------------------------
# Rosenbrock (dimension 2, smooth; minimizer (1, 1))

def make_rosenbrock() -> Benchmark:
    def value(p):
        x, y = p
        return (1.0 - x) ** 2 + 100.0 * (y - x * x) ** 2

    def subgradient(p):
        x, y = p
        r = y - x * x
        return np.array([-2.0 * (1.0 - x) - 400.0 * x * r, 200.0 * r])

    def hessian(p):
        x, y = p
        return np.array([
            [2.0 - 400.0 * (y - x * x) + 800.0 * x * x, -400.0 * x],
            [-400.0 * x, 200.0],
        ])

    return Benchmark(
        name="rosenbrock",
        dimension=2,
        oracle=Oracle(2, value, subgradient),
        starts={"default": np.array([-1.9, 2.0])},
        default_start="default",
        params=Params(eps0=1.5, f_target=0.0, gap_tol=1e-6),
        controls=_standard_controls(1.5),
        minimizer=np.array([1.0, 1.0]),
        min_value=0.0,
        best_value=0.0,
        hessian=hessian,
        variants=("A", "B"),
    )


# ---------------------------------------------------------------------------
# Hilbert quadratic: f(x) = x' A x with A_ij = 1/(i+j-1) (very ill-conditioned)

def make_hilbert(n: int = 10) -> Benchmark:
    if n < 1:
        raise InvalidDimension("hilbert needs n >= 1")
    idx = np.arange(1, n + 1)
    a = 1.0 / (idx[:, None] + idx[None, :] - 1.0)
    two_a = 2.0 * a

    def value(x):
        return float(x @ a @ x)

    def subgradient(x):
        return two_a @ x

    def hessian(_x):
        return two_a

    return Benchmark(
        name="hilbert",
        dimension=n,
        oracle=Oracle(n, value, subgradient),
        starts={"default": 4.0 / idx.astype(float)},
        default_start="default",
        params=Params(eps0=math.sqrt(n), f_target=0.0, gap_tol=1e-8),
        controls=_standard_controls(math.sqrt(n)),
        minimizer=np.zeros(n),
        min_value=0.0,
        best_value=0.0,
        hessian=hessian,
    )


# ---------------------------------------------------------------------------
# Chained rosenbrock-type chains (smooth, nonsmooth, and abs variants), all
# with unique minimizer (1, ..., 1)

def make_nesterov(kind: str, n: int) -> Benchmark:
    if n < 2:
        raise InvalidDimension("chained benchmarks need n >= 2")
    if kind not in ("smooth", "nonsmooth", "abs"):
        raise ValueError(f"unknown kind {kind!r}")

    if kind == "smooth":
        def value(x):
            r = x[1:] - 2.0 * x[:-1] ** 2 + 1.0
            return 0.25 * (x[0] - 1.0) ** 2 + float(r @ r)

        def subgradient(x):
            r = x[1:] - 2.0 * x[:-1] ** 2 + 1.0
            g = np.zeros(n)
            g[0] = 0.5 * (x[0] - 1.0)
            g[:-1] += -8.0 * x[:-1] * r
            g[1:] += 2.0 * r
            return g

        def hessian(x):
            r = x[1:] - 2.0 * x[:-1] ** 2 + 1.0
            h = np.zeros((n, n))
            h[0, 0] = 0.5
            d = np.arange(n - 1)
            h[d, d] += -8.0 * r + 32.0 * x[:-1] ** 2
            h[d + 1, d + 1] += 2.0
            h[d, d + 1] += -8.0 * x[:-1]
            h[d + 1, d] += -8.0 * x[:-1]
            return h

        start = np.ones(n)
        start[0] = -1.05
        controls = _standard_controls(0.5, t1_scale=0.001 / 0.5)
        return Benchmark(
            name="nesterov_smooth", dimension=n,
            oracle=Oracle(n, value, subgradient),
            starts={"default": start}, default_start="default",
            params=Params(eps0=0.5, f_target=0.0, gap_tol=1e-10),
            controls=controls,
            minimizer=np.ones(n), min_value=0.0, best_value=0.0,
            hessian=hessian, variants=("A", "B"),
        )

    if kind == "nonsmooth":
        def value(x):
            r = x[1:] - 2.0 * x[:-1] ** 2 + 1.0
            return 0.25 * (x[0] - 1.0) ** 2 + float(np.abs(r).sum())

        def subgradient(x):
            r = x[1:] - 2.0 * x[:-1] ** 2 + 1.0
            s = np.where(r >= 0.0, 1.0, -1.0)
            g = np.zeros(n)
            g[0] = 0.5 * (x[0] - 1.0)
            g[:-1] += -4.0 * x[:-1] * s
            g[1:] += s
            return g

        start = np.ones(n)
        start[0] = -1.0
        return Benchmark(
            name="nesterov_nonsmooth", dimension=n,
            oracle=Oracle(n, value, subgradient),
            starts={"default": start}, default_start="default",
            params=Params(eps0=0.5, f_target=0.0, gap_tol=1e-6),
            controls=_standard_controls(0.5),
            minimizer=np.ones(n), min_value=0.0, best_value=0.0,
        )

    def value(x):
        q = x[1:] - 2.0 * np.abs(x[:-1]) + 1.0
        return 0.25 * abs(x[0] - 1.0) + float(np.abs(q).sum())

    def subgradient(x):
        q = x[1:] - 2.0 * np.abs(x[:-1]) + 1.0
        s = np.where(q >= 0.0, 1.0, -1.0)
        xs = np.where(x >= 0.0, 1.0, -1.0)
        g = np.zeros(n)
        g[0] = 0.25 * _sgn(x[0] - 1.0)
        g[:-1] += -2.0 * xs[:-1] * s
        g[1:] += s
        return g

    start = np.ones(n)
    start[0] = -1.0
    return Benchmark(
        name="nesterov_abs", dimension=n,
        oracle=Oracle(n, value, subgradient),
        starts={"default": start}, default_start="default",
        params=Params(eps0=0.5, eps_tol=1e-10),
        controls=_standard_controls(0.5),
        minimizer=np.ones(n), min_value=0.0, best_value=0.0,
    )


# ---------------------------------------------------------------------------
# Best uniform approximation of 1/t on [1, 10] by exponential sums, on a
# 2001-point grid; n = 2m unknowns (coefficients a and exponents b)

CHEB_REFERENCE = {1: 8.55641e-2, 2: 8.75226e-3, 3: 7.14509e-4, 4: 5.57688e-5}

_CHEB_GAP_TOL = {1: 2e-8, 2: 2e-7, 3: 2e-8, 4: 2e-9}


def cheb_grid() -> np.ndarray:
    return 1.0 + 9.0 * np.arange(0, 2001) / 2000.0


def make_cheb_exp(m: int = 1, mode: str = "perturbed-start") -> Benchmark:
    if m < 1:
        raise InvalidDimension("exponential-sum benchmark needs m >= 1")
    if mode not in ("perturbed-start", "perturbed-function"):
        raise ValueError(f"unknown mode {mode!r}")
    n = 2 * m
    t = cheb_grid()
    target = 1.0 / t
    jfac = np.arange(1.0, m + 1.0) if mode == "perturbed-function" else np.ones(m)

    def residuals(p):
        a, b = p[:m], p[m:]
        w = np.exp(np.minimum(-np.outer(jfac * b, t), 700.0))
        return target - a @ w, w

    def value(p):
        h, _ = residuals(p)
        return float(np.max(np.abs(h)))

    def subgradient(p):
        a = p[:m]
        h, w = residuals(p)
        i = int(np.argmax(np.abs(h)))  # smallest attaining grid index
        s = _sgn(h[i])
        g = np.empty(n)
        g[:m] = -s * w[:, i]
        g[m:] = s * a * jfac * t[i] * w[:, i]
        return g

    if mode == "perturbed-start":
        a0 = -0.001 * (2.0 * np.arange(m)) ** 2
        b0 = 0.001 * (2.0 * np.arange(m) + 1.0) ** 2
        starts = {"perturbed": np.concatenate([a0, b0]), "zero": np.zeros(n)}
        default = "perturbed"
    else:
        starts = {"zero": np.zeros(n)}
        default = "zero"

    eps0 = 5.0 * math.sqrt(m)
    ref = CHEB_REFERENCE.get(m)
    return Benchmark(
        name="cheb_exp",
        dimension=n,
        oracle=Oracle(n, value, subgradient),
        starts=starts,
        default_start=default,
        params=Params(eps0=eps0, f_target=ref,
                      gap_tol=_CHEB_GAP_TOL.get(m, 1e-8), eps_tol=1e-10),
        controls=Controls(t1=Control("linear", 1.0 / eps0),
                          t2=Control("linear", 0.1),
                          g=RadiusReset("second")),
        best_value=ref,
    )


# ---------------------------------------------------------------------------
# Nonlinear regression in 3 unknowns: sum_i (x1 e^{i x2} + x3 - eta_i)^2

_ETA = np.array([1.0, 1.1, 1.2, 1.35, 1.55, 1.75, 2.5, 3.0, 3.7, 4.5])
_REG_I = np.arange(1.0, 11.0)


def make_regression() -> Benchmark:
    def _res(p):
        e = np.exp(np.minimum(_REG_I * p[1], 700.0))
        return p[0] * e + p[2] - _ETA, e

    def value(p):
        r, _ = _res(p)
        return float(r @ r)

    def subgradient(p):
        r, e = _res(p)
        return np.array([
            2.0 * float(r @ e),
            2.0 * p[0] * float(r @ (_REG_I * e)),
            2.0 * r.sum(),
        ])

    def hessian(p):
        r, e = _res(p)
        x1 = p[0]
        ie = _REG_I * e
        h11 = 2.0 * float(e @ e)
        h12 = 2.0 * float(ie @ (x1 * e + r))
        h13 = 2.0 * e.sum()
        h22 = 2.0 * x1 * float((_REG_I * ie) @ (x1 * e + r))
        h23 = 2.0 * x1 * ie.sum()
        h33 = 20.0
        return np.array([[h11, h12, h13], [h12, h22, h23], [h13, h23, h33]])

    return Benchmark(
        name="regression",
        dimension=3,
        oracle=Oracle(3, value, subgradient),
        starts={"zero": np.zeros(3), "ones": np.ones(3)},
        default_start="zero",
        params=Params(eps0=0.5, f_target=0.0861942, gap_tol=5e-5),
        controls=_standard_controls(0.5),
        best_value=0.0861942,
        hessian=hessian,
        variants=("A", "B"),
    )


# ---------------------------------------------------------------------------
# Registry

_DEFAULT_N = {
    "qmax": 20,
    "hilbert": 10,
    "nesterov_smooth": 4,
    "nesterov_nonsmooth": 3,
    "nesterov_abs": 2,
    "cheb_exp": 2,
}


def benchmark_names() -> list[str]:
    return ["wolfe", "qmax", "rosenbrock", "hilbert", "nesterov_smooth",
            "nesterov_nonsmooth", "nesterov_abs", "cheb_exp", "regression"]


def get_benchmark(name: str, n: Optional[int] = None,
                  mode: Optional[str] = None) -> Benchmark:
    """Resolve a benchmark by name and family parameters."""
    if name == "wolfe":
        return make_wolfe()
    if name == "qmax":
        return make_qmax(n or _DEFAULT_N["qmax"])
    if name == "rosenbrock":
        return make_rosenbrock()
    if name == "hilbert":
        return make_hilbert(n or _DEFAULT_N["hilbert"])
    if name in ("nesterov_smooth", "nesterov_nonsmooth", "nesterov_abs"):
        kind = name.split("_", 1)[1]
        kind = {"smooth": "smooth", "nonsmooth": "nonsmooth", "abs": "abs"}[kind]
        return make_nesterov(kind, n or _DEFAULT_N[name])
    if name == "cheb_exp":
        n = n or _DEFAULT_N["cheb_exp"]
        if n % 2 != 0:
            raise InvalidDimension("cheb_exp needs even n = 2m")
        return make_cheb_exp(n // 2, mode or "perturbed-start")
    if name == "regression":
        return make_regression()
    raise KeyError(f"unknown problem {name!r}")


def run_benchmark(bench: Benchmark, x0: Optional[str] = None,
                  variant: Optional[str] = None,
                  params: Optional[Params] = None,
                  controls: Optional[Controls] = None,
                  observer=None) -> Trace:
    """Solve a benchmark from one of its named starts.

    Variant B swaps in the per-iteration Hessian metric and the matching
    control defaults (radius reset from the gradient norm, threshold slope
    below one); explicit ``params``/``controls`` override everything.
    """
    p = params if params is not None else bench.params
    if variant is not None and variant != p.variant:
        p = replace(p, variant=variant)
    if controls is None:
        if p.variant == "B":
            controls = Controls(t1=Control("linear", 0.5),
                                t2=bench.controls.t2,
                                g=RadiusReset("first"))
        else:
            controls = bench.controls
    provider = bench.hessian if p.variant == "B" else None
    if p.variant == "B" and provider is None:
        raise InvalidDimension(f"{bench.name} exposes no curvature for variant B")
    start_name = x0 or bench.default_start
    try:
        x_start = bench.starts[start_name]
    except KeyError:
        raise KeyError(f"unknown start {start_name!r} for {bench.name}; "
                       f"choices: {sorted(bench.starts)}") from None
    return solve(bench.oracle, x_start, p, controls,
                 metric_provider=provider, observer=observer)

import numpy as np
import pytest

from ballstep.solver import SolveObserver


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run slow opt-in tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running opt-in test")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


class CheckingObserver(SolveObserver):
    """Asserts the per-step invariants on every solver event:

    - bundle min-norm monotonicity and the per-step contraction bound on
      every inner step,
    - the cut inequality on every accepted cutting subgradient,
    - the null-step threshold certificate on every null branch,
    - exact segment halving and the violated-descent inequality on every
      kept bisection level,
    - strict descent plus the step-size descent certificate on every
      accepted outer step.
    """

    def __init__(self, delta: float = 0.3, delta_prime: float = 0.35):
        self.delta = delta
        self.delta_prime = delta_prime
        self.inner_steps = 0
        self.accepts = 0
        self.bisections = 0
        self.nulls = 0

    def on_inner_step(self, metric, a, b, a_next):
        self.inner_steps += 1
        na = metric.norm(a)
        nb = metric.norm(b)
        nn = metric.norm(a_next)
        assert nn <= na * (1.0 + 1e-9) + 1e-15, "min-norm must not grow"
        big = max(na, nb) + 1e-12
        bound = (big * big * na * na) / ((1.0 - self.delta_prime) ** 2 * na * na + big * big)
        assert nn * nn <= bound + 1e-10, "per-step contraction bound violated"

    def on_cut(self, metric, a, b):
        na = metric.norm(a)
        assert metric.inner(a, b) <= self.delta_prime * na * na + 1e-9 * (1.0 + na * na)

    def on_branch(self, k, i, eps, kind, a_norm, threshold):
        if kind == "null":
            self.nulls += 1
            assert a_norm < threshold, "null step requires norm below threshold"

    def on_bisection(self, level, lo, hi, f_lo, f_hi, seg_len, a_norm, metric):
        self.bisections += 1
        actual = metric.norm(hi - lo)
        assert abs(actual - seg_len) <= 1e-14 * max(1.0, seg_len) + 1e-300, \
            "segment must halve exactly"
        slack = 1e-9 * (1.0 + abs(f_lo))
        assert f_hi - f_lo > -self.delta * a_norm * seg_len - slack, \
            "kept segment must violate sufficient descent"

    def on_accept(self, k, x, f_x, x_new, f_new, sigma, eps, a_norm):
        self.accepts += 1
        assert f_new < f_x, "outer descent must be strict"
        assert sigma >= eps * (1.0 - 1e-12), "step size must reach the radius"
        assert f_new - f_x <= -self.delta * a_norm * sigma * (1.0 - 1e-9) + 1e-300, \
            "accepted step must carry the descent certificate"


@pytest.fixture
def checking_observer():
    return CheckingObserver()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

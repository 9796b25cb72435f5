import numpy as np
import pytest

from ballstep.core import (
    Control,
    Controls,
    DomainError,
    InvalidConfig,
    Params,
    RadiusReset,
    as_point,
    config_violations,
    default_controls,
    eval_control,
    validate_params,
)
from ballstep.benchmarks import get_benchmark


def standard_controls():
    return Controls(t1=Control("linear", 1.0 / 0.9),
                    t2=Control("linear", 0.35),
                    g=RadiusReset("second"))


def test_reference_configuration_is_valid():
    p = Params(eps0=0.9, delta=0.3, delta_prime=0.35)
    params, controls = validate_params(p, standard_controls())
    assert params.delta == 0.3 and params.delta_prime == 0.35
    assert controls.t2(1.0) == pytest.approx(0.35)


def test_delta_ordering_violation():
    with pytest.raises(InvalidConfig) as err:
        validate_params(Params(delta=0.5, delta_prime=0.4), standard_controls())
    assert "delta < delta_prime" in str(err.value)


def test_t2_unit_factor_rejected():
    controls = Controls(t1=Control("linear", 1.0),
                        t2=Control("linear", 1.0),
                        g=RadiusReset("second"))
    with pytest.raises(InvalidConfig) as err:
        validate_params(Params(), controls)
    assert "t2 iterates must vanish" in str(err.value)


def test_violations_are_collected():
    controls = Controls(t1=Control("linear", -1.0),
                        t2=Control("linear", 2.0),
                        g=RadiusReset("max", constant=0.0))
    v = config_violations(Params(delta=0.0, eps0=-1.0), controls)
    assert len(v) >= 4


def test_eval_control_examples():
    assert eval_control(Control("linear", 0.35), 1.0) == pytest.approx(0.35)
    assert eval_control(Control("rational"), 0.5) == pytest.approx(1.0 / 3.0)
    assert eval_control(RadiusReset("second"), 7.0, 0.2) == pytest.approx(0.2)


def test_control_domain_errors():
    with pytest.raises(DomainError):
        Control("linear", 1.0)(0.0)
    with pytest.raises(DomainError):
        Control("rational")(-2.0)
    with pytest.raises(DomainError):
        RadiusReset("second")(1.0, 0.0)


def test_radius_reset_families():
    assert RadiusReset("first")(0.25, 9.0) == pytest.approx(0.25)
    assert RadiusReset("max", 0.1)(5.0, 0.02) == pytest.approx(0.1)
    assert RadiusReset("min", 0.1)(5.0, 0.7) == pytest.approx(0.1)
    assert RadiusReset("const", 0.4)(5.0, 0.7) == pytest.approx(0.4)
    assert RadiusReset("second").assumption_property == "b"
    assert RadiusReset("first").assumption_property == "a"


def test_default_controls_per_variant():
    a = default_controls(Params(eps0=0.5, variant="A"))
    assert a.t1(0.5) == pytest.approx(1.0)
    assert a.g.family == "second"
    b = default_controls(Params(eps0=0.5, variant="B"))
    assert b.t1(1.0) < 1.0
    assert b.g.family == "first"


LOG_GRID = 10.0 ** np.linspace(-3, 3, 13)


@pytest.mark.parametrize("t2", [Control("linear", 0.35), Control("linear", 0.1),
                                Control("linear", 0.5), Control("rational")])
def test_t2_decreases_everywhere(t2):
    for t in LOG_GRID:
        assert t2(t) < t


@pytest.mark.parametrize("factor", [0.1, 0.35, 0.5])
def test_geometric_iterates_vanish(factor):
    t2 = Control("linear", factor)
    for t in LOG_GRID:
        v = t
        for _ in range(50):
            v = t2(v)
        assert v < 1e-6 * t


def test_rational_iterates_vanish():
    t2 = Control("rational")
    for t in LOG_GRID:
        v = t
        for n in range(1, 201):
            v = t2(v)
            assert v == pytest.approx(t / (1.0 + n * t), rel=1e-9)
        # closed form: the n-th iterate is t/(1+n t), which vanishes
        assert t / (1.0 + 1e7 * t) < 1e-6 * t


@pytest.mark.parametrize("ctrl", [Control("linear", 0.35), Control("rational"),
                                  Control("linear", 2.0)])
def test_controls_monotone(ctrl):
    vals = [ctrl(t) for t in LOG_GRID]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_as_point_validation():
    p = as_point([1.0, 2.0])
    assert p.shape == (2,)
    with pytest.raises(ValueError):
        as_point([1.0, np.nan])
    with pytest.raises(ValueError):
        as_point([[1.0, 2.0]])
    with pytest.raises(Exception):
        as_point([1.0, 2.0], dimension=3)


@pytest.mark.parametrize("name,n", [("wolfe", None), ("qmax", 5),
                                    ("cheb_exp", 4), ("regression", None)])
def test_oracle_determinism(name, n, rng):
    bench = get_benchmark(name, n=n)
    for _ in range(20):
        x = rng.normal(size=bench.dimension)
        v1, g1 = bench.oracle.value(x), bench.oracle.subgradient(x)
        v2, g2 = bench.oracle.value(x), bench.oracle.subgradient(x)
        assert v1 == v2
        assert np.array_equal(g1, g2)

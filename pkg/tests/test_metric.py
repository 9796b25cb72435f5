import numpy as np
import pytest
from numpy.testing import assert_allclose

from ballstep.core import DimensionMismatch
from ballstep.metric import Metric, NotSymmetric, SingularMetric, hessian_metric, regularize_spd


def random_spd(rng, n, spread=2.0):
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    vals = np.exp(rng.uniform(-spread, spread, size=n))
    return (q * vals) @ q.T


def test_euclidean_norm():
    m = Metric.identity(2)
    assert m.norm(np.array([3.0, 4.0])) == pytest.approx(5.0)


def test_diagonal_scaling():
    m = Metric(np.diag([2.0, 1.0]))
    assert m.norm(np.array([1.0, 0.0])) == pytest.approx(2.0)
    assert m.norm(np.array([1.0, 1.0])) == pytest.approx(np.sqrt(5.0))


def test_dimension_mismatch():
    m = Metric(np.diag([2.0, 1.0]))
    with pytest.raises(DimensionMismatch):
        m.norm(np.ones(3))


def test_representer_identity_metric():
    m = Metric.identity(3)
    g = np.array([1.0, -2.0, 0.5])
    assert np.array_equal(m.representer(g), g)


def test_representer_diagonal():
    m = Metric(np.diag([2.0, 1.0]))
    assert_allclose(m.representer(np.array([4.0, 1.0])), [1.0, 1.0], atol=1e-14)


def test_representer_reproduces_euclidean_pairing(rng):
    for _ in range(100):
        n = int(rng.integers(2, 6))
        a = random_spd(rng, n)
        m = Metric(a)
        u = rng.normal(size=n)
        h = rng.normal(size=n)
        lhs = m.inner(m.representer(u), h)
        rhs = float(u @ h)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


def test_norm_squared_equals_inner(rng):
    for _ in range(50):
        n = int(rng.integers(2, 6))
        m = Metric(random_spd(rng, n))
        x = rng.normal(size=n)
        assert m.norm(x) ** 2 == pytest.approx(m.inner(x, x), rel=1e-12)


def test_condition_number_reported(rng):
    m = Metric(np.diag([4.0, 1.0]))
    assert m.condition == pytest.approx(4.0)
    assert np.isfinite(Metric(random_spd(rng, 4)).condition)
    assert Metric.identity(3).condition == 1.0


def test_norm_equivalence_bounds(rng):
    # ||x||/C <= ||x||_k <= C ||x|| with C = max eigenvalue ratio witness
    for _ in range(20):
        n = int(rng.integers(2, 5))
        a = random_spd(rng, n)
        m = Metric(a)
        vals = np.linalg.eigvalsh(a)
        c = max(vals.max(), 1.0 / vals.min())
        x = rng.normal(size=n)
        nx = np.linalg.norm(x)
        assert m.norm(x) <= c * nx * (1 + 1e-12)
        assert m.norm(x) >= nx / c * (1 - 1e-12)


def test_metric_requires_symmetry():
    with pytest.raises(NotSymmetric):
        Metric(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_metric_requires_positive_definite():
    with pytest.raises(SingularMetric):
        Metric(np.diag([1.0, 0.0]))


def test_regularize_identity_passthrough():
    m = regularize_spd(np.eye(3), floor=1e-6)
    assert_allclose(m.matrix, np.eye(3), atol=1e-15)


def test_regularize_clamps_negative_eigenvalue():
    m = regularize_spd(np.diag([1.0, -1.0]), floor=1e-3)
    assert_allclose(sorted(np.linalg.eigvalsh(m.matrix)), [1e-3, 1.0], rtol=1e-12)


def test_regularize_zero_matrix_identity_fallback():
    m = regularize_spd(np.zeros((2, 2)), floor=1e-3, identity_fallback=True)
    assert m.is_identity
    # without the fallback the floor applies
    m2 = regularize_spd(np.zeros((2, 2)), floor=1e-3)
    assert_allclose(m2.matrix, 1e-3 * np.eye(2), atol=1e-15)


def test_regularize_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        regularize_spd(np.array([[1.0, 2.0], [0.0, 1.0]]), floor=1e-6)


def test_hessian_metric_is_quadratic_form(rng):
    h = random_spd(rng, 3)
    m = hessian_metric(h)
    for _ in range(10):
        x = rng.normal(size=3)
        assert m.norm(x) ** 2 == pytest.approx(float(x @ h @ x), rel=1e-10)
    g = rng.normal(size=3)
    assert_allclose(m.representer(g), np.linalg.solve(h, g), rtol=1e-9)


def test_hessian_metric_indefinite_falls_back_to_identity():
    assert hessian_metric(np.diag([1.0, -1.0])).is_identity
    assert hessian_metric(np.zeros((2, 2))).is_identity
    assert not hessian_metric(np.diag([2.0, 1.0])).is_identity

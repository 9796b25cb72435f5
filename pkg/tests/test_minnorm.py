import numpy as np
import pytest
from numpy.testing import assert_allclose

from ballstep.core import DimensionMismatch
from ballstep.metric import Metric
from ballstep.minnorm import (
    BundleTooLarge,
    EmptyBundle,
    brute_force_min_norm,
    min_norm_point,
)


def random_spd(rng, n):
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    vals = np.exp(rng.uniform(-1.0, 1.0, size=n))
    return (q * vals) @ q.T


def certificate_holds(sol, bundle, metric, tol=1e-12):
    a = sol.point
    na2 = metric.norm(a) ** 2
    return all(metric.inner(a, p - a) >= -tol * (1.0 + na2) for p in np.atleast_2d(bundle))


def test_singleton():
    sol = min_norm_point([[2.0, -1.0]])
    assert_allclose(sol.point, [2.0, -1.0])
    assert_allclose(sol.coefficients, [1.0])


def test_segment_through_origin():
    sol = min_norm_point([[2.0, 0.0], [-1.0, 0.0]])
    assert_allclose(sol.point, [0.0, 0.0], atol=1e-12)
    assert_allclose(sol.coefficients, [1.0 / 3.0, 2.0 / 3.0], atol=1e-9)


def test_symmetric_pair():
    sol = min_norm_point([[1.0, 0.0], [0.0, 1.0]])
    assert_allclose(sol.point, [0.5, 0.5], atol=1e-12)


def test_diagonal_metric_pair():
    # minimize ||A(lam, 1-lam)|| with A = diag(2,1): 4 lam^2 + (1-lam)^2,
    # stationary at lam = 1/5
    metric = Metric(np.diag([2.0, 1.0]))
    sol = min_norm_point([[1.0, 0.0], [0.0, 1.0]], metric)
    assert_allclose(sol.coefficients, [0.2, 0.8], atol=1e-9)
    assert_allclose(sol.point, [0.2, 0.8], atol=1e-9)


def test_empty_bundle():
    with pytest.raises(EmptyBundle):
        min_norm_point(np.zeros((0, 2)))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        min_norm_point([[1.0, 0.0]], Metric.identity(3))


def test_brute_force_singleton():
    out = brute_force_min_norm([[1.5, 2.0]])
    assert_allclose(out, [1.5, 2.0])


def test_brute_force_segment():
    out = brute_force_min_norm([[2.0, 0.0], [-1.0, 0.0]], grid=3000)
    assert np.linalg.norm(out) <= 1e-3


def test_brute_force_size_limit():
    with pytest.raises(BundleTooLarge):
        brute_force_min_norm(np.zeros((6, 2)))


def test_brute_force_agrees_on_random_triples(rng):
    for _ in range(30):
        pts = rng.uniform(-2.0, 2.0, size=(3, 3))
        sol = min_norm_point(pts)
        bf = brute_force_min_norm(pts, grid=2000)
        assert abs(np.linalg.norm(bf) - sol.norm) <= 2.0 / 2000


def test_oracle_equivalence_random_bundles(rng):
    # 200 random bundles, Euclidean and random SPD metrics
    for trial in range(200):
        size = int(rng.integers(1, 6))
        dim = int(rng.integers(1, 5))
        pts = rng.uniform(-2.0, 2.0, size=(size, dim))
        if trial % 2 == 0:
            metric = Metric.identity(dim)
        else:
            metric = Metric(random_spd(rng, dim))
        sol = min_norm_point(pts, metric)
        bf = brute_force_min_norm(pts, metric, grid=2000)
        assert metric.norm(sol.point - bf) <= 5e-3
        assert abs(metric.norm(bf) - sol.norm) <= 5e-3
        assert certificate_holds(sol, pts, metric)
        lam = sol.coefficients
        assert lam.min() >= -1e-10
        assert lam.sum() == pytest.approx(1.0, abs=1e-10)


def test_monotone_under_enlargement(rng):
    for _ in range(50):
        pts = rng.uniform(-2.0, 2.0, size=(4, 3))
        base = min_norm_point(pts[:3]).norm
        bigger = min_norm_point(pts).norm
        assert bigger <= base + 1e-10


def test_zero_detection(rng):
    # bundles built to contain the origin in their hull
    for _ in range(40):
        dim = int(rng.integers(2, 5))
        p = rng.uniform(0.5, 2.0, size=dim)
        pts = np.stack([p, -0.5 * p, rng.uniform(-2.0, 2.0, size=dim)])
        sol = min_norm_point(pts)
        assert sol.norm <= 1e-12


def test_duplicates_are_harmless():
    pts = [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
    sol = min_norm_point(pts)
    assert_allclose(sol.point, [0.5, 0.5], atol=1e-9)


def test_near_cancelling_bundle_resolved():
    # opposite large components with a tiny residual direction: the solver
    # must resolve the residual instead of stopping at the smallest vertex
    pts = np.array([
        [3.79189881e-07, -16.0],
        [3.79189845e-07, 0.0],
        [3.79189808e-07, 16.0],
        [-2.90678144e-06, -16.0],
    ])
    sol = min_norm_point(pts)
    assert sol.norm <= 1e-10

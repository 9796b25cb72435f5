"""Norm-minimal point of the convex hull of a finite bundle, in a given
metric.

The solver is Wolfe's nearest-point algorithm: an active-set ("corral")
method over affinely independent subsets, with finite termination and no
external QP dependency. Bundles here stay tiny (around a dozen points), so
the dense least-squares solves are negligible next to oracle cost.

A grid-enumeration brute force over the simplex is provided as an
independent test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb

import numpy as np

from .core import DimensionMismatch
from .metric import Metric

__all__ = ["EmptyBundle", "BundleTooLarge", "SimplexSolution",
           "min_norm_point", "brute_force_min_norm"]


class EmptyBundle(ValueError):
    """min_norm_point needs at least one bundle element."""


class BundleTooLarge(ValueError):
    """Brute-force enumeration only supports bundles of up to 5 points."""


@dataclass(frozen=True)
class SimplexSolution:
    """Convex coefficients and the norm-minimal point they produce."""

    coefficients: np.ndarray
    point: np.ndarray
    norm: float


def _affine_min(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Min-norm point of the affine hull of the rows of z.

    Solved as least squares over point differences (never through the Gram
    matrix, whose squared conditioning would wreck the tiny components left
    after near-cancellation). Returns (coefficients summing to 1, point).
    """
    k = z.shape[0]
    if k == 1:
        return np.ones(1), z[0].copy()
    d = z[1:] - z[0]
    w = np.linalg.lstsq(d.T, -z[0], rcond=None)[0]
    point = z[0] + w @ d
    u = np.empty(k)
    u[1:] = w
    u[0] = 1.0 - w.sum()
    return u, point


def _euclidean_min_norm(z: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Wolfe's nearest-point algorithm for the origin against conv(rows of z).

    Returns (coefficients over all rows, the min-norm point). Terminates when
    <x, z_i - x> >= -tol * (1 + max_i ||z_i||^2) for every row, which is the
    first-order optimality certificate of the projection.
    """
    count, _ = z.shape
    sq = np.einsum("ij,ij->i", z, z)
    # optimality slack: user tolerance relative to the solution size plus
    # the floating-point noise floor of dot products at the bundle's scale
    noise = np.finfo(float).eps * (1.0 + sq.max())
    start = int(np.argmin(sq))
    corral = [start]
    w = np.ones(1)
    x = z[start].copy()
    if count == 1:
        return w, x

    for _ in range(36 * (count + 1)):
        dots = z @ x
        xx = float(x @ x)
        j = int(np.argmin(dots))
        if dots[j] >= xx - tol * xx - noise:
            break
        if j in corral or any(np.array_equal(z[j], z[c]) for c in corral):
            break  # optimality within achievable precision
        corral.append(j)
        w = np.append(w, 0.0)
        # minor cycles: pull the affine minimizer back into the simplex
        for _ in range(count + 2):
            u, point = _affine_min(z[corral])
            if u.min() > 0.0:
                w, x = u, point
                break
            neg = u <= 0.0
            denom = w - u
            safe = neg & (denom > 0.0)
            theta = min(1.0, float((w[safe] / denom[safe]).min())) if safe.any() else 0.0
            w = (1.0 - theta) * w + theta * u
            w[neg & (w <= 1e-15)] = 0.0
            keep = w > 0.0
            if keep.all():  # numerical tie; drop the smallest coefficient
                keep[int(np.argmin(w))] = False
            corral = [c for c, k_ in zip(corral, keep) if k_]
            w = w[keep]
            w = w / w.sum()
            x = w @ z[corral]

    lam = np.zeros(count)
    lam[corral] = np.maximum(w, 0.0)
    lam = lam / lam.sum()
    return lam, x


def min_norm_point(bundle, metric: Metric | None = None, tol: float = 1e-12) -> SimplexSolution:
    """Norm-minimal element of conv(bundle) in the metric's norm.

    The bundle is mapped through the metric (z_i = A p_i), the Euclidean
    nearest-point problem is solved there, and the convex coefficients are
    pulled back. The minimizing point is unique by strict convexity of the
    squared norm.
    """
    pts = np.atleast_2d(np.asarray(bundle, dtype=float))
    if pts.size == 0:
        raise EmptyBundle("bundle must contain at least one point")
    if metric is None:
        metric = Metric.identity(pts.shape[1])
    if pts.shape[1] != metric.dimension:
        raise DimensionMismatch(
            f"bundle dimension {pts.shape[1]} vs metric dimension {metric.dimension}"
        )
    z = pts if metric.is_identity else pts @ metric.matrix.T
    lam, zstar = _euclidean_min_norm(z, tol)
    # pull the solved point back instead of recombining the bundle, so that
    # near-cancelling bundles keep their tiny residual accurate
    point = zstar if metric.is_identity else metric.apply_inverse(zstar)
    return SimplexSolution(coefficients=lam, point=point, norm=metric.norm(point))


def _compositions(total: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``parts`` summing to ``total``."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    blocks = []
    for first in range(total + 1):
        rest = _compositions(total - first, parts - 1)
        head = np.full((rest.shape[0], 1), first, dtype=np.int64)
        blocks.append(np.hstack([head, rest]))
    return np.vstack(blocks)


def _lattice_size(total: int, parts: int) -> int:
    return comb(total + parts - 1, parts - 1)


def brute_force_min_norm(bundle, metric: Metric | None = None, grid: int = 2000) -> np.ndarray:
    """Grid-search oracle for the min-norm point (testing only).

    Enumerates convex coefficients on a lattice and returns the best point,
    at resolution no coarser than 1/grid. Large lattices are handled by a
    full coarse pass followed by local doubling refinement around the
    incumbent; since the squared norm is convex on the simplex and strictly
    convex in the resulting point, the refinement keeps the global optimum.
    """
    pts = np.atleast_2d(np.asarray(bundle, dtype=float))
    count = pts.shape[0]
    if count > 5:
        raise BundleTooLarge(f"brute force supports at most 5 points, got {count}")
    if metric is None:
        metric = Metric.identity(pts.shape[1])
    if count == 1:
        return pts[0]
    z = pts if metric.is_identity else pts @ metric.matrix.T

    def best_of(coeff_rows: np.ndarray, g: int) -> tuple[np.ndarray, float]:
        lam = coeff_rows / float(g)
        vals = np.einsum("ij,ij->i", lam @ z, lam @ z)
        i = int(np.argmin(vals))
        return coeff_rows[i], float(vals[i])

    # largest full lattice that stays cheap
    g = grid
    while _lattice_size(g, count) > 300_000:
        g = max(1, g // 2)
    best, best_val = best_of(_compositions(g, count), g)

    # local doubling refinement down to resolution 1/grid
    radius = 3
    signed = []
    for head in product(range(-radius, radius + 1), repeat=count - 1):
        tail = -sum(head)
        if -radius <= tail <= radius:
            signed.append(head + (tail,))
    signed = np.array(signed, dtype=np.int64)

    while g < grid:
        g *= 2
        cand = 2 * best + signed
        cand = cand[(cand >= 0).all(axis=1)]
        cand = cand[cand.sum(axis=1) == g]
        best, best_val = best_of(cand, g)

    return (best / float(g)) @ pts

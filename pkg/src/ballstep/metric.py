"""Variable-norm machinery: symmetric positive-definite operators A defining
||x||_k = ||A x||_2, the associated inner product, and the representer
transform a = A^-2 g that re-expresses a Euclidean subgradient in the
k-metric, so that <a, h>_k = <g, h> for all h.
"""

from __future__ import annotations

import numpy as np

from .core import DimensionMismatch

__all__ = ["NotSymmetric", "SingularMetric", "Metric", "regularize_spd", "hessian_metric"]


class NotSymmetric(ValueError):
    """Candidate matrix is not symmetric within tolerance."""


class SingularMetric(ValueError):
    """Matrix has non-positive eigenvalues and cannot define a norm."""


_SYM_TOL = 1e-12


class Metric:
    """Norm ||x||_k = ||A x||_2 for a symmetric positive-definite A.

    Holds the eigendecomposition of A so that A, A^-1 and A^-2 can be applied
    to vectors without ever forming an explicit inverse. Immutable; safe to
    share across threads.
    """

    __slots__ = ("matrix", "dimension", "is_identity", "condition", "_vecs",
                 "_inv_vals", "_inv_sq_vals")

    def __init__(self, matrix, _decomp=None):
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NotSymmetric(f"metric matrix must be square, got shape {a.shape}")
        scale = np.abs(a).max()
        if not np.all(np.isfinite(a)):
            raise NotSymmetric("metric matrix has non-finite entries")
        if np.abs(a - a.T).max() > _SYM_TOL * (1.0 + scale):
            raise NotSymmetric("metric matrix is not symmetric")
        if _decomp is not None:
            vals, vecs = _decomp
        else:
            vals, vecs = np.linalg.eigh(0.5 * (a + a.T))
        if vals.min() <= 0.0:
            raise SingularMetric("metric matrix must be positive definite")
        self.matrix = a
        self.dimension = a.shape[0]
        self.is_identity = bool(np.array_equal(a, np.eye(a.shape[0])))
        self.condition = float(vals.max() / vals.min())
        self._vecs = vecs
        self._inv_vals = 1.0 / vals
        self._inv_sq_vals = 1.0 / (vals * vals)

    @classmethod
    def identity(cls, dimension: int) -> "Metric":
        m = cls.__new__(cls)
        m.matrix = np.eye(dimension)
        m.dimension = dimension
        m.is_identity = True
        m.condition = 1.0
        m._vecs = None
        m._inv_vals = None
        m._inv_sq_vals = None
        return m

    def _check(self, x: np.ndarray):
        if x.shape != (self.dimension,):
            raise DimensionMismatch(
                f"metric dimension {self.dimension}, vector shape {x.shape}"
            )

    def apply(self, x: np.ndarray) -> np.ndarray:
        """A x."""
        self._check(x)
        if self.is_identity:
            return x
        return self.matrix @ x

    def norm(self, x: np.ndarray) -> float:
        """||A x||_2."""
        self._check(x)
        if self.is_identity:
            return float(np.linalg.norm(x))
        return float(np.linalg.norm(self.matrix @ x))

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        """<A u, A v>."""
        self._check(u)
        self._check(v)
        if self.is_identity:
            return float(u @ v)
        return float((self.matrix @ u) @ (self.matrix @ v))

    def apply_inverse(self, x: np.ndarray) -> np.ndarray:
        """A^-1 x."""
        self._check(x)
        if self.is_identity:
            return x
        return self._vecs @ (self._inv_vals * (self._vecs.T @ x))

    def representer(self, euclid_grad: np.ndarray) -> np.ndarray:
        """A^-2 g: the k-metric representer of a Euclidean subgradient."""
        self._check(euclid_grad)
        if self.is_identity:
            return euclid_grad
        w = self._vecs.T @ euclid_grad
        return self._vecs @ (self._inv_sq_vals * w)


def regularize_spd(candidate, floor: float, identity_fallback: bool = False) -> Metric:
    """Clamp a symmetric matrix into a positive-definite Metric.

    Eigenvalues below ``floor`` are replaced by ``floor``. When
    ``identity_fallback`` is set and no eigenvalue is positive, the identity
    metric is returned instead of a floor-scaled one.
    """
    if floor <= 0.0:
        raise ValueError("floor must be positive")
    a = np.asarray(candidate, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"candidate must be square, got shape {a.shape}")
    if np.abs(a - a.T).max() > _SYM_TOL * (1.0 + np.abs(a).max()):
        raise NotSymmetric("candidate matrix is not symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (a + a.T))
    if identity_fallback and vals.max() <= 0.0:
        return Metric.identity(a.shape[0])
    clamped = np.maximum(vals, floor)
    matrix = (vecs * clamped) @ vecs.T
    matrix = 0.5 * (matrix + matrix.T)
    return Metric(matrix, _decomp=(clamped, vecs))


def hessian_metric(hessian, floor_scale: float = 1e-8) -> Metric:
    """Metric induced by a Hessian: ||x||_k^2 = x' H x, so the representer of
    a gradient is the Newton direction H^-1 g.

    Falls back to the identity metric whenever the smallest eigenvalue is at
    or below floor_scale * (1 + ||H||_inf): an indefinite or near-singular
    quadratic form carries no usable step length in its flat or negative
    directions (the inverse would blow the representer up by 1/floor).
    """
    h = np.asarray(hessian, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotSymmetric(f"hessian must be square, got shape {h.shape}")
    h = 0.5 * (h + h.T)
    floor = floor_scale * (1.0 + np.abs(h).sum(axis=1).max())
    vals, vecs = np.linalg.eigh(h)
    if vals.min() <= floor:
        return Metric.identity(h.shape[0])
    roots = np.sqrt(vals)
    matrix = (vecs * roots) @ vecs.T
    matrix = 0.5 * (matrix + matrix.T)
    return Metric(matrix, _decomp=(roots, vecs))

"""Gaussian RBF expansion, its Laplacian and the decision function.

All functions are pure. Pointwise functions take a single point ``x`` of
shape ``(m,)``; the ``*_matrices`` helpers evaluate many points at once and
are what the training code uses.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ShapeError


@dataclass(frozen=True)
class RbfExpansion:
    """u(x) = sum_i w_i exp(-c ||x - x_i||^2) over K centers in R^m."""

    centers: np.ndarray
    weights: np.ndarray
    c: float

    def __post_init__(self):
        centers = np.array(self.centers, dtype=float, ndmin=2)
        weights = np.array(self.weights, dtype=float, ndmin=1)
        if centers.ndim != 2 or weights.ndim != 1:
            raise ShapeError("centers must be K x m and weights a K-vector")
        if centers.shape[0] < 1 or centers.shape[0] != weights.shape[0]:
            raise ShapeError(
                f"{centers.shape[0]} centers but {weights.shape[0]} weights"
            )
        if not self.c > 0 or not np.isfinite(self.c):
            raise ValueError(f"fitting degree c must be positive, got {self.c}")
        if not (np.all(np.isfinite(centers)) and np.all(np.isfinite(weights))):
            raise ValueError("centers and weights must be finite")
        centers.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "c", float(self.c))

    @property
    def m(self) -> int:
        return self.centers.shape[1]

    @property
    def size(self) -> int:
        return self.centers.shape[0]

    def with_weights(self, weights) -> "RbfExpansion":
        return RbfExpansion(self.centers, weights, self.c)


def _point(x, m: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != m:
        raise ShapeError(f"expected a point with {m} coordinates, got shape {x.shape}")
    return x


def rbf_eval(x, center, c: float) -> float:
    center = np.asarray(center, dtype=float)
    x = _point(x, center.shape[0] if center.ndim == 1 else -1)
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    d = x - center
    return float(np.exp(-c * np.dot(d, d)))


def _sqdist_to_centers(model: RbfExpansion, x: np.ndarray) -> np.ndarray:
    d = model.centers - x
    return np.einsum("ij,ij->i", d, d)


def u_eval(model: RbfExpansion, x) -> float:
    x = _point(x, model.m)
    phi = np.exp(-model.c * _sqdist_to_centers(model, x))
    return float(np.dot(model.weights, phi))


def laplacian_u(model: RbfExpansion, x) -> float:
    # Per center: Laplacian of exp(-c r^2) in R^m is 2c phi (2c r^2 - m).
    x = _point(x, model.m)
    r2 = _sqdist_to_centers(model, x)
    c = model.c
    lap = 2.0 * c * np.exp(-c * r2) * (2.0 * c * r2 - model.m)
    return float(np.dot(model.weights, lap))


def sigmoid(t):
    """Logistic function, evaluated without overflow for any finite input.

    Accepts scalars or arrays; returns the same kind.
    """
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    if out.ndim == 0:
        return float(out)
    return out


def g_eval(model: RbfExpansion, lam: float, x) -> float:
    """sigma(u(x)) - lam * Laplacian(u)(x). Not clamped; exceeds [0, 1] when lam > 0."""
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    return sigmoid(u_eval(model, x)) - lam * laplacian_u(model, x)


def sqdist_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, shape (len(A), len(B))."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[1]:
        raise ShapeError(f"incompatible point sets {A.shape} and {B.shape}")
    return cdist(A, B, "sqeuclidean")


def kernel_matrices(sqdist: np.ndarray, c: float, m: int):
    """Return (Phi, LapPhi) where Phi[i, j] = phi_j(x_i) and LapPhi its Laplacian."""
    phi = np.exp(-c * sqdist)
    lap = 2.0 * c * phi * (2.0 * c * sqdist - m)
    return phi, lap

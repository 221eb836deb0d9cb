"""The variational RBF classifier ("LR" model).

Training fits the weights of u(x) = sum_j w_j phi_j(x), with one Gaussian
centred on every training row, so that g(x_i) = sigma(u(x_i)) - lam * Lap u(x_i)
matches the labels in the least-squares sense. Prediction thresholds g at 1/2.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rbf_core
from .errors import DataError, ShapeError
from .lm_solver import LmConfig, LmReport, lm_minimize
from .rbf_core import RbfExpansion, sigmoid

MODEL_FORMAT = "varclass-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class Hyperparameters:
    c: float
    lam: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and np.isfinite(self.c)):
            raise ValueError(f"c must be positive, got {self.c}")
        if not (self.lam >= 0 and np.isfinite(self.lam)):
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")
        if not (self.eta > 0 and np.isfinite(self.eta)):
            raise ValueError(f"eta must be positive, got {self.eta}")


class FitProblem:
    """Residuals and Jacobian of the training least-squares problem.

    Kernel matrices are computed once from the pairwise squared distances
    between training rows; pass ``sqdist`` to reuse them across many fits.
    """

    def __init__(self, X, y, hyper: Hyperparameters, sqdist=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise ShapeError(f"X {X.shape} and y {y.shape} are inconsistent")
        self.X = X
        self.y = y
        self.hyper = hyper
        if sqdist is None:
            sqdist = rbf_core.sqdist_matrix(X, X)
        self.phi, self.lap = rbf_core.kernel_matrices(sqdist, hyper.c, X.shape[1])

    def decision(self, w):
        return sigmoid(self.phi @ w) - self.hyper.lam * (self.lap @ w)

    def residuals(self, w):
        w = self._weights(w)
        return self.y - self.decision(w)

    def jacobian(self, w):
        # d r_i / d w_j = -(sigma'(u_i) phi_j(x_i) - lam * Lap phi_j(x_i))
        w = self._weights(w)
        s = sigmoid(self.phi @ w)
        ds = s * (1.0 - s)
        J = self.phi * -ds[:, None]
        if self.hyper.lam:
            J += self.hyper.lam * self.lap
        return J

    def _weights(self, w):
        w = np.asarray(w, dtype=float)
        if w.shape != (self.X.shape[0],):
            raise ShapeError(f"expected {self.X.shape[0]} weights, got shape {w.shape}")
        return w


def residuals(X, y, w, hyper: Hyperparameters):
    return FitProblem(X, y, hyper).residuals(w)


def jacobian(X, w, hyper: Hyperparameters):
    X = np.asarray(X, dtype=float)
    return FitProblem(X, np.zeros(X.shape[0]), hyper).jacobian(w)


@dataclass(frozen=True)
class RbfClassifier:
    expansion: RbfExpansion
    hyper: Hyperparameters
    fit_report: LmReport = field(default_factory=LmReport, compare=False)

    @property
    def m(self) -> int:
        return self.expansion.m

    def decision_value(self, x) -> float:
        return rbf_core.g_eval(self.expansion, self.hyper.lam, x)

    def u_value(self, x) -> float:
        return rbf_core.u_eval(self.expansion, x)

    def predict(self, x) -> int:
        return threshold(self.decision_value(x))

    def decision_function(self, X) -> np.ndarray:
        """Vectorized decision values for the rows of X."""
        u, lap = self._u_and_laplacian(X)
        return sigmoid(u) - self.hyper.lam * lap

    def u_function(self, X) -> np.ndarray:
        return self._u_and_laplacian(X)[0]

    def predict_many(self, X) -> np.ndarray:
        return (self.decision_function(X) > 0.5).astype(int)

    def _u_and_laplacian(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.m:
            raise ShapeError(f"expected rows with {self.m} features, got shape {X.shape}")
        if X.shape[0] == 0:
            return np.zeros(0), np.zeros(0)
        sq = rbf_core.sqdist_matrix(X, self.expansion.centers)
        phi, lap = rbf_core.kernel_matrices(sq, self.expansion.c, self.m)
        w = self.expansion.weights
        return phi @ w, lap @ w


def threshold(value: float) -> int:
    """Class 1 iff the decision value is strictly above 1/2; ties go to class 0."""
    return 1 if value > 0.5 else 0


def check_labels(y) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1:
        raise ShapeError(f"labels must be a vector, got shape {y.shape}")
    bad = ~np.isin(y, (0, 1))
    if np.any(bad):
        raise DataError(f"labels must be 0 or 1; found {y[bad][0]!r}")
    return y.astype(float)


def fit(X, y, hyper: Hyperparameters, lm: LmConfig | None = None, sqdist=None) -> RbfClassifier:
    """Fit the weights by Levenberg-Marquardt starting from w = 0.

    ``X`` is expected to be standardized already. ``lm.eta`` is overridden by
    ``hyper.eta`` so the damping always matches the hyperparameter triplet.
    """
    X = np.asarray(X, dtype=float)
    y = check_labels(y)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ShapeError(f"X {X.shape} does not match {y.shape[0]} labels")
    if X.shape[0] < 2:
        raise DataError("need at least two training rows")
    if y.min() == y.max():
        raise DataError("training labels contain a single class")
    lm = lm or LmConfig()
    if lm.eta != hyper.eta:
        lm = LmConfig(hyper.eta, lm.max_iter, lm.step_tol, lm.cost_tol, lm.mode)

    problem = FitProblem(X, y, hyper, sqdist=sqdist)
    w, report = lm_minimize(problem.residuals, problem.jacobian, np.zeros(X.shape[0]), lm)
    return RbfClassifier(RbfExpansion(X, w, hyper.c), hyper, report)


# -- serialization ---------------------------------------------------------
# JSON floats are written with repr(), which round-trips IEEE doubles exactly.

def model_to_dict(model: RbfClassifier, scaler=None) -> dict:
    e = model.expansion
    out = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "m": e.m,
        "c": e.c,
        "lambda": model.hyper.lam,
        "eta": model.hyper.eta,
        "K": e.size,
        "centers": e.centers.ravel().tolist(),
        "weights": e.weights.tolist(),
    }
    if scaler is not None:
        out["scaler"] = {"means": scaler.means.tolist(), "scales": scaler.scales.tolist()}
    return out


def model_from_dict(d: dict):
    """Inverse of model_to_dict; returns ``(model, scaler_or_None)``."""
    from .eval_harness import Scaler

    if d.get("format") != MODEL_FORMAT or d.get("version") != MODEL_VERSION:
        raise DataError("not a varclass model file (bad format/version)")
    m, K = int(d["m"]), int(d["K"])
    centers = np.array(d["centers"], dtype=float)
    if centers.size != m * K or len(d["weights"]) != K:
        raise DataError("model file is truncated or inconsistent")
    hyper = Hyperparameters(float(d["c"]), float(d["lambda"]), float(d["eta"]))
    model = RbfClassifier(RbfExpansion(centers.reshape(K, m), d["weights"], hyper.c), hyper)
    scaler = None
    if "scaler" in d:
        scaler = Scaler(np.array(d["scaler"]["means"]), np.array(d["scaler"]["scales"]))
    return model, scaler


def save_model(path, model: RbfClassifier, scaler=None):
    Path(path).write_text(json.dumps(model_to_dict(model, scaler)))


def load_model(path):
    try:
        d = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read model file {path}: {exc}") from exc
    return model_from_dict(d)

"""Standardization, repeated stratified k-fold CV and the hyperparameter grid."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import metrics, rbf_core
from .classifier import Hyperparameters, RbfClassifier, fit
from .data_io import Dataset
from .errors import DataError
from .lm_solver import LmConfig
from .rbf_core import sigmoid


@dataclass(frozen=True)
class Scaler:
    means: np.ndarray
    scales: np.ndarray

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.means.shape[0]:
            raise DataError(f"expected {self.means.shape[0]} features, got shape {X.shape}")
        return (X - self.means) / self.scales


def scaler_fit(X) -> Scaler:
    """Column means and population standard deviations; constant columns get scale 1."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DataError("scaler needs a matrix with at least two rows")
    means = X.mean(axis=0)
    scales = X.std(axis=0)
    scales[scales == 0] = 1.0
    return Scaler(means, scales)


def scaler_apply(scaler: Scaler, X) -> np.ndarray:
    return scaler.transform(X)


@dataclass(frozen=True)
class FoldPlan:
    """Fold assignment per repeat: ``assignments[r][i]`` is the fold of row i."""

    repeats: int
    k: int
    seed: int
    assignments: tuple

    def split(self, repeat: int, fold: int):
        a = self.assignments[repeat]
        return np.flatnonzero(a != fold), np.flatnonzero(a == fold)

    def cells(self):
        for r in range(self.repeats):
            for f in range(self.k):
                yield r, f


def make_fold_plan(labels, repeats: int = 10, k: int = 5, seed: int = 0) -> FoldPlan:
    """Stratified k-fold partitions, reshuffled independently for every repeat.

    Repeat ``r`` draws from the r-th child of ``SeedSequence(seed)``, so the
    first repeats of a plan do not depend on how many repeats it has.
    """
    y = np.asarray(labels)
    if repeats < 1 or k < 2:
        raise ValueError("need repeats >= 1 and k >= 2")
    classes = np.unique(y)
    for cls in classes:
        if np.count_nonzero(y == cls) < k:
            raise DataError(f"class {cls} has fewer than {k} members; cannot stratify")
    assignments = []
    for child in np.random.SeedSequence(seed).spawn(repeats):
        rng = np.random.default_rng(child)
        fold = np.empty(y.shape[0], dtype=np.int64)
        offset = 0
        for cls in classes:
            idx = rng.permutation(np.flatnonzero(y == cls))
            # Continue dealing where the previous class stopped so fold sizes stay even.
            fold[idx] = (offset + np.arange(idx.shape[0])) % k
            offset = (offset + idx.shape[0]) % k
        fold.setflags(write=False)
        assignments.append(fold)
    return FoldPlan(repeats, k, seed, tuple(assignments))


@dataclass(frozen=True)
class GridSpec:
    c_values: tuple = tuple(k * math.log(2) for k in range(1, 8))
    lambda_values: tuple = tuple(float(v) for v in range(11))
    eta: float = 1.0

    def points(self):
        return [Hyperparameters(c, lam, self.eta) for lam in self.lambda_values for c in self.c_values]


@dataclass(frozen=True)
class FoldScore:
    repeat: int
    fold: int
    accuracy: float
    auc: float
    iterations: int
    termination: str
    monotone: bool


@dataclass
class CvResult:
    hyper: Hyperparameters
    folds: list = field(default_factory=list)

    def _values(self, name):
        return np.array([getattr(s, name) for s in self.folds])

    @property
    def accuracy_mean(self) -> float:
        return float(np.mean(self._values("accuracy")))

    @property
    def accuracy_std(self) -> float:
        return float(np.std(self._values("accuracy")))

    @property
    def auc_mean(self) -> float:
        return float(np.mean(self._values("auc")))

    @property
    def auc_std(self) -> float:
        return float(np.std(self._values("auc")))


@dataclass
class FoldData:
    """Train/test matrices for one CV cell, with distances shared by all fits."""

    repeat: int
    fold: int
    train: np.ndarray
    test: np.ndarray
    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    d2_train: np.ndarray
    d2_test: np.ndarray


def fold_data(dataset: Dataset, plan: FoldPlan, per_fold_scaling: bool = False) -> Iterator[FoldData]:
    if plan.assignments[0].shape[0] != dataset.n:
        raise DataError(f"fold plan covers {plan.assignments[0].shape[0]} rows, dataset has {dataset.n}")
    for r, f in plan.cells():
        train, test = plan.split(r, f)
        X_tr, X_te = dataset.X[train], dataset.X[test]
        if per_fold_scaling:
            s = scaler_fit(X_tr)
            X_tr, X_te = s.transform(X_tr), s.transform(X_te)
        yield FoldData(
            r, f, train, test, X_tr, dataset.y[train], X_te, dataset.y[test],
            rbf_core.sqdist_matrix(X_tr, X_tr), rbf_core.sqdist_matrix(X_te, X_tr),
        )


def _annotate(exc: Exception, fd: FoldData, hyper: Hyperparameters):
    msg = f"repeat {fd.repeat}, fold {fd.fold}, (c={hyper.c:.6g}, lambda={hyper.lam:g}): {exc}"
    try:
        return type(exc)(msg)
    except TypeError:
        return RuntimeError(msg)


def fit_fold(fd: FoldData, hyper: Hyperparameters, lm: LmConfig) -> RbfClassifier:
    try:
        return fit(fd.X_train, fd.y_train, hyper, lm, sqdist=fd.d2_train)
    except Exception as exc:
        raise _annotate(exc, fd, hyper) from exc


def score_fold(fd: FoldData, hyper: Hyperparameters, lm: LmConfig) -> FoldScore:
    model = fit_fold(fd, hyper, lm)
    phi, lap = rbf_core.kernel_matrices(fd.d2_test, hyper.c, fd.X_train.shape[1])
    w = model.expansion.weights
    g = sigmoid(phi @ w) - hyper.lam * (lap @ w)
    pred = (g > 0.5).astype(int)
    rep = model.fit_report
    return FoldScore(
        fd.repeat, fd.fold,
        metrics.accuracy(pred, fd.y_test),
        metrics.roc_auc(g, fd.y_test),
        rep.iterations, rep.termination, rep.monotone,
    )


def cross_validate(dataset: Dataset, hyper: Hyperparameters, plan: FoldPlan,
                   lm: LmConfig | None = None, per_fold_scaling: bool = False) -> CvResult:
    """Fit on each training split and score accuracy and AUC (ranked by g) on its test split.

    Without ``per_fold_scaling`` the dataset is used as given, i.e. it should
    already be standardized as a whole.
    """
    lm = lm or LmConfig(eta=hyper.eta)
    result = CvResult(hyper)
    for fd in fold_data(dataset, plan, per_fold_scaling):
        result.folds.append(score_fold(fd, hyper, lm))
    return result


def _grid_cell(args):
    fd, points, lm = args
    return [score_fold(fd, h, lm) for h in points]


def select_best(table) -> CvResult:
    """Highest mean accuracy; ties go to the smaller lambda, then the smaller c."""
    return min(table, key=lambda r: (-r.accuracy_mean, r.hyper.lam, r.hyper.c))


def grid_search(dataset: Dataset, grid: GridSpec, plan: FoldPlan, lm: LmConfig | None = None,
                per_fold_scaling: bool = False, n_jobs: int = 1):
    """Cross-validate every grid point. Returns ``(best_hyper, table)``.

    ``table`` lists one CvResult per grid point in ``grid.points()`` order.
    Work is split by CV cell; results are assembled by cell identity, so the
    outcome does not depend on ``n_jobs``.
    """
    lm = lm or LmConfig(eta=grid.eta)
    points = grid.points()
    cells = [(fd, points, lm) for fd in fold_data(dataset, plan, per_fold_scaling)]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            scored = list(pool.map(_grid_cell, cells))
    else:
        scored = [_grid_cell(c) for c in cells]
    by_cell = {(c[0].repeat, c[0].fold): s for c, s in zip(cells, scored)}

    table = []
    for i, h in enumerate(points):
        table.append(CvResult(h, [by_cell[key][i] for key in sorted(by_cell)]))
    return select_best(table).hyper, table


@dataclass
class BenchmarkResult:
    name: str
    n: int
    m: int
    best: CvResult
    table: list


def benchmark_dataset(dataset: Dataset, grid: GridSpec | None = None, repeats: int = 10,
                      seed: int = 0, lm: LmConfig | None = None, scaling: str = "global",
                      n_jobs: int = 1) -> BenchmarkResult:
    """Standardize, build the fold plan and run the full grid search on one dataset."""
    grid = grid or GridSpec()
    if scaling == "global":
        dataset = dataset.replace_X(scaler_fit(dataset.X).transform(dataset.X))
    elif scaling != "per-fold":
        raise ValueError(f"unknown scaling mode {scaling!r}")
    plan = make_fold_plan(dataset.y, repeats=repeats, k=5, seed=seed)
    best, table = grid_search(dataset, grid, plan, lm, per_fold_scaling=scaling == "per-fold",
                              n_jobs=n_jobs)
    best_cv = next(r for r in table if r.hyper == best)
    return BenchmarkResult(dataset.name, dataset.n, dataset.m, best_cv, table)

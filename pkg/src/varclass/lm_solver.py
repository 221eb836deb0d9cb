"""Levenberg-Marquardt for nonlinear least squares.

Minimizes S(w) = ||r(w)||^2 given callbacks for the residual vector and its
Jacobian. Each iteration solves the damped normal equations

    (J^T J + eta I) delta = -J^T r

and moves to w + delta. With ``r = y - g(w)`` and ``J = dr/dw = -dg/dw``
this is the usual ``(J_g^T J_g + eta I) delta = J_g^T r`` step.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg.lapack import dpotrf, dpotrs

from .errors import NumericalError, ShapeError

FIXED = "fixed-damping"
ADAPTIVE = "adaptive"

# Termination reasons recorded in LmReport.termination.
STEP_TOL = "step_tol"
COST_TOL = "cost_tol"
MAX_ITER = "max_iter"
SINGULAR = "singular_system"

_JITTER_START = 1e-10
_JITTER_TRIES = 3
_REJECT_FACTOR = 10.0
_MAX_DAMPING = 1e16


@dataclass(frozen=True)
class LmConfig:
    eta: float = 1.0
    max_iter: int = 100
    step_tol: float = 1e-8
    cost_tol: float = 1e-10
    mode: str = FIXED

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not (self.step_tol > 0 and self.cost_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.mode not in (FIXED, ADAPTIVE):
            raise ValueError(f"unknown LM mode {self.mode!r}")


@dataclass
class LmReport:
    """Convergence trace of one minimization.

    ``cost_history[0]`` is S(w0); each further entry is the cost after an
    accepted step, so ``iterations == len(cost_history) - 1``.
    """

    iterations: int = 0
    cost_history: list = field(default_factory=list)
    termination: str = ""
    rejected_steps: int = 0

    @property
    def final_cost(self) -> float:
        return self.cost_history[-1]

    @property
    def monotone(self) -> bool:
        h = self.cost_history
        return all(b <= a for a, b in zip(h, h[1:]))


def _check_finite(r: np.ndarray, what: str, iteration: int, w: np.ndarray):
    if not np.all(np.isfinite(r)):
        raise NumericalError(
            f"non-finite {what} at iterate {iteration} "
            f"(|w|_inf = {np.max(np.abs(w)):.6g})"
        )


def _solve_normal(A: np.ndarray, b: np.ndarray):
    """Cholesky solve of the SPD system, escalating diagonal jitter on failure.

    Returns None when the system stays numerically singular.
    """
    jitter = 0.0
    for attempt in range(_JITTER_TRIES + 1):
        M = A if jitter == 0.0 else A + jitter * np.eye(A.shape[0])
        factor, info = dpotrf(M, lower=0, clean=0)
        if info == 0:
            delta, info = dpotrs(factor, b, lower=0)
            if info == 0 and np.all(np.isfinite(delta)):
                return delta
        jitter = _JITTER_START if attempt == 0 else jitter * 10.0
    return None


def lm_minimize(
    residual_fn: Callable[[np.ndarray], np.ndarray],
    jacobian_fn: Callable[[np.ndarray], np.ndarray],
    w0,
    config: LmConfig = LmConfig(),
):
    """Run Levenberg-Marquardt from ``w0``.

    A trial step that increases the cost is rejected and retried with the
    damping multiplied by 10. In fixed-damping mode the damping goes back to
    ``config.eta`` after every accepted step, so accepted steps are exactly
    the plain fixed-eta iteration whenever that iteration decreases S.

    Returns ``(w, report)`` with ``w`` the last accepted iterate.

    Raises NumericalError if a residual or Jacobian evaluation is non-finite.
    """
    w = np.array(w0, dtype=float)
    if w.ndim != 1 or not np.all(np.isfinite(w)):
        raise ValueError("w0 must be a finite vector")

    r = np.asarray(residual_fn(w), dtype=float)
    _check_finite(r, "residual", 0, w)
    cost = float(r @ r)
    report = LmReport(cost_history=[cost])
    if cost == 0.0:
        report.termination = COST_TOL
        return w, report

    adaptive = config.mode == ADAPTIVE
    damping = config.eta
    K = w.shape[0]

    while report.iterations < config.max_iter:
        J = np.asarray(jacobian_fn(w), dtype=float)
        if J.shape != (r.shape[0], K):
            raise ShapeError(f"Jacobian has shape {J.shape}, expected {(r.shape[0], K)}")
        _check_finite(J, "Jacobian", report.iterations, w)
        JtJ = J.T @ J
        grad = J.T @ r
        scale = np.diag(JtJ).copy() if adaptive else 1.0
        if adaptive:
            scale[scale <= 0] = 1.0

        diag = np.diag(JtJ).copy()
        trial_damping = damping
        while True:
            A = JtJ
            A[np.diag_indices(K)] = diag + trial_damping * scale
            delta = _solve_normal(A, -grad)
            if delta is None:
                report.termination = SINGULAR
                return w, report
            step_size = float(np.max(np.abs(delta)))
            if step_size < config.step_tol:
                report.termination = STEP_TOL
                return w, report

            w_new = w + delta
            r_new = np.asarray(residual_fn(w_new), dtype=float)
            _check_finite(r_new, "residual", report.iterations + 1, w_new)
            cost_new = float(r_new @ r_new)
            if cost_new <= cost:
                break
            report.rejected_steps += 1
            trial_damping *= _REJECT_FACTOR
            if trial_damping > _MAX_DAMPING:
                report.termination = STEP_TOL
                return w, report

        decrease = cost - cost_new
        w, r, cost_old, cost = w_new, r_new, cost, cost_new
        report.iterations += 1
        report.cost_history.append(cost)

        if adaptive:
            # Marquardt schedule: relax after a clean step, keep the raised value otherwise.
            if trial_damping == damping:
                damping = max(damping / _REJECT_FACTOR, 1e-12)
            else:
                damping = trial_damping
        else:
            damping = config.eta

        if cost == 0.0 or decrease <= config.cost_tol * cost_old:
            report.termination = COST_TOL
            return w, report

    report.termination = MAX_ITER
    return w, report


def numeric_jacobian(residual_fn, w, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of ``residual_fn`` at ``w``."""
    if not h > 0:
        raise ValueError("h must be positive")
    w = np.asarray(w, dtype=float)
    cols = []
    for j in range(w.shape[0]):
        e = np.zeros_like(w)
        e[j] = h
        rp = np.asarray(residual_fn(w + e), dtype=float)
        rm = np.asarray(residual_fn(w - e), dtype=float)
        cols.append((rp - rm) / (2.0 * h))
    return np.column_stack(cols)

"""Data model and smooth-loss machinery for multi-task least squares.

A problem instance couples m regression tasks sharing d features.  Task i
contributes a design matrix X_i (n_i x d) and a response vector y_i.  A
candidate weight matrix W (d x m, column i = weights of task i) is scored
by the task-averaged quadratic loss

    l(W) = sum_i ||X_i w_i - y_i||^2 / (m n_i),

which every fitting routine in this package combines with one of the
sparsity penalties below:

    capped row penalty   lam * sum_j min(||w^j||_1, theta)
    entrywise l1         lam * sum_{j,i} |w_{ji}|
    row group l2         lam * sum_j ||w^j||_2
    dirty split          lam_s * sum |s_{ji}| + lam_b * sum_j max_i |b_{ji}|
                         with W = S + B

where w^j is the j-th row of W.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NumericalError

__all__ = [
    "TaskDataset",
    "CappedL1L1",
    "L1",
    "L12",
    "Dirty",
    "loss_value",
    "loss_gradient",
    "penalty_value",
    "objective_value",
    "lipschitz_constant",
]


class TaskDataset:
    """Immutable per-task regression data.

    Parameters
    ----------
    tasks : sequence of (X, y) pairs
        X is an (n_i, d) design matrix, y a length-n_i response.  All
        tasks must share the feature count d, every task needs at least
        one sample, and design matrices with an all-zero column are
        rejected (such a feature carries no information and would make
        the penalized problems degenerate; drop the column upstream).
    """

    def __init__(self, tasks):
        pairs = []
        d = None
        for i, (X, y) in enumerate(tasks):
            X = np.array(X, dtype=float)
            y = np.array(y, dtype=float).ravel()
            if X.ndim != 2:
                raise ValueError(f"task {i}: design matrix must be 2-D, got shape {X.shape}")
            n_i, d_i = X.shape
            if n_i < 1 or d_i < 1:
                raise ValueError(f"task {i}: empty design matrix {X.shape}")
            if y.shape[0] != n_i:
                raise ValueError(
                    f"task {i}: response length {y.shape[0]} does not match {n_i} rows"
                )
            if d is None:
                d = d_i
            elif d_i != d:
                raise ValueError(f"task {i}: feature count {d_i} differs from {d}")
            if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
                raise ValueError(f"task {i}: non-finite values in data")
            zero_cols = np.flatnonzero(~np.any(X != 0.0, axis=0))
            if zero_cols.size:
                raise ValueError(
                    f"task {i}: all-zero design column(s) {zero_cols.tolist()}"
                )
            X.setflags(write=False)
            y.setflags(write=False)
            pairs.append((X, y))
        if not pairs:
            raise ValueError("at least one task is required")
        self._tasks = tuple(pairs)
        self._d = d

    @property
    def tasks(self):
        return self._tasks

    @property
    def d(self) -> int:
        return self._d

    @property
    def m(self) -> int:
        return len(self._tasks)

    @property
    def n_per_task(self):
        return tuple(X.shape[0] for X, _ in self._tasks)

    @cached_property
    def _stacked(self):
        # (m, n, d) and (m, n) views exist only when all tasks share n;
        # the batched matmul path is much faster than a per-task loop.
        ns = self.n_per_task
        if len(set(ns)) != 1:
            return None
        X = np.stack([Xi for Xi, _ in self._tasks])
        Y = np.stack([yi for _, yi in self._tasks])
        X.setflags(write=False)
        Y.setflags(write=False)
        return X, Y

    def __repr__(self):
        return f"TaskDataset(m={self.m}, d={self.d}, n={list(self.n_per_task)})"


@dataclass(frozen=True)
class CappedL1L1:
    """Row-capped penalty lam * sum_j min(||w^j||_1, theta)."""

    lam: float
    theta: float

    def __post_init__(self):
        if not (self.lam > 0 and self.theta > 0):
            raise ValueError("lam and theta must be positive")


@dataclass(frozen=True)
class L1:
    """Entrywise penalty lam * sum |w_{ji}|."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")


@dataclass(frozen=True)
class L12:
    """Row-coupled group penalty lam * sum_j ||w^j||_2."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")


@dataclass(frozen=True)
class Dirty:
    """Split penalty lam_s * ||S||_1 + lam_b * sum_j max_i |b_{ji}| on W = S + B."""

    lam_s: float
    lam_b: float

    def __post_init__(self):
        if not (self.lam_s > 0 and self.lam_b > 0):
            raise ValueError("lam_s and lam_b must be positive")


def _check_weight_shape(data: TaskDataset, W: np.ndarray) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    if W.shape != (data.d, data.m):
        raise ValueError(f"weight matrix shape {W.shape} does not match ({data.d}, {data.m})")
    return W


def loss_value(data: TaskDataset, W) -> float:
    """Task-averaged quadratic loss sum_i ||X_i w_i - y_i||^2 / (m n_i)."""
    W = _check_weight_shape(data, W)
    stacked = data._stacked
    if stacked is not None:
        X, Y = stacked
        R = np.matmul(X, W.T[:, :, None])[..., 0] - Y
        return float(np.vdot(R, R) / (data.m * X.shape[1]))
    total = 0.0
    for i, (X, y) in enumerate(data.tasks):
        r = X @ W[:, i] - y
        total += (r @ r) / (data.m * y.shape[0])
    return float(total)


def loss_gradient(data: TaskDataset, W) -> np.ndarray:
    """Gradient of loss_value; column i is (2/(m n_i)) X_i^T (X_i w_i - y_i)."""
    W = _check_weight_shape(data, W)
    stacked = data._stacked
    if stacked is not None:
        X, Y = stacked
        R = np.matmul(X, W.T[:, :, None])[..., 0] - Y
        G = np.matmul(X.transpose(0, 2, 1), R[..., None])[..., 0]
        return (2.0 / (data.m * X.shape[1])) * G.T
    G = np.empty((data.d, data.m))
    for i, (X, y) in enumerate(data.tasks):
        r = X @ W[:, i] - y
        G[:, i] = (2.0 / (data.m * y.shape[0])) * (X.T @ r)
    return G


def penalty_value(W, reg, split=None) -> float:
    """Evaluate the penalty described by ``reg`` at W.

    The dirty penalty is defined on an explicit decomposition and needs
    ``split=(S, B)`` with S + B = W.
    """
    W = np.asarray(W, dtype=float)
    if isinstance(reg, CappedL1L1):
        row_l1 = np.abs(W).sum(axis=1)
        return float(reg.lam * np.minimum(row_l1, reg.theta).sum())
    if isinstance(reg, L1):
        return float(reg.lam * np.abs(W).sum())
    if isinstance(reg, L12):
        return float(reg.lam * np.linalg.norm(W, axis=1).sum())
    if isinstance(reg, Dirty):
        if split is None:
            raise ValueError("dirty penalty requires split=(S, B)")
        S, B = split
        S = np.asarray(S, dtype=float)
        B = np.asarray(B, dtype=float)
        if S.shape != W.shape or B.shape != W.shape:
            raise ValueError("split parts must match the weight matrix shape")
        return float(reg.lam_s * np.abs(S).sum() + reg.lam_b * np.abs(B).max(axis=1).sum())
    raise TypeError(f"unknown regularizer {reg!r}")


def objective_value(data: TaskDataset, W, reg, split=None) -> float:
    """Penalized objective loss_value(data, W) + penalty_value(W, reg)."""
    return loss_value(data, W) + penalty_value(_check_weight_shape(data, W), reg, split)


def _sigma_max_sq(X: np.ndarray, tol: float, max_iter: int) -> float:
    """Largest squared singular value via power iteration on the small Gram side."""
    n, d = X.shape
    rng = np.random.default_rng(178293741)  # fixed start vector, keeps results reproducible
    if d <= n:
        mul = lambda v: X.T @ (X @ v)
        dim = d
    else:
        mul = lambda v: X @ (X.T @ v)
        dim = n
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    lam_prev = np.inf
    for _ in range(max_iter):
        w = mul(v)
        lam = float(v @ w)
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            # start vector happened to lie in the null space; redraw
            v = rng.standard_normal(dim)
            v /= np.linalg.norm(v)
            lam_prev = np.inf
            continue
        if abs(lam - lam_prev) <= tol * max(abs(lam), 1e-30):
            return lam
        lam_prev = lam
        v = w / norm_w
    raise NumericalError(f"power iteration did not converge in {max_iter} iterations")


def lipschitz_constant(data: TaskDataset, tol: float = 1e-6, max_iter: int = 10_000) -> float:
    """Lipschitz constant of loss_gradient: max_i 2 sigma_max(X_i)^2 / (m n_i).

    The loss is block separable across tasks, so the worst per-task
    curvature bounds the joint gradient.  sigma_max is estimated by power
    iteration with a fixed deterministic start vector.
    """
    L = 0.0
    for X, y in data.tasks:
        s2 = _sigma_max_sq(X, tol, max_iter)
        L = max(L, 2.0 * s2 / (data.m * y.shape[0]))
    return L

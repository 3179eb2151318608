"""Matrix norms and prediction-error metrics.

The headline estimation metric sums Euclidean norms of per-task (column)
coefficient errors; ``lpq_norm`` exposes the general family over either
axis since both row and column conventions appear in the literature.
"""

from __future__ import annotations

import numpy as np

__all__ = ["lpq_norm", "param_error_l21", "nmse", "amse"]


def lpq_norm(M, p, q, outer_axis: str = "rows") -> float:
    """(sum_outer (sum_inner |entry|^q)^(p/q))^(1/p) with conventional inf limits.

    ``outer_axis`` selects whether the outer sum runs over rows or
    columns.  p = inf takes the max of inner q-norms, q = inf uses the
    max inside each group.
    """
    for name, val in (("p", p), ("q", q)):
        if not (val == np.inf or val >= 1):
            raise ValueError(f"{name} must be >= 1 or inf, got {val}")
    if outer_axis not in ("rows", "columns"):
        raise ValueError("outer_axis must be 'rows' or 'columns'")
    A = np.abs(np.asarray(M, dtype=float))
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    if outer_axis == "columns":
        A = A.T
    if q == np.inf:
        inner = A.max(axis=1)
    elif q == 1:
        inner = A.sum(axis=1)
    else:
        inner = (A**q).sum(axis=1) ** (1.0 / q)
    if p == np.inf:
        return float(inner.max())
    if p == 1:
        return float(inner.sum())
    return float((inner**p).sum() ** (1.0 / p))


def param_error_l21(W_hat, W_ref) -> float:
    """Sum over task columns of the Euclidean norm of the column difference."""
    W_hat = np.asarray(W_hat, dtype=float)
    W_ref = np.asarray(W_ref, dtype=float)
    if W_hat.shape != W_ref.shape:
        raise ValueError(f"shape mismatch: {W_hat.shape} vs {W_ref.shape}")
    return float(np.linalg.norm(W_hat - W_ref, axis=0).sum())


def _per_task_chunks(predictions, actuals, sizes):
    predictions = np.asarray(predictions, dtype=float).ravel()
    actuals = np.asarray(actuals, dtype=float).ravel()
    sizes = [int(s) for s in sizes]
    if any(s < 1 for s in sizes):
        raise ValueError("every task needs at least one sample")
    if predictions.shape[0] != actuals.shape[0] or predictions.shape[0] != sum(sizes):
        raise ValueError("predictions, actuals and sizes are not aligned")
    start = 0
    for s in sizes:
        yield predictions[start : start + s], actuals[start : start + s]
        start += s


def nmse(predictions, actuals, sizes) -> float:
    """Sample-size weighted mean of per-task MSE / Var(actuals).

    Population (divide-by-n) conventions throughout, so predicting each
    task's mean scores exactly 1.  A task with zero target variance has
    no meaningful normalization and raises ValueError.
    """
    num = 0.0
    total = 0
    for i, (p, a) in enumerate(_per_task_chunks(predictions, actuals, sizes)):
        var = float(np.mean((a - a.mean()) ** 2))
        if var == 0.0:
            raise ValueError(f"task {i}: zero variance in the target values")
        mse = float(np.mean((p - a) ** 2))
        num += a.shape[0] * mse / var
        total += a.shape[0]
    return num / total


def amse(predictions, actuals, sizes) -> float:
    """Sample-size weighted mean of per-task MSE / mean(actuals^2).

    The all-zero predictor scores exactly 1; a task whose targets are all
    zero raises ValueError.
    """
    num = 0.0
    total = 0
    for i, (p, a) in enumerate(_per_task_chunks(predictions, actuals, sizes)):
        ms = float(np.mean(a**2))
        if ms == 0.0:
            raise ValueError(f"task {i}: target values are all zero")
        mse = float(np.mean((p - a) ** 2))
        num += a.shape[0] * mse / ms
        total += a.shape[0]
    return num / total

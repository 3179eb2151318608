"""Fitting algorithms: the multi-stage reweighted solver and three baselines.

The central routine, ``multi_stage_fit``, minimizes

    l(W) + lam * sum_j min(||w^j||_1, theta)

by solving a sequence of feature-weighted lasso problems

    min_W  l(W) + sum_j lam_j ||w^j||_1

where stage weights follow the indicator rule lam_j = lam if the
previous stage's row l1 norm is strictly below theta, else 0: rows that
already look large stop being penalized, rows that look small keep the
full penalty.  Stage one uses the uniform weights lam (so it coincides
with the plain l1 baseline) and every stage warm-starts from the
previous solution, which makes the capped objective non-increasing
across stages.

Baselines share the same inner solver: ``lasso_fit`` (uniform entrywise
l1), ``l12_fit`` (row group l2), and ``dirty_fit`` (split W = S + B with
entrywise l1 on S and a rowwise max penalty on B).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fista import SolveResult, SolverConfig, fista_solve
from .metrics import param_error_l21
from .model import (
    CappedL1L1,
    TaskDataset,
    _check_weight_shape,
    _sigma_max_sq,
    lipschitz_constant,
    loss_gradient,
    loss_value,
    objective_value,
)
from .prox import dirty_prox, row_group_l2_prox, weighted_l1_prox

__all__ = [
    "MultiStageConfig",
    "StageTrace",
    "FitResult",
    "reweight",
    "weighted_lasso_fit",
    "multi_stage_fit",
    "lasso_fit",
    "l12_fit",
    "dirty_fit",
    "kkt_residual",
]


@dataclass(frozen=True)
class MultiStageConfig:
    """Parameters of the multi-stage loop.

    lam and theta are the penalty level and row cap; ``stages`` bounds
    the number of reweighting rounds and ``stage_stop_tol`` stops early
    once the capped objective changes by less than the tolerance between
    stages.  ``per_task`` solves the (separable) inner problem one task
    at a time, optionally on ``workers`` threads; results are
    deterministic either way.
    """

    lam: float
    theta: float
    stages: int = 10
    inner: SolverConfig = field(default_factory=SolverConfig)
    stage_stop_tol: float = 1e-10
    per_task: bool = False
    workers: int | None = None

    def __post_init__(self):
        if not (self.lam > 0 and self.theta > 0):
            raise ValueError("lam and theta must be positive")
        if self.stages < 1:
            raise ValueError("stages must be at least 1")
        if self.stage_stop_tol < 0:
            raise ValueError("stage_stop_tol must be nonnegative")


@dataclass
class StageTrace:
    """Per-stage record of a fit (objective, inner effort, optimality)."""

    stage: int
    objective: float
    inner_iterations: int
    kkt_residual: float
    param_error_l21: float | None = None


@dataclass
class FitResult:
    weights: np.ndarray
    stage_traces: list
    reg_weights_history: list
    stage_weights: list
    split: tuple | None = None  # (S, B) for the dirty model


def reweight(W, lam: float, theta: float) -> np.ndarray:
    """Per-feature weights for the next stage: lam if ||w^j||_1 < theta else 0.

    The inequality is strict; a row sitting exactly at theta is treated
    as large and gets no penalty.
    """
    if not (lam > 0 and theta > 0):
        raise ValueError("lam and theta must be positive")
    row_l1 = np.abs(np.asarray(W, dtype=float)).sum(axis=1)
    return np.where(row_l1 < theta, lam, 0.0)


def _validate_reg_weights(data: TaskDataset, weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float).ravel()
    if w.shape[0] != data.d:
        raise ValueError(f"weight vector length {w.shape[0]} does not match d={data.d}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("per-feature weights must be finite and nonnegative")
    return w


def _with_step(cfg: SolverConfig, step: float) -> SolverConfig:
    if cfg.step_size is not None:
        return cfg
    return SolverConfig(cfg.max_iterations, cfg.rel_tolerance, step,
                        cfg.backtracking, cfg.backtracking_factor)


def _solve_weighted_lasso_joint(data, weights, init, config) -> SolveResult:
    cfg = _with_step(config, 1.0 / lipschitz_constant(data))
    return fista_solve(
        grad=lambda W: loss_gradient(data, W),
        smooth_value=lambda W: loss_value(data, W),
        prox=lambda V, t: weighted_l1_prox(V, weights, t),
        penalty_value=lambda W: float((weights * np.abs(W).sum(axis=1)).sum()),
        init=init,
        config=cfg,
    )


def _solve_weighted_lasso_single(X, y, m, weights, init_col, config) -> SolveResult:
    # one task of the separable problem, keeping the joint 1/(m n_i) scaling
    n = y.shape[0]
    scale = 1.0 / (m * n)
    config = _with_step(config, 1.0 / (2.0 * _sigma_max_sq(X, 1e-6, 10_000) * scale))

    def smooth(w):
        r = X @ w[:, 0] - y
        return scale * float(r @ r)

    def grad(w):
        r = X @ w[:, 0] - y
        return (2.0 * scale) * (X.T @ r)[:, None]

    return fista_solve(
        grad=grad,
        smooth_value=smooth,
        prox=lambda V, t: weighted_l1_prox(V, weights, t),
        penalty_value=lambda w: float(weights @ np.abs(w[:, 0])),
        init=init_col[:, None],
        config=config,
    )


def _solve_weighted_lasso(data, weights, init, config, per_task=False, workers=None) -> SolveResult:
    if not per_task:
        return _solve_weighted_lasso_joint(data, weights, init, config)
    d, m = data.d, data.m
    jobs = [
        (X, y, m, weights, init[:, i], config) for i, (X, y) in enumerate(data.tasks)
    ]
    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda a: _solve_weighted_lasso_single(*a), jobs))
    else:
        results = [_solve_weighted_lasso_single(*a) for a in jobs]
    W = np.column_stack([r.solution[:, 0] for r in results])
    obj = loss_value(data, W) + float((weights * np.abs(W).sum(axis=1)).sum())
    return SolveResult(
        solution=W,
        iterations=sum(r.iterations for r in results),
        final_objective=obj,
        converged=all(r.converged for r in results),
        objective_trace=[obj],
    )


def weighted_lasso_fit(data: TaskDataset, weights, init=None, config: SolverConfig | None = None,
                       per_task: bool = False, workers: int | None = None) -> np.ndarray:
    """Minimize l(W) + sum_j lam_j ||w^j||_1 and return the weight matrix.

    For designs drawn from a continuous distribution the minimizer is
    unique with probability one, so the result does not depend on
    ``init`` beyond solver tolerance.
    """
    w = _validate_reg_weights(data, weights)
    W0 = np.zeros((data.d, data.m)) if init is None else _check_weight_shape(data, init)
    cfg = config if config is not None else SolverConfig()
    return _solve_weighted_lasso(data, w, W0, cfg, per_task, workers).solution


def kkt_residual(data: TaskDataset, W, weights) -> float:
    """Worst violation of the weighted-lasso stationarity conditions.

    With c_{ji} = (2/(m n_i)) x_j^T (y_i - X_i w_i), optimality requires
    c_{ji} = lam_j sign(w_{ji}) on active entries and |c_{ji}| <= lam_j
    on zero entries; the residual is the largest gap over all (j, i).
    """
    W = _check_weight_shape(data, W)
    w = _validate_reg_weights(data, weights)
    C = -loss_gradient(data, W)
    lam = w[:, None]
    active = W != 0.0
    viol = np.maximum(np.abs(C) - lam, 0.0)
    viol[active] = np.abs(C[active] - (lam * np.sign(W))[active])
    return float(viol.max()) if viol.size else 0.0


def multi_stage_fit(data: TaskDataset, config: MultiStageConfig, ground_truth=None,
                    init=None) -> FitResult:
    """Run the staged reweighted-lasso loop.

    Stage weights start uniform at lam; each stage solves the weighted
    problem warm-started from the previous solution, records a
    StageTrace, then recomputes the weights from the new row norms.  The
    loop stops after ``config.stages`` stages or when the capped
    objective changes by less than ``config.stage_stop_tol``.  When
    ``ground_truth`` is given each trace carries the column-wise l2,1
    estimation error.
    """
    d, m = data.d, data.m
    if ground_truth is not None:
        ground_truth = _check_weight_shape(data, ground_truth)
    W = np.zeros((d, m)) if init is None else np.array(_check_weight_shape(data, init))
    reg = CappedL1L1(config.lam, config.theta)
    inner = config.inner
    if inner.step_size is None and not config.per_task:
        inner = _with_step(inner, 1.0 / lipschitz_constant(data))
    stage_weights_vec = np.full(d, config.lam)
    history = [stage_weights_vec]
    traces: list[StageTrace] = []
    stage_solutions: list[np.ndarray] = []
    prev_obj = None
    for stage in range(1, config.stages + 1):
        res = _solve_weighted_lasso(
            data, stage_weights_vec, W, inner, config.per_task, config.workers
        )
        W = res.solution
        obj = objective_value(data, W, reg)
        traces.append(
            StageTrace(
                stage=stage,
                objective=obj,
                inner_iterations=res.iterations,
                kkt_residual=kkt_residual(data, W, stage_weights_vec),
                param_error_l21=(
                    param_error_l21(W, ground_truth) if ground_truth is not None else None
                ),
            )
        )
        stage_solutions.append(W)
        stage_weights_vec = reweight(W, config.lam, config.theta)
        history.append(stage_weights_vec)
        if prev_obj is not None and abs(prev_obj - obj) < config.stage_stop_tol:
            break
        prev_obj = obj
    return FitResult(
        weights=W,
        stage_traces=traces,
        reg_weights_history=history,
        stage_weights=stage_solutions,
    )


def lasso_fit(data: TaskDataset, lam: float, config: SolverConfig | None = None,
              ground_truth=None, init=None) -> FitResult:
    """Uniform entrywise l1 baseline; identical to stage one of the staged fit."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    cfg = config if config is not None else SolverConfig()
    weights = np.full(data.d, lam)
    W0 = np.zeros((data.d, data.m)) if init is None else _check_weight_shape(data, init)
    res = _solve_weighted_lasso(data, weights, W0, cfg)
    W = res.solution
    trace = StageTrace(
        stage=1,
        objective=res.final_objective,
        inner_iterations=res.iterations,
        kkt_residual=kkt_residual(data, W, weights),
        param_error_l21=(
            param_error_l21(W, ground_truth) if ground_truth is not None else None
        ),
    )
    return FitResult(
        weights=W,
        stage_traces=[trace],
        reg_weights_history=[weights],
        stage_weights=[W],
    )


def _fixed_point_residual(W, G, prox_step, step) -> float:
    z = prox_step(W - step * G, step)
    return float(np.max(np.abs(W - z)) / step) if W.size else 0.0


def l12_fit(data: TaskDataset, lam: float, config: SolverConfig | None = None,
            ground_truth=None, init=None) -> FitResult:
    """Row group l2 baseline: min l(W) + lam * sum_j ||w^j||_2."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    cfg = _with_step(config if config is not None else SolverConfig(),
                     1.0 / lipschitz_constant(data))
    W0 = np.zeros((data.d, data.m)) if init is None else _check_weight_shape(data, init)
    prox = lambda V, t: row_group_l2_prox(V, t * lam)
    res = fista_solve(
        grad=lambda W: loss_gradient(data, W),
        smooth_value=lambda W: loss_value(data, W),
        prox=prox,
        penalty_value=lambda W: float(lam * np.linalg.norm(W, axis=1).sum()),
        init=W0,
        config=cfg,
    )
    W = res.solution
    trace = StageTrace(
        stage=1,
        objective=res.final_objective,
        inner_iterations=res.iterations,
        kkt_residual=_fixed_point_residual(W, loss_gradient(data, W), prox, cfg.step_size),
        param_error_l21=(
            param_error_l21(W, ground_truth) if ground_truth is not None else None
        ),
    )
    return FitResult(W, [trace], [np.full(data.d, lam)], [W])


def dirty_fit(data: TaskDataset, lam_s: float, lam_b: float,
              config: SolverConfig | None = None, ground_truth=None) -> FitResult:
    """Split baseline: min over (S, B) of l(S+B) + lam_s ||S||_1 + lam_b sum_j max_i |b_{ji}|.

    Solved over the stacked variable [S; B]; both blocks start at zero.
    Returns W = S + B with the split attached.
    """
    if not (lam_s > 0 and lam_b > 0):
        raise ValueError("lam_s and lam_b must be positive")
    d, m = data.d, data.m
    # the stacked gradient [G; G] is 2L-Lipschitz when the plain gradient is L
    cfg = _with_step(config if config is not None else SolverConfig(),
                     1.0 / (2.0 * lipschitz_constant(data)))

    def smooth(Z):
        return loss_value(data, Z[:d] + Z[d:])

    def grad(Z):
        G = loss_gradient(data, Z[:d] + Z[d:])
        return np.vstack([G, G])

    def prox(Z, t):
        S_new, B_new = dirty_prox(Z[:d], Z[d:], lam_s, lam_b, t)
        return np.vstack([S_new, B_new])

    def penalty(Z):
        return float(lam_s * np.abs(Z[:d]).sum() + lam_b * np.abs(Z[d:]).max(axis=1).sum())

    res = fista_solve(grad, smooth, prox, penalty, np.zeros((2 * d, m)), cfg)
    S, B = res.solution[:d], res.solution[d:]
    W = S + B
    trace = StageTrace(
        stage=1,
        objective=res.final_objective,
        inner_iterations=res.iterations,
        kkt_residual=_fixed_point_residual(res.solution, grad(res.solution), prox, cfg.step_size),
        param_error_l21=(
            param_error_l21(W, ground_truth) if ground_truth is not None else None
        ),
    )
    return FitResult(W, [trace], [], [W], split=(S, B))

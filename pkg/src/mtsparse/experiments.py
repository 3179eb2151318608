"""Experiment runners emitting machine-readable result tables.

Three protocols are covered, mirroring the synthetic and real-data
studies this package reproduces:

  * error vs stage   estimation error of the staged fit per stage,
  * error vs lambda  the four algorithms swept over a penalty grid,
  * real-data CV     per-task splits, 3-fold cross validation, test
                     nMSE / aMSE on user-supplied CSV data.

Penalty grids are built as lam = alpha * sqrt(ln(d m) / n) from a list
of alpha multipliers.  Every row of the output carries (experiment id,
seed, algorithm, stage, lambda, theta-or-ratio, metric, value, wall
time); rows are emitted in sorted order with 17 significant digits so
reruns with identical configuration produce byte-identical files apart
from the wall-time column.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .algorithms import (
    MultiStageConfig,
    dirty_fit,
    l12_fit,
    lasso_fit,
    multi_stage_fit,
)
from .data import (
    SyntheticSpec,
    generate_synthetic,
    kfold_indices,
    load_csv,
    split_train_test,
)
from .fista import SolverConfig
from .metrics import amse, nmse, param_error_l21
from .model import TaskDataset

__all__ = [
    "PRESETS",
    "AGGREGATE_SEED",
    "ExperimentConfig",
    "ResultRow",
    "lambda_grid",
    "run_error_vs_stage",
    "run_error_vs_lambda",
    "run_real_data_cv",
    "emit_results",
]

# Desk-scale synthetic presets: d >> n with row-sparse truth, small noise.
PRESETS = {
    "small": SyntheticSpec(m=10, n=30, d=100, sigma=0.01),
    "tiny": SyntheticSpec(m=3, n=15, d=20, sigma=0.005),
}

ALGORITHMS = ("multi_stage", "lasso", "l12", "dirty")

# seed value used for rows aggregated over seeds (means, standard deviations)
AGGREGATE_SEED = -1


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a runner needs; CLI flags and config files map onto this."""

    kind: str  # synth-stage | synth-lambda | real-cv | diagnose
    spec: SyntheticSpec | None = None
    csv_path: str | None = None
    seeds: tuple = (0, 1, 2, 3, 4, 5, 6, 7, 8, 9)
    alphas: tuple = (0.05, 0.1, 0.2, 0.5, 1.0)
    theta_ratio_multipliers: tuple = (50.0, 10.0, 2.0, 0.4)  # theta/lambda in units of m
    dirty_ratios: tuple = (1.0, 0.5, 0.2, 0.1)  # lam_s / lam_b
    algorithms: tuple = ALGORITHMS
    stages: int = 10
    train_ratios: tuple = (0.15, 0.20, 0.25)
    out_path: str | None = None
    inner: SolverConfig = field(default_factory=SolverConfig)
    eta: float = 0.05
    s_extra: int = 0  # sparsity slack on top of r_bar for diagnose

    def __post_init__(self):
        if self.kind not in ("synth-stage", "synth-lambda", "real-cv", "diagnose"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if not self.alphas or any(a <= 0 for a in self.alphas):
            raise ValueError("alphas must be a non-empty list of positive multipliers")
        if any(r <= 0 for r in self.theta_ratio_multipliers + self.dirty_ratios):
            raise ValueError("ratios must be positive")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms {sorted(unknown)}")
        if any(not 0 < r < 1 for r in self.train_ratios):
            raise ValueError("training ratios must lie in (0, 1)")


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    seed: int
    algorithm: str
    stage: int
    lam: float
    theta_or_ratio: float | None
    metric: str
    value: float
    wall_ms: float


def lambda_grid(alphas, d: int, m: int, n: int):
    """lam = alpha * sqrt(ln(d m) / n) for each multiplier."""
    base = math.sqrt(math.log(d * m) / n)
    return [float(a) * base for a in alphas]


def _aggregate(rows, key_fields, metric_suffixes=("mean", "std")):
    """Mean/std rows over seeds for each distinct key (population std)."""
    groups: dict = {}
    for r in rows:
        key = tuple(getattr(r, f) for f in key_fields) + (r.metric,)
        groups.setdefault(key, []).append(r)
    out = []
    for key, members in groups.items():
        vals = np.array([r.value for r in members])
        proto = members[0]
        for suffix, v in zip(metric_suffixes, (vals.mean(), vals.std())):
            out.append(
                ResultRow(
                    experiment=proto.experiment,
                    seed=AGGREGATE_SEED,
                    algorithm=proto.algorithm,
                    stage=proto.stage,
                    lam=proto.lam,
                    theta_or_ratio=proto.theta_or_ratio,
                    metric=f"{proto.metric}_{suffix}",
                    value=float(v),
                    wall_ms=0.0,
                )
            )
    return out


def run_error_vs_stage(config: ExperimentConfig):
    """Per-stage estimation error of the staged fit, per seed and alpha.

    Uses the first theta multiplier (theta = mult * m * lambda) and
    always runs the full stage budget so traces align across seeds.
    Aggregate rows (seed = -1) carry per-stage mean and standard
    deviation of the error over the seed list.
    """
    if config.spec is None:
        raise ValueError("synth-stage needs a synthetic spec")
    spec = config.spec
    ratio = config.theta_ratio_multipliers[0] * spec.m
    lams = lambda_grid(config.alphas, spec.d, spec.m, spec.n)
    rows = []
    for seed in config.seeds:
        inst = generate_synthetic(replace(spec, seed=seed))
        for lam in lams:
            cfg = MultiStageConfig(
                lam=lam,
                theta=ratio * lam,
                stages=config.stages,
                inner=config.inner,
                stage_stop_tol=0.0,
            )
            t0 = time.perf_counter()
            fit = multi_stage_fit(inst.data, cfg, ground_truth=inst.true_weights)
            wall = (time.perf_counter() - t0) * 1e3
            for tr in fit.stage_traces:
                rows.append(
                    ResultRow(
                        experiment="synth-stage",
                        seed=seed,
                        algorithm="multi_stage",
                        stage=tr.stage,
                        lam=lam,
                        theta_or_ratio=ratio,
                        metric="error_l21",
                        value=tr.param_error_l21,
                        wall_ms=wall / len(fit.stage_traces),
                    )
                )
    rows += _aggregate(rows, ("experiment", "algorithm", "stage", "lam", "theta_or_ratio"))
    return rows


def _final_error(fit, truth) -> float:
    return param_error_l21(fit.weights, truth)


def run_error_vs_lambda(config: ExperimentConfig):
    """Sweep the lambda grid for the requested algorithms on synthetic data.

    The staged algorithm is swept across its theta ratios and the dirty
    model across its lam_s/lam_b ratios.  Besides one row per grid
    point, each algorithm gets a per-seed ``error_l21_min`` row (its
    best grid point) and per-grid-point means over seeds.
    """
    if config.spec is None:
        raise ValueError("synth-lambda needs a synthetic spec")
    spec = config.spec
    lams = sorted(lambda_grid(config.alphas, spec.d, spec.m, spec.n), reverse=True)
    theta_ratios = [mult * spec.m for mult in config.theta_ratio_multipliers]
    rows = []
    min_rows = []
    for seed in config.seeds:
        inst = generate_synthetic(replace(spec, seed=seed))
        truth = inst.true_weights
        best: dict = {}

        def record(algo, stage, lam, ratio, err, wall):
            rows.append(
                ResultRow("synth-lambda", seed, algo, stage, lam, ratio,
                          "error_l21", err, wall)
            )
            if err < best.get(algo, (np.inf,))[0]:
                best[algo] = (err, lam, ratio)

        warm: dict = {}
        for lam in lams:  # descending, warm-started along the grid
            if "lasso" in config.algorithms:
                t0 = time.perf_counter()
                fit = lasso_fit(inst.data, lam, config.inner, init=warm.get("lasso"))
                warm["lasso"] = fit.weights
                record("lasso", 1, lam, None, _final_error(fit, truth),
                       (time.perf_counter() - t0) * 1e3)
            if "l12" in config.algorithms:
                t0 = time.perf_counter()
                fit = l12_fit(inst.data, lam, config.inner, init=warm.get("l12"))
                warm["l12"] = fit.weights
                record("l12", 1, lam, None, _final_error(fit, truth),
                       (time.perf_counter() - t0) * 1e3)
            if "dirty" in config.algorithms:
                for ratio in config.dirty_ratios:
                    t0 = time.perf_counter()
                    fit = dirty_fit(inst.data, lam, lam / ratio, config.inner)
                    record("dirty", 1, lam, ratio, _final_error(fit, truth),
                           (time.perf_counter() - t0) * 1e3)
            if "multi_stage" in config.algorithms:
                for ratio in theta_ratios:
                    cfg = MultiStageConfig(
                        lam=lam, theta=ratio * lam, stages=config.stages,
                        inner=config.inner,
                    )
                    t0 = time.perf_counter()
                    fit = multi_stage_fit(
                        inst.data, cfg, init=warm.get(("multi_stage", ratio))
                    )
                    warm[("multi_stage", ratio)] = fit.weights
                    record("multi_stage", len(fit.stage_traces), lam, ratio,
                           _final_error(fit, truth), (time.perf_counter() - t0) * 1e3)
        for algo, (err, lam, ratio) in best.items():
            min_rows.append(
                ResultRow("synth-lambda", seed, algo, 0, lam, ratio,
                          "error_l21_min", err, 0.0)
            )
    # stage counts differ per seed (early stop), so aggregates drop them
    agg_source = [
        ResultRow(r.experiment, r.seed, r.algorithm, 0, r.lam, r.theta_or_ratio,
                  r.metric, r.value, 0.0)
        for r in rows
    ]
    agg = _aggregate(agg_source, ("experiment", "algorithm", "lam", "theta_or_ratio", "stage"))
    return rows + min_rows + agg


def _predict(data: TaskDataset, W):
    preds, actuals, sizes = [], [], []
    for i, (X, y) in enumerate(data.tasks):
        preds.append(X @ W[:, i])
        actuals.append(y)
        sizes.append(y.shape[0])
    return np.concatenate(preds), np.concatenate(actuals), sizes


def _subset_tasks(data: TaskDataset, index_sets) -> TaskDataset:
    return TaskDataset(
        [(X[idx], y[idx]) for (X, y), idx in zip(data.tasks, index_sets)]
    )


def _fit_one(algo, data, params, inner, stages):
    if algo == "lasso":
        return lasso_fit(data, params[0], inner)
    if algo == "l12":
        return l12_fit(data, params[0], inner)
    if algo == "dirty":
        lam_s, ratio = params
        return dirty_fit(data, lam_s, lam_s / ratio, inner)
    if algo == "multi_stage":
        lam, ratio = params
        cfg = MultiStageConfig(lam=lam, theta=ratio * lam, stages=stages, inner=inner)
        return multi_stage_fit(data, cfg)
    raise ValueError(f"unknown algorithm {algo!r}")


def _candidate_grid(algo, lams, theta_ratios, dirty_ratios):
    if algo in ("lasso", "l12"):
        return [(lam,) for lam in lams]
    if algo == "dirty":
        return [(lam, r) for lam in lams for r in dirty_ratios]
    if algo == "multi_stage":
        return [(lam, r) for lam in lams for r in theta_ratios]
    raise ValueError(f"unknown algorithm {algo!r}")


def _cv_select(algo, train: TaskDataset, candidates, inner, stages, seed, folds=3):
    """Pick the candidate minimizing mean validation nMSE over per-task folds.

    Ties break toward the larger penalty (and then the larger second
    parameter), i.e. toward the sparser model.
    """
    fold_sets = [
        kfold_indices(n_i, folds, seed * 10_007 + t)
        for t, n_i in enumerate(train.n_per_task)
    ]
    scores = []
    for params in candidates:
        fold_scores = []
        for f in range(folds):
            tr = _subset_tasks(
                train,
                [np.setdiff1d(np.arange(n_i), fs[f]) for n_i, fs in zip(train.n_per_task, fold_sets)],
            )
            va = _subset_tasks(train, [fs[f] for fs in fold_sets])
            W = _fit_one(algo, tr, params, inner, stages).weights
            p, a, sizes = _predict(va, W)
            fold_scores.append(nmse(p, a, sizes))
        scores.append((float(np.mean(fold_scores)), params))
    best_score = min(s for s, _ in scores)
    tied = [params for s, params in scores if s == best_score]
    return max(tied)  # lexicographically largest = largest penalty


def run_real_data_cv(config: ExperimentConfig):
    """Split / tune-by-CV / refit / score protocol on CSV data.

    For every training ratio and seed the data are split per task, each
    algorithm's parameters are tuned by 3-fold cross validation on the
    training part (minimum mean validation nMSE), the model is refit on
    the full training part and scored on the held-out part with nMSE and
    aMSE.  Aggregate rows carry mean and standard deviation per (ratio,
    algorithm, metric) over the seed list.
    """
    if config.csv_path is None:
        raise ValueError("real-cv needs a csv path")
    data = load_csv(config.csv_path)
    d, m = data.d, data.m
    rows = []
    for ratio in config.train_ratios:
        experiment = f"real-cv[train={ratio:g}]"
        for seed in config.seeds:
            train, test = split_train_test(data, ratio, seed)
            n_ref = min(train.n_per_task)
            lams = sorted(lambda_grid(config.alphas, d, m, n_ref), reverse=True)
            theta_ratios = [mult * m for mult in config.theta_ratio_multipliers]
            for algo in config.algorithms:
                candidates = _candidate_grid(algo, lams, theta_ratios, config.dirty_ratios)
                t0 = time.perf_counter()
                params = _cv_select(algo, train, candidates, config.inner,
                                    config.stages, seed)
                fit = _fit_one(algo, train, params, config.inner, config.stages)
                wall = (time.perf_counter() - t0) * 1e3
                p, a, sizes = _predict(test, fit.weights)
                lam = params[0]
                second = params[1] if len(params) > 1 else None
                stage = len(fit.stage_traces)
                rows.append(ResultRow(experiment, seed, algo, stage, lam, second,
                                      "nmse", nmse(p, a, sizes), wall))
                rows.append(ResultRow(experiment, seed, algo, stage, lam, second,
                                      "amse", amse(p, a, sizes), wall))
    agg_source = [
        ResultRow(r.experiment, r.seed, r.algorithm, 0, 0.0, None, r.metric,
                  r.value, 0.0)
        for r in rows
    ]
    rows += _aggregate(agg_source, ("experiment", "algorithm", "stage", "lam", "theta_or_ratio"))
    return rows


def _format_float(x: float) -> str:
    return f"{float(x):.17g}"


def _sort_key(r: ResultRow):
    return (
        r.experiment,
        r.seed,
        r.algorithm,
        r.stage,
        r.lam,
        r.theta_or_ratio is not None,
        r.theta_or_ratio if r.theta_or_ratio is not None else 0.0,
        r.metric,
    )


HEADER = "experiment,seed,algorithm,stage,lambda,theta_or_ratio,metric,value,wall_ms"


def emit_results(rows, path) -> str:
    """Write rows as CSV with a fixed header, sorted order and 17-digit floats.

    Rerunning the same configuration reproduces the file byte for byte
    apart from the wall_ms column.
    """
    lines = [HEADER]
    for r in sorted(rows, key=_sort_key):
        ratio = "" if r.theta_or_ratio is None else _format_float(r.theta_or_ratio)
        lines.append(
            ",".join(
                [
                    r.experiment,
                    str(int(r.seed)),
                    r.algorithm,
                    str(int(r.stage)),
                    _format_float(r.lam),
                    ratio,
                    r.metric,
                    _format_float(r.value),
                    f"{r.wall_ms:.3f}",
                ]
            )
        )
    text = "\n".join(lines) + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return str(path)

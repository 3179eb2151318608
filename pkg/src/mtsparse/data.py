"""Synthetic instance generation, CSV ingestion and splitting utilities.

Synthetic instances follow the row-sparse multi-task protocol: Gaussian
designs with unit-normalized columns, a true weight matrix with a fixed
fraction of zero rows plus extra zeros scattered inside the surviving
rows, and Gaussian noise on the responses.

Randomness comes from numpy's default generator (PCG64) seeded with the
spec seed and consumed in a fixed documented order, so instances are
bit-reproducible across runs and platforms.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .model import TaskDataset

__all__ = [
    "SyntheticSpec",
    "SyntheticInstance",
    "generate_synthetic",
    "load_csv",
    "split_train_test",
    "kfold_indices",
]


def _round_half_up(x: float) -> int:
    # round() would use banker's rounding; half-up keeps counts portable
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape and distribution parameters of a synthetic instance."""

    m: int
    n: int
    d: int
    sigma: float
    zero_row_fraction: float = 0.9
    within_row_zero_fraction: float = 0.8
    coef_low: float = -10.0
    coef_high: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if min(self.m, self.n, self.d) < 1:
            raise ValueError("m, n and d must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        for name in ("zero_row_fraction", "within_row_zero_fraction"):
            frac = getattr(self, name)
            if not 0.0 <= frac <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not self.coef_low < self.coef_high:
            raise ValueError("coef_low must be below coef_high")


@dataclass(frozen=True)
class SyntheticInstance:
    data: TaskDataset
    true_weights: np.ndarray
    noise: tuple
    spec: SyntheticSpec


def generate_synthetic(spec: SyntheticSpec) -> SyntheticInstance:
    """Draw a synthetic instance; fully deterministic given spec.seed.

    Stream order: task designs (standard normal entries, columns scaled
    to unit length) in task order, then the dense coefficient draw, then
    the zero-row choice, then the within-row zero choice, then per-task
    noise.  Exactly round(zero_row_fraction * d) rows are zeroed; among
    the entries of the surviving rows, round(within_row_zero_fraction *
    count) uniformly chosen entries are zeroed on top.
    """
    rng = np.random.default_rng(spec.seed)
    designs = []
    for _ in range(spec.m):
        X = rng.standard_normal((spec.n, spec.d))
        X /= np.linalg.norm(X, axis=0)
        designs.append(X)

    W = rng.uniform(spec.coef_low, spec.coef_high, size=(spec.d, spec.m))
    n_zero_rows = _round_half_up(spec.zero_row_fraction * spec.d)
    zero_rows = rng.choice(spec.d, size=n_zero_rows, replace=False)
    W[zero_rows, :] = 0.0
    keep_rows = np.setdiff1d(np.arange(spec.d), zero_rows)
    pool = keep_rows.shape[0] * spec.m
    if pool:
        n_kill = _round_half_up(spec.within_row_zero_fraction * pool)
        kill = rng.choice(pool, size=n_kill, replace=False)
        flat = W[keep_rows, :].ravel()
        flat[kill] = 0.0
        W[keep_rows, :] = flat.reshape(keep_rows.shape[0], spec.m)

    noises = []
    tasks = []
    for i in range(spec.m):
        delta = spec.sigma * rng.standard_normal(spec.n) if spec.sigma > 0 else np.zeros(spec.n)
        y = designs[i] @ W[:, i] + delta
        noises.append(delta)
        tasks.append((designs[i], y))
    W.setflags(write=False)
    return SyntheticInstance(
        data=TaskDataset(tasks),
        true_weights=W,
        noise=tuple(noises),
        spec=spec,
    )


def load_csv(path) -> TaskDataset:
    """Read long-format regression data: header ``task,y,x1,...,xd``.

    One row per sample; the task column is an opaque label and samples
    keep their file order within each task.  Any malformed content
    raises ValueError naming the offending line (1-based, header is
    line 1).
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("line 1: empty file, expected header task,y,x1,...") from None
        header = [h.strip() for h in header]
        if len(header) < 3 or header[0] != "task" or header[1] != "y":
            raise ValueError("line 1: expected header task,y,x1,...,xd")
        d = len(header) - 2
        expected = [f"x{k}" for k in range(1, d + 1)]
        if header[2:] != expected:
            raise ValueError(f"line 1: feature columns must be named {','.join(expected)}")
        groups: dict[str, list] = {}
        for lineno, row in enumerate(reader, start=2):
            if len(row) != d + 2:
                raise ValueError(f"line {lineno}: expected {d + 2} fields, got {len(row)}")
            label = row[0].strip()
            values = []
            for cell in row[1:]:
                try:
                    val = float(cell)
                except ValueError:
                    raise ValueError(f"line {lineno}: non-numeric value {cell!r}") from None
                if not math.isfinite(val):
                    raise ValueError(f"line {lineno}: non-finite value {cell!r}")
                values.append(val)
            groups.setdefault(label, []).append(values)
    if not groups:
        raise ValueError("no data rows after the header")
    tasks = []
    for label, rows in groups.items():
        arr = np.asarray(rows, dtype=float)
        tasks.append((arr[:, 1:], arr[:, 0]))
    return TaskDataset(tasks)


def split_train_test(data: TaskDataset, train_ratio: float, seed: int):
    """Per-task random split with train size max(1, round(ratio * n_i)).

    Sample order inside each part follows the original task order.
    Deterministic given the seed; every task must have at least two
    samples.
    """
    if not 0.0 < train_ratio < 1.0:
        raise ValueError("train_ratio must lie strictly between 0 and 1")
    for i, n_i in enumerate(data.n_per_task):
        if n_i < 2:
            raise ValueError(f"task {i} has fewer than 2 samples")
    rng = np.random.default_rng(seed)
    train_tasks, test_tasks = [], []
    for X, y in data.tasks:
        n_i = y.shape[0]
        perm = rng.permutation(n_i)
        n_train = max(1, _round_half_up(train_ratio * n_i))
        tr = np.sort(perm[:n_train])
        te = np.sort(perm[n_train:])
        train_tasks.append((X[tr], y[tr]))
        test_tasks.append((X[te], y[te]))
    return TaskDataset(train_tasks), TaskDataset(test_tasks)


def kfold_indices(n: int, k: int, seed: int):
    """Shuffle 0..n-1 and cut into k folds whose sizes differ by at most one."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if n < k:
        raise ValueError(f"cannot make {k} folds from {n} samples")
    perm = np.random.default_rng(seed).permutation(n)
    sizes = [n // k + (1 if f < n % k else 0) for f in range(k)]
    folds = []
    start = 0
    for s in sizes:
        folds.append(np.sort(perm[start : start + s]))
        start += s
    return folds

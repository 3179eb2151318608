"""Theory-side diagnostics: sparse eigenvalues and estimation-error bounds.

``sparse_eigenvalues`` computes, per task, the extreme eigenvalues of
k-column Gram submatrices (X_i)_S^T (X_i)_S / n_i over every support of
size at most k, by exact enumeration.  The quantity is NP-hard in
general; a hard cap on the number of enumerated supports keeps usage at
desk scale.

``error_bound_report`` evaluates the sufficient conditions and the
per-stage estimation-error bound of the staged algorithm against a known
true weight matrix:

    row signal     every nonzero row j satisfies ||w^j||_1 >= 2 theta
    eigenvalue     rho+_i(s) / rho-_i(2r+2s) <= 1 + s/(2r)  for every task
    lambda level   lam >= 12 sigma sqrt(2 rho+_max(1) ln(2dm/eta) / n)
    theta level    theta >= 11 m lam / rho-_min(2r+s)

with r the number of nonzero rows of the truth and s >= r a slack
integer.  When these hold, with probability at least 1 - eta the
column-wise l2,1 estimation error after stage L is at most

    0.8^(L/2) * 9.1 m lam sqrt(r) / rho-_min(2r+s)
      + 39.5 m sigma sqrt(rho+_max(r) (7.4 r + 2.7 ln(2/eta)) / n)
        / rho-_min(2r+s).

The analysis assumes equal task sample sizes; when they differ the
report conservatively uses the smallest one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import TaskDataset, _check_weight_shape

__all__ = [
    "SparseEigenResult",
    "BoundReport",
    "sparse_eigenvalues",
    "sparse_eigenvalue_profile",
    "residual_correlation",
    "residual_correlation_bound",
    "error_bound_report",
]

DEFAULT_SUPPORT_CAP = 1_000_000
_EIG_CHUNK = 20_000


@dataclass(frozen=True)
class SparseEigenResult:
    k: int
    rho_plus_per_task: tuple
    rho_minus_per_task: tuple
    rho_plus_max: float
    rho_minus_min: float


def _enumeration_size(d: int, k: int) -> int:
    return sum(math.comb(d, j) for j in range(1, k + 1))


def _task_profile(X: np.ndarray, n: int, k_max: int):
    """rho+ / rho- of one task for every k in 1..k_max (at-most-k supports)."""
    d = X.shape[1]
    gram = (X.T @ X) / n
    rho_plus = np.empty(k_max)
    rho_minus = np.empty(k_max)
    best_max = -np.inf
    best_min = np.inf
    for size in range(1, k_max + 1):
        if size == 1:
            diag = np.diag(gram)
            best_max = max(best_max, float(diag.max()))
            best_min = min(best_min, float(diag.min()))
        else:
            combos = itertools.combinations(range(d), size)
            while True:
                chunk = np.array(list(itertools.islice(combos, _EIG_CHUNK)), dtype=int)
                if chunk.size == 0:
                    break
                subs = gram[chunk[:, :, None], chunk[:, None, :]]
                ev = np.linalg.eigvalsh(subs)
                best_max = max(best_max, float(ev[:, -1].max()))
                best_min = min(best_min, float(ev[:, 0].min()))
        rho_plus[size - 1] = best_max
        rho_minus[size - 1] = max(best_min, 0.0)  # Gram matrices are PSD; clip roundoff
    return rho_plus, rho_minus


def sparse_eigenvalue_profile(data: TaskDataset, k_max: int,
                              support_cap: int = DEFAULT_SUPPORT_CAP):
    """Per-task rho+ / rho- arrays for all k in 1..k_max.

    Returns two (m, k_max) arrays.  Refuses when the enumeration would
    exceed ``support_cap`` supports.
    """
    if not 1 <= k_max <= data.d:
        raise ValueError(f"k must lie in [1, {data.d}], got {k_max}")
    count = _enumeration_size(data.d, k_max)
    if count > support_cap:
        raise ValueError(
            f"support enumeration needs {count} sets, above the cap of {support_cap}"
        )
    plus = np.empty((data.m, k_max))
    minus = np.empty((data.m, k_max))
    for i, (X, y) in enumerate(data.tasks):
        plus[i], minus[i] = _task_profile(X, y.shape[0], k_max)
    return plus, minus


def sparse_eigenvalues(data: TaskDataset, k: int,
                       support_cap: int = DEFAULT_SUPPORT_CAP) -> SparseEigenResult:
    """Exact extreme sparse eigenvalues at sparsity level k."""
    plus, minus = sparse_eigenvalue_profile(data, k, support_cap)
    return SparseEigenResult(
        k=k,
        rho_plus_per_task=tuple(plus[:, k - 1]),
        rho_minus_per_task=tuple(minus[:, k - 1]),
        rho_plus_max=float(plus[:, k - 1].max()),
        rho_minus_min=float(minus[:, k - 1].min()),
    )


def residual_correlation(data: TaskDataset, W_ref) -> np.ndarray:
    """Column i is (1/n_i) X_i^T (X_i w_i - y_i), the design-noise correlation."""
    W_ref = _check_weight_shape(data, W_ref)
    out = np.empty((data.d, data.m))
    for i, (X, y) in enumerate(data.tasks):
        out[:, i] = (X.T @ (X @ W_ref[:, i] - y)) / y.shape[0]
    return out


def residual_correlation_bound(data: TaskDataset, sigma: float, eta: float) -> float:
    """High-probability sup-norm bound sigma sqrt(2 rho+_max(1) ln(2dm/eta) / n)."""
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    n = min(data.n_per_task)
    rho1 = max(
        float((np.linalg.norm(X, axis=0) ** 2).max() / y.shape[0]) for X, y in data.tasks
    )
    return sigma * math.sqrt(2.0 * rho1 * math.log(2 * data.d * data.m / eta) / n)


@dataclass(frozen=True)
class BoundReport:
    lambda_min: float
    theta_min: float
    row_norm_condition_met: bool
    eigenvalue_condition_met: bool
    lambda_condition_met: bool
    theta_condition_met: bool
    bound_per_stage: tuple
    r_bar: int
    s: int
    eta: float
    sigma: float
    u: float

    @property
    def conditions_met(self) -> bool:
        return (
            self.row_norm_condition_met
            and self.eigenvalue_condition_met
            and self.lambda_condition_met
            and self.theta_condition_met
        )


def error_bound_report(data: TaskDataset, true_weights, sigma: float, eta: float,
                       s: int, lam: float, theta: float, stages: int = 10,
                       support_cap: int = DEFAULT_SUPPORT_CAP) -> BoundReport:
    """Evaluate the guarantee conditions and the per-stage error bound.

    ``true_weights`` is the known d x m truth, sigma the noise scale,
    eta the failure probability, s >= r_bar the sparsity slack, and
    (lam, theta) the penalty parameters under test.  All sparse
    eigenvalues come from exact enumeration, so this is only feasible at
    desk scale (see ``support_cap``).
    """
    W_bar = _check_weight_shape(data, true_weights)
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if not (lam > 0 and theta > 0):
        raise ValueError("lam and theta must be positive")
    if stages < 1:
        raise ValueError("stages must be at least 1")
    d, m = data.d, data.m
    n = min(data.n_per_task)
    row_l1 = np.abs(W_bar).sum(axis=1)
    nonzero_rows = row_l1 > 0
    r_bar = int(nonzero_rows.sum())
    if r_bar == 0:
        raise ValueError("true weight matrix has no nonzero rows")
    if s < r_bar:
        raise ValueError(f"s must be at least the number of nonzero rows ({r_bar})")

    k_hi = min(2 * r_bar + 2 * s, d)
    k_mid = min(2 * r_bar + s, d)
    k_prof = max(k_hi, s, r_bar)
    plus, minus = sparse_eigenvalue_profile(data, k_prof, support_cap)

    rho_plus_max_1 = float(plus[:, 0].max())
    rho_plus_max_r = float(plus[:, r_bar - 1].max())
    rho_minus_min_mid = float(minus[:, k_mid - 1].min())

    lambda_min = 12.0 * sigma * math.sqrt(2.0 * rho_plus_max_1 * math.log(2 * d * m / eta) / n)
    theta_min = (11.0 * m * lam / rho_minus_min_mid) if rho_minus_min_mid > 0 else math.inf

    row_norm_ok = bool(np.all(row_l1[nonzero_rows] >= 2.0 * theta))
    eig_ok = True
    limit = 1.0 + s / (2.0 * r_bar)
    for i in range(m):
        denom = minus[i, k_hi - 1]
        if denom <= 0 or plus[i, s - 1] / denom > limit:
            eig_ok = False
            break
    lambda_ok = lam >= lambda_min
    theta_ok = theta >= theta_min

    u = m * sigma**2 * rho_plus_max_r * (7.4 * r_bar + 2.7 * math.log(2.0 / eta)) / n
    if rho_minus_min_mid > 0:
        shrink_base = 9.1 * m * lam * math.sqrt(r_bar) / rho_minus_min_mid
        noise_term = 39.5 * math.sqrt(m * u) / rho_minus_min_mid
        bound = tuple(
            0.8 ** (0.5 * ell) * shrink_base + noise_term for ell in range(1, stages + 1)
        )
    else:
        bound = tuple(math.inf for _ in range(stages))

    return BoundReport(
        lambda_min=lambda_min,
        theta_min=theta_min,
        row_norm_condition_met=row_norm_ok,
        eigenvalue_condition_met=eig_ok,
        lambda_condition_met=lambda_ok,
        theta_condition_met=theta_ok,
        bound_per_stage=bound,
        r_bar=r_bar,
        s=s,
        eta=eta,
        sigma=sigma,
        u=u,
    )

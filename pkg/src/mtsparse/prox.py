"""Proximal operators for the penalties used by the solvers.

Each operator solves min_x 0.5 ||x - v||^2 + t * penalty(x) exactly.
t = 0 (or a zero weight) reduces every operator to the identity, which
lets zeroed per-feature weights flow through a single code path.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "soft_threshold",
    "weighted_l1_prox",
    "row_group_l2_prox",
    "project_l1_ball",
    "linf_prox_row",
    "dirty_prox",
]


def soft_threshold(v, t):
    """sign(v) * max(|v| - t, 0); works elementwise on arrays."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be nonnegative")
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def weighted_l1_prox(V, per_feature, t):
    """Prox of t * sum_{j,i} lam_j |v_{ji}| with one weight per row (feature).

    Entry (j, i) is soft-thresholded at t * lam_j; rows with weight zero
    pass through unchanged.
    """
    V = np.asarray(V, dtype=float)
    w = np.asarray(per_feature, dtype=float).ravel()
    if w.shape[0] != V.shape[0]:
        raise ValueError(f"weight vector length {w.shape[0]} does not match {V.shape[0]} rows")
    if np.any(w < 0):
        raise ValueError("per-feature weights must be nonnegative")
    if t < 0:
        raise ValueError("step scale must be nonnegative")
    thresh = (t * w)[:, None] if V.ndim == 2 else t * w
    return np.sign(V) * np.maximum(np.abs(V) - thresh, 0.0)


def row_group_l2_prox(V, tl):
    """Prox of tl * sum_j ||v^j||_2: each row is shrunk toward zero as a block."""
    if tl < 0:
        raise ValueError("tl must be nonnegative")
    V = np.asarray(V, dtype=float)
    if tl == 0.0:
        return V.copy()
    norms = np.linalg.norm(V, axis=1)
    scale = np.zeros_like(norms)
    nz = norms > 0
    scale[nz] = np.maximum(0.0, 1.0 - tl / norms[nz])
    return V * scale[:, None]


def _project_rows_l1_ball(V: np.ndarray, radius: float) -> np.ndarray:
    """Row-wise Euclidean projection onto {x : ||x||_1 <= radius}.

    Sort-based threshold search; rows already inside the ball are
    returned unchanged.
    """
    A = np.abs(V)
    out = V.copy()
    over = A.sum(axis=1) > radius
    if not np.any(over):
        return out
    U = np.sort(A[over], axis=1)[:, ::-1]
    css = np.cumsum(U, axis=1)
    k = np.arange(1, U.shape[1] + 1)
    positive = U - (css - radius) / k > 0
    # last index where the shifted sequence stays positive
    rho = positive.shape[1] - 1 - np.argmax(positive[:, ::-1], axis=1)
    tau = (css[np.arange(rho.shape[0]), rho] - radius) / (rho + 1)
    out[over] = np.sign(V[over]) * np.maximum(A[over] - tau[:, None], 0.0)
    return out


def project_l1_ball(v, radius):
    """Euclidean projection of a vector onto the l1 ball of the given radius."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    v = np.asarray(v, dtype=float).ravel()
    return _project_rows_l1_ball(v[None, :], radius)[0]


def linf_prox_row(v, t):
    """Prox of t * max_k |v_k| via Moreau decomposition.

    Equals v minus the projection of v onto the l1 ball of radius t; when
    ||v||_1 <= t the result is the zero vector.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    v = np.asarray(v, dtype=float).ravel()
    if t == 0.0:
        return v.copy()
    if np.abs(v).sum() <= t:
        return np.zeros_like(v)
    return v - project_l1_ball(v, t)


def dirty_prox(S, B, lam_s, lam_b, t):
    """Joint prox for the dirty penalty; the two blocks are independent.

    S is soft-thresholded entrywise at t*lam_s and each row of B goes
    through the max-norm prox at t*lam_b.
    """
    S = np.asarray(S, dtype=float)
    B = np.asarray(B, dtype=float)
    if S.shape != B.shape:
        raise ValueError(f"shape mismatch between blocks: {S.shape} vs {B.shape}")
    if not (lam_s > 0 and lam_b > 0):
        raise ValueError("lam_s and lam_b must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    S_new = soft_threshold(S, t * lam_s)
    if t == 0.0:
        return S_new, B.copy()
    # v - proj(v) is zero exactly when the row is inside the ball
    B_new = B - _project_rows_l1_ball(B, t * lam_b)
    return S_new, B_new

"""Accelerated proximal gradient solver for composite objectives.

Minimizes smooth(x) + penalty(x) given a gradient oracle for the smooth
part and a prox oracle for the penalty.  The momentum schedule is the
classic t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2, combined with

  * backtracking on the step size (sufficient-decrease test on the
    smooth part, step halved until it holds), and
  * a function-value restart: whenever the composite objective would
    increase, momentum is reset and a plain forward-backward step is
    taken from the last accepted iterate.  With backtracking active that
    step cannot increase the objective, so the recorded objective trace
    is non-increasing up to roundoff.

Iteration stops when the relative iterate change
||x_{k+1} - x_k||_F / max(1, ||x_k||_F) drops below the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError

__all__ = ["SolverConfig", "SolveResult", "fista_solve"]


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 10_000
    rel_tolerance: float = 1e-8
    step_size: float | None = None  # None: start at 1.0 and let backtracking adapt
    backtracking: bool = True
    backtracking_factor: float = 0.5

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.rel_tolerance > 0:
            raise ValueError("rel_tolerance must be positive")
        if self.step_size is not None and not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if not 0.0 < self.backtracking_factor < 1.0:
            raise ValueError("backtracking_factor must lie in (0, 1)")


@dataclass
class SolveResult:
    solution: np.ndarray
    iterations: int
    final_objective: float
    converged: bool
    objective_trace: list = field(repr=False, default_factory=list)


def fista_solve(grad, smooth_value, prox, penalty_value, init, config: SolverConfig | None = None) -> SolveResult:
    """Run the accelerated proximal gradient loop from ``init``.

    grad and smooth_value describe the differentiable part, prox(v, t)
    and penalty_value the nonsmooth part.  Raises NumericalError if the
    composite objective ever becomes non-finite.
    """
    cfg = config if config is not None else SolverConfig()
    x = np.array(init, dtype=float)
    step = cfg.step_size if cfg.step_size is not None else 1.0

    def forward_backward(base, f_base, g, step):
        while True:
            x_new = prox(base - step * g, step)
            f_new = float(smooth_value(x_new))
            if not cfg.backtracking:
                return x_new, f_new, step
            diff = x_new - base
            quad = f_base + float(np.vdot(g, diff)) + float(np.vdot(diff, diff)) / (2.0 * step)
            if f_new <= quad + 1e-12 * max(1.0, abs(f_new)):
                return x_new, f_new, step
            step *= cfg.backtracking_factor
            if step < 1e-300:
                raise NumericalError("backtracking reduced the step size to zero")

    F_x = float(smooth_value(x)) + float(penalty_value(x))
    if not math.isfinite(F_x):
        raise NumericalError(f"objective is not finite at the initial point ({F_x})")
    trace = [F_x]
    y = x.copy()
    t = 1.0
    converged = False
    iterations = 0

    for k in range(1, cfg.max_iterations + 1):
        iterations = k
        g = grad(y)
        f_y = float(smooth_value(y))
        x_new, f_new, step = forward_backward(y, f_y, g, step)
        F_new = f_new + float(penalty_value(x_new))
        if not math.isfinite(F_new):
            raise NumericalError(
                f"objective became non-finite at iteration {k} "
                f"(value {F_new}, step {step:.3e})"
            )
        if F_new > F_x:
            # restart: drop momentum and step from the last accepted iterate
            t = 1.0
            g = grad(x)
            f_c = float(smooth_value(x))
            x_new, f_new, step = forward_backward(x, f_c, g, step)
            F_new = f_new + float(penalty_value(x_new))
            if not math.isfinite(F_new):
                raise NumericalError(
                    f"objective became non-finite after restart at iteration {k}"
                )
        t_next = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
        y = x_new + ((t - 1.0) / t_next) * (x_new - x)
        delta = float(np.linalg.norm(x_new - x)) / max(1.0, float(np.linalg.norm(x)))
        x = x_new
        t = t_next
        F_x = F_new
        trace.append(F_new)
        if delta < cfg.rel_tolerance:
            converged = True
            break

    return SolveResult(
        solution=x,
        iterations=iterations,
        final_objective=F_x,
        converged=converged,
        objective_trace=trace,
    )

"""Euler-predictor / Newton-corrector path tracking for H(x, t) = 0, t increasing."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass
class TrackerConfig:
    initial_step: float = 0.01
    min_step: float = 1e-8
    max_step: float = 0.1
    corrector_tol: float = 1e-10
    max_newton_iters: int = 20
    endpoint_t: float = 1 - 1e-8
    payoff_perturbation_scale: float = 1e-6
    rng_seed: int = 0
    max_steps: int = 20_000

    def __post_init__(self):
        if not 0 < self.min_step <= self.initial_step <= self.max_step < 1:
            raise ValueError("need 0 < min_step <= initial_step <= max_step < 1")


@dataclass
class PathPoint:
    t: float
    x: np.ndarray
    step: float
    residual: float


@dataclass
class TrackedPath:
    points: list[PathPoint] = field(default_factory=list)
    status: str = "running"       # converged | diverged | truncated | failed
    rejected: int = 0
    message: str = ""

    @property
    def accepted(self) -> int:
        return max(len(self.points) - 1, 0)

    @property
    def end(self) -> PathPoint:
        return self.points[-1]


class Homotopy:
    """H(x, t), dH/dx and dH/dt supplied as callables."""

    def __init__(self, value: Callable, jac_x: Callable, jac_t: Callable):
        self.value = value
        self.jac_x = jac_x
        self.jac_t = jac_t


def _solve(a, b):
    try:
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(a, b, rcond=None)[0]


def newton(H: Homotopy, x, t, tol, max_iters, contraction=True):
    """Newton at fixed t; returns (x, residual, iterations, ok).

    Converged when the residual is below tol or the update is below
    tol relative to |x| (large |x| makes absolute residuals meaningless).
    """
    prev = None
    r = H.value(x, t)
    res = float(np.linalg.norm(r, np.inf))
    for it in range(1, max_iters + 1):
        if res <= tol:
            return x, res, it - 1, True
        jac = H.jac_x(x, t)
        dx = _solve(jac, -r)
        size = float(np.linalg.norm(dx, np.inf))
        if not np.isfinite(size):
            return x, res, it, False
        # a rank-deficient Jacobian can yield a step that leaves r unexplained
        if float(np.linalg.norm(jac @ dx + r, np.inf)) > 0.5 * res:
            return x, res, it, False
        if contraction and prev is not None and size > 0.5 * prev:
            return x, res, it, False
        prev = size
        x = x + dx
        r = H.value(x, t)
        res = float(np.linalg.norm(r, np.inf))
        if size <= tol * (1 + float(np.linalg.norm(x, np.inf))):
            return x, res, it, True
    return x, res, max_iters, res <= tol


def track(H: Homotopy, x0, cfg: TrackerConfig, t_end: float,
          admissible: Callable[[np.ndarray, float], bool] | None = None,
          diverged: Callable[[np.ndarray], bool] | None = None,
          on_accept: Callable[[PathPoint], None] | None = None) -> TrackedPath:
    """Follow the solution curve of H from (x0, 0) to t_end with adaptive steps."""
    x = np.array(x0)
    t = 0.0
    h = cfg.initial_step
    res0 = float(np.linalg.norm(H.value(x, t), np.inf))
    path = TrackedPath([PathPoint(t, x.copy(), h, res0)])
    steps = 0
    while t < t_end:
        steps += 1
        if steps > cfg.max_steps:
            path.status, path.message = "truncated", "step budget exhausted"
            return path
        h = min(h, t_end - t)
        ok = False
        try:
            dx = _solve(H.jac_x(x, t), -H.jac_t(x, t))
            pred = x + h * dx
            if np.all(np.isfinite(pred)) and (admissible is None or admissible(pred, t + h)):
                xn, res, iters, ok = newton(H, pred, t + h, cfg.corrector_tol, cfg.max_newton_iters)
                if ok and admissible is not None and not admissible(xn, t + h):
                    ok = False
        except (FloatingPointError, np.linalg.LinAlgError):
            ok = False
        if ok:
            t = t + h if t + h < t_end else t_end
            x = xn
            pt = PathPoint(t, x.copy(), h, res)
            path.points.append(pt)
            if on_accept:
                on_accept(pt)
            if diverged is not None and diverged(x):
                path.status = "diverged"
                return path
            if iters <= 2:
                h = min(2 * h, cfg.max_step)
        else:
            path.rejected += 1
            h /= 2
            if h < cfg.min_step:
                path.status, path.message = "failed", f"step underflow at t={t:.12g}"
                return path
    path.status = "converged"
    return path

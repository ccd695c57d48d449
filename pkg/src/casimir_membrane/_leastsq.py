"""Damped Gauss-Newton (Levenberg-Marquardt) refinement for the small
nonlinear fits in the analysis chain. Kept dependency-free on purpose: the
fits need analytic Jacobians, a strict relative-step stopping rule and a full
iteration trace on failure, which is easier to guarantee in forty lines than
to coax out of a general-purpose optimizer."""
from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = ["levenberg_marquardt"]

_LAMBDA_INIT = 1e-3
_LAMBDA_GROW = 10.0
_LAMBDA_SHRINK = 0.3
_LAMBDA_MAX = 1e14


def levenberg_marquardt(
    residual_fn,
    jacobian_fn,
    p0,
    *,
    x_scale=None,
    rtol: float = 1e-10,
    max_iter: int = 200,
):
    """Minimize 0.5 ||r(p)||^2 from p0.

    residual_fn(p) -> (n,) residuals, jacobian_fn(p) -> (n, m) with entries
    d r_i / d p_j. The iteration stops when every component of the accepted
    step satisfies |step_j| < rtol * max(|p_j|, x_scale_j); x_scale guards the
    relative test for parameters whose true value is near zero.

    Returns (p, info) with info holding n_iter, cost and the iteration trace.
    Raises ConvergenceError (trace attached) when the iteration cap or the
    damping limit is exhausted. A residual_fn may raise DomainError to veto a
    trial point; the step is then rejected and damping increased.
    """
    p = np.array(p0, dtype=float)
    n_par = p.size
    scale = np.ones(n_par) if x_scale is None else np.asarray(x_scale, dtype=float)
    if scale.shape != p.shape or np.any(scale <= 0):
        raise DomainError("x_scale must be positive and match p0 in shape")

    r = np.asarray(residual_fn(p), dtype=float)
    if not np.all(np.isfinite(r)):
        raise DomainError("residuals at the starting point are not finite")
    cost = 0.5 * float(r @ r)
    lam = _LAMBDA_INIT
    trace: list[tuple[int, np.ndarray, float]] = [(0, p.copy(), cost)]

    for it in range(1, max_iter + 1):
        jac = np.asarray(jacobian_fn(p), dtype=float)
        grad = jac.T @ r
        if cost == 0.0 or np.max(np.abs(grad)) == 0.0:
            return p, {"n_iter": it - 1, "cost": cost, "trace": trace}
        hess = jac.T @ jac
        diag = np.maximum(np.diag(hess), np.finfo(float).tiny)

        step = None
        r_new = None
        cost_new = None
        while lam <= _LAMBDA_MAX:
            try:
                trial_step = np.linalg.solve(hess + lam * np.diag(diag), grad)
            except np.linalg.LinAlgError:
                lam *= _LAMBDA_GROW
                continue
            p_trial = p - trial_step
            try:
                r_trial = np.asarray(residual_fn(p_trial), dtype=float)
            except DomainError:
                lam *= _LAMBDA_GROW
                continue
            if not np.all(np.isfinite(r_trial)):
                lam *= _LAMBDA_GROW
                continue
            cost_trial = 0.5 * float(r_trial @ r_trial)
            if cost_trial <= cost:
                step, r_new, cost_new = trial_step, r_trial, cost_trial
                break
            lam *= _LAMBDA_GROW
        if step is None:
            raise ConvergenceError(
                f"damping exhausted after {it - 1} accepted steps", trace=trace
            )

        cost_prev = cost
        p = p - step
        r, cost = r_new, cost_new
        lam = max(lam * _LAMBDA_SHRINK, 1e-14)
        trace.append((it, p.copy(), cost))
        if np.all(np.abs(step) < rtol * np.maximum(np.abs(p), scale)):
            return p, {"n_iter": it, "cost": cost, "trace": trace}
        # stationary plateau: residuals are at their floating-point floor and
        # accepted steps no longer buy any cost reduction
        if it > 1 and cost_prev - cost <= 1e-13 * cost_prev:
            return p, {"n_iter": it, "cost": cost, "trace": trace}

    raise ConvergenceError(f"no convergence in {max_iter} iterations", trace=trace)

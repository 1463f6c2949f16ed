"""Trust-region Levenberg-Marquardt for small dense least-squares problems.

Minimizes ``0.5 * ||r(x)||^2``.  Each iteration solves the trust-region
subproblem ``min ||r + J p||`` subject to ``||p|| <= radius`` exactly through
an SVD of ``J`` and a scalar root-find for the Levenberg-Marquardt parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq


@dataclass
class LMResult:
    x: np.ndarray
    residual: np.ndarray
    merit: float
    iterations: int
    converged: bool
    status: str
    merit_history: list = field(default_factory=list)
    accepted: int = 0


def trust_region_step(J, r, radius, rcond=1e-13):
    """Minimizer of ``||r + J p||`` over the ball ``||p|| <= radius``.

    Returns the step and the Levenberg-Marquardt parameter (0 when the
    Gauss-Newton step is interior).
    """
    U, s, Vt = np.linalg.svd(J, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(J.shape[1]), 0.0
    beta = U.T @ r
    keep = s > rcond * s[0]
    gn = -(Vt[keep].T @ (beta[keep] / s[keep]))
    if np.linalg.norm(gn) <= radius:
        return gn, 0.0

    def step(lam):
        return -(Vt.T @ (s * beta / (s * s + lam)))

    def gap(log_lam):
        return np.linalg.norm(step(np.exp(log_lam))) - radius

    grad_norm = np.linalg.norm(s * beta)
    hi = np.log(grad_norm / radius) + 1.0
    lo = np.log(max(s[keep][-1] ** 2, 1e-300)) - 30.0
    while gap(lo) < 0 and lo > -700:
        lo -= 30.0
    if gap(lo) < 0:
        return gn * (radius / np.linalg.norm(gn)), 0.0
    lam = np.exp(brentq(gap, lo, hi, xtol=1e-12, rtol=1e-10))
    return step(lam), lam


def levenberg_marquardt(
    fun,
    jac,
    x0,
    *,
    max_iterations=100,
    merit_tolerance=1e-16,
    step_tolerance=1e-14,
    initial_radius=1.0,
    shrink=0.25,
    grow=2.0,
    accept_ratio=1e-4,
):
    """Trust-region Levenberg-Marquardt iteration.

    ``fun(x)`` returns the residual vector, ``jac(x)`` its Jacobian.  One
    iteration is one trust-region subproblem solve, accepted or not.
    """
    x = np.array(x0, dtype=float)
    r = fun(x)
    if not np.all(np.isfinite(r)):
        return LMResult(x, r, np.inf, 0, False, "non-finite residual at the initial point")
    psi = 0.5 * float(r @ r)
    history = [psi]
    radius = float(initial_radius)
    J = jac(x)
    accepted = 0
    it = 0
    status = "iteration limit reached"
    while True:
        if psi <= merit_tolerance:
            status = "merit tolerance reached"
            break
        if it >= max_iterations:
            break
        it += 1
        p, _ = trust_region_step(J, r, radius)
        pred = psi - 0.5 * float(np.sum((r + J @ p) ** 2))
        x_new = x + p
        r_new = fun(x_new)
        if not np.all(np.isfinite(r_new)):
            radius *= shrink
            if radius <= step_tolerance * (1.0 + np.linalg.norm(x)):
                status = "non-finite residual"
                break
            continue
        psi_new = 0.5 * float(r_new @ r_new)
        rho = (psi - psi_new) / pred if pred > 0 else -1.0
        step_norm = np.linalg.norm(p)
        if rho < 0.25:
            radius = shrink * step_norm
        elif rho > 0.75 and step_norm >= 0.99 * radius:
            radius *= grow
        if rho > accept_ratio:
            x, r, psi = x_new, r_new, psi_new
            J = jac(x)
            accepted += 1
            history.append(psi)
        if step_norm <= step_tolerance * (1.0 + np.linalg.norm(x)):
            status = "step tolerance reached" if psi > merit_tolerance else "merit tolerance reached"
            break
    return LMResult(
        x=x,
        residual=r,
        merit=psi,
        iterations=it,
        converged=psi <= merit_tolerance,
        status=status,
        merit_history=history,
        accepted=accepted,
    )

"""Nonmonotone friction law ``j(x) = min(gamma1 / (2 delta) x^2, gamma2 x)``.

The smoothing works on ``-j = max(g1, g2)`` with the branch functions
``g1(x) = -gamma1 / (2 delta) x^2`` and ``g2(x) = -gamma2 x``.  Inside the band
``|g2 - g1| <= eps / 2`` the max is replaced by a quadratic in ``g2 - g1``:

    S = (g2 - g1)^2 / (2 eps) + (g2 + g1) / 2 + eps / 8

which matches value and slope of ``g1`` and ``g2`` on the band boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class FrictionLaw:
    delta: float
    gamma1: float
    gamma2: float

    def __post_init__(self):
        for name in ("delta", "gamma1", "gamma2"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"friction parameter {name} must be positive")

    @property
    def crossing(self) -> float:
        """Positive point where the quadratic and linear branches meet."""
        return 2.0 * self.delta * self.gamma2 / self.gamma1

    @property
    def curvature(self) -> float:
        return self.gamma1 / self.delta

    def g1(self, x):
        return -0.5 * self.curvature * np.square(x)

    def g2(self, x):
        return -self.gamma2 * np.asarray(x, dtype=float)

    def dg1(self, x):
        return -self.curvature * np.asarray(x, dtype=float)

    def dg2(self, x):
        return np.full(np.shape(x), -self.gamma2)

    def growth_constants(self):
        """Constants ``(c3, c4)`` with ``|eta| <= c3 (1 + |xi|)`` and
        ``-eta xi <= c4 |xi|`` for every subgradient ``eta`` at ``xi``."""
        return max(2.0 * self.gamma2, self.curvature), self.gamma2

    def band_boundaries(self, eps):
        """Points where ``g2 - g1 = +-eps/2`` (the case boundaries)."""
        a, b = 0.5 * self.curvature, -self.gamma2
        out = []
        for rhs in (-0.5 * eps, 0.5 * eps):
            disc = b * b + 4 * a * rhs
            if disc >= 0:
                r = np.sqrt(disc)
                out += [(-b - r) / (2 * a), (-b + r) / (2 * a)]
        return np.unique(out)


def superpotential(x, law: FrictionLaw):
    x = np.asarray(x, dtype=float)
    return np.minimum(0.5 * law.curvature * x * x, law.gamma2 * x)


def subdifferential(x, law: FrictionLaw, band=0.0):
    """Clarke subdifferential of ``j`` as ``(lo, hi)`` arrays.

    With ``band > 0`` every branch whose value lies within ``band`` of the
    minimum counts as active, which gives the enlarged set used to compare
    the smoothed law against ``j``.
    """
    x = np.asarray(x, dtype=float)
    q = 0.5 * law.curvature * x * x
    lin = law.gamma2 * x
    dq = law.curvature * x
    dl = np.full_like(x, law.gamma2)
    m = np.minimum(q, lin)
    tol = band + 1e-15 * np.maximum(1.0, np.abs(m))
    q_act = q - m <= tol
    l_act = lin - m <= tol
    lo = np.where(q_act & l_act, np.minimum(dq, dl), np.where(q_act, dq, dl))
    hi = np.where(q_act & l_act, np.maximum(dq, dl), np.where(q_act, dq, dl))
    return lo, hi


def _cases(x, eps, law):
    d = law.g2(x) - law.g1(x)
    lower = d < -0.5 * eps
    upper = d > 0.5 * eps
    return d, lower, upper


def smooth_S(x, eps, law: FrictionLaw):
    if not eps > 0:
        raise ValueError("smoothing parameter must be positive")
    x = np.asarray(x, dtype=float)
    g1, g2 = law.g1(x), law.g2(x)
    d, lower, upper = _cases(x, eps, law)
    mid = d * d / (2 * eps) + 0.5 * (g1 + g2) + eps / 8
    return np.where(lower, g1, np.where(upper, g2, mid))


def smooth_S_prime(x, eps, law: FrictionLaw):
    if not eps > 0:
        raise ValueError("smoothing parameter must be positive")
    x = np.asarray(x, dtype=float)
    d1, d2 = law.dg1(x), law.dg2(x)
    d, lower, upper = _cases(x, eps, law)
    mid = d * (d2 - d1) / eps + 0.5 * (d1 + d2)
    return np.where(lower, d1, np.where(upper, d2, mid))


def smooth_S_second(x, eps, law: FrictionLaw):
    """Second derivative of ``S``; piecewise smooth, jumps at case boundaries."""
    if not eps > 0:
        raise ValueError("smoothing parameter must be positive")
    x = np.asarray(x, dtype=float)
    d1, d2 = law.dg1(x), law.dg2(x)
    dd1 = -law.curvature
    d, lower, upper = _cases(x, eps, law)
    mid = ((d2 - d1) ** 2 - d * dd1) / eps + 0.5 * dd1
    return np.where(lower, dd1, np.where(upper, 0.0, mid))


def _check_dims(u1, lengths):
    u1 = np.asarray(u1, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    if u1.ndim != 1 or lengths.ndim != 1 or len(u1) != len(lengths) + 1:
        raise ValueError(
            f"need one more nodal value than edges, got {np.shape(u1)} values and {np.shape(lengths)} lengths"
        )
    if np.any(lengths <= 0):
        raise ValueError("contact edges must have positive length")
    return u1, lengths


def trapezoid_weights(lengths):
    w = np.zeros(len(lengths) + 1)
    w[:-1] += 0.5 * np.asarray(lengths)
    w[1:] += 0.5 * np.asarray(lengths)
    return w


def assemble_DJ(contact_u1, edge_lengths, eps, law: FrictionLaw):
    """Nodal vector of the trapezoidal approximation of the smoothed
    boundary term, ``<DJ(u), v> = DJ @ v`` for nodal tangential values ``v``."""
    u1, lengths = _check_dims(contact_u1, edge_lengths)
    return trapezoid_weights(lengths) * smooth_S_prime(u1, eps, law)


def assemble_DJ_jacobian(contact_u1, edge_lengths, eps, law: FrictionLaw):
    u1, lengths = _check_dims(contact_u1, edge_lengths)
    return np.diag(trapezoid_weights(lengths) * smooth_S_second(u1, eps, law))

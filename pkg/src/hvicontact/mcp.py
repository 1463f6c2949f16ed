"""Mixed complementarity formulation of the condensed contact problem.

For contact values ``z`` the residual is

    F(z) = A z - b - f(z),   f_i(z) = w_i S'(z_i, eps) on friction DOFs

Free indices require ``F_i = 0``; bounded (normal) indices require
``z_i >= 0, F_i >= 0, z_i F_i = 0``.  The bounded conditions are written with
the Fischer-Burmeister function, and the resulting square system is solved by
trust-region least squares on ``0.5 * ||Phi||^2``.

Forces are divided by ``force_scale = max(1, ||b||_inf)`` and displacements by
``disp_scale = force_scale / max(diag A)`` before composing ``Phi``, so both
arguments of the Fischer-Burmeister function are of order one.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .friction import FrictionLaw, assemble_DJ, smooth_S_second, trapezoid_weights
from .lsq import levenberg_marquardt

_SQRT_HALF = np.sqrt(0.5)


def fischer_burmeister(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.hypot(a, b) - (a + b)


def fb_derivative(a, b):
    """Element of the generalized gradient, ``(sqrt(2)/2 - 1)`` twice at the origin."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    r = np.hypot(a, b)
    safe = np.where(r > 0, r, 1.0)
    da = np.where(r > 0, a / safe, _SQRT_HALF) - 1.0
    db = np.where(r > 0, b / safe, _SQRT_HALF) - 1.0
    return da, db


@dataclass(frozen=True)
class McpProblem:
    """``F(z) = matrix @ z - load - friction(z)`` with complementarity on ``bounded``.

    ``friction_nodes`` lists, for every friction DOF, its position in the
    Gamma_c node chain; ``contact_lengths`` are the chain's edge lengths.
    """

    matrix: np.ndarray
    load: np.ndarray
    bounded: np.ndarray
    friction_dofs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    friction_nodes: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    contact_lengths: np.ndarray = field(default_factory=lambda: np.zeros(0))
    law: FrictionLaw | None = None
    eps: float = 0.1

    def __post_init__(self):
        n = len(self.load)
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match load length {n}")
        if len(self.friction_dofs) and self.law is None:
            raise ValueError("friction DOFs given without a friction law")
        if len(self.friction_dofs) != len(self.friction_nodes):
            raise ValueError("friction_dofs and friction_nodes differ in length")

    @property
    def size(self) -> int:
        return len(self.load)

    @property
    def free(self) -> np.ndarray:
        mask = np.ones(self.size, dtype=bool)
        mask[self.bounded] = False
        return np.flatnonzero(mask)

    @property
    def force_scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.load), initial=0.0)))

    @property
    def disp_scale(self) -> float:
        d = float(np.max(np.abs(np.diag(self.matrix)), initial=0.0))
        return self.force_scale / d if d > 0 else 1.0

    @property
    def friction_weights(self) -> np.ndarray:
        if not len(self.friction_dofs):
            return np.zeros(0)
        return trapezoid_weights(self.contact_lengths)[self.friction_nodes]

    def friction_force(self, z) -> np.ndarray:
        """Vector ``f(z)``: the discrete ``DJ`` placed on the friction DOFs."""
        out = np.zeros(self.size)
        if len(self.friction_dofs):
            u1 = np.zeros(len(self.contact_lengths) + 1)
            u1[self.friction_nodes] = z[self.friction_dofs]
            out[self.friction_dofs] = assemble_DJ(u1, self.contact_lengths, self.eps, self.law)[
                self.friction_nodes
            ]
        return out

    def F(self, z) -> np.ndarray:
        z = self._check(z)
        return self.matrix @ z - self.load - self.friction_force(z)

    def F_jacobian(self, z) -> np.ndarray:
        z = self._check(z)
        J = self.matrix.copy()
        if len(self.friction_dofs):
            d = self.friction_weights * smooth_S_second(z[self.friction_dofs], self.eps, self.law)
            J[self.friction_dofs, self.friction_dofs] -= d
        return J

    def _check(self, z):
        z = np.asarray(z, dtype=float)
        if z.shape != (self.size,):
            raise ValueError(f"expected a vector of length {self.size}, got shape {z.shape}")
        return z

    @classmethod
    def from_reduced(cls, reduced, law, eps):
        """Problem on the condensed contact DOFs (tangential block first)."""
        p = reduced.partition
        nt = len(p.contact_tangential)
        return cls(
            matrix=reduced.schur,
            load=reduced.reduced_load,
            bounded=np.arange(nt, p.num_contact),
            friction_dofs=np.arange(nt),
            friction_nodes=p.tangential_pos,
            contact_lengths=p.edge_lengths,
            law=law,
            eps=eps,
        )

    @classmethod
    def full_space(cls, system, partition, law, eps):
        """Same problem without condensation, over all free DOFs."""
        return cls(
            matrix=system.stiffness.toarray(),
            load=system.load,
            bounded=partition.contact_normal,
            friction_dofs=partition.contact_tangential,
            friction_nodes=partition.tangential_pos,
            contact_lengths=partition.edge_lengths,
            law=law,
            eps=eps,
        )


def residual_map(z, problem: McpProblem) -> np.ndarray:
    z = problem._check(z)
    F = problem.F(z) / problem.force_scale
    phi = F.copy()
    b = problem.bounded
    phi[b] = fischer_burmeister(z[b] / problem.disp_scale, F[b])
    return phi


def residual_jacobian(z, problem: McpProblem) -> np.ndarray:
    """Generalized Jacobian of :func:`residual_map` with respect to ``z``."""
    z = problem._check(z)
    fs, us = problem.force_scale, problem.disp_scale
    F = problem.F(z) / fs
    JF = problem.F_jacobian(z) / fs
    J = JF.copy()
    b = problem.bounded
    da, db = fb_derivative(z[b] / us, F[b])
    J[b] = db[:, None] * JF[b]
    J[b, b] += da / us
    return J


def merit(z, problem: McpProblem) -> float:
    phi = residual_map(z, problem)
    return 0.5 * float(phi @ phi)


@dataclass
class SolverConfig:
    """Settings for :func:`solve_trust_region`.

    Radii and perturbations are in units of ``problem.disp_scale``.
    """

    max_iterations: int = 100
    merit_tolerance: float = 1e-16
    step_tolerance: float = 1e-14
    initial_guess: np.ndarray | None = None
    initial_radius: float = 10.0
    shrink: float = 0.25
    grow: float = 2.0
    n_starts: int = 1
    start_perturbation: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for name in ("merit_tolerance", "step_tolerance", "initial_radius", "start_perturbation"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.n_starts < 1:
            raise ValueError("n_starts must be at least 1")
        if not (0 < self.shrink < 1 < self.grow):
            raise ValueError("need 0 < shrink < 1 < grow")


@dataclass
class SolveReport:
    solution: np.ndarray
    converged: bool
    iterations: int
    merit: float
    residual_inf: float
    min_normal_displacement: float
    min_normal_force: float
    max_complementarity: float
    wall_time: float
    status: str
    merit_history: list = field(default_factory=list)
    start_merits: list = field(default_factory=list)

    def as_dict(self):
        """Fields in a fixed order, arrays as lists."""
        return {
            "converged": self.converged,
            "status": self.status,
            "iterations": self.iterations,
            "merit": self.merit,
            "residual_inf": self.residual_inf,
            "min_normal_displacement": self.min_normal_displacement,
            "min_normal_force": self.min_normal_force,
            "max_complementarity": self.max_complementarity,
            "wall_time": self.wall_time,
            "start_merits": list(self.start_merits),
            "solution": [float(v) for v in self.solution],
        }


def _report(z, problem, res, elapsed, start_merits):
    F = problem.F(z)
    b = problem.bounded
    phi = residual_map(z, problem)
    zb, Fb = z[b], F[b]
    return SolveReport(
        solution=z,
        converged=res.converged,
        iterations=res.iterations,
        merit=res.merit,
        residual_inf=float(np.max(np.abs(phi), initial=0.0)),
        min_normal_displacement=float(np.min(zb, initial=np.inf)),
        min_normal_force=float(np.min(Fb, initial=np.inf)),
        max_complementarity=float(np.max(np.abs(zb * Fb), initial=0.0)),
        wall_time=elapsed,
        status=res.status,
        merit_history=list(res.merit_history),
        start_merits=start_merits,
    )


def solve_trust_region(problem: McpProblem, config: SolverConfig | None = None) -> SolveReport:
    config = config or SolverConfig()
    t0 = time.perf_counter()
    us = problem.disp_scale

    def fun(x):
        with np.errstate(all="ignore"):
            return residual_map(us * x, problem)

    def jac(x):
        return residual_jacobian(us * x, problem) * us

    x0 = np.zeros(problem.size) if config.initial_guess is None else np.asarray(config.initial_guess) / us
    rng = np.random.default_rng(config.seed)
    starts = [x0] + [
        x0 + config.start_perturbation * rng.standard_normal(problem.size) for _ in range(config.n_starts - 1)
    ]
    results = [
        levenberg_marquardt(
            fun,
            jac,
            s,
            max_iterations=config.max_iterations,
            merit_tolerance=config.merit_tolerance,
            step_tolerance=config.step_tolerance,
            initial_radius=config.initial_radius,
            shrink=config.shrink,
            grow=config.grow,
        )
        for s in starts
    ]
    best = min(range(len(results)), key=lambda k: (not results[k].converged, results[k].merit, k))
    res = results[best]
    z = us * res.x
    return _report(z, problem, res, time.perf_counter() - t0, [r.merit for r in results])


@dataclass
class ActiveSetResult:
    solution: np.ndarray | None
    feasible: bool
    active: tuple
    violation: float
    candidates: int


def _newton(problem, unknown, z0, tol=1e-13, max_iter=60):
    """Damped Newton for ``F_unknown(z) = 0`` with the other entries of ``z`` fixed."""
    fs, us = problem.force_scale, problem.disp_scale
    z = z0.copy()
    res = problem.F(z)[unknown] / fs
    for _ in range(max_iter):
        nrm = float(np.max(np.abs(res), initial=0.0))
        if nrm <= tol:
            return z, True
        J = problem.F_jacobian(z)[np.ix_(unknown, unknown)] * (us / fs)
        if np.linalg.cond(J) > 1e13:
            return z, False
        dx = np.linalg.solve(J, -res) * us
        t = 1.0
        while t > 1e-8:
            z_try = z.copy()
            z_try[unknown] += t * dx
            res_try = problem.F(z_try)[unknown] / fs
            if np.max(np.abs(res_try)) < (1 - 1e-4 * t) * nrm:
                break
            t *= 0.5
        else:
            return z, False
        z, res = z_try, res_try
    return z, np.max(np.abs(res), initial=0.0) <= tol


def brute_force_active_set(problem: McpProblem, tol=1e-10) -> ActiveSetResult:
    """Enumerate every active set of the bounded DOFs.

    For each set, active DOFs are fixed at 0 and the remaining equations
    ``F_i = 0`` are solved by damped Newton.  Among candidates with
    ``z_b >= -tol`` and ``F_b >= -tol`` (scaled units) the one with the
    smallest violation is returned.
    """
    m = len(problem.bounded)
    if m > 12:
        raise ValueError(f"enumeration limited to 12 bounded DOFs, got {m}")
    fs, us = problem.force_scale, problem.disp_scale
    best = ActiveSetResult(None, False, (), np.inf, 0)
    checked = 0
    for active in itertools.product((False, True), repeat=m):
        act = problem.bounded[np.asarray(active, dtype=bool)] if m else np.zeros(0, dtype=np.int64)
        unknown = np.setdiff1d(np.arange(problem.size), act)
        z, ok = _newton(problem, unknown, np.zeros(problem.size))
        checked += 1
        if not ok:
            continue
        F = problem.F(z)
        zb = z[problem.bounded] / us
        Fb = F[problem.bounded] / fs
        violation = max(0.0, -float(np.min(zb, initial=0.0)), -float(np.min(Fb, initial=0.0)))
        if violation <= tol and violation < best.violation:
            best = ActiveSetResult(z, True, tuple(int(i) for i in act), violation, 0)
    best.candidates = checked
    return best

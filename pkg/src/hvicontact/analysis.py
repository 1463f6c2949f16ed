"""Post-processing: existence check, contact traces, stresses, refinement."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .elasticity import AssembledSystem, LoadSpec, MaterialParams, plane_stress_matrix, rigid_motions, traction_load, _b_matrices
from .friction import FrictionLaw, smooth_S_prime, subdifferential
from .mesh import Mesh, boundary_nodes, edge_lengths


# -- existence -------------------------------------------------------------


@dataclass
class DirectionCheck:
    """One normalized generator ``y = (a1 - b x2, a2 + b x1)`` of the kernel cone."""

    a1: float
    a2: float
    b: float
    load_value: float
    threshold: float
    satisfied: bool


@dataclass
class ExistenceReport:
    kernel_dimension: int
    bounded: bool
    c: float
    directions: list = field(default_factory=list)
    verdict: bool = False
    violating: DirectionCheck | None = None
    message: str = ""

    def as_dict(self):
        return {
            "kernel_dimension": self.kernel_dimension,
            "bounded": self.bounded,
            "c": self.c,
            "directions": [vars(d) for d in self.directions],
            "verdict": self.verdict,
            "violating": vars(self.violating) if self.violating else None,
            "message": self.message,
        }


def scalar_mass_and_laplacian(mesh: Mesh):
    """P1 mass and Laplacian matrices for one scalar component."""
    p = mesh.nodes[mesh.triangles]
    B, area = _b_matrices(p)
    grads = np.stack([B[:, 0, 0::2], B[:, 1, 1::2]], axis=2)  # (T, 3, 2)
    Ke = area[:, None, None] * np.einsum("tid,tjd->tij", grads, grads)
    Me = area[:, None, None] * (np.ones((3, 3)) + np.eye(3)) / 12.0
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    shape = (mesh.num_nodes, mesh.num_nodes)
    M = sp.coo_matrix((Me.ravel(), (rows, cols)), shape=shape).tocsr()
    L = sp.coo_matrix((Ke.ravel(), (rows, cols)), shape=shape).tocsr()
    return M, L


def h1_norm(mesh: Mesh, u_full) -> float:
    """H^1(Omega) norm of a P1 vector field given by nodal values."""
    M, L = scalar_mass_and_laplacian(mesh)
    A = M + L
    u1, u2 = u_full[0::2], u_full[1::2]
    return float(np.sqrt(u1 @ (A @ u1) + u2 @ (A @ u2)))


def _cone_generators(G, k, tol=1e-12):
    """Extreme rays of the pointed cone ``{w in R^k : G w >= 0}``."""
    if k == 1:
        cands = [np.array([1.0]), np.array([-1.0])]
    else:
        cands = []
        for rows in itertools.combinations(range(len(G)), k - 1):
            N = scipy.linalg.null_space(G[list(rows)])
            if N.shape[1] == 1:
                cands += [N[:, 0], -N[:, 0]]
    rays = []
    for w in cands:
        w = w / np.linalg.norm(w)
        if len(G) and np.min(G @ w) < -tol * max(1.0, np.abs(G).max()):
            continue
        if not any(np.allclose(w, r, atol=1e-10) for r in rays):
            rays.append(w)
    return rays


def check_existence(mesh: Mesh, loads: LoadSpec, law: FrictionLaw, contact="unilateral", trace_norm=1.0):
    """Test the load compatibility condition over the admissible rigid motions.

    The rigid motions with ``u1 = 0`` on Gamma3 and ``u2 >= 0`` on Gamma_c form
    a polyhedral cone.  If it is ``{0}`` (or the contact is ``"bilateral"``,
    i.e. displacements on Gamma_c are bounded) the kernel part of the
    admissible set is bounded and the condition holds for any load.
    Otherwise every H^1-normalized generator ``y`` must satisfy
    ``<g, y> < -c`` with ``c = gamma2 * meas(Gamma_c)^(1/2) * trace_norm``.
    A cone containing a line always fails.
    """
    if contact not in ("unilateral", "bilateral"):
        raise ValueError(f"contact must be 'unilateral' or 'bilateral', got {contact!r}")
    c4 = law.growth_constants()[1]
    meas_c = float(edge_lengths(mesh, boundary_nodes(mesh, "GammaC")).sum())
    c = c4 * np.sqrt(meas_c) * trace_norm
    R = rigid_motions(mesh)
    g = traction_load(mesh, loads)

    g3 = sorted({v for e in mesh.edges_with_tag("Gamma3") for v in e})
    eq = R[[2 * v for v in g3]]
    N = scipy.linalg.null_space(eq) if len(eq) else np.eye(3)
    k = N.shape[1]
    if k == 0:
        return ExistenceReport(0, True, c, verdict=True, message="no admissible rigid motion")
    if contact == "bilateral":
        return ExistenceReport(k, True, c, verdict=True, message="bounded kernel part (bilateral contact)")

    gc = boundary_nodes(mesh, "GammaC")
    G = R[[2 * v + 1 for v in gc]] @ N

    def check(w):
        params = N @ w
        y = R @ params
        nrm = h1_norm(mesh, y)
        val = float(g @ y) / nrm
        params = params / nrm
        return DirectionCheck(float(params[0]), float(params[1]), float(params[2]), val, -c, bool(val < -c))

    lineality = scipy.linalg.null_space(G) if len(G) else np.eye(k)
    if lineality.shape[1] > 0:
        d = lineality[:, 0]
        checks = [check(d), check(-d)]
        worst = max(checks, key=lambda ch: ch.load_value)
        return ExistenceReport(
            k, False, c, checks, False, worst, "admissible kernel cone contains a line; the body can escape"
        )
    checks = [check(w) for w in _cone_generators(G, k)]
    bad = [ch for ch in checks if not ch.satisfied]
    worst = max(bad, key=lambda ch: ch.load_value) if bad else None
    return ExistenceReport(
        k,
        False,
        c,
        checks,
        not bad,
        worst,
        "compatibility condition holds" if not bad else "load does not push the body against the foundation",
    )


# -- traces and stresses ---------------------------------------------------


@dataclass
class Trace:
    s: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    minus_sigma_t: np.ndarray
    sigma_n: np.ndarray

    def rows(self):
        return np.column_stack([self.s, self.u1, self.u2, self.minus_sigma_t, self.sigma_n])


def contact_trace(u_full, mesh: Mesh, system: AssembledSystem, eps, law: FrictionLaw) -> Trace:
    """Values along Gamma_c at its nodes.

    The tangential stress comes from the regularized law, ``-sigma_t =
    -S'(u1)``; the normal stress is the nodal reaction divided by the
    trapezoid weight of the node.
    """
    nodes = boundary_nodes(mesh, "GammaC")
    lengths = edge_lengths(mesh, nodes)
    s = np.concatenate([[0.0], np.cumsum(lengths)])
    w = np.zeros(len(nodes))
    w[:-1] += 0.5 * lengths
    w[1:] += 0.5 * lengths
    u1 = u_full[2 * nodes]
    u2 = u_full[2 * nodes + 1]
    reaction = system.full_stiffness @ u_full - system.full_load
    return Trace(
        s=s,
        u1=u1,
        u2=u2,
        minus_sigma_t=-smooth_S_prime(u1, eps, law),
        sigma_n=reaction[2 * nodes + 1] / w,
    )


def law_violation(trace: Trace, law: FrictionLaw, eps) -> np.ndarray:
    """Distance of each ``(u1, -sigma_t)`` sample from the eps-enlarged graph of dj.

    Branches of ``j`` within ``eps/2`` of the minimum count as active; inside
    that band the smoothed slope is a convex combination of the branch slopes,
    so the distance is zero up to rounding.
    """
    lo, hi = subdifferential(trace.u1, law, band=0.5 * eps)
    v = trace.minus_sigma_t
    return np.maximum(0.0, np.maximum(lo - v, v - hi))


@dataclass
class StressRecovery:
    element_stress: np.ndarray
    contact_minus_sigma_t: np.ndarray
    contact_sigma_n: np.ndarray


def element_stresses(u_full, mesh: Mesh, material: MaterialParams) -> np.ndarray:
    """Constant Voigt stress ``(s11, s22, s12)`` on every triangle."""
    B, _ = _b_matrices(mesh.nodes[mesh.triangles])
    t = mesh.triangles
    ue = np.empty((len(t), 6))
    ue[:, 0::2] = u_full[2 * t]
    ue[:, 1::2] = u_full[2 * t + 1]
    strain = np.einsum("tij,tj->ti", B, ue)
    return strain @ plane_stress_matrix(material).T


def stress_recovery(u_full, mesh: Mesh, material: MaterialParams) -> StressRecovery:
    """Element stresses and nodal Gamma_c tractions averaged over adjacent edges.

    Only a cross-check of the law-based trace; the two agree up to
    discretization error.
    """
    sig = element_stresses(u_full, mesh, material)
    edge_tri = {}
    for k, tri in enumerate(mesh.triangles):
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            edge_tri[(int(a), int(b))] = k
    nodes = boundary_nodes(mesh, "GammaC")
    pos = {int(v): k for k, v in enumerate(nodes)}
    acc_t = np.zeros(len(nodes))
    acc_n = np.zeros(len(nodes))
    cnt = np.zeros(len(nodes))
    for i, j in mesh.edges_with_tag("GammaC"):
        k = edge_tri[(i, j)]
        d = mesh.nodes[j] - mesh.nodes[i]
        tang = d / np.linalg.norm(d)
        normal = np.array([tang[1], -tang[0]])
        s11, s22, s12 = sig[k]
        traction = np.array([[s11, s12], [s12, s22]]) @ normal
        sn = traction @ normal
        st = traction @ tang
        for v in (i, j):
            acc_t[pos[v]] += -st
            acc_n[pos[v]] += sn
            cnt[pos[v]] += 1
    return StressRecovery(sig, acc_t / cnt, acc_n / cnt)


# -- refinement ------------------------------------------------------------


@dataclass
class RefinementRow:
    n: int
    dofs: int
    iterations: int
    merit: float
    converged: bool
    max_diff_u1: float = float("nan")
    energy_diff: float = float("nan")


def interpolate_p1(coarse: Mesh, u_coarse, points) -> np.ndarray:
    """Evaluate a P1 field of a structured mesh at arbitrary points in the square."""
    n = coarse.n
    pts = np.asarray(points, dtype=float)
    i = np.clip(np.floor(pts[:, 0] * n).astype(int), 0, n - 1)
    j = np.clip(np.floor(pts[:, 1] * n).astype(int), 0, n - 1)
    fx = pts[:, 0] * n - i
    fy = pts[:, 1] * n - j
    a = j * (n + 1) + i
    b, c, d = a + 1, a + n + 2, a + n + 1
    lower = fx >= fy
    # barycentric weights on (a, b, c) below the diagonal, (a, c, d) above
    wa = np.where(lower, 1 - fx, 1 - fy)
    wb = np.where(lower, fx - fy, 0.0)
    wc = np.where(lower, fy, fx)
    wd = np.where(lower, 0.0, fy - fx)
    out = np.empty((len(pts), 2))
    for comp in (0, 1):
        uc = u_coarse[comp::2]
        out[:, comp] = wa * uc[a] + wb * uc[b] + wc * uc[c] + wd * uc[d]
    return out.ravel()


def compare_levels(coarse, fine) -> tuple[float, float]:
    """Max difference of the u1 traces on the coarse Gamma_c nodes and the
    energy norm of ``u_fine - I(u_coarse)`` on the fine mesh."""
    xc = coarse.mesh.nodes[boundary_nodes(coarse.mesh, "GammaC")]
    nodes_f = boundary_nodes(fine.mesh, "GammaC")
    xf = fine.mesh.nodes[nodes_f]
    match = [int(np.argmin(np.linalg.norm(xf - p, axis=1))) for p in xc]
    diff = float(np.max(np.abs(fine.trace.u1[match] - coarse.trace.u1)))
    e = fine.u - interpolate_p1(coarse.mesh, coarse.u, fine.mesh.nodes)
    energy = float(np.sqrt(max(e @ (fine.system.full_stiffness @ e), 0.0)))
    return diff, energy


def refinement_study(config, n_list=None, eps=None):
    """Solve every level of ``n_list`` and tabulate successive differences.

    A level that fails to converge is kept in the table with ``converged``
    False; differences are computed whenever both levels produced a solution.
    """
    from .pipeline import solve_level

    n_list = list(config.n_list if n_list is None else n_list)
    eps = config.eps if eps is None else eps
    levels = [solve_level(config, n, eps=eps) for n in n_list]
    rows = []
    for k, lev in enumerate(levels):
        row = RefinementRow(
            n=lev.n,
            dofs=lev.partition.num_contact,
            iterations=lev.report.iterations,
            merit=lev.report.merit,
            converged=lev.report.converged,
        )
        if k + 1 < len(levels):
            row.max_diff_u1, row.energy_diff = compare_levels(lev, levels[k + 1])
        rows.append(row)
    return rows, levels

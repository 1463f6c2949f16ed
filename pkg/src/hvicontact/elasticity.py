"""Plane-stress linear elasticity on P1 triangles.

Global DOF numbering is interleaved: ``2 * node`` is u1, ``2 * node + 1`` is u2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import ConfigurationError, GeometryError
from .mesh import Mesh


@dataclass(frozen=True)
class MaterialParams:
    youngs_modulus: float
    poisson_ratio: float

    def __post_init__(self):
        if not self.youngs_modulus > 0:
            raise ConfigurationError(f"youngs_modulus must be positive, got {self.youngs_modulus}")
        if not 0.0 <= self.poisson_ratio < 0.5:
            raise ConfigurationError(f"poisson_ratio must lie in [0, 0.5), got {self.poisson_ratio}")


@dataclass(frozen=True)
class LoadSpec:
    """Surface tractions: ``(sign * P, 0)`` on Gamma1 and ``(0, -Q)`` on Gamma2."""

    P: float = 0.0
    Q: float = 0.0
    sign: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.P) and np.isfinite(self.Q)):
            raise ConfigurationError("load magnitudes must be finite")
        if self.sign not in (1, -1):
            raise ConfigurationError(f"load sign must be +1 or -1, got {self.sign}")

    @property
    def traction_gamma1(self):
        return np.array([self.sign * self.P, 0.0])

    @property
    def traction_gamma2(self):
        return np.array([0.0, -self.Q])


@dataclass(frozen=True)
class AssembledSystem:
    """Stiffness and load over the free DOFs.

    ``dof_map[g]`` is the free index of global DOF ``g`` or -1 if the DOF was
    eliminated (u1 on the closure of Gamma3).  The unreduced operators are kept
    for reactions, energies and the existence check.
    """

    stiffness: sp.csr_matrix
    load: np.ndarray
    dof_map: np.ndarray
    full_stiffness: sp.csr_matrix
    full_load: np.ndarray

    @property
    def free_dofs(self) -> np.ndarray:
        return np.flatnonzero(self.dof_map >= 0)

    @property
    def eliminated_dofs(self) -> np.ndarray:
        return np.flatnonzero(self.dof_map < 0)

    def expand(self, u_free) -> np.ndarray:
        """Free-DOF vector to a full vector with eliminated entries 0."""
        u = np.zeros(len(self.dof_map))
        u[self.free_dofs] = u_free
        return u


def plane_stress_matrix(mat: MaterialParams) -> np.ndarray:
    """Voigt constitutive matrix for ``(eps11, eps22, 2 eps12)``."""
    E, nu = mat.youngs_modulus, mat.poisson_ratio
    c = E / (1.0 - nu**2)
    return np.array(
        [
            [c, c * nu, 0.0],
            [c * nu, c, 0.0],
            [0.0, 0.0, E / (2.0 * (1.0 + nu))],
        ]
    )


def strain_displacement(coords):
    """Constant B matrix (3x6) and area of a P1 triangle."""
    coords = np.asarray(coords, dtype=float)
    B, area = _b_matrices(coords[None])
    if area[0] <= 0:
        raise GeometryError(f"triangle has non-positive area {area[0]:g}")
    return B[0], area[0]


def _b_matrices(p):
    # p: (T, 3, 2)
    x, y = p[..., 0], p[..., 1]
    area = 0.5 * ((x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0]))
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        b = b / (2.0 * area[:, None])
        c = c / (2.0 * area[:, None])
    B = np.zeros((len(p), 3, 6))
    B[:, 0, 0::2] = b
    B[:, 1, 1::2] = c
    B[:, 2, 0::2] = c
    B[:, 2, 1::2] = b
    return B, area


def element_stiffness(triangle_coords, D) -> np.ndarray:
    B, area = strain_displacement(triangle_coords)
    return area * B.T @ D @ B


def _element_dofs(triangles):
    t = np.asarray(triangles)
    dofs = np.empty((len(t), 6), dtype=np.int64)
    dofs[:, 0::2] = 2 * t
    dofs[:, 1::2] = 2 * t + 1
    return dofs


def global_stiffness(mesh: Mesh, mat: MaterialParams) -> sp.csr_matrix:
    """Unconstrained stiffness over all ``2 N`` DOFs."""
    D = plane_stress_matrix(mat)
    B, area = _b_matrices(mesh.nodes[mesh.triangles])
    if np.any(area <= 0):
        bad = int(np.flatnonzero(area <= 0)[0])
        raise GeometryError(f"triangle {bad} has non-positive area")
    Ke = area[:, None, None] * np.einsum("tki,kl,tlj->tij", B, D, B)
    dofs = _element_dofs(mesh.triangles)
    rows = np.repeat(dofs, 6, axis=1).ravel()
    cols = np.tile(dofs, (1, 6)).ravel()
    K = sp.coo_matrix((Ke.ravel(), (rows, cols)), shape=(mesh.num_dofs, mesh.num_dofs)).tocsr()
    # exact symmetry, independent of summation order
    return ((K + K.T) * 0.5).tocsr()


def traction_load(mesh: Mesh, loads: LoadSpec) -> np.ndarray:
    """Consistent nodal forces of piecewise-constant edge tractions."""
    f = np.zeros(mesh.num_dofs)
    for tag, t in (("Gamma1", loads.traction_gamma1), ("Gamma2", loads.traction_gamma2)):
        for i, j in mesh.edges_with_tag(tag):
            half = 0.5 * np.linalg.norm(mesh.nodes[j] - mesh.nodes[i])
            f[2 * i : 2 * i + 2] += half * t
            f[2 * j : 2 * j + 2] += half * t
    return f


def constrained_dofs(mesh: Mesh) -> np.ndarray:
    """u1 DOFs of every node on the closure of Gamma3."""
    nodes = sorted({v for e in mesh.edges_with_tag("Gamma3") for v in e})
    return np.asarray([2 * v for v in nodes], dtype=np.int64)


def assemble(mesh: Mesh, mat: MaterialParams, loads: LoadSpec) -> AssembledSystem:
    untagged = [(i, j) for i, j, t in mesh.boundary_edges if t is None]
    if untagged:
        raise ConfigurationError(f"boundary edge {untagged[0]} carries no tag")
    K = global_stiffness(mesh, mat)
    f = traction_load(mesh, loads)
    dof_map = np.arange(mesh.num_dofs)
    elim = constrained_dofs(mesh)
    keep = np.ones(mesh.num_dofs, dtype=bool)
    keep[elim] = False
    dof_map = np.full(mesh.num_dofs, -1, dtype=np.int64)
    dof_map[keep] = np.arange(keep.sum())
    free = np.flatnonzero(keep)
    return AssembledSystem(
        stiffness=K[free][:, free].tocsr(),
        load=f[free],
        dof_map=dof_map,
        full_stiffness=K,
        full_load=f,
    )


def rigid_motions(mesh: Mesh) -> np.ndarray:
    """(2N, 3) nodal values of the translations and the rotation ``(-y, x)``."""
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    R = np.zeros((mesh.num_dofs, 3))
    R[0::2, 0] = 1.0
    R[1::2, 1] = 1.0
    R[0::2, 2] = -y
    R[1::2, 2] = x
    return R


def rigid_body_basis(mesh: Mesh, dof_map=None) -> np.ndarray:
    """Orthonormal basis (columns) of the admissible rigid motions.

    With ``dof_map`` the motions must vanish on the eliminated DOFs and are
    returned restricted to the free DOFs; without it all three motions are
    returned over the full DOF vector.
    """
    R = rigid_motions(mesh)
    if dof_map is None:
        return scipy.linalg.orth(R)
    dof_map = np.asarray(dof_map)
    elim = dof_map < 0
    coeffs = scipy.linalg.null_space(R[elim]) if elim.any() else np.eye(3)
    if coeffs.shape[1] == 0:
        return np.zeros((int((~elim).sum()), 0))
    return scipy.linalg.orth(R[~elim] @ coeffs)

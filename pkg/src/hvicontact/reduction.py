"""Static condensation of the free DOFs onto the contact DOFs."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .elasticity import AssembledSystem
from .errors import SemicoercivityError
from .mesh import Mesh, boundary_nodes, edge_lengths

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DofPartition:
    """Index sets into the free-DOF vector.

    Contact DOFs are ordered tangential first, then normal, each following
    the Gamma_c node order.  ``tangential_pos`` / ``normal_pos`` give the
    position of each contact DOF inside ``contact_nodes``.
    """

    contact_tangential: np.ndarray
    contact_normal: np.ndarray
    interior: np.ndarray
    contact_nodes: np.ndarray
    tangential_pos: np.ndarray
    normal_pos: np.ndarray
    edge_lengths: np.ndarray

    @property
    def contact(self) -> np.ndarray:
        return np.concatenate([self.contact_tangential, self.contact_normal])

    @property
    def num_contact(self) -> int:
        return len(self.contact_tangential) + len(self.contact_normal)

    @property
    def num_free(self) -> int:
        return self.num_contact + len(self.interior)

    def trapezoid_weights(self) -> np.ndarray:
        w = np.zeros(len(self.contact_nodes))
        w[:-1] += 0.5 * self.edge_lengths
        w[1:] += 0.5 * self.edge_lengths
        return w


def partition_dofs(mesh: Mesh, dof_map) -> DofPartition:
    dof_map = np.asarray(dof_map)
    nodes = boundary_nodes(mesh, "GammaC")
    t_idx, t_pos, n_idx, n_pos = [], [], [], []
    for k, v in enumerate(nodes):
        ft, fn = dof_map[2 * v], dof_map[2 * v + 1]
        if ft >= 0:
            t_idx.append(ft)
            t_pos.append(k)
        else:
            log.info("contact node %d has its tangential DOF eliminated; keeping the normal DOF only", v)
        if fn >= 0:
            n_idx.append(fn)
            n_pos.append(k)
    n_free = int((dof_map >= 0).sum())
    interior = np.setdiff1d(np.arange(n_free), np.concatenate([t_idx, n_idx]).astype(np.int64))
    as_int = lambda a: np.asarray(a, dtype=np.int64)
    return DofPartition(
        contact_tangential=as_int(t_idx),
        contact_normal=as_int(n_idx),
        interior=as_int(interior),
        contact_nodes=as_int(nodes),
        tangential_pos=as_int(t_pos),
        normal_pos=as_int(n_pos),
        edge_lengths=edge_lengths(mesh, nodes),
    )


@dataclass(frozen=True)
class ReducedSystem:
    schur: np.ndarray
    reduced_load: np.ndarray
    partition: DofPartition
    system: AssembledSystem
    _kii: object
    _kic: sp.csr_matrix
    _interior_load_part: np.ndarray

    def interior_values(self, z) -> np.ndarray:
        return self._interior_load_part - self._kii.solve(self._kic @ z)


def schur_condense(system: AssembledSystem, partition: DofPartition) -> ReducedSystem:
    K = system.stiffness.tocsr()
    g = system.load
    i, c = partition.interior, partition.contact
    Kii = K[i][:, i].tocsc()
    Kic = K[i][:, c].tocsr()
    Kcc = K[c][:, c].toarray()
    try:
        lu = spla.splu(Kii)
    except RuntimeError as exc:
        raise SemicoercivityError(
            "interior stiffness block is singular: the boundary decomposition leaves a rigid mode "
            "that neither Gamma3 nor the contact DOFs pin"
        ) from exc
    # splu does not flag near-singular pivots
    diag_u = np.abs(lu.U.diagonal())
    if len(diag_u) and diag_u.min() <= 1e-10 * diag_u.max():
        raise SemicoercivityError(
            "interior stiffness block is numerically singular: the boundary decomposition leaves a "
            "rigid mode that neither Gamma3 nor the contact DOFs pin"
        )
    X = lu.solve(Kic.toarray()) if len(i) else np.zeros((0, len(c)))
    schur = Kcc - Kic.T @ X
    schur = 0.5 * (schur + schur.T)
    gi = g[i]
    yi = lu.solve(gi) if len(i) else np.zeros(0)
    reduced_load = g[c] - Kic.T @ yi
    return ReducedSystem(
        schur=schur,
        reduced_load=reduced_load,
        partition=partition,
        system=system,
        _kii=lu,
        _kic=Kic,
        _interior_load_part=yi,
    )


def recover_full(z, reduced: ReducedSystem) -> np.ndarray:
    """Full displacement vector (all ``2 N`` DOFs) from contact values ``z``."""
    z = np.asarray(z, dtype=float)
    p = reduced.partition
    if z.shape != (p.num_contact,):
        raise ValueError(f"expected {p.num_contact} contact values, got shape {z.shape}")
    u_free = np.zeros(p.num_free)
    u_free[p.contact] = z
    u_free[p.interior] = reduced.interior_values(z)
    return reduced.system.expand(u_free)

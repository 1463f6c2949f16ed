"""
Plane-stress stiffness and the rigid-body kernel
================================================

Linear P1 elements for a steel plate.  Without any displacement condition
the stiffness matrix has the three planar rigid motions in its kernel.
The wall removes horizontal translation and rotation and leaves the
vertical translation, which only the contact condition can stop.
"""

import numpy as np

from hvicontact.elasticity import LoadSpec, MaterialParams, assemble, global_stiffness, rigid_body_basis
from hvicontact.mesh import BoundarySpec, build_unit_square_mesh, tag_boundary

steel = MaterialParams(youngs_modulus=2.15e11, poisson_ratio=0.29)
mesh = build_unit_square_mesh(8)

K = global_stiffness(mesh, steel)
print("free body kernel dimension", rigid_body_basis(mesh).shape[1])

mesh = tag_boundary(mesh, BoundarySpec.wall_left())
system = assemble(mesh, steel, LoadSpec(P=1e6, Q=1e6, sign=1))
kernel = rigid_body_basis(mesh, system.dof_map)
print("with the wall", kernel.shape[1])

# the remaining mode is a vertical translation
v = system.expand(kernel[:, 0])
print("u1 range", np.ptp(v[0::2]), " u2 values", np.unique(np.round(v[1::2], 12)))

# Load vector: P pushes the right side, Q presses down on the top side.
print("sum of horizontal loads", system.full_load[0::2].sum())
print("sum of vertical loads  ", system.full_load[1::2].sum())

# A constant strain field has energy eps^T D eps times the area.
u = np.zeros(mesh.num_dofs)
u[0::2] = 1e-4 * mesh.nodes[:, 0]
print("energy of u = (1e-4 x, 0):", u @ (system.full_stiffness @ u))

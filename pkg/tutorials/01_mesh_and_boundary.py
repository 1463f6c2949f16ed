"""
Meshing the unit square and tagging its boundary
================================================

The body is the unit square, split into ``n x n`` cells and two triangles
per cell.  Each boundary edge carries one of the tags Gamma1 (horizontal
traction), Gamma2 (vertical traction), Gamma3 (wall, u1 = 0), GammaC
(frictional contact) or GammaN_free.
"""

import numpy as np

from hvicontact.mesh import BoundarySpec, Segment, boundary_nodes, build_unit_square_mesh, tag_boundary

mesh = build_unit_square_mesh(4)
print(len(mesh.nodes), "nodes,", len(mesh.triangles), "triangles")

# every triangle is counterclockwise and the areas add up to one
print("total area", mesh.triangle_areas().sum())

# The wall-left layout: contact on the bottom, wall on the left.
mesh = tag_boundary(mesh, BoundarySpec.wall_left())
for tag in mesh.tags:
    print(f"{tag:8s}", boundary_nodes(mesh, tag))

# Segments can cover part of a side.  Here only the lower half of the left
# side is a wall; the upper half is traction free.
spec = BoundarySpec(
    {
        "GammaC": (Segment("bottom"),),
        "Gamma3": (Segment("left", 0.0, 0.5),),
        "GammaN_free": (Segment("left", 0.5, 1.0),),
        "Gamma1": (Segment("right"),),
        "Gamma2": (Segment("top"),),
    }
)
partial = tag_boundary(build_unit_square_mesh(4), spec)
print("wall nodes", partial.nodes[boundary_nodes(partial, "Gamma3")].tolist())

# Contact nodes run left to right, so arclength along GammaC is just x.
nodes = boundary_nodes(mesh, "GammaC")
print("contact x", np.round(mesh.nodes[nodes, 0], 3))

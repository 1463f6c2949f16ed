"""Semicoercive unilateral contact with nonmonotone friction.

Regularized hemivariational inequality on the unit square: P1 plane-stress
elasticity, Schur condensation onto the contact boundary, Fischer-Burmeister
reformulation of the contact conditions and trust-region least squares.
"""

from .analysis import check_existence, contact_trace, refinement_study, stress_recovery
from .config import ProblemConfig, parse_config, shipped_config
from .elasticity import LoadSpec, MaterialParams, assemble, plane_stress_matrix, rigid_body_basis
from .friction import FrictionLaw, smooth_S, smooth_S_prime, subdifferential, superpotential
from .mcp import McpProblem, SolverConfig, brute_force_active_set, solve_trust_region
from .mesh import BoundarySpec, Segment, boundary_nodes, build_unit_square_mesh, tag_boundary
from .pipeline import solve_level
from .reduction import partition_dofs, recover_full, schur_condense

__version__ = "0.1.0"

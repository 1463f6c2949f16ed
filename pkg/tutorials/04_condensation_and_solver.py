"""
Condensing onto the contact nodes and solving the complementarity problem
=========================================================================

Friction and the non-penetration condition act only on the contact nodes,
so the interior unknowns are eliminated with a Schur complement.  What is
left is a small mixed complementarity problem: tangential unknowns satisfy
an equation, normal unknowns satisfy ``u2 >= 0, F >= 0, u2 F = 0``.  The
Fischer-Burmeister function turns it into a square nonlinear system solved
by trust-region least squares.
"""

import numpy as np

from hvicontact.config import parse_config, shipped_config
from hvicontact.mcp import brute_force_active_set, residual_map, solve_trust_region
from hvicontact.pipeline import build_level
from hvicontact.reduction import recover_full

config = parse_config(shipped_config("wall_left.cfg"))
mesh, system, partition, reduced, problem = build_level(config, 4)
print("free unknowns", partition.num_free, "-> contact unknowns", partition.num_contact)
print("Schur complement symmetric:", np.allclose(reduced.schur, reduced.schur.T))

report = solve_trust_region(problem, config.solver)
print(f"converged={report.converged} in {report.iterations} iterations, merit {report.merit:.2e}")
print("max |Phi| at the solution", np.abs(residual_map(report.solution, problem)).max())

# Small problems can be checked against enumeration of every active set.
oracle = brute_force_active_set(problem)
print("difference to enumeration", np.abs(report.solution - oracle.solution).max())

# Back to the whole plate: interior values follow from one sparse solve.
u = recover_full(report.solution, reduced)
print("max |u1|", np.abs(u[0::2]).max(), " max |u2|", np.abs(u[1::2]).max())

"""
The two benchmark layouts, load compatibility and mesh refinement
=================================================================

A steel square is pressed down onto a rigid foundation and pushed
sideways.  In ``wall-left`` the wall is on the left and the horizontal
load acts on the right side; ``wall-right`` mirrors that.  Because the
body can still move up, a solution exists only if the load presses it
onto the foundation hard enough, which is checked before solving.
"""

import numpy as np

from hvicontact.analysis import check_existence, refinement_study
from hvicontact.config import parse_config, shipped_config
from hvicontact.mesh import build_unit_square_mesh, tag_boundary

for name in ("wall_left.cfg", "wall_right.cfg"):
    config = parse_config(shipped_config(name))
    mesh = tag_boundary(build_unit_square_mesh(4), config.boundary)
    check = check_existence(mesh, config.loads, config.law)
    d = check.directions[0]
    print(f"{config.preset}: <g, y> = {d.load_value:.3g} vs -c = {d.threshold:.3g} -> {check.verdict}")

    rows, levels = refinement_study(config)
    print("   n  dofs  its     merit    max|du1|")
    for r in rows:
        print(f"{r.n:4d} {r.dofs:5d} {r.iterations:4d} {r.merit:10.2e} {r.max_diff_u1:10.2e}")

    # the finest trace: slip, normal gap and both stresses along the contact
    trace = levels[-1].trace
    print("   slip range", trace.u1.min(), trace.u1.max())
    print("   -sigma_t range", trace.minus_sigma_t.min(), trace.minus_sigma_t.max())
    print("   total normal reaction", trace.sigma_n @ levels[-1].partition.trapezoid_weights())

# Without the downward load nothing keeps the body on the foundation.
config = parse_config(shipped_config())
no_q = config.loads.__class__(config.loads.P, 0.0, config.loads.sign)
mesh = tag_boundary(build_unit_square_mesh(4), config.boundary)
print("Q = 0:", check_existence(mesh, no_q, config.law).message)

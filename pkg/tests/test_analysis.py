import dataclasses
import math

import numpy as np
import pytest

from hvicontact.analysis import (
    check_existence,
    contact_trace,
    element_stresses,
    h1_norm,
    interpolate_p1,
    law_violation,
    refinement_study,
    stress_recovery,
)
from hvicontact.config import parse_config, shipped_config
from hvicontact.elasticity import LoadSpec, MaterialParams, assemble, rigid_motions
from hvicontact.friction import FrictionLaw
from hvicontact.mesh import BoundarySpec, build_unit_square_mesh, tag_boundary

LAW = FrictionLaw(9e-6, 1e3, 5e2)
STEEL = MaterialParams(2.15e11, 0.29)
BENCH = LoadSpec(1e6, 1e6, 1)
CONFIG = parse_config(shipped_config())


def _mesh(n=4, spec=None):
    return tag_boundary(build_unit_square_mesh(n), spec or BoundarySpec.wall_left())


@pytest.mark.parametrize("spec", [BoundarySpec.wall_left(), BoundarySpec.wall_right()])
def test_existence_benchmark(spec):
    rep = check_existence(_mesh(4, spec), BENCH, LAW)
    assert rep.kernel_dimension == 1
    assert rep.c == pytest.approx(500.0)
    assert len(rep.directions) == 1
    d = rep.directions[0]
    assert (d.a1, d.b) == pytest.approx((0.0, 0.0), abs=1e-12)
    assert d.a2 == pytest.approx(1.0)
    assert d.load_value == pytest.approx(-1e6, rel=1e-12)
    assert d.threshold == pytest.approx(-500.0)
    assert d.satisfied and rep.verdict


def test_existence_without_vertical_load():
    rep = check_existence(_mesh(), LoadSpec(1e6, 0.0, 1), LAW)
    assert not rep.verdict
    assert rep.violating is not None
    assert rep.violating.load_value == pytest.approx(0.0, abs=1e-6)


def test_existence_small_load_below_threshold():
    # 400 N/m downward does not beat c = 500
    assert not check_existence(_mesh(), LoadSpec(0.0, 400.0), LAW).verdict
    assert check_existence(_mesh(), LoadSpec(0.0, 600.0), LAW).verdict


def test_existence_scale_consistent():
    a = check_existence(_mesh(), LoadSpec(1e6, 1e6), LAW).directions[0].load_value
    b = check_existence(_mesh(), LoadSpec(1e6, 2e6), LAW).directions[0].load_value
    assert b == 2 * a


def test_existence_bilateral_bounded():
    m = _mesh(3, BoundarySpec.single_tag("GammaC"))
    rep = check_existence(m, LoadSpec(0.0, 0.0), LAW, contact="bilateral")
    assert rep.bounded and rep.verdict


def test_existence_cone_with_a_line():
    # contact everywhere, no wall: horizontal translations keep u2 = 0
    m = _mesh(3, BoundarySpec.single_tag("GammaC"))
    rep = check_existence(m, LoadSpec(0.0, 0.0), LAW)
    assert rep.kernel_dimension == 3
    assert not rep.verdict
    assert abs(rep.violating.a1) > 0.5


def test_existence_invalid_contact_kind():
    with pytest.raises(ValueError):
        check_existence(_mesh(), BENCH, LAW, contact="sticky")


def test_h1_norm_of_rigid_fields():
    m = build_unit_square_mesh(4)
    R = rigid_motions(m)
    assert h1_norm(m, R[:, 1]) == pytest.approx(1.0, rel=1e-12)
    # rotation (-y, x): L2 part 2/3, gradient part 2
    assert h1_norm(m, R[:, 2]) ** 2 == pytest.approx(2.0 / 3.0 + 2.0, rel=1e-12)


def test_zero_solution_trace():
    m = _mesh(4)
    s = assemble(m, STEEL, LoadSpec(0.0, 0.0))
    t = contact_trace(np.zeros(m.num_dofs), m, s, 0.1, LAW)
    np.testing.assert_allclose(t.s, [0, 0.25, 0.5, 0.75, 1.0])
    assert not np.any(t.u1) and not np.any(t.u2) and not np.any(t.sigma_n)
    np.testing.assert_allclose(t.minus_sigma_t, 250.0)
    assert t.rows().shape == (5, 5)
    assert np.all(law_violation(t, LAW, 0.1) == 0)


def test_law_violation_detects_off_graph_sample():
    m = _mesh(2)
    s = assemble(m, STEEL, LoadSpec(0.0, 0.0))
    t = contact_trace(np.zeros(m.num_dofs), m, s, 0.1, LAW)
    bad = dataclasses.replace(t, u1=np.full(3, 1.0), minus_sigma_t=np.full(3, 600.0))
    np.testing.assert_allclose(law_violation(bad, LAW, 0.1), 100.0)


def _field(m, f):
    u = np.zeros(m.num_dofs)
    x, y = m.nodes[:, 0], m.nodes[:, 1]
    u[0::2], u[1::2] = f(x, y)
    return u


def test_uniform_strain_stress():
    m = build_unit_square_mesh(3)
    alpha = 1e-4
    sig = element_stresses(_field(m, lambda x, y: (alpha * x, 0 * y)), m, STEEL)
    E, nu = STEEL.youngs_modulus, STEEL.poisson_ratio
    np.testing.assert_allclose(sig[:, 0], alpha * E / (1 - nu**2), rtol=1e-12)
    np.testing.assert_allclose(sig[:, 1], alpha * E * nu / (1 - nu**2), rtol=1e-12)
    np.testing.assert_allclose(sig[:, 2], 0.0, atol=1e-12 * alpha * E)


def test_rigid_motion_is_stress_free():
    m = build_unit_square_mesh(4)
    sig = element_stresses(_field(m, lambda x, y: (0.3 - 2.0 * y, -1.1 + 2.0 * x)), m, STEEL)
    assert np.abs(sig).max() <= 1e-12 * STEEL.youngs_modulus


def test_patch_constant_stress_and_boundary_traction():
    m = _mesh(5)
    a, b, c, d = 1e-4, 3e-5, -2e-5, 5e-5
    sig = element_stresses(_field(m, lambda x, y: (a * x + b * y, c * x + d * y)), m, STEEL)
    ref = sig[0]
    assert np.abs(sig - ref).max() <= 1e-10 * np.abs(ref).max()
    rec = stress_recovery(_field(m, lambda x, y: (a * x + b * y, c * x + d * y)), m, STEEL)
    # outward normal (0, -1) and tangent (1, 0) on the bottom side
    np.testing.assert_allclose(rec.contact_sigma_n, ref[1], rtol=1e-10)
    np.testing.assert_allclose(rec.contact_minus_sigma_t, ref[2], rtol=1e-10)


def test_interpolation_reproduces_linear_fields():
    coarse = build_unit_square_mesh(3)
    f = lambda x, y: (0.1 + 2 * x - y, -0.4 + x + 3 * y)
    u = _field(coarse, f)
    pts = np.random.default_rng(0).random((200, 2))
    vals = interpolate_p1(coarse, u, pts).reshape(-1, 2)
    ex = np.column_stack(f(pts[:, 0], pts[:, 1]))
    np.testing.assert_allclose(vals, ex, atol=1e-13)


def test_interpolation_at_nodes():
    coarse = build_unit_square_mesh(2)
    u = np.random.default_rng(1).standard_normal(coarse.num_dofs)
    np.testing.assert_allclose(interpolate_p1(coarse, u, coarse.nodes), u, atol=1e-14)


def test_refinement_single_level():
    rows, levels = refinement_study(CONFIG, n_list=[1])
    assert len(rows) == 1
    assert math.isnan(rows[0].max_diff_u1) and math.isnan(rows[0].energy_diff)
    assert rows[0].converged


def test_refinement_differences_recorded():
    rows, _ = refinement_study(CONFIG, n_list=[2, 4, 8])
    diffs = [r.max_diff_u1 for r in rows[:-1]]
    assert all(np.isfinite(diffs))
    assert diffs[-1] < diffs[0]
    assert all(np.isfinite(r.energy_diff) for r in rows[:-1])


def test_equilibrium_and_law_on_solution():
    from hvicontact.pipeline import solve_level

    lev = solve_level(CONFIG, 8)
    assert lev.report.converged
    w = lev.partition.trapezoid_weights()
    total = float(lev.trace.sigma_n @ w)
    assert total == pytest.approx(CONFIG.loads.Q * 1.0, rel=1e-6)
    assert np.all(law_violation(lev.trace, CONFIG.law, CONFIG.eps) <= 1e-9)

import numpy as np
import pytest

from hvicontact.elasticity import (
    LoadSpec,
    MaterialParams,
    assemble,
    element_stiffness,
    global_stiffness,
    plane_stress_matrix,
    rigid_body_basis,
)
from hvicontact.errors import ConfigurationError, GeometryError
from hvicontact.mesh import BoundarySpec, Segment, build_unit_square_mesh, tag_boundary

STEEL = MaterialParams(2.15e11, 0.29)


def test_plane_stress_matrix_nu_zero():
    np.testing.assert_array_equal(plane_stress_matrix(MaterialParams(1.0, 0.0)), np.diag([1.0, 1.0, 0.5]))


def test_plane_stress_matrix_steel():
    D = plane_stress_matrix(STEEL)
    assert D[0, 0] == pytest.approx(2.15e11 / (1 - 0.29**2), rel=1e-15)
    assert D[0, 0] == pytest.approx(2.3474e11, rel=1e-4)
    assert D[0, 1] == D[1, 0] == pytest.approx(2.15e11 * 0.29 / (1 - 0.29**2))
    assert D[2, 2] == pytest.approx(2.15e11 / (2 * 1.29))
    assert np.all(np.linalg.eigvalsh(D) > 0)


def test_voigt_matches_tensor_hooke_law():
    # sigma_ij = E nu / (1 - nu^2) delta_ij tr(eps) + E / (1 + nu) eps_ij
    E, nu = STEEL.youngs_modulus, STEEL.poisson_ratio
    rng = np.random.default_rng(0)
    for _ in range(10):
        e = rng.standard_normal((2, 2))
        e = 0.5 * (e + e.T)
        sig = E * nu / (1 - nu**2) * np.trace(e) * np.eye(2) + E / (1 + nu) * e
        voigt = plane_stress_matrix(STEEL) @ [e[0, 0], e[1, 1], 2 * e[0, 1]]
        np.testing.assert_allclose(voigt, [sig[0, 0], sig[1, 1], sig[0, 1]], rtol=1e-13)


@pytest.mark.parametrize("E, nu", [(0.0, 0.3), (1.0, 0.5), (1.0, -0.1)])
def test_material_invariants(E, nu):
    with pytest.raises(ConfigurationError):
        MaterialParams(E, nu)


def _hand_element(coords, D):
    # shape-function gradients from inverting the P1 interpolation matrix
    C = np.column_stack([np.ones(3), coords])
    grads = np.linalg.inv(C)[1:]  # row 0: d/dx, row 1: d/dy of each shape function
    area = 0.5 * abs(np.linalg.det(C))
    B = np.zeros((3, 6))
    for a in range(3):
        B[0, 2 * a] = grads[0, a]
        B[1, 2 * a + 1] = grads[1, a]
        B[2, 2 * a] = grads[1, a]
        B[2, 2 * a + 1] = grads[0, a]
    K = np.zeros((6, 6))
    for i in range(6):
        for j in range(6):
            K[i, j] = area * sum(B[k, i] * D[k, l] * B[l, j] for k in range(3) for l in range(3))
    return K


def test_element_matches_hand_assembly():
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    D = plane_stress_matrix(MaterialParams(1.0, 0.0))
    np.testing.assert_allclose(element_stiffness(coords, D), _hand_element(coords, D), atol=1e-15)
    rng = np.random.default_rng(3)
    for _ in range(5):
        c = rng.random((3, 2))
        if np.linalg.det(np.column_stack([np.ones(3), c])) < 0:
            c = c[[0, 2, 1]]
        np.testing.assert_allclose(element_stiffness(c, plane_stress_matrix(STEEL)), _hand_element(c, plane_stress_matrix(STEEL)), rtol=1e-10, atol=1e-3)


def test_element_rigid_motions():
    rng = np.random.default_rng(1)
    D = plane_stress_matrix(STEEL)
    for _ in range(20):
        c = rng.random((3, 2))
        if np.linalg.det(np.column_stack([np.ones(3), c])) < 0:
            c = c[[0, 2, 1]]
        K = element_stiffness(c, D)
        assert np.allclose(K, K.T, rtol=0, atol=1e-12 * np.abs(K).max())
        trans = np.array([1.0, 0, 1, 0, 1, 0])
        rot = np.column_stack([-c[:, 1], c[:, 0]]).ravel()
        for v in (trans, np.roll(trans, 1), rot):
            assert np.linalg.norm(K @ v) <= 1e-9 * np.linalg.norm(K) * np.linalg.norm(v)
        ev = np.linalg.eigvalsh(K)
        assert np.sum(ev > 1e-9 * ev.max()) == 3


def test_degenerate_triangle():
    with pytest.raises(GeometryError):
        element_stiffness([[0, 0], [1, 0], [2, 0]], plane_stress_matrix(STEEL))


def _system(n=4, spec=None, loads=LoadSpec(1e6, 1e6, 1)):
    m = tag_boundary(build_unit_square_mesh(n), spec or BoundarySpec.wall_left())
    return m, assemble(m, STEEL, loads)


def test_stiffness_symmetry_and_psd():
    m, s = _system(8)
    K = s.full_stiffness
    assert abs(K - K.T).max() <= 1e-12 * abs(K).max()
    ev = np.linalg.eigvalsh(s.stiffness.toarray())
    assert ev.min() >= -1e-9 * ev.max()


def test_energy_of_linear_field():
    # u = (alpha x, beta y): constant strain, a(u, u) = eps^T D eps over unit area
    m, s = _system(5)
    alpha, beta = 1.3e-4, -0.7e-4
    u = np.zeros(m.num_dofs)
    u[0::2] = alpha * m.nodes[:, 0]
    u[1::2] = beta * m.nodes[:, 1]
    D = plane_stress_matrix(STEEL)
    exact = alpha**2 * D[0, 0] + 2 * alpha * beta * D[0, 1] + beta**2 * D[1, 1]
    assert u @ (s.full_stiffness @ u) == pytest.approx(exact, rel=1e-10)


def test_zero_load():
    _, s = _system(3, loads=LoadSpec(0.0, 0.0))
    assert not np.any(s.full_load)


def test_gamma1_load_one_cell():
    m, s = _system(1, loads=LoadSpec(1e6, 0.0, 1))
    # Gamma1 is the right side x = 1, one edge of length 1
    for v in range(m.num_nodes):
        x, _ = m.nodes[v]
        expected = 1e6 * 0.5 if x == 1.0 else 0.0
        assert s.full_load[2 * v] == pytest.approx(expected)
        assert s.full_load[2 * v + 1] == 0.0
    _, s_neg = _system(1, loads=LoadSpec(1e6, 0.0, -1))
    np.testing.assert_array_equal(s_neg.full_load, -s.full_load)


def test_vertical_load_total():
    m, s = _system(7, loads=LoadSpec(2e5, 3e6))
    assert s.full_load[1::2].sum() == pytest.approx(-3e6 * 1.0, rel=1e-14)
    assert s.full_load[0::2].sum() == pytest.approx(2e5 * 1.0, rel=1e-14)


def test_gamma3_elimination():
    m, s = _system(4)
    elim = s.eliminated_dofs
    nodes = elim // 2
    assert np.all(elim % 2 == 0)
    np.testing.assert_allclose(m.nodes[nodes][:, 0], 0.0)
    assert len(elim) == 5  # closure of the left side, corners included
    assert s.stiffness.shape == (m.num_dofs - 5,) * 2


def test_untagged_edge_rejected():
    with pytest.raises(ConfigurationError):
        assemble(build_unit_square_mesh(2), STEEL, LoadSpec())


def test_rigid_basis_unconstrained():
    m = build_unit_square_mesh(4)
    B = rigid_body_basis(m)
    assert B.shape[1] == 3
    np.testing.assert_allclose(B.T @ B, np.eye(3), atol=1e-12)
    K = global_stiffness(m, STEEL)
    normK = np.linalg.norm(K.toarray(), 2)
    for v in B.T:
        assert np.linalg.norm(K @ v) <= 1e-9 * normK * np.linalg.norm(v)


def test_rigid_basis_with_wall():
    m, s = _system(4)
    B = rigid_body_basis(m, s.dof_map)
    assert B.shape[1] == 1
    v = s.expand(B[:, 0])
    # pure vertical translation
    np.testing.assert_allclose(v[0::2], 0.0, atol=1e-14)
    np.testing.assert_allclose(v[1::2], v[1], rtol=1e-12)
    K = s.stiffness.toarray()
    assert np.linalg.norm(K @ B[:, 0]) <= 1e-9 * np.linalg.norm(K, 2)


def test_semicoercivity_witness():
    m, s = _system(4)
    B = rigid_body_basis(m, s.dof_map)
    K = s.stiffness.toarray()
    rng = np.random.default_rng(7)
    for _ in range(100):
        w = rng.standard_normal(K.shape[0])
        w -= B @ (B.T @ w)
        assert w @ K @ w > 0


def test_kernel_dimension_matches_eigenvalues():
    m, s = _system(4)
    ev = np.linalg.eigvalsh(s.stiffness.toarray())
    assert np.sum(np.abs(ev) <= 1e-9 * ev.max()) == 1
    ev_full = np.linalg.eigvalsh(s.full_stiffness.toarray())
    assert np.sum(np.abs(ev_full) <= 1e-9 * ev_full.max()) == 3


def test_partial_wall_still_kills_rotation():
    spec = BoundarySpec(
        {
            "GammaC": (Segment("bottom"),),
            "Gamma3": (Segment("left", 0.0, 0.5),),
            "GammaN_free": (Segment("left", 0.5, 1.0),),
            "Gamma1": (Segment("right"),),
            "Gamma2": (Segment("top"),),
        }
    )
    m, s = _system(4, spec)
    assert rigid_body_basis(m, s.dof_map).shape[1] == 1

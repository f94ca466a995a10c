import numpy as np
import pytest

from oseenlab.errors import InvalidInputError, SolverError
from oseenlab.fields import (
    ExprField,
    QuadratureSet,
    VectorField,
    boundary_l2,
    div,
    friction_trace,
    h1_norm,
    l2_norm,
    normal_trace,
)
from oseenlab.galerkin import (
    OseenParameters,
    assemble_system,
    build_basis,
    energy_report,
    f_threshold,
    lift_boundary_data,
    reconstruct_density,
    solve,
    solve_coefficients,
)
from oseenlab.geometry import disk, ellipse, power_cap


def test_parameters_validation():
    with pytest.raises(InvalidInputError):
        OseenParameters(mu=1.0, nu=-3.0)
    with pytest.raises(InvalidInputError):
        OseenParameters(f=-1.0)
    with pytest.raises(InvalidInputError):
        OseenParameters(gamma=0.0)
    p = OseenParameters(mu=2.0, nu=1.0, gamma=5.0)
    assert p.penalty == 2e4
    assert p.gamma_bar == pytest.approx(1.0)


def test_lift_zero_data(disk_quad):
    p = OseenParameters()
    F = VectorField(ExprField("x1"), ExprField(0))
    lift = lift_boundary_data(disk(), 0.0, p, disk_quad, F, ExprField("x2"))
    assert l2_norm(lift.u0, disk_quad) == 0.0
    assert lift.F_tilde is F
    assert lift.G_tilde.at(disk_quad) == pytest.approx(disk_quad.x2)


def test_lift_reproduces_rigid_rotation(disk_quad):
    # D(u) = 0 for the rotation, and u . tau = 1 on the unit circle, so B = f
    p = OseenParameters(mu=1.0, f=4.0)
    rotation = VectorField(ExprField("-x2"), ExprField("x1"))
    B = friction_trace(rotation, disk_quad, p.mu, p.f)
    np.testing.assert_allclose(B, 4.0, atol=1e-12)
    lift = lift_boundary_data(disk(), B, p, disk_quad)
    assert np.abs(lift.B_tilde).max() < 1e-8  # Tikhonov bias only
    # the friction trace has a kernel in larger lift spaces; with only
    # perp_grad(b) available the rotation is the unique fit
    lift = lift_boundary_data(disk(), B, p, disk_quad, degree=0, reg=0.0)
    assert np.abs(lift.B_tilde).max() < 1e-12
    diff = VectorField(lift.u0[0] - rotation[0], lift.u0[1] - rotation[1])
    assert h1_norm(diff, disk_quad) < 1e-10


def test_basis_n1_disk_is_tangent():
    b = build_basis(disk(), 1)
    phi = b.fields[0]
    x1, x2 = np.array([0.3, -0.5]), np.array([0.2, 0.4])
    v = phi(x1, x2)
    # proportional to (-2 x2, 2 x1)
    ratio = v / np.stack([-2 * x2, 2 * x1])
    assert np.ptp(ratio) < 1e-12
    assert boundary_l2(normal_trace(phi, b.quad), b.quad) < 1e-12


@pytest.mark.parametrize("dom", [disk(), ellipse(), power_cap(2.5)], ids=lambda d: d.name)
def test_basis_gram_orthonormal(dom):
    b = build_basis(dom, 12)
    assert b.N == 12
    np.testing.assert_allclose(b.gram, np.eye(12), atol=1e-9)
    assert np.linalg.eigvalsh(b.gram).min() > 0.5


def test_homogeneous_data_gives_zero():
    sol = solve(ellipse(), 8, OseenParameters(f=10.0))
    assert np.all(sol.coefficients == 0.0)
    assert l2_norm(sol.u, sol.quad) == 0.0
    assert np.all(sol.w.values == 0.0)
    rep = energy_report(sol.u, sol.w, sol.quad)
    assert all(v == 0.0 for v in rep.values())


def test_solve_coefficients_scalar():
    c, diag = solve_coefficients(np.array([[4.0]]), np.array([2.0]))
    assert c[0] == 0.5
    assert diag["coercivity_margin"] == 4.0
    c, _ = solve_coefficients(np.eye(3), np.zeros(3))
    assert np.all(c == 0)


def test_solve_coefficients_errors():
    with pytest.raises(SolverError):
        solve_coefficients(np.array([[-1.0]]), np.array([1.0]))
    with pytest.raises(InvalidInputError):
        solve_coefficients(np.eye(2), np.ones(3))


def test_reconstruct_density(ell_quad):
    q = ell_quad
    u = VectorField(ExprField("x1**2"), ExprField("x1*x2"))
    w = reconstruct_density(q, u, div(u))
    assert np.abs(w.values).max() < 1e-13
    zero = VectorField(ExprField(0), ExprField(0))
    w1 = reconstruct_density(q, zero, ExprField(1))
    np.testing.assert_allclose(w1.values, q.x1 - q.x_in[:, None], atol=1e-13)
    # zero on the inflow arc: the line values extrapolate to 0 at s = 0
    np.testing.assert_allclose(q.line_end_values(w1.values, 0), 0.0, atol=1e-13)


def test_f_threshold_positive_after():
    p = OseenParameters(f=1.0)
    b = build_basis(disk(), 6, p)
    ft = f_threshold(b, p)
    assert np.isfinite(ft)
    M, _ = assemble_system(b, None, ExprField(0), p.replace(f=ft + 1.0))
    assert np.linalg.eigvalsh(0.5 * (M + M.T)).min() > 0


def test_penalty_drives_normal_trace_down():
    p = OseenParameters(f=10.0)
    F = VectorField(ExprField("1 + x2"), ExprField("x1"))
    un = []
    for sigma in (1e2, 1e4):
        b = build_basis(ellipse(), 16, p.replace(sigma=sigma))
        sol = solve(ellipse(), 16, p.replace(sigma=sigma), F=F, G=ExprField("x1"), basis=b)
        un.append(boundary_l2(normal_trace(sol.u, sol.quad), sol.quad))
    assert un[1] <= un[0] / 10

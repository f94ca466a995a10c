import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oseenlab.errors import InvalidInputError
from oseenlab.fields import ExprField, QuadratureSet, VectorField, grad, l2_norm, perp_grad, rot
from oseenlab.galerkin import OseenParameters, build_basis, solve
from oseenlab.geometry import disk, ellipse
from oseenlab.helmholtz import (
    boundary_vorticity_residual,
    decompose,
    harmonic_extension,
    solve_potential,
    solve_stream,
    vorticity,
    weak_vorticity_solve,
)
from oseenlab.verify import manufactured

PTS = (np.array([0.1, -0.3, 0.5]), np.array([0.2, 0.4, -0.6]))


def test_vorticity_examples():
    assert np.allclose(vorticity(VectorField(ExprField("-x2"), ExprField("x1")))(*PTS), 2.0)
    assert np.allclose(vorticity(grad(ExprField("x1**3*x2 + x2**2")))(*PTS), 0.0)
    # rot perp_grad A = -Lap A, so for A = 1 - |x|^2 the vorticity is +4
    assert np.allclose(vorticity(perp_grad(ExprField("1 - x1**2 - x2**2")))(*PTS), 4.0)


def test_stream_zero_and_disk(disk_quad):
    A0 = solve_stream(disk(), ExprField(0), disk_quad)
    assert l2_norm(A0, disk_quad) == 0.0
    A, res = solve_stream(disk(), -4.0, disk_quad, return_residual=True)
    exact = ExprField("1 - x1**2 - x2**2")
    assert l2_norm(A.at(disk_quad) - exact.at(disk_quad), disk_quad) < 1e-12
    assert res < 1e-12


def test_potential_zero_and_compatibility(ell_quad):
    psi = solve_potential(ellipse(), ExprField(0), ell_quad)
    assert l2_norm(psi, ell_quad) == 0.0
    with pytest.raises(InvalidInputError, match="compatibility"):
        solve_potential(ellipse(), ExprField(1), ell_quad)


def test_potential_recovers_neumann_solution(ell_quad):
    # psi = b^2 has zero normal derivative on the ellipse
    b = "(1 - x1**2/4 - x2**2)"
    psi_exact = ExprField(f"{b}**2")
    lap = psi_exact.deriv(0).deriv(0) + psi_exact.deriv(1).deriv(1)
    psi = solve_potential(ellipse(), lap, ell_quad)
    mean = ell_quad.integrate(psi_exact.at(ell_quad)) / ell_quad.area
    assert l2_norm(psi.at(ell_quad) - (psi_exact.at(ell_quad) - mean), ell_quad) < 1e-11


def test_decompose_stream_field(disk_quad):
    u = perp_grad(ExprField("1 - x1**2 - x2**2"))
    parts = decompose(disk(), u, disk_quad)
    assert l2_norm(parts.psi, disk_quad) < 1e-12
    assert l2_norm(parts.A.at(disk_quad) - (1 - disk_quad.x1**2 - disk_quad.x2**2), disk_quad) < 1e-12
    assert parts.defect < 1e-12


def test_decompose_zero(disk_quad):
    z = VectorField(ExprField(0), ExprField(0))
    parts = decompose(disk(), z, disk_quad)
    assert l2_norm(parts.psi, disk_quad) == 0.0 and l2_norm(parts.A, disk_quad) == 0.0


coef = st.lists(st.floats(-2, 2, allow_nan=False), min_size=4, max_size=4)


@given(coef, coef)
@settings(max_examples=10, deadline=None)
def test_decompose_roundtrip_and_linearity(a, c):
    d = ellipse()
    q = QuadratureSet(d, 8)
    b = "(1 - x1**2/4 - x2**2)"

    def tangent(k):
        A = ExprField(f"{b}*({k[0]} + {k[1]}*x1 + {k[2]}*x2)")
        psi = ExprField(f"{b}**2*{k[3]}*(1 + x1)")
        return A, psi

    A1, p1 = tangent(a)
    A2, p2 = tangent(c)
    u1 = perp_grad(A1) + grad(p1)
    u2 = perp_grad(A2) + grad(p2)
    h1, h2 = decompose(d, u1, q), decompose(d, u2, q)
    hs = decompose(d, u1 + u2, q)
    assert h1.defect < 1e-8 and hs.defect < 1e-8
    assert l2_norm(hs.A.at(q) - h1.A.at(q) - h2.A.at(q), q) < 1e-9
    assert l2_norm(hs.psi.at(q) - h1.psi.at(q) - h2.psi.at(q), q) < 1e-9
    assert l2_norm(h1.A.at(q) - A1.at(q), q) < 1e-9


def test_boundary_vorticity_identity(ell_quad):
    p = OseenParameters(f=10.0)
    z = VectorField(ExprField(0), ExprField(0))
    assert boundary_vorticity_residual(z, p, ell_quad) == 0.0
    ex = manufactured(ellipse(), p)
    assert boundary_vorticity_residual(ex.u, p, ell_quad, ex.B(ell_quad)) < 1e-11


def test_harmonic_extension(ell_quad):
    h = ExprField("x1**3 - 3*x1*x2**2 + x2")
    ext, misfit = harmonic_extension(ellipse(), h.on_boundary(ell_quad), ell_quad)
    assert misfit < 1e-12
    assert l2_norm(ext.at(ell_quad) - h.at(ell_quad), ell_quad) < 1e-10


def test_weak_vorticity_zero(ell_quad):
    z = VectorField(ExprField(0), ExprField(0))
    wv = weak_vorticity_solve(ellipse(), z, z, OseenParameters(), ell_quad)
    assert l2_norm(wv.alpha, ell_quad) == 0.0


def test_weak_vorticity_converges_on_galerkin_solutions():
    p = OseenParameters(f=10.0)
    d = ellipse()
    ex = manufactured(d, p)
    defects = []
    for N in (8, 16, 32):
        basis = build_basis(d, N, p)
        q = basis.quad
        sol = solve(d, N, p, F=ex.F, G=ex.G, B=ex.B(q), basis=basis)
        defects.append(weak_vorticity_solve(d, sol.u, ex.F, p, q, B=ex.B(q)).defect)
    assert defects[2] < defects[1] < defects[0]
    assert defects[2] < 1e-6


def test_boundary_vorticity_rotation_not_slip(disk_quad):
    # rot u = 2, u . tau = 1, chi = 1: residual 2 - (2 - 4) = 4 at every boundary point
    p = OseenParameters(mu=1.0, f=4.0)
    u = VectorField(ExprField("-x2"), ExprField("x1"))
    assert boundary_vorticity_residual(u, p, disk_quad) == pytest.approx(4 * np.sqrt(2 * np.pi), rel=1e-12)


def test_boundary_vorticity_residual_shrinks_with_penalty():
    d = ellipse()
    F = VectorField(ExprField("1 + x2"), ExprField("x1*x2"))
    res = []
    for sigma in (1e2, 1e4, 1e6):
        p = OseenParameters(f=10.0, sigma=sigma)
        b = build_basis(d, 24, p)
        sol = solve(d, 24, p, F=F, basis=b)
        res.append(boundary_vorticity_residual(sol.u, p, sol.quad))
    assert res[2] < res[1] < res[0]

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oseenlab.errors import InvalidInputError
from oseenlab.fields import ExprField, NodalField, QuadratureSet, VectorField
from oseenlab.galerkin import OseenParameters, solve
from oseenlab.geometry import disk, ellipse, power_cap
from oseenlab.transport import (
    boundary_trace_wx2,
    compute_H,
    compute_source,
    lambda_field,
    lambda_point,
    membership_check,
    regularity_report,
    solve_transport,
    transport_alpha,
    transport_point,
)
from oseenlab.verify import lambda_fd_check

ZERO = VectorField(ExprField(0), ExprField(0))


def test_compute_H_examples(disk_quad):
    p = OseenParameters(mu=1.0, nu=1.0, gamma=1.0)
    assert np.allclose(compute_H(ZERO, 1.0, p, disk_quad).values, p.gamma)
    # cancellation: div u = gamma w / (2 mu + nu)
    u = VectorField(ExprField("x1"), ExprField(0))
    assert np.allclose(compute_H(u, 3.0, p, disk_quad).values, 0.0)
    assert np.allclose(compute_H(u, 0.0, p, disk_quad).values, -3.0)


def test_compute_source_examples(disk_quad):
    p = OseenParameters(mu=1.0, nu=1.0, gamma=2.0)
    Ht, gbar = compute_source(NodalField(disk_quad, 0.0), 0.0, p)
    assert np.all(Ht.values == 0.0) and gbar == pytest.approx(2.0 / 3.0)
    Ht, _ = compute_source(NodalField(disk_quad, 3.0), -1.0, p)
    assert np.allclose(Ht.values, 0.0)


@pytest.mark.parametrize("dom", [disk(), ellipse()], ids=lambda d: d.name)
@pytest.mark.parametrize("gbar", [0.3, 1.0, 5.0])
def test_transport_closed_forms(dom, gbar):
    q = QuadratureSet(dom, 8)
    xi = q.x1 - q.x_in[:, None]
    assert np.all(solve_transport(q, gbar, 0.0).values == 0.0)
    c = 1.7
    w = solve_transport(q, gbar, c).values
    np.testing.assert_allclose(w, c / gbar * (1 - np.exp(-gbar * xi)), atol=1e-12)
    lin = ExprField(f"{gbar}*x1 + 1")
    w = solve_transport(q, gbar, lin).values
    exact = q.x1 - q.x_in[:, None] * np.exp(-gbar * xi)
    np.testing.assert_allclose(w, exact, atol=1e-12)


def test_transport_matches_brute_force_oracle():
    d = ellipse()
    q = QuadratureSet(d, 8)
    Ht = ExprField("sin(x1)*x2 + x1**2")
    w = solve_transport(q, 0.8, Ht)
    idx = (slice(None, None, 7), slice(None, None, 3))
    ref = transport_point(d, 0.8, Ht, q.x1[idx], q.x2[idx])
    np.testing.assert_allclose(w.values[idx].ravel(), ref.ravel(), atol=1e-10)
    # the transport residual gbar w + w_x1 - Ht vanishes by construction of dx1
    np.testing.assert_allclose(0.8 * w.values + w.dx1, Ht.at(q), atol=1e-13)


def test_transport_rejects_bad_coefficient(disk_quad):
    with pytest.raises(InvalidInputError):
        solve_transport(disk_quad, 0.0, 1.0)


def test_transport_alpha_examples():
    assert np.allclose(transport_alpha(ExprField("x1**2"), 1.0)(0.3, 0.2), 0.0)
    x1 = np.array([0.1, -0.4])
    np.testing.assert_allclose(transport_alpha(ExprField("x2"), 1.0)(x1, 0.0), np.exp(x1))
    assert float(transport_alpha(ExprField("x2**2"), 1.0)(0.0, 0.5)) == pytest.approx(1.0)


def test_boundary_trace_examples():
    d = disk()
    tr, _ = boundary_trace_wx2(d, ExprField(0), np.array([0.3]))
    assert tr[0] == 0.0
    tr, _ = boundary_trace_wx2(ellipse(), ExprField(1), np.array([0.0]))
    assert tr[0] == pytest.approx(0.0, abs=1e-13)
    tr, _ = boundary_trace_wx2(d, ExprField(1), np.array([0.5]))
    assert tr[0] == pytest.approx(-1 / math.sqrt(3), rel=1e-12)
    _, clipped = boundary_trace_wx2(d, ExprField(1), np.array([-1 + 1e-4, 0.0, 1 - 1e-4]))
    assert list(clipped) == [True, False, True]


def test_lambda_examples():
    d = ellipse()
    q = QuadratureSet(d, 8)
    lf = lambda_field(d, q, ExprField(0), 1.0)
    assert np.all(lf.lam.values == 0.0)
    c, gbar = 2.0, 0.7
    lf = lambda_field(d, q, ExprField(c), gbar)
    keep = ~lf.clipped_lines
    xi = q.x1 - q.x_in[:, None]
    exact = -c * q.dx_in[:, None] * np.exp(-gbar * xi)
    np.testing.assert_allclose(lf.lam.values[keep], exact[keep], rtol=1e-11, atol=1e-12)
    assert np.all(lf.lam.values[~keep] == 0.0)


def test_lambda_point_agrees_with_nodal(ell_quad):
    d = ellipse()
    Ht = ExprField("x1*x2 + x2**2")
    lf = lambda_field(d, ell_quad, Ht, 1.3)
    i = ell_quad.n_lines // 3
    ref = lambda_point(d, 1.3, Ht, ell_quad.x1[i], ell_quad.x2[i])
    np.testing.assert_allclose(lf.lam.values[i], ref, rtol=1e-10)


@given(st.floats(0.2, 3.0), st.floats(-1.0, 1.0))
@settings(max_examples=8, deadline=None)
def test_lambda_is_x2_derivative(gbar, a):
    d = disk()
    q = QuadratureSet(d, 6)
    Ht = ExprField(f"1 + {a}*x1*x2 + x2**2")
    res = lambda_fd_check(d, q, Ht, gbar)
    assert res.passed, res.value


def test_membership_examples():
    d = disk()
    z = membership_check(d, ExprField(0))
    assert z.finite and z.value == 0.0
    m = membership_check(d, ExprField(1))
    # integrand 2 x2^2 / sqrt(1 - x2^2), integral pi
    assert m.finite
    assert m.value == pytest.approx(math.pi, rel=1e-10)
    assert not membership_check(power_cap(3.0), ExprField(1)).finite


def test_regularity_report_zero_and_smooth():
    p = OseenParameters(f=10.0)
    zero = solve(ellipse(), 8, p)
    rep = regularity_report(zero, "Admissible")
    assert rep.verdict == "regular"
    assert all(v == 0.0 for k, v in rep.norms.items())
    F = VectorField(ExprField("1 + x2"), ExprField("x1*x2"))
    sol = solve(ellipse(), 16, p, F=F, G=ExprField("x1"))
    rep = regularity_report(sol, "Admissible")
    assert rep.verdict == "regular"
    assert all(math.isfinite(v) for v in rep.norms.values())
    assert rep.transport_gap < 1e-6 * (1 + rep.norms["w_l2"])
    assert regularity_report(sol, "Inadmissible").verdict == "not-regular"
    assert regularity_report(sol, "Unchecked").verdict == "membership-only"

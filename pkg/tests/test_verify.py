import math

import numpy as np
import pytest

from oseenlab.fields import ExprField, NodalField, QuadratureSet, VectorField, perp_grad
from oseenlab.galerkin import CandidateValues, bubble_field, OseenParameters, build_basis, solve
from oseenlab.geometry import disk, ellipse, power_cap
from oseenlab.verify import (
    CheckResult,
    estimate_monitor,
    korn_rayleigh,
    manufactured,
    poincare_constant,
    poincare_v,
    poincare_w,
    ridders_derivative,
    solution_errors,
    strong_residuals,
)


def test_check_result_relations():
    assert CheckResult("a", 1.0, 2.0).passed
    assert not CheckResult("a", 3.0, 2.0).passed
    assert CheckResult("a", 3.0, 2.0, ">").passed
    assert not CheckResult("a", math.nan, 2.0).passed
    rec = CheckResult("a", 1.0, 2.0, context={"n": 3}).record()
    assert rec["pass"] is True and rec["n"] == 3


@pytest.mark.parametrize("dom", [disk(), ellipse(), power_cap(2.5)], ids=lambda d: d.name)
def test_korn_positive_for_large_f(dom):
    p = OseenParameters(f=100.0)
    b = build_basis(dom, 8, p)
    k = korn_rayleigh(b, p)
    assert k.min_quotient > 0
    assert k.threshold_f <= 100.0


def test_korn_negative_control_disk():
    # the rigid rotation is tangent and has D(u) = 0: without friction nothing controls it
    p = OseenParameters(f=0.0)
    b = build_basis(disk(), 4, p)
    k = korn_rayleigh(b, p)
    assert abs(k.quotient_f0) <= 1e-10
    assert k.threshold_f > 0


def test_poincare_single_stream_field(disk_quad):
    phi = perp_grad(bubble_field(disk()))
    vals = CandidateValues([phi], disk_quad)
    # ||phi||^2 = 2 pi, ||grad phi||^2 = 8 pi
    assert poincare_constant(vals, disk_quad).value == pytest.approx(0.5, rel=1e-12)


def test_poincare_v_bounded_and_growing():
    p = OseenParameters(f=1.0)
    cs = [poincare_v(build_basis(disk(), n, p)).value for n in (4, 8, 16)]
    assert all(math.isfinite(c) for c in cs)
    assert cs[0] <= cs[1] + 1e-12 <= cs[2] + 2e-12
    assert cs[-1] < 1.0


def test_poincare_w_random_suite(ell_quad):
    res = poincare_w(ellipse(), ell_quad, n_samples=100, seed=7)
    assert res.passed and res.context["failures"] == 0
    again = poincare_w(ellipse(), ell_quad, n_samples=100, seed=7)
    assert again.value == res.value


def test_poincare_w_zero(disk_quad):
    z = NodalField(disk_quad, 0.0, dx1=0.0)
    from oseenlab.fields import l2_norm

    assert l2_norm(z, disk_quad) <= disk().diameter * l2_norm(z.dx1, disk_quad)


def test_estimate_monitor():
    assert estimate_monitor([0.0, 0.0, 0.0]).passed
    assert estimate_monitor([1.0, 1.2, 1.1]).value == pytest.approx(1.2)
    assert not estimate_monitor([1.0, 2.0, 1.0]).passed
    with pytest.raises(ValueError):
        estimate_monitor([1.0, 1.0])


def test_ridders_exact_derivative():
    x = np.array([0.3, 1.1])
    d, err = ridders_derivative(lambda h: (np.sin(x + h) - np.sin(x - h)) / (2 * h), np.full(2, 0.1))
    np.testing.assert_allclose(d, np.cos(x), atol=1e-12)
    assert np.all(err < 1e-10)


def test_manufactured_exact_solution_has_zero_residuals():
    p = OseenParameters(f=10.0)
    d = ellipse()
    ex = manufactured(d, p)
    q = QuadratureSet(d, 10)
    w = NodalField(q, ex.w.at(q), dx1=ex.w.deriv(0).at(q))
    res = strong_residuals(ex.u, w, ex.F, ex.G, ex.B(q), p, q)
    assert max(res.values()) <= 1e-8, res


def test_zero_data_zero_residuals():
    p = OseenParameters(f=10.0)
    sol = solve(ellipse(), 8, p)
    res = strong_residuals(sol.u, sol.w, None, None, None, p, sol.quad)
    assert max(res.values()) == 0.0


def test_manufactured_requires_quadratic_bubble():
    from oseenlab.errors import InvalidInputError

    with pytest.raises(InvalidInputError):
        manufactured(power_cap(2.5), OseenParameters())


def test_mms_errors_decrease():
    p = OseenParameters(f=10.0)
    d = ellipse()
    ex = manufactured(d, p)
    errs = []
    for N in (8, 16):
        b = build_basis(d, N, p)
        sol = solve(d, N, p, F=ex.F, G=ex.G, B=ex.B(b.quad), basis=b)
        errs.append(solution_errors(sol, ex))
    assert errs[1]["u_h1_error"] < errs[0]["u_h1_error"]
    assert errs[1]["w_l2_error"] < errs[0]["w_l2_error"]

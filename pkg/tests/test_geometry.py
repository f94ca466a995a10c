import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oseenlab.errors import DomainError, InvalidInputError
from oseenlab.geometry import (
    LocalGraph,
    Region,
    classify_boundary_point,
    disk,
    ellipse,
    power_cap,
    shipped_domains,
)


@pytest.mark.parametrize("n, region", [((-1.0, 0.0), Region.INFLOW), ((0.0, 1.0), Region.STAR),
                                       ((0.6, 0.8), Region.OUTFLOW)])
def test_classify_boundary_point(n, region):
    assert classify_boundary_point(n) is region


def test_classify_rejects_non_unit_normal():
    with pytest.raises(InvalidInputError):
        classify_boundary_point((1.0, 1.0))


def test_singularity_points_circle_and_ellipse():
    for dom in (disk(), ellipse(2.0, 1.0)):
        lo, hi = dom.singularity_points
        np.testing.assert_allclose(lo, (0.0, -1.0), atol=1e-12)
        np.testing.assert_allclose(hi, (0.0, 1.0), atol=1e-12)


@given(st.floats(-5, 5), st.floats(-5, 5))
@settings(max_examples=20, deadline=None)
def test_singularity_points_translate(c1, c2):
    lo, hi = disk(1.0, (c1, c2)).singularity_points
    np.testing.assert_allclose(lo, (c1, c2 - 1.0), atol=1e-11)
    np.testing.assert_allclose(hi, (c1, c2 + 1.0), atol=1e-11)


def test_singularity_points_reflect():
    dom = power_cap(2.5, center=(0.3, -0.2))
    ref = dom.reflected()
    for p, r in zip(dom.singularity_points, ref.singularity_points):
        np.testing.assert_allclose(r, (-p[0], p[1]), atol=1e-10)


def test_abscissae_unit_disk():
    d = disk()
    assert d.inflow_abscissa(0.0) == pytest.approx(-1.0, abs=1e-13)
    assert d.outflow_abscissa(0.0) == pytest.approx(1.0, abs=1e-13)
    x2 = np.linspace(-0.95, 0.95, 21)
    np.testing.assert_allclose(d.inflow_abscissa(x2), -np.sqrt(1 - x2**2), atol=1e-12)
    np.testing.assert_allclose(d.inflow_abscissa(x2), -d.outflow_abscissa(x2), atol=1e-12)


def test_abscissae_meet_at_poles():
    d = ellipse(2.0, 1.0)
    lo, hi = d.x2_range
    for y in (hi - 1e-10, lo + 1e-10):
        assert abs(d.inflow_abscissa(y) - d.outflow_abscissa(y)) < 1e-4


def test_abscissa_out_of_range():
    with pytest.raises(DomainError):
        disk().inflow_abscissa(1.5)


@pytest.mark.parametrize("name", list(shipped_domains()))
def test_inflow_outflow_regions_and_derivative(name):
    d = shipped_domains()[name]
    lo, hi = d.x2_range
    x2 = np.linspace(lo, hi, 41)[5:-5]
    for arc, region, finder in (("inflow", Region.INFLOW, d.inflow_abscissa),
                                ("outflow", Region.OUTFLOW, d.outflow_abscissa)):
        t0, t1 = d.arcs[arc]
        t = np.linspace(t0, t1, 43)[3:-3] % 1.0
        pos = d.position(t)
        # the abscissa at each height is the boundary point on that arc
        np.testing.assert_allclose(finder(pos[1]), pos[0], atol=1e-10)
        assert all(classify_boundary_point(n) is region for n in d.normal(t).T)
    # implicit derivative versus central differences
    h = 1e-5
    _, der = d.inflow_abscissa(x2, derivative=True)
    fd = (d.inflow_abscissa(x2 + h) - d.inflow_abscissa(x2 - h)) / (2 * h)
    np.testing.assert_allclose(der, fd, rtol=1e-6, atol=1e-9)


@pytest.mark.parametrize("R", [0.5, 1.0, 3.0])
def test_circle_curvature(R):
    d = disk(R)
    t = np.linspace(0, 1, 257)
    np.testing.assert_allclose(d.curvature(t), 1.0 / R, atol=1e-10)


def test_ellipse_curvature_at_vertex():
    a, b = 2.0, 1.0
    e = ellipse(a, b)
    # the parametrization starts at the lower pole; the vertex (a, 0) sits a quarter turn later
    np.testing.assert_allclose(e.position(0.25), (a, 0.0), atol=1e-14)
    assert float(e.curvature(0.25)) == pytest.approx(a / b**2, rel=1e-12)


@pytest.mark.parametrize("name", list(shipped_domains()))
def test_convexity(name):
    d = shipped_domains()[name]
    t = np.linspace(0, 1, 2001, endpoint=False)
    chi = d.curvature(t)
    # flat caps have zero curvature at the poles, positive elsewhere
    assert chi.min() >= -1e-12
    lo, hi = d.singularity_params
    away = np.minimum(np.abs(t - lo), np.abs(t - hi)) > 0.05
    assert np.all(chi[away] > 0)


def test_local_graph_disk():
    g = disk().local_graph("lower")
    x = np.linspace(-0.5, 0.5, 11)
    np.testing.assert_allclose(g(x), 1 - np.sqrt(1 - x**2), atol=1e-13)
    assert g(0.0) == 0.0


@pytest.mark.parametrize("name", list(shipped_domains()))
def test_local_graph_origin(name):
    d = shipped_domains()[name]
    for which in ("lower", "upper"):
        g = d.local_graph(which)
        assert abs(float(g(0.0))) < 1e-14
        assert np.all(g(np.array([-0.5, 0.5]) * g.halfwidth) > 0)


def test_local_graph_power_cap_chart():
    q = 2.5
    g = power_cap(q).local_graph("lower")
    x = np.geomspace(1e-8, 1e-3, 6)
    ratio = g(x) / x**q
    assert np.ptp(ratio) / ratio.mean() < 1e-9


def test_local_graph_model_function():
    q = 2.7
    g = LocalGraph((0.0, 0.0), "lower", 1.0, lambda x: np.abs(x) ** q,
                   lambda x: q * np.sign(x) * np.abs(x) ** (q - 1), lambda x: q * np.log(np.abs(x)))
    x = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(g(x), np.abs(x) ** q)
    np.testing.assert_allclose(g.inverse(np.array([0.25]), +1), 0.25 ** (1 / q), rtol=1e-12)
    with pytest.raises(DomainError):
        g(1.5)


def test_translation_preserves_area(disk_quad):
    d = disk().translated((1.5, -0.5))
    from oseenlab.fields import QuadratureSet

    assert QuadratureSet(d, 8).area == pytest.approx(math.pi, rel=1e-10)
    assert disk_quad.area == pytest.approx(math.pi, rel=1e-10)

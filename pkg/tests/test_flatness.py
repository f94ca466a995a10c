import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oseenlab.errors import DomainError, InvalidInputError
from oseenlab.flatness import (
    Verdict,
    beta,
    classify_admissibility,
    g_limit,
    sobolev_half_check,
    war1_integral,
    witness_epsilon,
)
from oseenlab.geometry import LocalGraph, disk, ellipse, power_cap
from oseenlab.tails import CONVERGED, DIVERGED, assess_tail


def model_graph(p, c=1.0):
    return LocalGraph((0.0, 0.0), "lower", 0.5, lambda x: c * np.abs(x) ** p,
                      lambda x: c * p * np.sign(x) * np.abs(x) ** (p - 1),
                      lambda x: math.log(c) + p * np.log(np.abs(x)))


@pytest.mark.parametrize("p", [2.0, 2.5, 3.0])
def test_g_limit_power_law(p):
    g = model_graph(p)
    assert g_limit(g, p - 0.2) == 0.0
    assert g_limit(g, p) == pytest.approx(1.0, rel=1e-10)
    assert g_limit(g, min(p + 0.2, 4.0)) == math.inf


def test_g_limit_disk():
    g = disk().local_graph("lower")
    assert g_limit(g, 2.0) == pytest.approx(0.5, rel=1e-8)
    assert g_limit(g, 2.5) == math.inf


@given(st.floats(0.05, 20.0), st.sampled_from([2.0, 2.4, 2.8]))
@settings(max_examples=15, deadline=None)
def test_g_limit_scaling(c, p):
    base, scaled = model_graph(p), model_graph(p, c)
    assert g_limit(scaled, p) == pytest.approx(c * g_limit(base, p), rel=1e-9)
    assert g_limit(scaled, p + 0.3) == math.inf
    assert g_limit(scaled, p - 0.3) == 0.0


def test_g_limit_rejects_bad_q():
    with pytest.raises(InvalidInputError):
        g_limit(model_graph(2.0), 0.5)


def test_beta_disk():
    x2 = np.linspace(-0.9, 0.9, 19)
    np.testing.assert_allclose(beta(disk(), x2), 2 * np.abs(x2), atol=1e-11)


def test_beta_zero_at_widest_section():
    assert beta(ellipse(2.0, 1.0), 0.0)[0] == pytest.approx(0.0, abs=1e-12)


def test_beta_rejects_poles():
    with pytest.raises(DomainError):
        beta(disk(), 1.0)


def test_beta_power_cap_asymptotics():
    q = 2.5
    d = power_cap(q)
    g = d.local_graph("lower")
    lo = d.x2_range[0]
    # chart is c |x1|^q; inverting gives beta ~ (2/q) c^{-2/q} y^{2/q - 1}
    c = float(g(np.array([1e-6]))[0] / 1e-6**q)
    y = np.array([1e-10, 1e-12])
    ref = (2.0 / q) * c ** (-2.0 / q) * y ** (2.0 / q - 1.0)
    np.testing.assert_allclose(beta(d, lo + y), ref, rtol=1e-3)


def test_war1_disk_finite():
    r = war1_integral(disk(), 0.5)
    assert r.finite and not r.diverged
    assert math.isfinite(r.value) and r.value > 0


@pytest.mark.parametrize("eps", [0.0, 0.5])
def test_war1_q3_diverges(eps):
    r = war1_integral(power_cap(3.0), eps)
    assert r.diverged and r.status == DIVERGED


def test_war1_q25_finite_below_threshold():
    # q = 2.5 is admissible for eps = 0.5 since 2.5 < (3 + 1)/(1.5)
    assert war1_integral(power_cap(2.5), 0.5).finite


def test_war1_monotone_in_eps():
    d = power_cap(2.5)
    assert war1_integral(d, 0.5).finite
    assert war1_integral(d, 0.25).finite
    # 2.5 < 4.8/1.9: barely integrable, tail ratio close to 2^-0.02
    near = war1_integral(d, 0.9)
    assert near.finite and near.ratios[0] == pytest.approx(2 ** -0.02, abs=1e-3)
    assert war1_integral(d, 1.5).diverged  # 2.5 > 6/2.5


def test_witness_epsilon():
    assert witness_epsilon(2.5) == pytest.approx(0.5)
    assert witness_epsilon(2.0) == 2.0
    q = 2.9
    eps = witness_epsilon(q)
    assert q < (3 + 2 * eps) / (1 + eps)


@pytest.mark.parametrize("q, member", [(3.0, True), (2.5, True), (1.5, False)])
def test_sobolev_half_check(q, member):
    assert sobolev_half_check(q)["member"] is member


def test_sobolev_edge_flag():
    assert sobolev_half_check(2.0)["edge"]


def test_assess_tail():
    k = np.arange(400)
    assert assess_tail(0.5**k).status == CONVERGED
    assert assess_tail(np.ones(400)).status == DIVERGED


def test_classify_disk_and_translation():
    a = classify_admissibility(disk())
    b = classify_admissibility(disk(1.0, (3.0, -2.0)))
    assert a.verdict is Verdict.ADMISSIBLE and b.verdict is Verdict.ADMISSIBLE
    assert a.witness == b.witness
    assert a.witness[0] < 3
    text = a.to_text()
    assert "verdict = Admissible" in text

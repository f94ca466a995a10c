"""Boundary flatness at the singularity points and the admissibility verdict.

The regularization works when the inflow abscissa does not steepen too fast
near the two points where n1 = 0.  In chart form: the boundary must be less
flat than |x1|^q for some q < 3, which makes the integral

    int beta(x2)^(1+eps) |x1_in'(x2)| dx2,   beta = (x1_out - x1_in) |x1_in'|

finite for some eps > 0.  This module estimates the flatness limits
g_q = lim l(x1)/|x1|^q, evaluates that integral with tail extrapolation,
and combines both into a verdict.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import DomainError, InvalidInputError
from .geometry import ConvexDomain, LocalGraph
from .tails import CONVERGED, DIVERGED, INDETERMINATE, assess_tail, shell_contributions

Q_GRID = (2.0, 2.25, 2.5, 2.75, 2.9)
EPS_GRID = (0.1, 0.5, 1.0)
CAP_HIGH = 1e8
CAP_LOW = 1e-8
INDET = None  # g_limit value when no decision is possible


class Verdict(enum.Enum):
    ADMISSIBLE = "Admissible"
    INADMISSIBLE = "Inadmissible"
    INDETERMINATE = "Indeterminate"


# --------------------------------------------------------------------------
# flatness limits


def _log_ratio_sequence(graph: LocalGraph, q: float, k_max: int):
    k = np.arange(4, k_max + 1)
    x = graph.halfwidth * np.exp2(-k.astype(float))
    lx = np.log(x)
    # the smaller side bounds the limit from below
    ll = np.minimum(graph.log_value(x), graph.log_value(-x))
    return k, ll - q * lx, ll, lx


def _decide_sequence(k, L):
    """Classify a sequence of logarithms L_k: returns +inf, 0.0, a finite value, or None."""
    hi, lo = math.log(CAP_HIGH), math.log(CAP_LOW)
    if not np.all(np.isfinite(L)):
        if np.all(L[np.isfinite(L)] > hi) or (L[-1] == math.inf):
            return math.inf
        if L[-1] == -math.inf:
            return 0.0
        return INDET
    D = np.diff(L)
    noise = 1e-11 * (1.0 + np.abs(L).max())
    n_tail = min(200, len(D) // 2)
    tail = D[-n_tail:]
    kt = k[-n_tail:]

    def capped(v):
        if v > hi:
            return math.inf
        if v < lo:
            return 0.0
        return math.exp(v)

    if np.all(np.abs(tail) <= noise):
        return capped(L[-1])
    up = np.all(tail > -noise)
    down = np.all(tail < noise)
    if up and L[-1] > hi and tail[-1] > noise:
        return math.inf
    if down and L[-1] < lo and tail[-1] < -noise:
        return 0.0
    if not (up or down):
        return INDET
    mag = np.abs(tail)
    if np.any(mag <= noise):
        # increments already at rounding level: the sequence has settled
        return capped(L[-1])
    half = len(mag) // 2
    r = (mag[-1] / mag[-1 - half]) ** (1.0 / half)
    if r < 0.95:
        # geometric decay: sum the remaining increments
        return capped(L[-1] + tail[-1] * r / (1.0 - r))
    slope = np.polyfit(np.log(kt), np.log(mag), 1)[0]
    if slope > -1.05:
        # increments ~ 1/k or slower: the logarithm keeps drifting without bound
        return math.inf if up else 0.0
    return INDET


def g_limit(graph: LocalGraph, q: float, k_max: int = 1000):
    """Estimate lim_{x1 -> 0} l(x1) / |x1|^q along x1 = 2^-k * halfwidth.

    Returns math.inf, 0.0, a finite positive float, or None when the tail
    behaviour does not support a decision.
    """
    if not 1.0 < q <= 4.0:
        raise InvalidInputError("q must lie in (1, 4]")
    k, L, _, _ = _log_ratio_sequence(graph, q, k_max)
    return _decide_sequence(k, L)


def critical_exponent(graph: LocalGraph, k_max: int = 1000, span: int = 50) -> float:
    """Local log-log slope of the chart at the deepest sampled scale."""
    k, _, ll, lx = _log_ratio_sequence(graph, 2.0, k_max)
    return float((ll[-1] - ll[-1 - span]) / (lx[-1] - lx[-1 - span]))


def witness_epsilon(q: float) -> float:
    """Midpoint of the admissible eps interval for flatness exponent q < 3."""
    if q <= 2.0:
        return 2.0
    eps = (3.0 - q) / (2.0 * (q - 2.0))
    return float(min(max(eps, 1e-12), 2.0))


# --------------------------------------------------------------------------
# beta and the integrability condition


def beta(domain: ConvexDomain, x2):
    """(x1_out - x1_in) * |x1_in'| at heights strictly between the poles."""
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    lo, hi = domain.x2_range
    if np.any(x2 <= lo) or np.any(x2 >= hi):
        raise DomainError("beta is defined only strictly between the singularity points")
    x_in, d_in = domain.inflow_abscissa(x2, derivative=True)
    x_out = domain.outflow_abscissa(x2)
    return (x_out - x_in) * np.abs(d_in)


def _chart_integrand(graph: LocalGraph, eps: float):
    def f(y):
        xl = graph.inverse(y, -1)
        xr = graph.inverse(y, +1)
        d = 1.0 / np.abs(graph.slope(xl))
        return ((xr - xl) * d) ** (1.0 + eps) * d

    return f


@dataclass
class War1Result:
    eps: float
    value: float
    diverged: bool
    status: str
    ratios: tuple

    @property
    def finite(self) -> bool:
        return self.status == CONVERGED


def war1_integral(domain: ConvexDomain, eps: float, n_shells: int = 400, y_frac: float = 0.5) -> War1Result:
    """Integral of beta^(1+eps) |x1_in'| over (x2_lower, x2_upper).

    Away from the poles: adaptive quadrature.  Near each pole: dyadic shells
    in the chart offset, with the tail ratio deciding convergence.
    """
    if eps < 0:
        raise InvalidInputError("eps must be nonnegative")
    lo, hi = domain.x2_range
    graphs = (domain.local_graph("lower"), domain.local_graph("upper"))
    y0 = [y_frac * g.height for g in graphs]
    a, b = lo + y0[0], hi - y0[1]

    def mid(x2):
        x_in, d_in = domain.inflow_abscissa(np.array([x2]), derivative=True)
        x_out = domain.outflow_abscissa(np.array([x2]))
        d = abs(float(d_in[0]))
        return (float(x_out[0] - x_in[0]) * d) ** (1.0 + eps) * d

    middle, _ = integrate.quad(mid, a, b, limit=200, epsabs=1e-13, epsrel=1e-11)
    total = middle
    statuses, ratios = [], []
    for g, y in zip(graphs, y0):
        contribs = shell_contributions(_chart_integrand(g, eps), y, n_shells=n_shells)
        res = assess_tail(contribs)
        statuses.append(res.status)
        ratios.append(res.ratio)
        total += res.value
    if DIVERGED in statuses:
        status = DIVERGED
    elif INDETERMINATE in statuses:
        status = INDETERMINATE
    else:
        status = CONVERGED
    value = total if status == CONVERGED else (math.inf if status == DIVERGED else math.nan)
    return War1Result(float(eps), float(value), status == DIVERGED, status, tuple(ratios))


def h_diagnostic(graph: LocalGraph, n: int = 12, y0: float | None = None):
    """Samples of h(y) = y^(1/3) / |x1_in(y)| at offsets y0 * 16^-j.

    h grows without bound exactly when the chart is flatter than |x1|^3
    in the logarithmic sense.
    """
    y0 = 0.5 * graph.height if y0 is None else y0
    y = y0 * 16.0 ** -np.arange(n, dtype=float)
    return y, y ** (1.0 / 3.0) / np.abs(graph.inverse(y, -1))


# --------------------------------------------------------------------------
# Sobolev membership of |x|^q


def sobolev_half_check(q: float, n_shells: int = 80) -> dict:
    """Finiteness of int_0^1 int_0^1 |(x+h)^r - x^r|^2 / h^2 dh dx, r = q - 2."""
    if q <= 0:
        raise InvalidInputError("q must be positive")
    r = q - 2.0

    def inner(x):
        f = lambda h: ((x + h) ** r - x**r) ** 2 / h**2 if h > 0 else (r * x ** (r - 1.0)) ** 2
        pts = [min(x, 0.5)] if x < 1.0 else None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            v, _ = integrate.quad(f, 0.0, 1.0, points=pts, limit=200, epsabs=0.0, epsrel=1e-10)
        return v

    vinner = np.vectorize(inner)
    contribs = shell_contributions(vinner, 1.0, n_shells=n_shells, n_nodes=8)
    res = assess_tail(contribs, window=10)
    return {
        "q": float(q),
        "member": res.status == CONVERGED,
        "status": res.status,
        "value": res.value,
        "ratio": res.ratio,
        "edge": abs(r) < 1e-12,
    }


# --------------------------------------------------------------------------
# report


@dataclass
class PointRecord:
    which: str
    g_samples: dict
    q_hat: float
    witness_q: float
    g_witness: object
    g3: object
    h_samples: tuple = ()


@dataclass
class FlatnessReport:
    domain: str
    points: list
    verdict: Verdict
    witness: tuple | None
    war1: list = field(default_factory=list)
    sobolev_member: bool | None = None
    diagnostics: list = field(default_factory=list)

    def to_text(self) -> str:
        out = [f"domain = {self.domain}", f"verdict = {self.verdict.value}"]
        if self.witness:
            out.append(f"witness_q = {self.witness[0]:.6g}")
            out.append(f"witness_eps = {self.witness[1]:.6g}")
        out.append(f"sobolev_half_member = {self.sobolev_member}")
        for p in self.points:
            out.append(f"[{p.which}]")
            for q, g in p.g_samples.items():
                out.append(f"g_{q:g} = {_fmt(g)}")
            out.append(f"g_3 = {_fmt(p.g3)}")
            out.append(f"q_hat = {p.q_hat:.6g}")
            out.append(f"g_witness({p.witness_q:.6g}) = {_fmt(p.g_witness)}")
            if p.h_samples:
                out.append("h = " + ", ".join(f"{v:.6g}" for v in p.h_samples))
        for w in self.war1:
            out.append(f"war1(eps={w.eps:g}) = {w.value:.12g} status={w.status} ratios={','.join(f'{r:.6f}' for r in w.ratios)}")
        for d in self.diagnostics:
            out.append(f"note = {d}")
        return "\n".join(out) + "\n"


def _fmt(g):
    if g is None:
        return "indeterminate"
    if g == math.inf:
        return "inf"
    return f"{g:.10g}"


def classify_admissibility(domain: ConvexDomain, n_shells: int = 400) -> FlatnessReport:
    points = []
    for which in ("lower", "upper"):
        g = domain.local_graph(which)
        samples = {q: g_limit(g, q) for q in Q_GRID}
        qh = critical_exponent(g)
        wq = min(0.5 * (qh + 3.0), 2.999) if qh < 3.0 else 3.0
        gw = g_limit(g, wq)
        g3 = g_limit(g, 3.0)
        points.append(PointRecord(which, samples, qh, wq, gw, g3))

    diagnostics = []
    verdict = Verdict.INDETERMINATE
    witness = None

    # smallest candidate q < 3 with g_q = inf at both points
    cache = [{**p.g_samples, p.witness_q: p.g_witness} for p in points]

    def g_at(i, q):
        if q not in cache[i]:
            cache[i][q] = g_limit(domain.local_graph(points[i].which), q)
        return cache[i][q]

    cands = sorted(set(Q_GRID) | {p.witness_q for p in points if p.witness_q < 3.0})
    for q in cands:
        if all(g_at(i, q) == math.inf for i in range(len(points))):
            witness = (q, witness_epsilon(q))
            verdict = Verdict.ADMISSIBLE
            break

    if verdict is Verdict.INDETERMINATE:
        if any(p.g3 is not None and p.g3 < math.inf for p in points):
            verdict = Verdict.INADMISSIBLE
            diagnostics.append("g_3 finite at a singularity point")
        elif any(all(v == 0.0 for v in p.g_samples.values()) and p.g3 == math.inf for p in points):
            verdict = Verdict.INADMISSIBLE
            diagnostics.append("g_q = 0 for all grid q < 3 while g_3 = inf (logarithmic flatness)")
            for p in points:
                _, h = h_diagnostic(domain.local_graph(p.which))
                p.h_samples = tuple(float(v) for v in h)

    # cross-check against direct quadrature
    war = []
    if verdict is Verdict.ADMISSIBLE:
        w = war1_integral(domain, witness[1], n_shells=n_shells)
        war.append(w)
        if not w.finite:
            diagnostics.append(f"war1 at witness eps={witness[1]:g} is {w.status}; expected finite")
            verdict = Verdict.INDETERMINATE
    elif verdict is Verdict.INADMISSIBLE:
        for eps in EPS_GRID:
            w = war1_integral(domain, eps, n_shells=n_shells)
            war.append(w)
        bad = [w for w in war if not w.diverged]
        if bad:
            diagnostics.append("war1 not divergent at eps=" + ",".join(f"{w.eps:g}" for w in bad))
            verdict = Verdict.INDETERMINATE

    qmin = min(p.q_hat for p in points)
    member = sobolev_half_check(max(qmin, 1e-3))["member"] if qmin > 0 else None
    return FlatnessReport(domain.name, points, verdict, witness, war, member, diagnostics)

"""Density regularity by characteristics.

With H = -(2mu+nu) div u + gamma w, the continuity equation becomes the
transport problem  gbar w + w_x1 = Ht  along horizontal lines, with
gbar = gamma/(2mu+nu), Ht = H/(2mu+nu) + G~ and w = 0 on the inflow arc.
Differentiating in x2 gives the same operator for lam = w_x2 with source
d(Ht)/dx2 and inflow data -x1_in'(x2) Ht(x1_in(x2), x2).

Line integrals are product rules: the source is interpolated along each
line and integrated exactly against e^{-gbar (x1 - s)}, s <= x1, which
neither overflows nor loses accuracy when gbar times the width is large.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy import integrate

from .errors import InvalidInputError
from .expr import X1
from .fields import (
    ExprField,
    Field,
    NodalField,
    PolyField,
    QuadratureSet,
    VectorField,
    div,
    h1_norm,
    l2_norm,
    project,
)
from .galerkin import GalerkinSolution, OseenParameters
from .geometry import ConvexDomain
from .tails import CONVERGED, DIVERGED, INDETERMINATE, assess_tail, shell_contributions

DELTA_CLIP = 1e-3


def _nodal(v, quad):
    if isinstance(v, Field):
        return np.asarray(v.at(quad), dtype=float)
    return np.asarray(np.broadcast_to(v, quad.shape), dtype=float)


def compute_H(u: VectorField, w, params: OseenParameters, quad: QuadratureSet) -> NodalField:
    """H = -(2mu+nu) div u + gamma w at the interior nodes."""
    lam = 2.0 * params.mu + params.nu
    return NodalField(quad, -lam * div(u).at(quad) + params.gamma * _nodal(w, quad))


def compute_source(H, G_tilde, params: OseenParameters):
    """(Ht, gbar) with Ht = H/(2mu+nu) + G~ and gbar = gamma/(2mu+nu)."""
    lam = 2.0 * params.mu + params.nu
    if isinstance(H, NodalField) or isinstance(G_tilde, NodalField):
        quad = H.quad if isinstance(H, NodalField) else G_tilde.quad
        Ht = NodalField(quad, _nodal(H, quad) / lam + _nodal(G_tilde, quad))
    else:
        Ht = H * (1.0 / lam) + G_tilde
    return Ht, params.gamma / lam


def _check_gbar(gbar):
    if not gbar > 0.0 or not math.isfinite(gbar):
        raise InvalidInputError(f"transport coefficient must be positive, got {gbar}")


def _line_weights(quad: QuadratureSet, gbar: float, n_sub: int = 64):
    """P[l, i, k] = int_{x1_in}^{x1_i} e^{-gbar (x1_i - s)} ell_k(s) ds on line l.

    ell_k is the Lagrange polynomial of node k in the line variable, so
    P[l] @ src is exact for sources polynomial along the line of degree
    below n_s, however large gbar times the line width is.
    """
    L = np.polynomial.legendre
    ns = quad.n_s
    t, wt = L.leggauss(n_sub)
    Vinv = np.linalg.inv(L.legvander(2.0 * quad.s - 1.0, ns - 1))
    # sub-nodes on [0, s_i] for every target node i
    sub = 0.5 * quad.s[:, None] * (t[None, :] + 1.0)  # (ns, n_sub)
    lag = (L.legvander(2.0 * sub - 1.0, ns - 1) @ Vinv)  # (ns, n_sub, ns)
    dist = quad.s[:, None] - sub  # (ns, n_sub), >= 0
    kappa = gbar * quad.width  # (nl,)
    ker = np.exp(-kappa[:, None, None] * dist[None])  # (nl, ns, n_sub)
    wsub = 0.5 * quad.s[:, None] * wt[None, :]
    return np.einsum("lij,ijk->lik", ker * wsub[None], lag) * quad.width[:, None, None]


def _line_solve(quad: QuadratureSet, gbar: float, src, inflow=None):
    """Nodal solution of gbar v + v_x1 = src with v = inflow on each line's inflow end."""
    P = _line_weights(quad, gbar)
    v = np.einsum("lik,lk->li", P, np.asarray(src, dtype=float))
    if inflow is not None:
        xi = quad.x1 - quad.x_in[:, None]  # distance from the inflow end
        v = v + np.exp(-gbar * xi) * np.asarray(inflow, dtype=float)[:, None]
    return v


def solve_transport(quad: QuadratureSet, gbar: float, Ht) -> NodalField:
    """w = int_{x1_in}^{x1} e^{-gbar (x1 - s)} Ht(s, x2) ds at the interior nodes."""
    _check_gbar(gbar)
    src = _nodal(Ht, quad)
    w = _line_solve(quad, gbar, src)
    return NodalField(quad, w, dx1=src - gbar * w)


def transport_point(domain: ConvexDomain, gbar: float, Ht: Field, x1, x2, n_nodes: int = 48):
    """Pointwise transport solution by Gauss-Legendre on [x1_in(x2), x1].

    Independent of the quadrature set; used as a brute-force oracle and for
    finite differences off the nodes.
    """
    _check_gbar(gbar)
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    x1, x2 = np.broadcast_arrays(x1, x2)
    shape = x1.shape
    x1, x2 = x1.ravel(), x2.ravel()
    xin = domain.inflow_abscissa(x2)
    t, wt = np.polynomial.legendre.leggauss(n_nodes)
    half = 0.5 * (x1 - xin)
    s = xin[:, None] + half[:, None] * (t[None, :] + 1.0)
    vals = Ht(s, np.broadcast_to(x2[:, None], s.shape))
    out = np.sum(wt[None, :] * np.exp(-gbar * (x1[:, None] - s)) * vals, axis=1) * half
    return out.reshape(shape)


def transport_alpha(Ht: Field, gbar: float) -> Field:
    """alpha_T = e^{gbar x1} d(Ht)/dx2."""
    return ExprField(sp.exp(gbar * X1)) * Ht.deriv(1)


def boundary_trace_wx2(domain: ConvexDomain, Ht: Field, x2, delta_clip: float = DELTA_CLIP):
    """-x1_in'(x2) Ht(x1_in(x2), x2) on the inflow arc.

    Returns (trace, clipped).  Heights within delta_clip of the singularity
    heights x2_lower, x2_upper are clipped (trace set to nan): there
    x1_in' blows up and w_x2 varies on the scale of the distance itself.
    """
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    lo, hi = domain.x2_range
    keep = (x2 - lo >= delta_clip) & (hi - x2 >= delta_clip) & (x2 > lo) & (x2 < hi)
    trace = np.full(x2.shape, np.nan)
    if np.any(keep):
        xin, dxin = domain.inflow_abscissa(x2[keep], derivative=True)
        trace[keep] = -dxin * np.asarray(Ht(xin, x2[keep]), dtype=float)
    return trace, ~keep


@dataclass
class LambdaField:
    lam: NodalField
    clipped_lines: np.ndarray  # boolean per quadrature line
    clipped_measure: float  # area carried by the clipped lines

    @property
    def mask(self):
        return np.broadcast_to(~self.clipped_lines[:, None], self.lam.values.shape)


def lambda_field(domain: ConvexDomain, quad: QuadratureSet, Ht: Field, gbar: float,
                 delta_clip: float = DELTA_CLIP) -> LambdaField:
    """lam = e^{-gbar x1}[e^{gbar x1_in} trace(x2) + int_{x1_in}^{x1} alpha_T ds] at the nodes.

    Computed in the equivalent relative form: the line solve of
    gbar lam + lam_x1 = d(Ht)/dx2 started from the boundary trace.
    Clipped lines carry zeros and are excluded from norms.
    """
    _check_gbar(gbar)
    trace, clipped = boundary_trace_wx2(domain, Ht, quad.x2_lines, delta_clip)
    src = Ht.deriv(1).at(quad)
    lam = _line_solve(quad, gbar, src, np.where(clipped, 0.0, trace))
    lam[clipped] = 0.0
    dx1 = np.where(clipped[:, None], 0.0, src - gbar * lam)
    measure = float(quad.w[clipped].sum())
    return LambdaField(NodalField(quad, lam, dx1=dx1), clipped, measure)


def lambda_point(domain: ConvexDomain, gbar: float, Ht: Field, x1, x2, n_nodes: int = 48):
    """Pointwise lam from the displayed formula (for oracles off the nodes)."""
    _check_gbar(gbar)
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    x1, x2 = np.broadcast_arrays(x1, x2)
    xin = domain.inflow_abscissa(x2)
    trace, _ = boundary_trace_wx2(domain, Ht, x2, delta_clip=0.0)
    return np.exp(-gbar * (x1 - xin)) * trace + transport_point(domain, gbar, Ht.deriv(1), x1, x2, n_nodes)


# --------------------------------------------------------------------------
# integrability of the boundary trace


@dataclass
class MembershipResult:
    value: float
    finite: bool
    status: str
    ratios: tuple


def membership_check(domain: ConvexDomain, Ht: Field, n_shells: int = 400, y_frac: float = 0.5) -> MembershipResult:
    """int beta(x2) |x1_in'(x2)| Ht(x1_in(x2), x2)^2 dx2 with pole-tail detection."""
    lo, hi = domain.x2_range
    graphs = (domain.local_graph("lower"), domain.local_graph("upper"))
    y0 = [y_frac * g.height for g in graphs]
    a, b = lo + y0[0], hi - y0[1]

    def mid(x2):
        x_in, d_in = domain.inflow_abscissa(np.array([x2]), derivative=True)
        x_out = domain.outflow_abscissa(np.array([x2]))
        d = abs(float(d_in[0]))
        h = float(np.asarray(Ht(x_in, np.array([x2])), dtype=float).ravel()[0])
        return float(x_out[0] - x_in[0]) * d * d * h * h

    middle, _ = integrate.quad(mid, a, b, limit=200, epsabs=1e-13, epsrel=1e-11)
    total = middle
    statuses, ratios = [], []
    for g, y in zip(graphs, y0):
        cx, cy = g.center
        sgn = 1.0 if g.side == "lower" else -1.0

        def f(yy, g=g, cx=cx, cy=cy, sgn=sgn):
            xl = g.inverse(yy, -1)
            xr = g.inverse(yy, +1)
            d = 1.0 / np.abs(g.slope(xl))
            h = np.asarray(Ht(cx + xl, cy + sgn * yy), dtype=float)
            return (xr - xl) * d * d * h * h

        res = assess_tail(shell_contributions(f, y, n_shells=n_shells))
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
    return MembershipResult(float(value), status == CONVERGED, status, tuple(ratios))


# --------------------------------------------------------------------------
# report


@dataclass
class RegularityReport:
    H: NodalField
    Ht: PolyField
    gbar: float
    lam: LambdaField
    membership: MembershipResult
    flatness_verdict: str
    norms: dict = field(default_factory=dict)
    transport_gap: float = 0.0  # ||w_transport - w_galerkin||_L2
    w_transport: NodalField | None = None

    @property
    def regular(self) -> bool:
        return self.membership.finite and self.flatness_verdict == "Admissible"

    @property
    def verdict(self) -> str:
        if self.flatness_verdict == "Unchecked":
            return "membership-only" if self.membership.finite else "not-regular"
        return "regular" if self.regular else "not-regular"

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "flatness": self.flatness_verdict,
            "membership_status": self.membership.status,
            "membership_value": self.membership.value,
            "gbar": self.gbar,
            "clipped_measure": self.lam.clipped_measure,
            "transport_gap": self.transport_gap,
        }
        out.update(self.norms)
        return out


def h2_seminorm(u: VectorField, quad: QuadratureSet) -> float:
    tot = 0.0
    for c in u:
        for a, b in ((0, 0), (0, 1), (1, 1)):
            d = c.deriv(a).deriv(b).at(quad)
            tot += (2.0 if a != b else 1.0) * quad.integrate(d * d)
    return math.sqrt(tot)


def basis_degree(solution: GalerkinSolution) -> int:
    return max(sum(f[k].degree) for f in solution.basis.fields for k in (0, 1))


def regularity_report(solution: GalerkinSolution, flatness_verdict: str, degree: int | None = None,
                      delta_clip: float = DELTA_CLIP) -> RegularityReport:
    """H, Ht, lam, membership and norms for a solved problem.

    Ht is projected onto polynomials (default degree: the basis degree plus
    two) so that its x2-derivative exists in coefficient form.
    """
    quad = solution.quad
    params = solution.params
    domain = quad.domain
    H = compute_H(solution.u, solution.w, params, quad)
    G = solution.G if solution.G is not None else 0.0
    Ht_nodal, gbar = compute_source(H, NodalField(quad, _nodal(G, quad)), params)
    deg = degree if degree is not None else basis_degree(solution) + 2
    Ht = project(Ht_nodal, quad, deg)
    w_tr = solve_transport(quad, gbar, Ht_nodal)
    gap = l2_norm(w_tr.values - solution.w.values, quad)
    lam = lambda_field(domain, quad, Ht, gbar, delta_clip)
    mem = membership_check(domain, Ht)
    keep = lam.mask
    wv = solution.w.values
    wx1 = solution.w.dx1
    norms = {
        "u_h1": h1_norm(solution.u, quad),
        "u_h2_seminorm": h2_seminorm(solution.u, quad),
        "w_l2": l2_norm(wv, quad),
        "w_x1_l2": l2_norm(wx1, quad),
        "w_x2_l2": math.sqrt(quad.integrate(np.where(keep, lam.lam.values, 0.0) ** 2)),
    }
    norms["w_h1"] = math.sqrt(norms["w_l2"] ** 2 + norms["w_x1_l2"] ** 2 + norms["w_x2_l2"] ** 2)
    return RegularityReport(H, Ht, gbar, lam, mem, flatness_verdict, norms, gap, w_tr)

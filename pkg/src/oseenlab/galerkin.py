"""Galerkin solver for the linearized compressible flow with slip conditions.

Unknowns: velocity u (tangent to the boundary, friction condition
n.2mu D(u).tau + f u.tau = B) and density w (zero on the inflow arc), with

    d_x1 u - mu Lap u - (nu + mu) grad div u + gamma grad w = F
    div u + d_x1 w = G.

The density is eliminated line by line, w = int_{x1_in}^{x1} (G - div u) ds,
so the discrete system involves the velocity coefficients only.  The
normal-trace constraint is imposed by a boundary penalty sigma.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import InvalidInputError, SolverError
from .fields import (
    ExprField,
    Field,
    NodalField,
    PolyField,
    QuadratureSet,
    VectorField,
    div,
    friction_trace,
    grad,
    h1_norm,
    inflow_antiderivative,
    boundary_antiderivative,
    l2_norm,
    laplacian,
    perp_grad,
    stack_eval,
)
from .geometry import ConvexDomain

F_GRID = (0.0,) + tuple(10.0**k for k in range(-3, 5))


@dataclass(frozen=True)
class OseenParameters:
    mu: float = 1.0
    nu: float = 1.0
    gamma: float = 1.0
    f: float = 1.0
    sigma: float | None = None

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidInputError("mu must be positive")
        if not self.nu + 2.0 * self.mu > 0:
            raise InvalidInputError("nu + 2 mu must be positive")
        if not self.gamma > 0:
            raise InvalidInputError("gamma must be positive")
        if not self.f >= 0:
            raise InvalidInputError("friction f must be nonnegative")
        if self.sigma is not None and self.sigma < 0:
            raise InvalidInputError("penalty sigma must be nonnegative")

    @property
    def penalty(self) -> float:
        return 1e4 * self.mu if self.sigma is None else float(self.sigma)

    @property
    def gamma_bar(self) -> float:
        return self.gamma / (2.0 * self.mu + self.nu)

    def replace(self, **kw) -> "OseenParameters":
        d = dict(mu=self.mu, nu=self.nu, gamma=self.gamma, f=self.f, sigma=self.sigma)
        d.update(kw)
        return OseenParameters(**d)


# --------------------------------------------------------------------------
# basis


def bubble_field(domain: ConvexDomain, degree: int = 12) -> PolyField:
    """Polynomial bubble: exact for circles/ellipses, interpolated otherwise."""
    box = domain.bounding_box
    if domain.bubble_is_quadratic:
        return PolyField.interpolate(box, domain.bubble, 2).trimmed(1e-14)
    return PolyField.interpolate(box, domain.bubble, degree)


def _combine(polys, weights, box):
    s1 = max(p.coef.shape[0] for p in polys)
    s2 = max(p.coef.shape[1] for p in polys)
    c = np.zeros((s1, s2))
    for p, wt in zip(polys, weights):
        if wt != 0.0:
            c[: p.coef.shape[0], : p.coef.shape[1]] += wt * p.coef
    return PolyField(c, box)


def candidate_groups(k_max: int):
    """(kind, i, j) triples grouped by velocity degree k = 1..k_max.

    kind 's': stream field perp_grad(b P_i P_j), i + j = k - 1
    kind 'g': gradient field grad(P_i P_j),      i + j = k + 1

    The first group opens with perp_grad(b), then the degree-2 gradients and
    the two constant fields.  Later groups list gradients before stream
    fields, and within a gradient block the members even in both variables
    come first: grad(b^2), the lowest-degree tangent field with nonzero
    divergence, then enters the span as early as possible.
    """
    def gblock(d):
        idx = [(d - j, j) for j in range(d + 1)]
        return [("g", i, j) for i, j in sorted(idx, key=lambda ij: (ij[0] % 2 + ij[1] % 2, -ij[0]))]

    out = []
    for k in range(1, k_max + 1):
        stream = [("s", k - 1 - j, j) for j in range(k)]
        if k == 1:
            out += stream + gblock(2) + [("g", 1, 0), ("g", 0, 1)]
        else:
            out += gblock(k + 1) + stream
    return out


def _group_sizes(k):
    return k + (k + 2) + (2 if k == 1 else 0)


class CandidateValues:
    """Values and gradients of vector fields at interior and boundary nodes."""

    def __init__(self, fields, quad: QuadratureSet):
        comps = [c for v in fields for c in v]
        derivs = [c.deriv(a) for c in comps for a in (0, 1)]
        m = len(fields)
        x1, x2 = quad.x1.ravel(), quad.x2.ravel()
        self.val = stack_eval(comps, x1, x2).reshape((m, 2) + quad.shape)
        self.grad = stack_eval(derivs, x1, x2).reshape((m, 2, 2) + quad.shape)  # [.., comp, axis, ..]
        self.bval = stack_eval(comps, quad.bx1, quad.bx2).reshape(m, 2, -1)
        self.bgrad = stack_eval(derivs, quad.bx1, quad.bx2).reshape(m, 2, 2, -1)
        lx1, lx2, lw = quad.boundary_lines
        divs = [derivs[4 * k] for k in range(m)], [derivs[4 * k + 3] for k in range(m)]
        ld = stack_eval(divs[0] + divs[1], lx1, lx2).reshape(2, m, -1)
        # div integrated along the chord from the inflow arc to each boundary node
        self.bdiv_int = ((ld[0] + ld[1]).reshape((m,) + lx1.shape) * lw[None]).sum(axis=2)

    def transform(self, T):
        out = object.__new__(CandidateValues)
        out.val = np.einsum("ic,c...->i...", T, self.val)
        out.grad = np.einsum("ic,c...->i...", T, self.grad)
        out.bval = np.einsum("ic,c...->i...", T, self.bval)
        out.bgrad = np.einsum("ic,c...->i...", T, self.bgrad)
        out.bdiv_int = T @ self.bdiv_int
        return out


def h1_gram(cv: CandidateValues, quad: QuadratureSet):
    w = quad.w
    G = np.einsum("icxy,jcxy,xy->ij", cv.val, cv.val, w)
    G += np.einsum("icaxy,jcaxy,xy->ij", cv.grad, cv.grad, w)
    return 0.5 * (G + G.T)


@dataclass
class GalerkinBasis:
    domain: ConvexDomain
    quad: QuadratureSet
    fields: list
    T: np.ndarray
    candidates: list
    labels: list
    gram: np.ndarray
    sigma: float
    values: CandidateValues
    bubble: PolyField

    @property
    def N(self):
        return len(self.fields)

    @property
    def box(self):
        return self.fields[0][0].box


def build_basis(domain: ConvexDomain, N: int, params: OseenParameters | None = None,
                quad: QuadratureSet | None = None, drop_tol: float = 1e-8) -> GalerkinBasis:
    """H1-orthonormal velocity basis of size N, ordered by polynomial degree."""
    params = params or OseenParameters()
    if N < 1:
        raise InvalidInputError("N must be at least 1")
    k_need, tot = 0, 0
    while tot < N:
        k_need += 1
        tot += _group_sizes(k_need)
        if k_need > 40:
            raise InvalidInputError("N too large")
    k_max = k_need + 1
    box = domain.bounding_box
    b = bubble_field(domain)
    bdeg = max(b.degree)
    if quad is None:
        quad = QuadratureSet(domain, degree=max(4, k_max + bdeg - 2))

    cands, labels = [], []
    for kind, i, j in candidate_groups(k_max):
        P = PolyField.legendre(box, i, j)
        cands.append(perp_grad(b * P) if kind == "s" else grad(P))
        labels.append((kind, i, j))
    cv = CandidateValues(cands, quad)
    G = h1_gram(cv, quad)

    # sequential Gram-Schmidt in the H1 inner product, twice for stability
    m = len(cands)
    rows, used = [], []
    for c in range(m):
        v = np.zeros(m)
        v[c] = 1.0
        norm0 = math.sqrt(G[c, c])
        for _ in range(2):
            for r in rows:
                v -= (r @ G @ v) * r
        nv = math.sqrt(max(v @ G @ v, 0.0))
        if norm0 == 0.0 or nv < drop_tol * norm0:
            continue
        rows.append(v / nv)
        used.append(c)
        if len(rows) == N:
            break
    if len(rows) < N:
        raise InvalidInputError(f"only {len(rows)} independent candidates available for N={N}")
    T = np.array(rows)
    fields = []
    for r in T:
        fields.append(VectorField(_combine([c[0] for c in cands], r, box), _combine([c[1] for c in cands], r, box)))
    vals = cv.transform(T)
    gram = h1_gram(vals, quad)
    return GalerkinBasis(domain, quad, fields, T, cands, [labels[c] for c in used], gram, params.penalty, vals, b)


# --------------------------------------------------------------------------
# boundary lift


@dataclass
class Lift:
    u0: VectorField
    F_tilde: VectorField
    G_tilde: Field
    B_tilde: np.ndarray  # friction residual of the lift at boundary nodes
    condition: float


def _as_boundary_values(B, quad):
    if B is None:
        return np.zeros(quad.n_boundary)
    if isinstance(B, Field):
        return np.asarray(B.on_boundary(quad), dtype=float)
    if np.isscalar(B):
        return np.full(quad.n_boundary, float(B))
    arr = np.asarray(B, dtype=float)
    if arr.shape != (quad.n_boundary,):
        raise InvalidInputError("boundary data does not match boundary quadrature")
    return arr


def _vec(F):
    if F is None:
        return VectorField(ExprField(0), ExprField(0))
    if isinstance(F, VectorField):
        return F
    return VectorField(*F)


def lift_boundary_data(domain: ConvexDomain, B, params: OseenParameters, quad: QuadratureSet,
                       F=None, G=None, degree: int = 2, reg: float = 1e-10, bubble: PolyField | None = None) -> Lift:
    """Tangent field u0 whose friction trace fits B in least squares.

    u0 is searched among stream fields perp_grad(b P), total degree of P
    <= degree, minimizing the boundary misfit plus reg times the H2 energy.
    """
    F = _vec(F)
    G = ExprField(0) if G is None else G
    box = domain.bounding_box
    Bv = _as_boundary_values(B, quad)
    mu, nu, f = params.mu, params.nu, params.f
    if not np.any(Bv):
        z = PolyField.zero(box)
        return Lift(VectorField(z, z), F, G, np.zeros(quad.n_boundary), 1.0)
    b = bubble if bubble is not None else bubble_field(domain)
    cands = [perp_grad(b * PolyField.legendre(box, d - j, j)) for d in range(degree + 1) for j in range(d + 1)]
    A = np.stack([friction_trace(c, quad, mu, f) for c in cands], axis=1)
    sw = np.sqrt(quad.bw)
    # H2 energy (all second derivatives) plus H1 part for definiteness
    H = np.zeros((len(cands), len(cands)))
    parts = []
    for c in cands:
        pv = []
        for comp in c:
            pv.append(comp.at(quad))
            for a in (0, 1):
                d1 = comp.deriv(a)
                pv.append(d1.at(quad))
                for a2 in (0, 1):
                    pv.append(d1.deriv(a2).at(quad))
        parts.append(np.stack(pv))
    P = np.stack(parts)
    H = np.einsum("ipxy,jpxy,xy->ij", P, P, quad.w)
    Aw = A * sw[:, None]
    lhs = Aw.T @ Aw
    scale = np.trace(lhs) / np.trace(H)
    lhs = lhs + reg * scale * H
    cond = float(np.linalg.cond(lhs))
    if not np.isfinite(cond) or cond > 1e15:
        raise SolverError(f"boundary lift is ill-conditioned (condition number {cond:.3e})")
    coef = linalg.solve(lhs, Aw.T @ (Bv * sw), assume_a="pos")
    u0 = VectorField(_combine([c[0] for c in cands], coef, box), _combine([c[1] for c in cands], coef, box))
    resid = Bv - friction_trace(u0, quad, mu, f)
    d = div(u0)
    Ft = VectorField(
        F[0] + mu * laplacian(u0[0]) + (nu + mu) * d.deriv(0) - u0[0].deriv(0),
        F[1] + mu * laplacian(u0[1]) + (nu + mu) * d.deriv(1) - u0[1].deriv(0),
    )
    return Lift(u0, Ft, G - d, resid, cond)


# --------------------------------------------------------------------------
# assembly and solve


def _div_values(cv):
    return cv.grad[:, 0, 0] + cv.grad[:, 1, 1]


def assemble_parts(basis: GalerkinBasis, params: OseenParameters):
    """Separate matrices for each term of the bilinear form (row = test)."""
    quad, cv, w = basis.quad, basis.values, basis.quad.w
    dv = _div_values(cv)
    sym = 0.5 * (cv.grad + np.swapaxes(cv.grad, 1, 2))
    parts = {
        "advection": np.einsum("icxy,kcxy,xy->ki", cv.grad[:, :, 0], cv.val, w),
        "strain": 2.0 * np.einsum("icaxy,kcaxy,xy->ki", sym, sym, w),
        "divdiv": np.einsum("ixy,kxy,xy->ki", dv, dv, w),
        "density": np.einsum("ixy,kxy,xy->ki", quad.line_antiderivative(dv), dv, w),
    }
    t, n = quad.tangent, quad.normal
    ut = cv.bval[:, 0] * t[0] + cv.bval[:, 1] * t[1]
    un = cv.bval[:, 0] * n[0] + cv.bval[:, 1] * n[1]
    parts["friction"] = np.einsum("ib,kb,b->ki", ut, ut, quad.bw)
    parts["penalty"] = np.einsum("ib,kb,b->ki", un, un, quad.bw)
    # boundary terms from integrating by parts, active on the normal trace
    g = cv.bgrad
    nDn = (n[0] * n[0] * g[:, 0, 0] + n[0] * n[1] * (g[:, 0, 1] + g[:, 1, 0]) + n[1] * n[1] * g[:, 1, 1])
    bdiv = g[:, 0, 0] + g[:, 1, 1]
    parts["normal_strain"] = -2.0 * np.einsum("ib,kb,b->ki", nDn, un, quad.bw)
    parts["normal_div"] = -np.einsum("ib,kb,b->ki", bdiv, un, quad.bw)
    parts["density_trace"] = -np.einsum("ib,kb,b->ki", cv.bdiv_int, un, quad.bw)
    return parts


def combine_parts(parts, params: OseenParameters, sigma: float | None = None):
    sigma = params.penalty if sigma is None else sigma
    return (
        parts["advection"]
        + params.mu * parts["strain"]
        + params.nu * parts["divdiv"]
        + params.gamma * parts["density"]
        + params.f * parts["friction"]
        + sigma * parts["penalty"]
        + params.mu * parts["normal_strain"]
        + params.nu * parts["normal_div"]
        + params.gamma * parts["density_trace"]
    )


def assemble_system(basis: GalerkinBasis, F_tilde, G_tilde, params: OseenParameters, B_tilde=None):
    """Matrix M[k, i] and right-hand side r[k] of the Galerkin system."""
    quad, cv = basis.quad, basis.values
    M = combine_parts(assemble_parts(basis, params), params, basis.sigma)
    F = _vec(F_tilde)
    Fv = F.at(quad)
    Gv = np.broadcast_to(G_tilde.at(quad) if isinstance(G_tilde, Field) else (G_tilde or 0.0), quad.shape)
    r = np.einsum("kcxy,cxy,xy->k", cv.val, Fv, quad.w)
    r += params.gamma * np.einsum("kxy,xy,xy->k", _div_values(cv), quad.line_antiderivative(Gv), quad.w)
    un = cv.bval[:, 0] * quad.normal[0] + cv.bval[:, 1] * quad.normal[1]
    if isinstance(G_tilde, Field):
        r -= params.gamma * un @ (boundary_antiderivative(quad, G_tilde) * quad.bw)
    if B_tilde is not None:
        Bv = _as_boundary_values(B_tilde, quad)
        ut = cv.bval[:, 0] * quad.tangent[0] + cv.bval[:, 1] * quad.tangent[1]
        r += ut @ (Bv * quad.bw)
    return M, r


def coercivity_margin(M) -> float:
    return float(np.linalg.eigvalsh(0.5 * (M + M.T)).min())


def f_threshold(basis: GalerkinBasis, params: OseenParameters, parts=None, margin: float = 1e-10):
    """Smallest f (decade grid, then bisection) making sym(M) positive definite."""
    parts = parts or assemble_parts(basis, params)

    def marg(f):
        return coercivity_margin(combine_parts(parts, params.replace(f=f), basis.sigma))

    prev = None
    for f in F_GRID:
        if marg(f) > margin:
            if prev is None:
                return 0.0
            lo, hi = prev, f
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if marg(mid) > margin:
                    hi = mid
                else:
                    lo = mid
            return hi
        prev = f
    return math.inf


def solve_coefficients(M, r, check_coercive: bool = True):
    M = np.asarray(M, dtype=float)
    r = np.asarray(r, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or r.shape != (M.shape[0],):
        raise InvalidInputError("system must be square with matching right-hand side")
    margin = coercivity_margin(M)
    if check_coercive and margin <= 0:
        raise SolverError(f"coercivity margin {margin:.3e} <= 0: increase the friction f or the penalty sigma")
    try:
        lu = linalg.lu_factor(M, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"singular Galerkin matrix: {exc}") from None
    if np.any(np.diag(lu[0]) == 0):
        raise SolverError("singular Galerkin matrix")
    c = linalg.lu_solve(lu, r)
    resid = float(np.linalg.norm(M @ c - r))
    return c, {"coercivity_margin": margin, "residual": resid, "rhs_norm": float(np.linalg.norm(r))}


def reconstruct_density(quad: QuadratureSet, u: VectorField, G_tilde) -> NodalField:
    """w = int_{x1_in}^{x1} (G - div u) ds at the interior nodes."""
    g = G_tilde.at(quad) if isinstance(G_tilde, Field) else np.broadcast_to(G_tilde, quad.shape)
    return inflow_antiderivative(quad, np.asarray(g) - div(u).at(quad))


@dataclass
class GalerkinSolution:
    basis: GalerkinBasis
    params: OseenParameters
    coefficients: np.ndarray
    u: VectorField  # full velocity, lift included
    w: NodalField
    lift: Lift
    M: np.ndarray
    r: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    F: VectorField | None = None  # original data, before the lift
    G: Field | None = None
    B: np.ndarray | None = None

    @property
    def quad(self):
        return self.basis.quad


def lift_degree(basis: GalerkinBasis) -> int:
    """Largest d with every stream member perp_grad(b P), deg P = d, in the basis.

    Keeping the lift inside the span means the lift never adds error the
    basis cannot remove.
    """
    have = {(i, j) for kind, i, j in basis.labels if kind == "s"}
    d = -1
    while all((d + 1 - j, j) in have for j in range(d + 2)):
        d += 1
    return max(d, 0)


def solve(domain: ConvexDomain, N: int, params: OseenParameters, F=None, G=None, B=None,
          basis: GalerkinBasis | None = None, check_coercive: bool = True) -> GalerkinSolution:
    """Lift the boundary data, assemble, solve, and reconstruct the density."""
    basis = basis or build_basis(domain, N, params)
    quad = basis.quad
    G = ExprField(0) if G is None else (G if isinstance(G, Field) else ExprField(G))
    lift = lift_boundary_data(domain, B, params, quad, F, G, degree=lift_degree(basis), bubble=basis.bubble)
    M, r = assemble_system(basis, lift.F_tilde, lift.G_tilde, params, lift.B_tilde)
    c, diag = solve_coefficients(M, r, check_coercive)
    box = basis.box
    comps = []
    for k in (0, 1):
        comps.append(_combine([v[k] for v in basis.fields] + [lift.u0[k]], list(c) + [1.0], box))
    u = VectorField(*comps)
    w = reconstruct_density(quad, u, G)
    Bv = _as_boundary_values(B, quad)
    return GalerkinSolution(basis, params, c, u, w, lift, M, r, diag, _vec(F), G, Bv)


def energy_report(u: VectorField, w: NodalField, quad: QuadratureSet) -> dict:
    wx1 = w.dx1 if w.dx1 is not None else quad.line_derivative(w.values)
    return {
        "u_h1": h1_norm(u, quad),
        "w_l2": l2_norm(w, quad),
        "w_x1_l2": l2_norm(wx1, quad),
    }

"""Vorticity, stream function and potential: u = grad psi + perp_grad A.

Conventions: perp_grad = (d/dx2, -d/dx1) and rot u = u2_x1 - u1_x2, so
rot perp_grad A = -Lap A and div grad psi = Lap psi.  The stream function
therefore solves Lap A = -rot u with A = 0 on the boundary, and the potential
solves Lap psi = div u with zero normal derivative and zero mean.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import InvalidInputError, SolverError
from .fields import (
    ExprField,
    Field,
    PolyField,
    QuadratureSet,
    VectorField,
    boundary_l2,
    div,
    grad,
    l2_norm,
    perp_grad,
    rot,
    stack_eval,
    tangential_trace,
)
from .galerkin import OseenParameters, _as_boundary_values, _combine, _vec, bubble_field
from .geometry import ConvexDomain


def vorticity(u: VectorField) -> Field:
    return rot(u)


def _scalar_space(fields, quad):
    x1, x2 = quad.x1.ravel(), quad.x2.ravel()
    m = len(fields)
    val = stack_eval(fields, x1, x2).reshape((m,) + quad.shape)
    der = stack_eval([f.deriv(a) for f in fields for a in (0, 1)], x1, x2).reshape((m, 2) + quad.shape)
    return val, der


def _values(g, quad):
    if isinstance(g, Field):
        return np.asarray(g.at(quad), dtype=float)
    return np.broadcast_to(np.asarray(g, dtype=float), quad.shape)


def _solve_spd(K, rhs, what):
    try:
        return linalg.solve(K, rhs, assume_a="pos")
    except (linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"{what}: singular stiffness matrix ({exc})") from None


def stream_space(domain: ConvexDomain, degree: int, bubble: PolyField | None = None):
    b = bubble if bubble is not None else bubble_field(domain)
    box = domain.bounding_box
    return [b * PolyField.legendre(box, d - j, j) for d in range(degree + 1) for j in range(d + 1)]


def solve_stream(domain: ConvexDomain, alpha, quad: QuadratureSet, degree: int = 6,
                 bubble: PolyField | None = None, return_residual: bool = False):
    """A with Lap A = alpha, A = 0 on the boundary, over {b * P}, deg P <= degree."""
    space = stream_space(domain, degree, bubble)
    val, der = _scalar_space(space, quad)
    K = np.einsum("iaxy,jaxy,xy->ij", der, der, quad.w)
    av = _values(alpha, quad)
    rhs = -np.einsum("ixy,xy,xy->i", val, av, quad.w)
    c = _solve_spd(0.5 * (K + K.T), rhs, "stream function")
    A = _combine(space, c, domain.bounding_box)
    if return_residual:
        return A, float(np.abs(K @ c - rhs).max())
    return A


def solve_potential(domain: ConvexDomain, g, quad: QuadratureSet, degree: int = 6, compat_tol: float | None = 1e-8,
                    return_residual: bool = False):
    """psi with Lap psi = g, zero normal derivative (natural), zero mean.

    With compat_tol=None an incompatible source is replaced by g - mean(g)
    instead of being rejected.
    """
    gv = _values(g, quad)
    defect = quad.integrate(gv)
    if compat_tol is None:
        gv = gv - defect / quad.area
    elif abs(defect) > compat_tol:
        raise InvalidInputError(f"Neumann compatibility violated: integral of the source is {defect:.3e}")
    box = domain.bounding_box
    space = [PolyField.legendre(box, d - j, j) for d in range(1, degree + 1) for j in range(d + 1)]
    val, der = _scalar_space(space, quad)
    K = np.einsum("iaxy,jaxy,xy->ij", der, der, quad.w)
    rhs = -np.einsum("ixy,xy,xy->i", val, gv, quad.w)
    c = _solve_spd(0.5 * (K + K.T), rhs, "potential")
    psi = _combine(space, c, box)
    mean = quad.integrate(psi.at(quad)) / quad.area
    psi = psi + (-mean)
    if return_residual:
        return psi, float(np.abs(K @ c - rhs).max())
    return psi


@dataclass
class HelmholtzParts:
    psi: PolyField
    A: PolyField
    defect: float  # ||u - grad psi - perp_grad A||_L2
    boundary_A: float  # ||A||_L2(boundary)
    normal_trace_perp: float  # ||perp_grad A . n||_L2(boundary)
    compat_defect: float = 0.0  # integral of div u = flux of u through the boundary

    def velocity(self) -> VectorField:
        return grad(self.psi) + perp_grad(self.A)


def decompose(domain: ConvexDomain, u: VectorField, quad: QuadratureSet, degree: int = 6,
              bubble: PolyField | None = None, compat_tol: float | None = None) -> HelmholtzParts:
    """A from Lap A = -rot u, psi from Lap psi = div u.

    A velocity with a small normal trace (penalized Galerkin solutions) has a
    small net flux; by default its mean divergence is removed and reported
    as compat_defect rather than rejected.
    """
    A = solve_stream(domain, -1.0 * rot(u), quad, degree, bubble)
    dv = div(u)
    flux = quad.integrate(dv.at(quad))
    psi = solve_potential(domain, dv, quad, degree + 2, compat_tol)
    rec = grad(psi) + perp_grad(A)
    diff = VectorField(u[0] - rec[0], u[1] - rec[1])
    pA = perp_grad(A).on_boundary(quad)
    ntr = pA[0] * quad.normal[0] + pA[1] * quad.normal[1]
    return HelmholtzParts(psi, A, l2_norm(diff, quad), boundary_l2(A, quad), boundary_l2(ntr, quad), float(flux))


def boundary_vorticity_residual(u: VectorField, params: OseenParameters, quad: QuadratureSet, B=None) -> float:
    """L2(boundary) norm of rot u - (2 chi - f/mu)(u . tau) - B/mu.

    For slip fields (u . n = 0 and n.2mu D(u).tau + f u.tau = B) this vanishes.
    """
    ru = rot(u).on_boundary(quad)
    ut = tangential_trace(u, quad)
    Bv = _as_boundary_values(B, quad)
    res = ru - (2.0 * quad.curvature - params.f / params.mu) * ut - Bv / params.mu
    return boundary_l2(res, quad)


# --------------------------------------------------------------------------
# weak vorticity problem


def harmonic_polynomials(degree: int, center=(0.0, 0.0), scale: float = 1.0):
    """Re and Im of ((z - c)/scale)^k, k = 0..degree, as sympy-free callables."""
    out = []
    for k in range(degree + 1):
        for part in ((0,) if k == 0 else (0, 1)):
            out.append((k, part))

    def make(k, part):
        class _H(Field):
            def __init__(self, k=k, part=part, nu=(0, 0)):
                self.k, self.part, self.nu = k, part, nu

            def __call__(self, x1, x2):
                z = ((np.asarray(x1) - center[0]) + 1j * (np.asarray(x2) - center[1])) / scale
                kk = self.k
                coef = 1.0
                # d/dx1 z^k = k z^(k-1) / scale, d/dx2 = i k z^(k-1) / scale
                for ax in range(self.nu[0] + self.nu[1]):
                    coef = coef * kk
                    kk -= 1
                if kk < 0:
                    return np.zeros(np.broadcast(x1, x2).shape)
                v = coef * z**kk * (1j ** self.nu[1]) / scale ** (self.nu[0] + self.nu[1])
                return v.real if self.part == 0 else v.imag

            def deriv(self, axis):
                nu = (self.nu[0] + (axis == 0), self.nu[1] + (axis == 1))
                return _H(self.k, self.part, nu)

        return _H()

    return [make(k, p) for k, p in out]


def harmonic_extension(domain: ConvexDomain, values, quad: QuadratureSet, degree: int = 16):
    """Least-squares harmonic polynomial matching boundary values."""
    lo1, hi1, lo2, hi2 = domain.bounding_box
    center = (0.5 * (lo1 + hi1), 0.5 * (lo2 + hi2))
    scale = 0.5 * max(hi1 - lo1, hi2 - lo2)
    hs = harmonic_polynomials(degree, center, scale)
    Amat = np.stack([h.on_boundary(quad) for h in hs], axis=1)
    sw = np.sqrt(quad.bw)
    coef, *_ = np.linalg.lstsq(Amat * sw[:, None], np.asarray(values) * sw, rcond=None)
    terms = [h * float(c) for h, c in zip(hs, coef) if c != 0.0]
    ext = terms[0]
    for t in terms[1:]:
        ext = ext + t
    return ext, float(np.sqrt(quad.boundary_integrate((Amat @ coef - values) ** 2)))


@dataclass
class WeakVorticity:
    alpha: Field
    lift: Field
    lift_misfit: float
    defect: float  # ||alpha* - rot u||_L2


def weak_vorticity_solve(domain: ConvexDomain, u: VectorField, F, params: OseenParameters, quad: QuadratureSet,
                         B=None, degree: int = 8, bubble: PolyField | None = None) -> WeakVorticity:
    """Solve d_x1 a - mu Lap a = rot F weakly with boundary values from the slip identity.

    a = b + d, where d is a harmonic extension of (2 chi - f/mu)(u . tau) + B/mu
    and b has zero trace.  Weak form, for test functions phi with zero trace:
        int (d_x1 b) phi + mu int grad b . grad phi
            = int F . perp_grad phi - int (d_x1 d) phi - mu int grad d . grad phi.
    """
    F = _vec(F)
    mu = params.mu
    ut = tangential_trace(u, quad)
    Bv = _as_boundary_values(B, quad)
    dvals = (2.0 * quad.curvature - params.f / mu) * ut + Bv / mu
    if not np.any(dvals):
        d, misfit = ExprField(0), 0.0
    else:
        d, misfit = harmonic_extension(domain, dvals, quad)
    space = stream_space(domain, degree, bubble)
    val, der = _scalar_space(space, quad)
    w = quad.w
    K = np.einsum("jxy,ixy,xy->ij", der[:, 0], val, w) + mu * np.einsum("jaxy,iaxy,xy->ij", der, der, w)
    Fv = F.at(quad)
    rhs = np.einsum("xy,ixy,xy->i", Fv[0], der[:, 1], w) - np.einsum("xy,ixy,xy->i", Fv[1], der[:, 0], w)
    dx1 = d.deriv(0).at(quad)
    dx2 = d.deriv(1).at(quad)
    rhs -= np.einsum("xy,ixy,xy->i", dx1, val, w)
    rhs -= mu * (np.einsum("xy,ixy,xy->i", dx1, der[:, 0], w) + np.einsum("xy,ixy,xy->i", dx2, der[:, 1], w))
    try:
        c = linalg.solve(K, rhs)
    except (linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"weak vorticity problem is singular ({exc})") from None
    bpart = _combine(space, c, domain.bounding_box)
    alpha = bpart + d
    defect = l2_norm(alpha.at(quad) - rot(u).at(quad), quad)
    return WeakVorticity(alpha, d, misfit, defect)

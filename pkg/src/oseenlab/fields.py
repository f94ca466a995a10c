"""Scalar/vector fields on a domain, the shared quadrature, and norms.

Interior quadrature is a mapped tensor grid in (x2, s):

    x1 = x1_in(x2) + s * (x1_out(x2) - x1_in(x2)),   s in [0, 1],

so every horizontal line is a quadrature line.  Integrals along x1 from the
inflow boundary become a fixed matrix applied per line, which is what the
density reconstruction and the transport solver need.

Field representations:
  PolyField   tensor Legendre series on the domain's bounding box
  ExprField   sympy expression in x1, x2 (manufactured data, user data)
  NodalField  values at the interior nodes of one QuadratureSet only
Sums and products of mixed kinds are kept lazily.
"""
from __future__ import annotations

import math
from functools import cached_property

import numpy as np
import sympy as sp
from numpy.polynomial import legendre as L

from . import _kernels
from .errors import InvalidInputError
from .expr import X1, X2, parse_expression
from .geometry import ConvexDomain

# --------------------------------------------------------------------------
# quadrature


def _sidi(u):
    """Endpoint-clustering map of [-1, 1] onto itself with (1-u^2)^3 Jacobian."""
    u2 = u * u
    return u * (35.0 - 35.0 * u2 + 21.0 * u2 * u2 - 5.0 * u2**3) / 16.0, 35.0 / 16.0 * (1.0 - u2) ** 3


class QuadratureSet:
    """Interior and boundary quadrature tied to one domain.

    degree is the polynomial degree of the fields to be integrated; the node
    counts are 4(p+4) lines, 2(p+4) nodes per line, and 2(p+4) Gauss nodes
    on each of four boundary arcs.
    """

    def __init__(self, domain: ConvexDomain, degree: int = 4, n_lines: int | None = None,
                 n_s: int | None = None, n_boundary: int | None = None):
        if degree < 0:
            raise InvalidInputError("degree must be nonnegative")
        self.domain = domain
        self.degree = int(degree)
        p4 = self.degree + 4
        self.n_lines = int(n_lines or 4 * p4)
        self.n_s = int(n_s or 2 * p4)
        nb_arc = int(n_boundary or 8 * p4) // 4

        lo, hi = domain.x2_range
        # panels in x2 between heights where the boundary is only finitely smooth
        bp = domain.breakpoints()
        edges = [lo, hi]
        if bp.size:
            h = domain.position(bp)[1]
            edges += [v for v in h if lo + 1e-9 < v < hi - 1e-9]
        edges = np.unique(np.round(np.sort(edges), 14))
        n_panels = len(edges) - 1
        n_per = self.n_lines if n_panels == 1 else max(12, self.n_lines // 2)
        u, wu = L.leggauss(n_per)
        phi, dphi = _sidi(u)
        xs, ws = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            half, mid = 0.5 * (b - a), 0.5 * (b + a)
            xs.append(mid + half * phi)
            ws.append(wu * half * dphi)
        self.x2_lines = np.concatenate(xs)
        self.w_lines = np.concatenate(ws)
        self.n_lines = self.x2_lines.size
        self.x_in, self.dx_in = domain.inflow_abscissa(self.x2_lines, derivative=True)
        self.x_out, self.dx_out = domain.outflow_abscissa(self.x2_lines, derivative=True)
        self.width = self.x_out - self.x_in
        if np.any(self.width <= 0):
            raise InvalidInputError("degenerate quadrature line")

        t, wt = L.leggauss(self.n_s)
        self.s = 0.5 * (t + 1.0)
        self.ws = 0.5 * wt
        self.x1 = self.x_in[:, None] + self.s[None, :] * self.width[:, None]
        self.x2 = np.repeat(self.x2_lines[:, None], self.n_s, axis=1)
        self.w = self.w_lines[:, None] * self.width[:, None] * self.ws[None, :]

        # per-line operators on the s nodes
        V = L.legvander(t, self.n_s - 1)
        Vinv = np.linalg.inv(V)
        cint = np.zeros((self.n_s, self.n_s))
        cder = np.zeros((self.n_s, self.n_s))
        for j in range(self.n_s):
            e = np.zeros(self.n_s)
            e[j] = 1.0
            # integrate from t = -1 and rescale to s in [0, 1]
            cint[:, j] = 0.5 * L.legval(t, L.legint(e, lbnd=-1.0))
            cder[:, j] = 2.0 * L.legval(t, L.legder(e))
        self.S = cint @ Vinv
        self.Dm = cder @ Vinv
        # line-end evaluation rows (s = 0 and s = 1)
        self.E0 = L.legvander(np.array([-1.0]), self.n_s - 1)[0] @ Vinv
        self.E1 = L.legvander(np.array([1.0]), self.n_s - 1)[0] @ Vinv

        # boundary: four arcs split at the singularity parameters and midpoints
        ta, tb = sorted(domain.singularity_params)
        cuts = [ta, 0.5 * (ta + tb), tb, 0.5 * (tb + ta + 1.0), ta + 1.0]
        extra = [t + k for t in domain.breakpoints() for k in (0.0, 1.0) if ta + 1e-9 < t + k < ta + 1.0 - 1e-9]
        cuts = np.unique(np.round(np.sort(cuts + extra), 14))
        g, gw = L.leggauss(nb_arc)
        bt, bw = [], []
        for a, b in zip(cuts[:-1], cuts[1:]):
            bt.append(0.5 * (b - a) * (g + 1.0) + a)
            bw.append(0.5 * (b - a) * gw)
        self.bt = np.concatenate(bt) % 1.0
        pos = domain.position(self.bt)
        self.bx1, self.bx2 = pos[0], pos[1]
        self.bw = np.concatenate(bw) * domain.speed(self.bt)
        self.normal = domain.normal(self.bt)
        self.tangent = domain.tangent(self.bt)
        self.curvature = domain.curvature(self.bt)

    # shapes
    @property
    def shape(self):
        return (self.n_lines, self.n_s)

    @property
    def n_nodes(self):
        return self.n_lines * self.n_s

    @property
    def n_boundary(self):
        return self.bt.size

    @cached_property
    def area(self) -> float:
        return float(self.w.sum())

    @cached_property
    def perimeter(self) -> float:
        return float(self.bw.sum())

    @cached_property
    def inflow_mask(self):
        return self.normal[0] < 0.0

    @cached_property
    def boundary_lines(self):
        """Gauss nodes on the horizontal chord ending at each boundary node.

        Returns (x1, x2, w) of shape (n_boundary, n_s); the weights integrate
        from the inflow arc to the node, so they vanish for inflow nodes.
        """
        x_in = self.domain.inflow_abscissa(self.bx2)
        width = np.where(self.normal[0] > 0.0, np.maximum(self.bx1 - x_in, 0.0), 0.0)
        x1 = x_in[:, None] + self.s[None, :] * width[:, None]
        x2 = np.repeat(self.bx2[:, None], self.n_s, axis=1)
        return x1, x2, width[:, None] * self.ws[None, :]

    def integrate(self, values) -> float:
        return float(np.sum(self.w * np.broadcast_to(values, self.shape)))

    def boundary_integrate(self, values) -> float:
        return float(np.sum(self.bw * np.broadcast_to(values, self.bw.shape)))

    def line_antiderivative(self, values):
        """int_{x1_in}^{x1} f ds per line; values of shape (..., n_lines, n_s)."""
        v = np.asarray(values, dtype=float)
        lead = v.shape[:-2]
        flat = v.reshape((-1,) + self.shape)
        out = _kernels.line_cumint(self.S, flat) * self.width[None, :, None]
        return out.reshape(lead + self.shape)

    def line_derivative(self, values):
        """d/dx1 per line by differentiating the per-line interpolant."""
        v = np.asarray(values, dtype=float)
        return np.einsum("ik,...lk->...li", self.Dm, v) / self.width[:, None]

    def line_end_values(self, values, end: int = 0):
        """Interpolated values at s = 0 (inflow end) or s = 1 (outflow end)."""
        row = self.E0 if end == 0 else self.E1
        return np.asarray(values, dtype=float) @ row


# --------------------------------------------------------------------------
# fields


class Field:
    """Scalar field base class: callable on (x1, x2) arrays."""

    def __call__(self, x1, x2):
        raise NotImplementedError

    def deriv(self, axis: int) -> "Field":
        raise NotImplementedError

    def at(self, quad: QuadratureSet):
        return np.broadcast_to(self(quad.x1, quad.x2), quad.shape)

    def on_boundary(self, quad: QuadratureSet):
        return np.broadcast_to(self(quad.bx1, quad.bx2), quad.bx1.shape)

    # arithmetic
    def __add__(self, other):
        if isinstance(other, NodalField):
            return other.__radd__(self)
        return SumField(self, _as_field(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * _as_field(other)

    def __rsub__(self, other):
        return _as_field(other) + (-1.0) * self

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, NodalField):
            return other.__rmul__(self)
        if np.isscalar(other):
            return ScaledField(self, float(other))
        return ProductField(self, _as_field(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not np.isscalar(other):
            raise InvalidInputError("only division by scalars is supported")
        return self * (1.0 / float(other))


def _as_field(v) -> Field:
    if isinstance(v, Field):
        return v
    if np.isscalar(v):
        return ExprField(sp.Float(float(v)))
    raise InvalidInputError(f"cannot use {type(v).__name__} as a field")


class ExprField(Field):
    def __init__(self, expr):
        if isinstance(expr, str):
            expr = parse_expression(expr)
        e = sp.sympify(expr)
        # symbols named x1/x2 created elsewhere are not the real-valued X1/X2
        e = e.subs({s: {"x1": X1, "x2": X2}[s.name] for s in e.free_symbols
                    if s.name in ("x1", "x2") and s not in (X1, X2)})
        self.expr = e
        self._f = sp.lambdify((X1, X2), self.expr, "numpy")

    def __repr__(self):
        return f"ExprField({self.expr})"

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        out = self._f(x1, x2)
        return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(x1, x2).shape)

    def deriv(self, axis):
        return ExprField(sp.diff(self.expr, X1 if axis == 0 else X2))

    def __add__(self, other):
        if isinstance(other, ExprField):
            return ExprField(self.expr + other.expr)
        if np.isscalar(other):
            return ExprField(self.expr + other)
        return Field.__add__(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, ExprField):
            return ExprField(self.expr * other.expr)
        if np.isscalar(other):
            return ExprField(self.expr * other)
        return Field.__mul__(self, other)

    __rmul__ = __mul__


class SumField(Field):
    def __init__(self, a, b):
        self.a, self.b = a, b

    def __call__(self, x1, x2):
        return self.a(x1, x2) + self.b(x1, x2)

    def deriv(self, axis):
        return SumField(self.a.deriv(axis), self.b.deriv(axis))


class ScaledField(Field):
    def __init__(self, a, c):
        self.a, self.c = a, c

    def __call__(self, x1, x2):
        return self.c * self.a(x1, x2)

    def deriv(self, axis):
        return ScaledField(self.a.deriv(axis), self.c)


class ProductField(Field):
    def __init__(self, a, b):
        self.a, self.b = a, b

    def __call__(self, x1, x2):
        return self.a(x1, x2) * self.b(x1, x2)

    def deriv(self, axis):
        return ProductField(self.a.deriv(axis), self.b) + ProductField(self.a, self.b.deriv(axis))


class PolyField(Field):
    """Tensor Legendre series sum_ij c_ij P_i(xi1) P_j(xi2) on a box."""

    def __init__(self, coef, box):
        coef = np.atleast_2d(np.asarray(coef, dtype=float))
        self.coef = coef
        self.box = tuple(float(b) for b in box)
        if not (self.box[1] > self.box[0] and self.box[3] > self.box[2]):
            raise InvalidInputError("empty bounding box")

    def __repr__(self):
        return f"PolyField(degree={self.degree})"

    @property
    def degree(self):
        return (self.coef.shape[0] - 1, self.coef.shape[1] - 1)

    @classmethod
    def zero(cls, box):
        return cls(np.zeros((1, 1)), box)

    @classmethod
    def constant(cls, box, c):
        return cls(np.array([[float(c)]]), box)

    @classmethod
    def legendre(cls, box, i, j):
        coef = np.zeros((i + 1, j + 1))
        coef[i, j] = 1.0
        return cls(coef, box)

    @classmethod
    def interpolate(cls, box, fn, degree):
        """Interpolate fn on the tensor Gauss grid of the given degree (d1, d2)."""
        d1, d2 = (degree, degree) if np.isscalar(degree) else degree
        g1, _ = L.leggauss(d1 + 1)
        g2, _ = L.leggauss(d2 + 1)
        lo1, hi1, lo2, hi2 = box
        X1g = 0.5 * (hi1 - lo1) * (g1 + 1) + lo1
        X2g = 0.5 * (hi2 - lo2) * (g2 + 1) + lo2
        vals = np.asarray(fn(X1g[:, None], X2g[None, :]), dtype=float)
        vals = np.broadcast_to(vals, (d1 + 1, d2 + 1))
        V1 = L.legvander(g1, d1)
        V2 = L.legvander(g2, d2)
        coef = np.linalg.solve(V1, np.linalg.solve(V2, vals.T).T)
        return cls(coef, box)

    def xi(self, x1, x2):
        lo1, hi1, lo2, hi2 = self.box
        return (2.0 * np.asarray(x1, dtype=float) - (lo1 + hi1)) / (hi1 - lo1), (
            2.0 * np.asarray(x2, dtype=float) - (lo2 + hi2)
        ) / (hi2 - lo2)

    def __call__(self, x1, x2):
        x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
        xi1, xi2 = self.xi(x1, x2)
        return _kernels.tensor_legendre_eval(self.coef[None], xi1, xi2)[0].reshape(x1.shape)

    def deriv(self, axis):
        lo, hi = (self.box[0], self.box[1]) if axis == 0 else (self.box[2], self.box[3])
        if self.coef.shape[axis] == 1:
            return PolyField.zero(self.box)
        return PolyField(L.legder(self.coef, axis=axis) * (2.0 / (hi - lo)), self.box)

    def _same_box(self, other):
        return isinstance(other, PolyField) and np.allclose(self.box, other.box, rtol=0, atol=0)

    def __add__(self, other):
        if np.isscalar(other):
            c = self.coef.copy()
            c[0, 0] += float(other)
            return PolyField(c, self.box)
        if self._same_box(other):
            s1 = max(self.coef.shape[0], other.coef.shape[0])
            s2 = max(self.coef.shape[1], other.coef.shape[1])
            c = np.zeros((s1, s2))
            c[: self.coef.shape[0], : self.coef.shape[1]] += self.coef
            c[: other.coef.shape[0], : other.coef.shape[1]] += other.coef
            return PolyField(c, self.box)
        return Field.__add__(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        if np.isscalar(other):
            return PolyField(self.coef * float(other), self.box)
        if self._same_box(other):
            d1 = self.degree[0] + other.degree[0]
            d2 = self.degree[1] + other.degree[1]
            return PolyField.interpolate(self.box, lambda a, b: self(a, b) * other(a, b), (d1, d2))
        return Field.__mul__(self, other)

    __rmul__ = __mul__

    def trimmed(self, tol=0.0):
        c = self.coef
        keep1 = np.nonzero(np.abs(c).max(axis=1) > tol)[0]
        keep2 = np.nonzero(np.abs(c).max(axis=0) > tol)[0]
        n1 = keep1.max() + 1 if keep1.size else 1
        n2 = keep2.max() + 1 if keep2.size else 1
        return PolyField(c[:n1, :n2], self.box)


def stack_eval(fields, x1, x2):
    """Evaluate many PolyFields on the same box at once; returns (m, n)."""
    s1 = max(f.coef.shape[0] for f in fields)
    s2 = max(f.coef.shape[1] for f in fields)
    C = np.zeros((len(fields), s1, s2))
    for k, f in enumerate(fields):
        C[k, : f.coef.shape[0], : f.coef.shape[1]] = f.coef
    xi1, xi2 = fields[0].xi(np.ravel(x1), np.ravel(x2))
    return _kernels.tensor_legendre_eval(C, xi1, xi2)


class NodalField(Field):
    """Values at the interior nodes of one quadrature set.

    Optionally carries its x1-derivative at the same nodes (known exactly
    when the field was produced by a per-line antiderivative).
    """

    def __init__(self, quad: QuadratureSet, values, dx1=None, dx2=None):
        self.quad = quad
        self.values = np.array(np.broadcast_to(values, quad.shape), dtype=float)
        self.dx1 = None if dx1 is None else np.array(np.broadcast_to(dx1, quad.shape), dtype=float)
        self.dx2 = None if dx2 is None else np.array(np.broadcast_to(dx2, quad.shape), dtype=float)

    def __call__(self, x1, x2):
        raise InvalidInputError("nodal field can only be evaluated at its own quadrature nodes")

    def at(self, quad):
        if quad is not self.quad:
            raise InvalidInputError("nodal field belongs to a different quadrature set")
        return self.values

    def deriv(self, axis):
        d = self.dx1 if axis == 0 else self.dx2
        if d is None:
            raise InvalidInputError("value-only field has no coefficient form to differentiate")
        return NodalField(self.quad, d)

    def _vals(self, other):
        if isinstance(other, NodalField):
            return other.at(self.quad)
        if np.isscalar(other):
            return float(other)
        return _as_field(other).at(self.quad)

    def __add__(self, other):
        return NodalField(self.quad, self.values + self._vals(other))

    __radd__ = __add__

    def __sub__(self, other):
        return NodalField(self.quad, self.values - self._vals(other))

    def __rsub__(self, other):
        return NodalField(self.quad, self._vals(other) - self.values)

    def __mul__(self, other):
        return NodalField(self.quad, self.values * self._vals(other))

    __rmul__ = __mul__

    def __neg__(self):
        return NodalField(self.quad, -self.values)


class VectorField:
    """Pair of scalar fields (u1, u2)."""

    def __init__(self, c1, c2):
        self.c = (_as_field(c1), _as_field(c2))

    def __getitem__(self, k):
        return self.c[k]

    def __iter__(self):
        return iter(self.c)

    def __call__(self, x1, x2):
        return np.stack([np.asarray(self.c[0](x1, x2)), np.asarray(self.c[1](x1, x2))])

    def at(self, quad):
        return np.stack([self.c[0].at(quad), self.c[1].at(quad)])

    def on_boundary(self, quad):
        return np.stack([self.c[0].on_boundary(quad), self.c[1].on_boundary(quad)])

    def __add__(self, other):
        return VectorField(self.c[0] + other.c[0], self.c[1] + other.c[1])

    def __sub__(self, other):
        return VectorField(self.c[0] - other.c[0], self.c[1] - other.c[1])

    def __mul__(self, s):
        return VectorField(self.c[0] * s, self.c[1] * s)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def zero_vector(box=None) -> VectorField:
    if box is None:
        return VectorField(ExprField(0), ExprField(0))
    return VectorField(PolyField.zero(box), PolyField.zero(box))


# --------------------------------------------------------------------------
# operators


def grad(f: Field) -> VectorField:
    return VectorField(f.deriv(0), f.deriv(1))


def perp_grad(f: Field) -> VectorField:
    """(d/dx2, -d/dx1) f."""
    return VectorField(f.deriv(1), -f.deriv(0))


def div(v: VectorField) -> Field:
    return v[0].deriv(0) + v[1].deriv(1)


def rot(v: VectorField) -> Field:
    """d u2/dx1 - d u1/dx2."""
    return v[1].deriv(0) - v[0].deriv(1)


def laplacian(f: Field) -> Field:
    return f.deriv(0).deriv(0) + f.deriv(1).deriv(1)


def vector_laplacian(v: VectorField) -> VectorField:
    return VectorField(laplacian(v[0]), laplacian(v[1]))


def normal_trace(v: VectorField, quad: QuadratureSet):
    b = v.on_boundary(quad)
    return b[0] * quad.normal[0] + b[1] * quad.normal[1]


def tangential_trace(v: VectorField, quad: QuadratureSet):
    b = v.on_boundary(quad)
    return b[0] * quad.tangent[0] + b[1] * quad.tangent[1]


def friction_trace(v: VectorField, quad: QuadratureSet, mu: float, f: float):
    """n . 2 mu D(v) . tau + f (v . tau) at the boundary nodes."""
    n, t = quad.normal, quad.tangent
    g11 = v[0].deriv(0).on_boundary(quad)
    g12 = v[0].deriv(1).on_boundary(quad)
    g21 = v[1].deriv(0).on_boundary(quad)
    g22 = v[1].deriv(1).on_boundary(quad)
    d12 = 0.5 * (g12 + g21)
    ntDt = n[0] * (g11 * t[0] + d12 * t[1]) + n[1] * (d12 * t[0] + g22 * t[1])
    return 2.0 * mu * ntDt + f * tangential_trace(v, quad)


# --------------------------------------------------------------------------
# norms


def _values(field, quad):
    if isinstance(field, VectorField):
        return field.at(quad)
    if isinstance(field, Field):
        return field.at(quad)[None]
    arr = np.asarray(field, dtype=float)
    if arr.shape == quad.shape:
        return arr[None]
    if arr.shape == (2,) + quad.shape:
        return arr
    raise InvalidInputError(f"array of shape {arr.shape} does not match quadrature {quad.shape}")


def l2_norm(field, quad: QuadratureSet) -> float:
    v = _values(field, quad)
    return math.sqrt(max(quad.integrate((v * v).sum(axis=0)), 0.0))


def h1_seminorm(field, quad: QuadratureSet) -> float:
    comps = list(field) if isinstance(field, VectorField) else [field]
    tot = 0.0
    for c in comps:
        for ax in (0, 1):
            d = c.deriv(ax).at(quad)
            tot += quad.integrate(d * d)
    return math.sqrt(tot)


def h1_norm(field, quad: QuadratureSet) -> float:
    return math.hypot(l2_norm(field, quad), h1_seminorm(field, quad))


def boundary_l2(field, quad: QuadratureSet) -> float:
    """L2(boundary) norm of a field, a vector field, or an array of boundary values."""
    if isinstance(field, VectorField):
        v = field.on_boundary(quad)
        vals = (v * v).sum(axis=0)
    elif isinstance(field, Field):
        v = field.on_boundary(quad)
        vals = v * v
    else:
        v = np.asarray(field, dtype=float)
        if v.shape[-1] != quad.n_boundary:
            raise InvalidInputError("boundary array does not match the boundary quadrature")
        vals = (v * v).sum(axis=0) if v.ndim == 2 else v * v
    return math.sqrt(max(quad.boundary_integrate(vals), 0.0))


# --------------------------------------------------------------------------
# inflow antiderivative and projection


def inflow_antiderivative(quad: QuadratureSet, f) -> NodalField:
    """F(x1, x2) = int_{x1_in(x2)}^{x1} f(s, x2) ds at the interior nodes.

    The result knows its x1-derivative (f itself at the nodes).
    """
    fv = np.asarray(f.at(quad) if isinstance(f, Field) else np.broadcast_to(f, quad.shape), dtype=float)
    return NodalField(quad, quad.line_antiderivative(fv), dx1=fv)


def boundary_antiderivative(quad: QuadratureSet, f: Field):
    """int_{x1_in(x2)}^{x1} f ds at the boundary nodes (zero on the inflow arc)."""
    x1, x2, w = quad.boundary_lines
    return np.sum(w * np.broadcast_to(f(x1, x2), x1.shape), axis=1)


def project(field, quad: QuadratureSet, degree: int, box=None) -> PolyField:
    """Weighted least-squares fit of nodal values by a PolyField of total degree <= degree."""
    vals = _values(field, quad)[0].ravel()
    box = box or quad.domain.bounding_box
    basis = [PolyField.legendre(box, i, j) for i in range(degree + 1) for j in range(degree + 1 - i)]
    A = stack_eval(basis, quad.x1, quad.x2).T
    sw = np.sqrt(quad.w.ravel())
    coef, *_ = np.linalg.lstsq(A * sw[:, None], vals * sw, rcond=None)
    c = np.zeros((degree + 1, degree + 1))
    for (k, f) in enumerate(basis):
        i, j = f.degree
        c[i, j] = coef[k]
    return PolyField(c, box)


def write_scalar_csv(path, quad: QuadratureSet, field) -> None:
    vals = _values(field, quad)[0].ravel()
    _write_csv(path, "x1,x2,value", [quad.x1.ravel(), quad.x2.ravel(), vals])


def write_vector_csv(path, quad: QuadratureSet, field) -> None:
    v = _values(field, quad)
    _write_csv(path, "x1,x2,v1,v2", [quad.x1.ravel(), quad.x2.ravel(), v[0].ravel(), v[1].ravel()])


def fmt17(x: float) -> str:
    return np.format_float_positional(float(x), precision=17, unique=False, fractional=False, trim="k")


def _write_csv(path, header, cols):
    lines = [header]
    for row in zip(*cols):
        lines.append(",".join(fmt17(v) for v in row))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

"""Analytic convex domains with an inflow/outflow split along x1.

A domain is described by a closed counterclockwise curve t -> (x1, x2),
t in [0, 1).  The reference flow is (1, 0), so the inflow arc is where the
outward normal has n1 < 0 and the two points with n1 = 0 are the
singularity points where characteristics graze the boundary.

Shipped families: circle, ellipse, and ellipse bodies whose bottom/top caps
are replaced by an exact power law |x1|^q or by |x1|^3 |ln |x1||.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import DomainError, GeometryUnsupportedError, InvalidInputError, NumericalError

TWO_PI = 2.0 * math.pi
TOL_N = 1e-10


class Region(enum.Enum):
    INFLOW = "inflow"
    OUTFLOW = "outflow"
    STAR = "star"


def classify_boundary_point(normal, tol_n: float = TOL_N) -> Region:
    n = np.asarray(normal, dtype=float)
    if n.shape != (2,) or abs(math.hypot(n[0], n[1]) - 1.0) > 1e-8:
        raise InvalidInputError(f"normal must be a unit 2-vector, got {normal!r}")
    if n[0] < -tol_n:
        return Region.INFLOW
    if n[0] > tol_n:
        return Region.OUTFLOW
    return Region.STAR


# --------------------------------------------------------------------------
# curves


class BoundaryCurve:
    """Closed parametric curve on t in [0, 1), counterclockwise."""

    ccw = True

    def position(self, t):
        raise NotImplementedError

    def d1(self, t):
        raise NotImplementedError

    def d2(self, t):
        raise NotImplementedError

    def breakpoints(self):
        """Parameters where the curve is only finitely smooth (quadrature panel edges)."""
        return np.array([])

    def check(self, n: int = 4096, tol: float = 1e-12) -> None:
        """Raise if the closed / regular / convex invariants fail on a sample."""
        t = (np.arange(n) + 0.5) / n
        gap = np.abs(self.position(np.array([0.0])) - self.position(np.array([1.0 - 1e-15])))
        if gap.max() > 1e-9:
            raise GeometryUnsupportedError(f"curve not closed (gap {gap.max():.3e})")
        d1 = self.d1(t)
        speed = np.hypot(d1[0], d1[1])
        if speed.min() <= 0.0:
            raise GeometryUnsupportedError("curve is not regular")
        d2 = self.d2(t)
        cross = d1[0] * d2[1] - d1[1] * d2[0]
        if cross.min() < -tol * speed.max() ** 3:
            raise GeometryUnsupportedError("signed curvature changes sign: domain is not convex")


def _smoothstep7(t):
    t = np.clip(t, 0.0, 1.0)
    return t**4 * (35.0 - 84.0 * t + 70.0 * t**2 - 20.0 * t**3)


class EllipseCurve(BoundaryCurve):
    def __init__(self, a: float, b: float, center=(0.0, 0.0)):
        if a <= 0 or b <= 0:
            raise InvalidInputError("semi-axes must be positive")
        self.a, self.b = float(a), float(b)
        self.center = np.asarray(center, dtype=float)

    def position(self, t):
        phi = TWO_PI * np.asarray(t, dtype=float)
        return np.stack([self.center[0] + self.a * np.sin(phi), self.center[1] - self.b * np.cos(phi)])

    def d1(self, t):
        phi = TWO_PI * np.asarray(t, dtype=float)
        return TWO_PI * np.stack([self.a * np.cos(phi), self.b * np.sin(phi)])

    def d2(self, t):
        phi = TWO_PI * np.asarray(t, dtype=float)
        return TWO_PI**2 * np.stack([-self.a * np.sin(phi), self.b * np.cos(phi)])

    # offset profile of the bottom/top caps in units of (a, b)
    def profile(self, s, order=0):
        s = np.asarray(s, dtype=float)
        root = np.sqrt(np.clip(1.0 - s * s, 0.0, None))
        if order == 0:
            return s * s / (1.0 + root)
        if order == 1:
            return s / root
        return 1.0 / root**3

    def log_profile(self, s):
        s = np.abs(np.asarray(s, dtype=float))
        with np.errstate(divide="ignore"):
            return 2.0 * np.log(s) - np.log1p(np.sqrt(np.clip(1.0 - s * s, 0.0, None)))

    def bubble(self, x1, x2):
        s = (np.asarray(x1) - self.center[0]) / self.a
        y = (np.asarray(x2) - self.center[1]) / self.b
        return 1.0 - s * s - y * y


class PowerProfile:
    """p(s) = |s|^q."""

    def __init__(self, q: float):
        if not 1.0 < q <= 4.0:
            raise InvalidInputError("flatness exponent q must lie in (1, 4]")
        self.q = float(q)

    def __call__(self, s, order=0):
        a = np.abs(np.asarray(s, dtype=float))
        q = self.q
        with np.errstate(divide="ignore", invalid="ignore"):
            if order == 0:
                return a**q
            if order == 1:
                return q * a ** (q - 1.0)
            out = q * (q - 1.0) * a ** (q - 2.0)
        return out

    def log(self, s):
        return self.q * np.log(np.abs(s))


class LogProfile:
    """p(s) = |s|^3 |ln |s||, valid for |s| < 1."""

    q = 3.0

    def __call__(self, s, order=0):
        a = np.abs(np.asarray(s, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            la = np.where(a > 0, np.log(np.where(a > 0, a, 1.0)), 0.0)
            if order == 0:
                return -(a**3) * la
            if order == 1:
                return -(a**2) * (3.0 * la + 1.0)
            return -a * (6.0 * la + 5.0)

    def log(self, s):
        a = np.abs(s)
        return 3.0 * np.log(a) + np.log(-np.log(a))


_GL_BLEND = np.polynomial.legendre.leggauss(48)


class CapCurve(BoundaryCurve):
    """Ellipse body whose bottom and top caps follow an exact profile.

    In units s = (x1 - c1)/a the lower graph offset is
    ell(s) = c * p(s) for |s| <= s0, a convex blend on (s0, s1) built by
    integrating a positive second derivative, and the scaled ellipse
    kappa * e(s) + 1 - kappa for |s| >= s1.  c and kappa are fixed so that the
    curve closes smoothly at the sides; convexity holds by construction.
    """

    def __init__(self, profile, a: float = 1.0, b: float = 1.0, center=(0.0, 0.0), blend=(0.3, 0.7)):
        if a <= 0 or b <= 0:
            raise InvalidInputError("semi-axes must be positive")
        s0, s1 = map(float, blend)
        if not 0.0 < s0 < s1 < 1.0:
            raise InvalidInputError("blend window must satisfy 0 < s0 < s1 < 1")
        self.p = profile
        self.a, self.b = float(a), float(b)
        self.center = np.asarray(center, dtype=float)
        self.s0, self.s1 = s0, s1
        self._ell = EllipseCurve(1.0, 1.0)
        self._solve_constants()

    # second derivative pieces, t in [s0, s1]
    def _chi(self, t):
        return _smoothstep7((t - self.s0) / (self.s1 - self.s0))

    def _blend_parts(self, sig, order):
        """Return (P, E) contributions on the blend window for sigma in [s0, s1]."""
        s0 = self.s0
        x, w = _GL_BLEND
        sig = np.atleast_1d(sig)
        half = 0.5 * (sig - s0)
        t = s0 + half[:, None] * (x[None, :] + 1.0)
        ww = half[:, None] * w[None, :]
        chi = self._chi(t)
        pp = (1.0 - chi) * self.p(t, 2)
        ee = chi * self._ell.profile(t, 2)
        if order == 1:
            return (self.p(s0, 1) + (ww * pp).sum(1), (ww * ee).sum(1))
        lever = sig[:, None] - t
        return (
            self.p(s0) + self.p(s0, 1) * (sig - s0) + (ww * lever * pp).sum(1),
            (ww * lever * ee).sum(1),
        )

    def _solve_constants(self):
        s1 = self.s1
        P1, E1 = self._blend_parts(s1, 1)
        P0, E0 = self._blend_parts(s1, 0)
        e0, e1 = float(self._ell.profile(s1)), float(self._ell.profile(s1, 1))
        mat = np.array([[P1[0], E1[0] - e1], [P0[0], E0[0] - e0 + 1.0]])
        c, kappa = np.linalg.solve(mat, np.array([0.0, 1.0]))
        if c <= 0 or kappa <= 0:
            raise GeometryUnsupportedError("cap blend produced non-positive constants")
        self.c, self.kappa = float(c), float(kappa)

    def ell(self, s, order=0):
        """Lower-cap offset profile and its s-derivatives (|s| < 1)."""
        s = np.asarray(s, dtype=float)
        sig = np.abs(s)
        out = np.empty_like(sig)
        inner = sig <= self.s0
        outer = sig >= self.s1
        mid = ~(inner | outer)
        if order == 2:
            out[inner] = self.c * self.p(sig[inner], 2)
            t = sig[mid]
            chi = self._chi(t)
            out[mid] = (1 - chi) * self.c * self.p(t, 2) + chi * self.kappa * self._ell.profile(t, 2)
            out[outer] = self.kappa * self._ell.profile(sig[outer], 2)
            return out
        out[inner] = self.c * self.p(sig[inner], order)
        if mid.any():
            P, E = self._blend_parts(sig[mid], order)
            out[mid] = self.c * P + self.kappa * E
        if order == 0:
            out[outer] = self.kappa * self._ell.profile(sig[outer]) + 1.0 - self.kappa
            return out
        out[outer] = self.kappa * self._ell.profile(sig[outer], 1)
        return np.sign(s) * out

    def log_ell(self, s):
        sig = np.abs(np.asarray(s, dtype=float))
        with np.errstate(divide="ignore"):
            inner = math.log(self.c) + self.p.log(np.where(sig > 0, sig, 1.0))
            full = np.log(self.ell(np.minimum(sig, 0.999)))
        return np.where(sig <= self.s0, np.where(sig > 0, inner, -np.inf), full)

    def position(self, t):
        phi = TWO_PI * np.asarray(t, dtype=float)
        s, cph = np.sin(phi), np.cos(phi)
        x1 = self.center[0] + self.a * s
        x2 = self._x2(s, cph) + self.center[1]
        return np.stack([x1, x2])

    def _x2(self, s, cph):
        sgn = np.where(cph >= 0, 1.0, -1.0)
        near = np.abs(s) < self.s1
        out = -self.b * self.kappa * cph
        if near.any():
            out = out.copy()
            out[near] = -sgn[near] * self.b * (1.0 - self.ell(s[near]))
        return out

    def d1(self, t):
        phi = TWO_PI * np.asarray(t, dtype=float)
        s, cph = np.sin(phi), np.cos(phi)
        sgn = np.where(cph >= 0, 1.0, -1.0)
        dx2 = self.b * self.kappa * s
        near = np.abs(s) < self.s1
        if near.any():
            dx2 = dx2.copy()
            dx2[near] = sgn[near] * self.b * self.ell(s[near], 1) * cph[near]
        return TWO_PI * np.stack([self.a * cph, dx2])

    def d2(self, t):
        phi = TWO_PI * np.asarray(t, dtype=float)
        s, cph = np.sin(phi), np.cos(phi)
        sgn = np.where(cph >= 0, 1.0, -1.0)
        dx2 = self.b * self.kappa * cph
        near = np.abs(s) < self.s1
        if near.any():
            dx2 = dx2.copy()
            sn, cn = s[near], cph[near]
            dx2[near] = sgn[near] * self.b * (self.ell(sn, 2) * cn * cn - self.ell(sn, 1) * sn)
        return TWO_PI**2 * np.stack([-self.a * s, dx2])

    def breakpoints(self):
        out = []
        for s in (self.s0, self.s1):
            a = math.asin(s)
            out += [a, math.pi - a, math.pi + a, TWO_PI - a]
        return np.sort(np.array(out) / TWO_PI)

    def profile(self, s, order=0):
        return self.ell(s, order)

    def log_profile(self, s):
        return self.log_ell(s)

    def bubble(self, x1, x2):
        s = np.clip((np.asarray(x1, dtype=float) - self.center[0]) / self.a, -1.0, 1.0)
        y = (np.asarray(x2, dtype=float) - self.center[1]) / self.b
        top = np.where(np.abs(s) >= self.s1, self.kappa**2 * (1.0 - s * s), (1.0 - self.ell(np.minimum(np.abs(s), 0.999999))) ** 2)
        return top - y * y


# --------------------------------------------------------------------------
# local charts at the singularity points


@dataclass(frozen=True)
class LocalGraph:
    """Boundary near a singularity point as an offset graph x1 -> l(x1) >= 0.

    x1 is measured from the singularity point; l is the distance in x2 from the
    horizontal tangent line, oriented into the domain.
    """

    center: tuple
    side: str
    halfwidth: float
    _value: Callable
    _slope: Callable
    _log: Callable

    def _check(self, x1):
        x1 = np.asarray(x1, dtype=float)
        if np.any(np.abs(x1) > self.halfwidth * (1 + 1e-12)):
            raise DomainError(f"chart evaluation outside half-width {self.halfwidth:g}")
        return x1

    def value(self, x1):
        return self._value(self._check(x1))

    def __call__(self, x1):
        return self.value(x1)

    def slope(self, x1):
        return self._slope(self._check(x1))

    def log_value(self, x1):
        return self._log(self._check(x1))

    @property
    def height(self) -> float:
        """Smallest offset reached at the chart edges."""
        return float(min(self.value(-self.halfwidth), self.value(self.halfwidth)))

    def inverse(self, offset, branch: int):
        """Solve l(x1) = offset on the branch sign(x1) = branch, vectorized.

        Bisection in log|x1| keeps relative accuracy for offsets down to the
        smallest normal doubles.
        """
        off = np.atleast_1d(np.asarray(offset, dtype=float))
        if np.any(off <= 0) or np.any(off > self.height * (1 + 1e-12)):
            raise DomainError("offset outside the chart range")
        target = np.log(off)
        lo = np.full_like(off, math.log(1e-300))
        hi = np.full_like(off, math.log(self.halfwidth))
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            val = self._log(branch * np.exp(mid))
            below = val < target
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo < 1e-15):
                break
        return branch * np.exp(0.5 * (lo + hi))


def parametric_local_graph(domain: "ConvexDomain", which: str, halfwidth: float) -> LocalGraph:
    """Chart obtained by inverting the parametrization numerically.

    Loses relative accuracy for offsets below ~1e-13 of the domain size; the
    analytic charts of the shipped families are preferred for limits.
    """
    pt = domain.singularity_points[0 if which == "lower" else 1]
    orient = 1.0 if which == "lower" else -1.0
    t_sing = domain.singularity_params[0 if which == "lower" else 1]

    def param_of(x1):
        x1 = np.atleast_1d(x1)
        out = np.empty_like(x1)
        for i, xv in enumerate(x1):
            if xv == 0.0:
                out[i] = t_sing
                continue
            # bracket on the side of t_sing where x1 moves in the right direction
            g = lambda tt: domain.curve.position(np.array([tt]))[0, 0] - pt[0] - xv
            span = 0.24
            a_, b_ = (t_sing, t_sing + span) if g(t_sing + span) * g(t_sing) < 0 else (t_sing - span, t_sing)
            out[i] = optimize.brentq(g, a_, b_, xtol=1e-15, rtol=1e-15)
        return out

    def value(x1):
        t = param_of(x1)
        return orient * (domain.curve.position(t)[1] - pt[1])

    def slope(x1):
        t = param_of(x1)
        d = domain.curve.d1(t)
        return orient * d[1] / d[0]

    return LocalGraph((float(pt[0]), float(pt[1])), which, halfwidth, value, slope, lambda x: np.log(value(x)))


# --------------------------------------------------------------------------
# domain


class ConvexDomain:
    """Convex domain bounded by an analytic curve, with inflow/outflow data."""

    def __init__(self, curve: BoundaryCurve, name: str = "domain", recipe: dict | None = None,
                 shift=(0.0, 0.0), mirror: bool = False):
        self.curve = curve
        self.name = name
        self.recipe = dict(recipe or {})
        self._shift = np.asarray(shift, dtype=float)
        self._mirror = bool(mirror)

    def __repr__(self):
        return f"ConvexDomain({self.name!r})"

    # --- transformed evaluation (translation, reflection x1 -> -x1)
    def _map(self, xy):
        xy = np.array(xy, dtype=float)
        if self._mirror:
            xy[0] = -xy[0]
        xy[0] += self._shift[0]
        xy[1] += self._shift[1]
        return xy

    def _unmap(self, x1, x2):
        x1 = np.asarray(x1, dtype=float) - self._shift[0]
        x2 = np.asarray(x2, dtype=float) - self._shift[1]
        return (-x1 if self._mirror else x1), x2

    def _t(self, t):
        t = np.asarray(t, dtype=float)
        return (1.0 - t) if self._mirror else t

    def position(self, t):
        return self._map(self.curve.position(self._t(t)))

    def d1(self, t):
        d = np.array(self.curve.d1(self._t(t)))
        if self._mirror:
            d[1] = -d[1]  # chain rule -1 on both, reflection flips x1
        return d

    def d2(self, t):
        d = np.array(self.curve.d2(self._t(t)))
        if self._mirror:
            d[0] = -d[0]
        return d

    def breakpoints(self):
        return np.sort(self._t(self.curve.breakpoints()) % 1.0)

    def speed(self, t):
        d = self.d1(t)
        return np.hypot(d[0], d[1])

    def tangent(self, t):
        d = self.d1(t)
        return d / np.hypot(d[0], d[1])

    def normal(self, t):
        tau = self.tangent(t)
        return np.stack([tau[1], -tau[0]])

    def curvature(self, t):
        d1, d2 = self.d1(t), self.d2(t)
        return (d1[0] * d2[1] - d1[1] * d2[0]) / np.hypot(d1[0], d1[1]) ** 3

    def translated(self, shift) -> "ConvexDomain":
        shift = np.asarray(shift, dtype=float)
        return ConvexDomain(self.curve, self.name, self.recipe, self._shift + shift, self._mirror)

    def reflected(self) -> "ConvexDomain":
        """Mirror image under x1 -> -x1."""
        sh = self._shift.copy()
        sh[0] = -sh[0]
        return ConvexDomain(self.curve, self.name + "-mirror", self.recipe, sh, not self._mirror)

    def bubble(self, x1, x2):
        """Smooth function, positive inside and zero on the boundary."""
        return self.curve.bubble(*self._unmap(x1, x2))

    @property
    def bubble_is_quadratic(self) -> bool:
        return isinstance(self.curve, EllipseCurve)

    # --- singularity points
    @cached_property
    def singularity_params(self) -> tuple:
        m = 2048
        t = (np.arange(m) + 0.5 + 0.1234567) / m
        n1 = self.normal(t)[0]
        sgn = np.sign(n1)
        changes = np.nonzero(sgn != np.roll(sgn, -1))[0]
        if len(changes) != 2:
            raise GeometryUnsupportedError(f"expected two sign changes of n1, found {len(changes)}")
        roots = []
        f = lambda tt: float(self.normal(np.array([tt]))[0, 0])
        for k in changes:
            a, b = t[k], t[k + 1] if k + 1 < m else t[0] + 1.0
            r = optimize.brentq(f, a, b, xtol=1e-15, rtol=1e-15, maxiter=200)
            roots.append(r % 1.0)
        pts = [self.position(np.array([r]))[:, 0] for r in roots]
        order = np.argsort([p[1] for p in pts])
        return tuple(float(roots[i]) for i in order)

    @cached_property
    def singularity_points(self) -> tuple:
        return tuple(self.position(np.array([r]))[:, 0] for r in self.singularity_params)

    @property
    def x2_range(self) -> tuple:
        lo, hi = self.singularity_points
        return float(lo[1]), float(hi[1])

    @cached_property
    def arcs(self) -> dict:
        """Parameter intervals (start, end), end > start, of the two open arcs."""
        ta, tb = sorted(self.singularity_params)
        first = (ta, tb)
        second = (tb, ta + 1.0)
        mid = 0.5 * (first[0] + first[1])
        if self.normal(np.array([mid]))[0, 0] < 0:
            return {"inflow": first, "outflow": second}
        return {"inflow": second, "outflow": first}

    def _abscissa(self, x2, arc: str, derivative: bool):
        x2 = np.atleast_1d(np.asarray(x2, dtype=float))
        lo2, hi2 = self.x2_range
        scale = max(1.0, abs(lo2), abs(hi2))
        if np.any(x2 < lo2 - 1e-12 * scale) or np.any(x2 > hi2 + 1e-12 * scale):
            raise DomainError(f"x2 outside [{lo2:.15g}, {hi2:.15g}]")
        x2 = np.clip(x2, lo2, hi2)
        t0, t1 = self.arcs[arc]
        y0 = self.position(np.array([t0]))[1, 0]
        inc = y0 < self.position(np.array([0.5 * (t0 + t1)]))[1, 0]
        lo = np.full_like(x2, t0)
        hi = np.full_like(x2, t1)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            y = self.position(mid)[1]
            go_up = (y < x2) if inc else (y > x2)
            lo = np.where(go_up, mid, lo)
            hi = np.where(go_up, hi, mid)
        t = 0.5 * (lo + hi)
        # Newton polish where the slope is healthy
        for _ in range(2):
            pos = self.position(t)
            dy = self.d1(t)[1]
            ok = np.abs(dy) > 1e-8
            step = np.where(ok, (pos[1] - x2) / np.where(ok, dy, 1.0), 0.0)
            tn = np.clip(t - step, np.minimum(lo, hi) - 1e-12, np.maximum(lo, hi) + 1e-12)
            better = np.abs(self.position(tn)[1] - x2) <= np.abs(pos[1] - x2)
            t = np.where(better, tn, t)
        resid = np.abs(self.position(t)[1] - x2)
        if np.any(resid > 1e-9 * scale):
            raise NumericalError(f"abscissa root-finding failed on {arc} arc; bracket [{t0}, {t1}], residual {resid.max():.3e}")
        pos = self.position(t)
        if not derivative:
            return pos[0]
        d = self.d1(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = d[0] / d[1]
        return pos[0], slope

    def inflow_abscissa(self, x2, derivative: bool = False):
        """x1 on the inflow arc at height x2 (and d x1 / d x2 when asked)."""
        return self._abscissa(x2, "inflow", derivative)

    def outflow_abscissa(self, x2, derivative: bool = False):
        return self._abscissa(x2, "outflow", derivative)

    # --- charts
    def local_graph(self, which: str = "lower") -> LocalGraph:
        if which not in ("lower", "upper"):
            raise InvalidInputError("which must be 'lower' or 'upper'")
        c = self.curve
        pt = self.singularity_points[0 if which == "lower" else 1]
        center = (float(pt[0]), float(pt[1]))
        if not hasattr(c, "profile"):
            return parametric_local_graph(self, which, 0.1)
        a, b = c.a, c.b
        hw = a * (getattr(c, "s1", 0.9))
        mirror = -1.0 if self._mirror else 1.0

        def value(x1):
            return b * c.profile(mirror * np.asarray(x1) / a)

        def slope(x1):
            return mirror * (b / a) * c.profile(mirror * np.asarray(x1) / a, 1)

        def log_value(x1):
            return math.log(b) + c.log_profile(mirror * np.asarray(x1) / a)

        return LocalGraph(center, which, hw, value, slope, log_value)

    # --- bulk geometry
    @cached_property
    def bounding_box(self) -> tuple:
        t = np.linspace(0.0, 1.0, 8193)
        p = self.position(t)
        lo2, hi2 = self.x2_range
        x1lo = optimize.minimize_scalar(lambda s: self.position(np.array([s]))[0, 0],
                                        bounds=(t[np.argmin(p[0])] - 2e-4, t[np.argmin(p[0])] + 2e-4), method="bounded",
                                        options={"xatol": 1e-13}).fun
        x1hi = -optimize.minimize_scalar(lambda s: -self.position(np.array([s]))[0, 0],
                                         bounds=(t[np.argmax(p[0])] - 2e-4, t[np.argmax(p[0])] + 2e-4), method="bounded",
                                         options={"xatol": 1e-13}).fun
        return (float(min(x1lo, p[0].min())), float(max(x1hi, p[0].max())), lo2, hi2)

    @cached_property
    def diameter(self) -> float:
        t = np.linspace(0.0, 1.0, 2048, endpoint=False)
        p = self.position(t)
        best = 0.0
        for k in range(0, p.shape[1], 512):
            d = np.hypot(p[0, k:k + 512, None] - p[0, None, :], p[1, k:k + 512, None] - p[1, None, :])
            best = max(best, float(d.max()))
        return best


# --------------------------------------------------------------------------
# factories


def disk(radius: float = 1.0, center=(0.0, 0.0)) -> ConvexDomain:
    return ConvexDomain(EllipseCurve(radius, radius, center), "disk",
                        {"family": "disk", "radius": radius, "center": tuple(center)})


def ellipse(a: float = 2.0, b: float = 1.0, center=(0.0, 0.0)) -> ConvexDomain:
    return ConvexDomain(EllipseCurve(a, b, center), "ellipse",
                        {"family": "ellipse", "a": a, "b": b, "center": tuple(center)})


def power_cap(q: float, a: float = 1.0, b: float = 1.0, center=(0.0, 0.0), blend=None) -> ConvexDomain:
    """Ellipse body with caps l(x1) = const * |x1|^q at both singularity points."""
    blend = blend or (0.3, 0.7)
    curve = CapCurve(PowerProfile(q), a, b, center, blend)
    return ConvexDomain(curve, f"power-q{q:g}",
                        {"family": "power", "q": q, "a": a, "b": b, "center": tuple(center), "blend": tuple(blend)})


def log_cap(a: float = 1.0, b: float = 1.0, center=(0.0, 0.0), blend=None) -> ConvexDomain:
    """Caps l(x1) = const * |x1|^3 |ln |x1||, flatter than every |x1|^q, q < 3."""
    blend = blend or (0.1, 0.4)
    curve = CapCurve(LogProfile(), a, b, center, blend)
    return ConvexDomain(curve, "log-cap",
                        {"family": "logcap", "a": a, "b": b, "center": tuple(center), "blend": tuple(blend)})


def shipped_domains() -> dict:
    """The eight domains of the classifier truth table."""
    return {
        "circle": disk(),
        "ellipse": ellipse(),
        "power-2.25": power_cap(2.25),
        "power-2.5": power_cap(2.5),
        "power-2.9": power_cap(2.9),
        "power-3": power_cap(3.0),
        "power-3.5": power_cap(3.5),
        "log-cap": log_cap(),
    }

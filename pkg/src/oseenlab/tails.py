"""Integrals with an endpoint singularity, by dyadic shells.

The integral of f over (0, y0] is split into shells [y0 2^-(j+1), y0 2^-j].
Each shell is integrated with Gauss-Legendre nodes in log y.  For integrands
that behave like a power of y near zero the shell contributions form a
geometric sequence, so the tail ratio decides convergence and gives a
closed-form remainder.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CONVERGED = "converged"
DIVERGED = "diverged"
INDETERMINATE = "indeterminate"

LN2 = math.log(2.0)


def shell_contributions(f, y0: float, n_shells: int = 400, n_nodes: int = 12, chunk: int = 64):
    """Integrals of f over the dyadic shells below y0.

    f must accept a 1-D array of positive y.  Returns an array of length
    n_shells, entry j covering [y0 2^-(j+1), y0 2^-j].
    """
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    # u = ln(y / y0) in [-(j+1) ln2, -j ln2]
    out = np.empty(n_shells)
    for start in range(0, n_shells, chunk):
        js = np.arange(start, min(start + chunk, n_shells))
        u = -LN2 * (js[:, None] + 0.5 * (1.0 - x[None, :]))
        y = y0 * np.exp(u)
        vals = np.asarray(f(y.ravel()), dtype=float).reshape(y.shape)
        out[js] = 0.5 * LN2 * (vals * y * w[None, :]).sum(axis=1)
    return out


@dataclass
class TailAssessment:
    status: str
    ratio: float
    partial: float
    value: float


def assess_tail(contribs, window: int = 20, tol_conv: float = 1e-3, tol_div: float = 1e-6) -> TailAssessment:
    """Decide convergence of sum(contribs) from the decay of its last terms.

    ratio r = (a_K / a_{K-window})^(1/window).  Converged if r < 1 - tol_conv,
    diverged if r >= 1 - tol_div; the gap between the two is indeterminate.
    """
    a = np.asarray(contribs, dtype=float)
    partial = float(a.sum())
    last, prev = abs(a[-1]), abs(a[-1 - window])
    if last == 0.0:
        return TailAssessment(CONVERGED, 0.0, partial, partial)
    if prev == 0.0 or not np.isfinite(last):
        return TailAssessment(DIVERGED, math.inf, partial, math.inf)
    r = (last / prev) ** (1.0 / window)
    if r < 1.0 - tol_conv:
        return TailAssessment(CONVERGED, r, partial, partial + a[-1] * r / (1.0 - r))
    if r >= 1.0 - tol_div:
        return TailAssessment(DIVERGED, r, partial, math.inf)
    return TailAssessment(INDETERMINATE, r, partial, math.nan)

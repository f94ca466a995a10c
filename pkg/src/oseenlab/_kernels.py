"""Hot inner loops.

Each kernel has a numba ``@njit`` version and a pure-numpy twin with the same
signature.  The numpy path is selected when ``OSEENLAB_NO_JIT=1`` is set in the
environment or numba cannot be imported.  ``OSEENLAB_THREADS`` caps numba's
thread pool.
"""
import os

import numpy as np

_WANT_JIT = os.environ.get("OSEENLAB_NO_JIT", "0").strip().lower() not in ("1", "true", "yes")

try:
    import numba
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

USE_JIT = HAS_NUMBA and _WANT_JIT

if HAS_NUMBA and os.environ.get("OSEENLAB_THREADS"):
    try:
        numba.set_num_threads(max(1, min(int(os.environ["OSEENLAB_THREADS"]), numba.config.NUMBA_NUM_THREADS)))
    except ValueError:
        pass


# ---------------------------------------------------------------- numpy path

def tensor_legendre_eval_np(coeffs, xi1, xi2):
    """Evaluate stacked tensor Legendre series.

    coeffs: (m, d1, d2); xi1, xi2: (n,) reference coordinates in [-1, 1].
    Returns (m, n).
    """
    m, d1, d2 = coeffs.shape
    v1 = np.polynomial.legendre.legvander(xi1, d1 - 1)
    v2 = np.polynomial.legendre.legvander(xi2, d2 - 1)
    tmp = np.einsum("mij,nj->mni", coeffs, v2)
    return np.einsum("mni,ni->mn", tmp, v1)


def line_cumint_np(smat, vals):
    """Apply the per-line integration matrix.

    smat: (ns, ns); vals: (m, nl, ns).  Returns out[m, l, i] = sum_k smat[i, k] vals[m, l, k].
    """
    return np.einsum("ik,mlk->mli", smat, vals)


# ---------------------------------------------------------------- numba path

if HAS_NUMBA:

    @njit(cache=True, fastmath=False)
    def tensor_legendre_eval_nb(coeffs, xi1, xi2):
        m, d1, d2 = coeffs.shape
        n = xi1.shape[0]
        out = np.zeros((m, n))
        p1 = np.empty(d1)
        p2 = np.empty(d2)
        for q in range(n):
            x = xi1[q]
            y = xi2[q]
            p1[0] = 1.0
            if d1 > 1:
                p1[1] = x
            for k in range(1, d1 - 1):
                p1[k + 1] = ((2 * k + 1) * x * p1[k] - k * p1[k - 1]) / (k + 1)
            p2[0] = 1.0
            if d2 > 1:
                p2[1] = y
            for k in range(1, d2 - 1):
                p2[k + 1] = ((2 * k + 1) * y * p2[k] - k * p2[k - 1]) / (k + 1)
            for f in range(m):
                acc = 0.0
                for i in range(d1):
                    row = 0.0
                    for j in range(d2):
                        row += coeffs[f, i, j] * p2[j]
                    acc += row * p1[i]
                out[f, q] = acc
        return out

    @njit(cache=True, fastmath=False)
    def line_cumint_nb(smat, vals):
        m, nl, ns = vals.shape
        out = np.zeros((m, nl, ns))
        for f in range(m):
            for l in range(nl):
                for i in range(ns):
                    acc = 0.0
                    for k in range(ns):
                        acc += smat[i, k] * vals[f, l, k]
                    out[f, l, i] = acc
        return out


def tensor_legendre_eval(coeffs, xi1, xi2):
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    xi1 = np.ascontiguousarray(xi1, dtype=np.float64).ravel()
    xi2 = np.ascontiguousarray(xi2, dtype=np.float64).ravel()
    if USE_JIT:
        return tensor_legendre_eval_nb(coeffs, xi1, xi2)
    return tensor_legendre_eval_np(coeffs, xi1, xi2)


def line_cumint(smat, vals):
    smat = np.ascontiguousarray(smat, dtype=np.float64)
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    if USE_JIT:
        return line_cumint_nb(smat, vals)
    return line_cumint_np(smat, vals)

"""Numpy fallback for the compiled kernels.

Same call signatures and semantics as ``_ckernels``; used when the
extension is unavailable or when ``SEMIDECAY_PURE_PYTHON=1``.
"""

import math

import numpy as np


def power_weight_sup(absd, w, n):
    """Return (max_j w[j]*absd[j]**n, argmax j) over the given arrays."""
    v = np.asarray(w) * np.asarray(absd) ** n
    j = int(np.argmax(v))
    return float(v[j]), j


def resolvent_weight_sup(dre, dim, w, lre, lim, k):
    """Return (max_j w[j]/|lam - d[j]|**k, argmax j)."""
    dist2 = (lre - np.asarray(dre)) ** 2 + (lim - np.asarray(dim)) ** 2
    if np.any(dist2 == 0.0):
        return math.inf, int(np.argmax(dist2 == 0.0))
    v = np.asarray(w) / dist2 ** (0.5 * k)
    j = int(np.argmax(v))
    return float(v[j]), j


def dot_powers(coef, x):
    """Sum of coef[j]*x**j for j = 0..len(coef)-1 (pairwise summation)."""
    coef = np.asarray(coef, dtype=float)
    powers = np.power(float(x), np.arange(coef.shape[0], dtype=float))
    return float(np.dot(coef, powers))


def orbit_partial_sums(absd, w, absx, fvals, p, q, out, block=512):
    """Cumulative sums over n of fvals[n-1] * ||absd^n * w * absx||_q^p.

    Vectorized in blocks of n to keep the per-step numpy overhead off the
    inner loop; q <= 0 selects the sup norm.
    """
    absd = np.asarray(absd, dtype=float)
    base = absd * np.asarray(w, dtype=float) * np.asarray(absx, dtype=float)
    fvals = np.asarray(fvals, dtype=float)
    nmax = fvals.shape[0]
    zero = absd == 0.0
    with np.errstate(divide="ignore"):
        logd = np.where(zero, 0.0, np.log(np.where(zero, 1.0, absd)))
    acc = 0.0
    for start in range(0, nmax, block):
        stop = min(start + block, nmax)
        expo = np.arange(start, stop, dtype=float)[:, None] * logd[None, :]
        mat = np.exp(expo)
        mat[:, zero] = 0.0
        mat *= base[None, :]
        if q <= 0.0:
            s = mat.max(axis=1) ** p
        else:
            s = (mat**q).sum(axis=1) ** (p / q)
        out[start:stop] = acc + np.cumsum(fvals[start:stop] * s)
        acc = out[stop - 1]
    return None

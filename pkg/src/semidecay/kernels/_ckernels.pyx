# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: diagonal-symbol suprema and long weighted series.

These are the kernels that dominate runtime when a sweep falls back to
brute force over sequence indices (up to ~10^6 per spectral point).  The
pure-numpy equivalents live in ``_pykernels``; the two must agree to
machine precision (see tests/test_kernels.py).
"""

from libc.math cimport pow, INFINITY


def power_weight_sup(double[::1] absd, double[::1] w, long n):
    """Return (max_j w[j]*absd[j]**n, argmax j) over the given arrays."""
    cdef Py_ssize_t j, m = absd.shape[0], best = 0
    cdef double v, bestv = -INFINITY
    for j in range(m):
        v = w[j] * pow(absd[j], <double> n)
        if v > bestv:
            bestv = v
            best = j
    return bestv, best


def resolvent_weight_sup(double[::1] dre, double[::1] dim,
                         double[::1] w, double lre, double lim,
                         long k):
    """Return (max_j w[j]/|lam - d[j]|**k, argmax j)."""
    cdef Py_ssize_t j, m = dre.shape[0], best = 0
    cdef double dx, dy, dist2, v, bestv = -INFINITY
    cdef double halfk = 0.5 * k
    for j in range(m):
        dx = lre - dre[j]
        dy = lim - dim[j]
        dist2 = dx * dx + dy * dy
        if dist2 == 0.0:
            return INFINITY, j
        v = w[j] / pow(dist2, halfk)
        if v > bestv:
            bestv = v
            best = j
    return bestv, best


def dot_powers(double[::1] coef, double x):
    """Compensated sum of coef[j]*x**j for j = 0..len(coef)-1."""
    cdef Py_ssize_t j, m = coef.shape[0]
    cdef double p = 1.0, s = 0.0, c = 0.0, y, t, term
    for j in range(m):
        term = coef[j] * p
        y = term - c
        t = s + y
        c = (t - s) - y
        s = t
        p *= x
    return s


def orbit_partial_sums(double[::1] absd, double[::1] w, double[::1] absx,
                       double[::1] fvals, double p, double q,
                       double[::1] out):
    """Cumulative sums over n of fvals[n-1] * ||absd^n * w * absx||_q^p.

    ``q <= 0`` selects the sup norm.  ``out`` must have the same length
    as ``fvals``; it receives the running partial sums.
    """
    cdef Py_ssize_t j, n, m = absd.shape[0], nmax = fvals.shape[0]
    cdef double acc = 0.0, s, v
    cdef double[::1] t = absd.copy()
    for j in range(m):
        t[j] = absd[j] * w[j] * absx[j]
    for n in range(nmax):
        if q <= 0.0:
            s = 0.0
            for j in range(m):
                if t[j] > s:
                    s = t[j]
            v = pow(s, p)
        else:
            s = 0.0
            for j in range(m):
                s += pow(t[j], q)
            v = pow(s, p / q)
        acc += fvals[n] * v
        out[n] = acc
        for j in range(m):
            t[j] *= absd[j]
    return None

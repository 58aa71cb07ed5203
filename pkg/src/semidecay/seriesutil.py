"""Truncated series over integer indices with certified tails.

Every infinite sum in the package goes through these helpers: a direct
partial sum plus a tail bracketed by integrals of the (eventually
monotone) continuous extension of the terms.  The half-width of the
bracket is reported as the error bound, so norm claims are never backed
by silent truncation.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DivergenceError


@dataclass(frozen=True)
class SeriesResult:
    """A series value with a certified absolute error bound."""

    value: float
    abs_error: float
    n_terms: int
    method: str

    @property
    def rel_error(self):
        return self.abs_error / abs(self.value) if self.value else self.abs_error

    def __float__(self):
        return self.value


def _quad_tail(term_scalar, a):
    val, err = quad(term_scalar, a, np.inf, limit=200)
    return val, err


def series_decreasing(term, *, start=1, rel_tol=1e-12, chunk=2**18, max_terms=2**23, tail_integral=None):
    """Sum term(j) for j >= start, term nonincreasing from some point on.

    ``term`` must accept float arrays.  The remainder past the last
    summed index N is bracketed by [int_{N+1}, int_N] of the continuous
    extension; the bracket midpoint is added and its half-width (plus
    quadrature error) reported.
    """

    def term_scalar(s):
        return float(np.asarray(term(np.array([s])))[0])

    total = 0.0
    n = start
    while n < start + max_terms:
        stop = n + chunk
        j = np.arange(n, stop, dtype=float)
        vals = np.asarray(term(j), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise DivergenceError("series terms are not finite")
        total += float(np.sum(vals))
        n = stop
        last = float(vals[-1])
        if last <= rel_tol * max(abs(total), 1e-300):
            break
    n_last = n - 1
    if tail_integral is not None:
        hi = tail_integral(n_last)
        lo = tail_integral(n_last + 1)
        quad_err = 0.0
    else:
        hi, e1 = _quad_tail(term_scalar, n_last)
        lo, e2 = _quad_tail(term_scalar, n_last + 1)
        quad_err = e1 + e2
    mid = 0.5 * (hi + lo)
    half = 0.5 * abs(hi - lo) + quad_err
    return SeriesResult(total + mid, half + rel_tol * abs(total), n_last - start + 1, "direct+tail")


# backwards-compatible name used by the operators module
def series_over_indices(term, *, start=1, rel_tol=1e-12, **kw):
    return series_decreasing(term, start=start, rel_tol=rel_tol, **kw)


def series_unimodal(term, *, peak, start=1, rel_tol=1e-12, direct_cap=2**21, quad_rel=1e-11):
    """Sum term(j) for j >= start when term rises to a single peak and falls.

    Below ``direct_cap`` the peak region is summed directly and only the
    decreasing tail is bracketed.  For far-out peaks the whole sum is
    bracketed around the integral: |sum - int| <= max(term), which is a
    vanishing relative error when the peak is wide.
    """
    peak = max(float(peak), float(start))
    if peak * 4 <= direct_cap:
        return series_decreasing(term, start=start, rel_tol=rel_tol)

    def term_scalar(s):
        return float(np.asarray(term(np.array([s])))[0])

    left, e1 = quad(term_scalar, start, peak, limit=200)
    right, e2 = _quad_tail(term_scalar, peak)
    h_peak = term_scalar(peak)
    value = left + right
    return SeriesResult(value, h_peak + e1 + e2 + quad_rel * value, 0, "integral-bracket")


def geometric_power_series(coef, inv_r, *, start=0, rel_tol=1e-13, chunk=2**18, max_terms=2**23, envelope=None):
    """Sum coef(n) * inv_r**n for n >= start, 0 < inv_r < 1.

    ``coef`` maps integer arrays to nonnegative floats.  The compiled
    dot-powers kernel accumulates each chunk with compensated summation.
    The tail is certified from a nonincreasing ``envelope`` bound on
    coef (default: the last computed coefficient, valid when coef is
    nonincreasing) via a geometric-ratio estimate.
    """
    from . import kernels

    if not (0.0 < inv_r < 1.0):
        raise DivergenceError(f"geometric ratio {inv_r} outside (0, 1)")
    total = 0.0
    n = start
    scale = inv_r**start
    while n < start + max_terms:
        stop = n + chunk
        idx = np.arange(n, stop, dtype=float)
        c = np.ascontiguousarray(np.asarray(coef(idx), dtype=float))
        if not np.all(np.isfinite(c)):
            raise DivergenceError("series coefficients are not finite")
        total += scale * kernels.dot_powers(c, inv_r)
        scale *= inv_r**chunk
        n = stop
        c_last = envelope(n) if envelope is not None else float(c[-1])
        tail = c_last * scale / (1.0 - inv_r)
        if tail <= rel_tol * max(abs(total), 1e-300):
            return SeriesResult(total, tail, n - start, "dot-powers+geometric-tail")
    return SeriesResult(total, tail, n - start, "dot-powers+geometric-tail(capped)")


def polynomial_geometric_tail(n_from, beta, ratio):
    """Certified bound on sum_{n > n_from} n^beta * ratio**n for ratio < 1.

    Uses the ratio test envelope: terms shrink by at least
    q = ratio * (1 + 1/n_from)**max(beta, 0) per step; requires q < 1.
    """
    if not (0.0 < ratio < 1.0):
        raise DivergenceError(f"ratio {ratio} outside (0, 1)")
    n0 = float(n_from)
    q = ratio * (1.0 + 1.0 / n0) ** max(beta, 0.0)
    if q >= 1.0:
        raise DivergenceError(f"tail ratio {q} >= 1 at n = {n_from}; push truncation further out")
    first = (n0 + 1.0) ** beta * ratio ** (n0 + 1.0)
    return first / (1.0 - q)

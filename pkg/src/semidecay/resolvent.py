"""Resolvent application, contour quadrature, and the circle-average identity.

Everything here lives on circles |lambda| = r > 1.  Uniform trapezoid
quadrature is exponentially accurate for the periodic analytic
integrands that arise, so the default angle counts are modest and the
sweeps double them only until the result stops moving.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, DomainError, UnboundedTruncationError
from .operators import (
    DenseOperator,
    DiagonalOperator,
    LeftShiftOperator,
    NormResult,
    RowFunctional,
    as_vector,
    batched_spectral_norm,
    diag_resolvent_norm,
    operator_norm,
    power_bound,
)
from .profiles import GrowthProfile
from .seriesutil import geometric_power_series, polynomial_geometric_tail, series_decreasing
from .symbols import ConstSymbol


@dataclass(frozen=True)
class SpectralPoint:
    """A point lambda = r e^{i theta} outside the closed unit disk."""

    r: float
    theta: float

    def __post_init__(self):
        if self.r <= 1.0:
            raise DomainError(f"spectral point needs r > 1, got {self.r}")

    @property
    def lam(self):
        return self.r * complex(math.cos(self.theta), math.sin(self.theta))


@dataclass(frozen=True)
class SpectralGrid:
    """Radius schedule r_j = 1 + 2^-j with a uniform angle grid."""

    j_min: int = 1
    j_max: int = 20
    n_theta: int = 1024
    refine_tol: float = 1e-3
    auto_double: bool = True
    n_theta_cap: int = 2**16

    def __post_init__(self):
        if self.j_min > self.j_max:
            raise ValueError("j_min must be <= j_max")
        if self.n_theta < 64 or self.n_theta & (self.n_theta - 1):
            raise ValueError("n_theta must be a power of two >= 64")

    @property
    def radii(self):
        return 1.0 + 2.0 ** -np.arange(self.j_min, self.j_max + 1, dtype=float)

    @staticmethod
    def thetas(n):
        return 2.0 * math.pi * np.arange(n) / n


def _as_lambda(lam):
    if isinstance(lam, SpectralPoint):
        return lam.lam
    return complex(lam)


def spectral_radius(op):
    """(radius estimate, exact flag) from the spectrum hint, or None."""
    if isinstance(op, LeftShiftOperator):
        return 1.0, True
    sp = op.spectrum()
    if sp is None:
        return None
    return sp.radius, sp.exact


def resolvent_apply(t_op, lam, k, x, tol=1e-14):
    """R(lambda, T)^k x for |lambda| > 1.

    Dense kinds use k successive solves, diagonal kinds the exact
    coordinatewise formula, and anything else a truncated power series
    with a certified geometric tail.
    """
    lam = _as_lambda(lam)
    if k < 1:
        raise ValueError(f"resolvent power must be >= 1, got {k}")
    if abs(lam) <= 1.0:
        raise DomainError(f"|lambda| = {abs(lam)} is not > 1")
    rad = spectral_radius(t_op)
    if rad is not None and abs(lam) <= rad[0] and rad[0] > 1.0:
        raise DomainError(f"|lambda| = {abs(lam)} inside spectral radius estimate {rad[0]}")
    x = as_vector(x)
    if isinstance(t_op, DiagonalOperator):
        t_op._check_dim(x)
        j = np.arange(1, x.shape[0] + 1, dtype=float)
        return x / t_op.symbol.lam_minus(lam, j) ** k
    if isinstance(t_op, DenseOperator):
        a = lam * np.eye(t_op.matrix.shape[0]) - t_op.matrix
        v = x
        for _ in range(k):
            v = np.linalg.solve(a, v)
        return v
    return _neumann_resolvent(t_op, lam, k, x, tol)


def _neumann_resolvent(t_op, lam, k, x, tol):
    pb = power_bound(t_op)
    rho = 1.0 / abs(lam)
    if rho >= 1.0:
        raise DivergenceError(f"power series ratio {rho} >= 1")
    acc = np.zeros_like(x)
    v = x.copy()
    coef = 1.0 / lam**k
    norm_x = float(np.linalg.norm(x))
    fact = math.factorial(k - 1)
    for n in range(100_000):
        acc = acc + math.comb(n + k - 1, k - 1) * coef * v
        tail = (
            pb.constant
            * norm_x
            / (abs(lam) ** k * fact)
            * rho ** (-k)
            * polynomial_geometric_tail(n + k, k - 1, rho)
        )
        if tail <= tol * max(float(np.linalg.norm(acc)), 1e-300):
            return acc
        v = t_op.apply(v)
        coef /= lam
    raise DivergenceError("power series for the resolvent did not converge in 1e5 terms")


def resolvent_matrices(t_op, lams, k=1):
    """Stack of R(lambda, T)^k as dense matrices for an array of lambdas."""
    if not isinstance(t_op, DenseOperator):
        raise UnboundedTruncationError("dense resolvent matrices need a dense operator")
    a = t_op.matrix
    m = a.shape[0]
    lams = np.asarray(lams, dtype=complex)
    shifted = lams[:, None, None] * np.eye(m)[None, :, :] - a[None, :, :]
    out = np.linalg.solve(shifted, np.broadcast_to(np.eye(m), (lams.size, m, m)))
    for _ in range(k - 1):
        out = np.linalg.solve(shifted, out)
    return out


def reconstruct_power(t_op, n, k, r, n_theta):
    """Recover T^n from a circle integral of R(r e^{i theta}, T)^k.

    Uniform trapezoid rule on n_theta nodes; returns the reconstructed
    dense matrix.  Requires r above the spectral radius estimate.
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    rad = spectral_radius(t_op)
    if rad is not None and r <= rad[0]:
        raise DomainError(f"radius {r} must exceed spectral radius estimate {rad[0]}")
    if not isinstance(t_op, DenseOperator):
        raise UnboundedTruncationError("power reconstruction is a dense-matrix operation")
    thetas = SpectralGrid.thetas(n_theta)
    lams = r * np.exp(1j * thetas)
    rk = resolvent_matrices(t_op, lams, k)
    phases = np.exp(1j * thetas * (n + k))
    integral = np.tensordot(phases, rk, axes=(0, 0)) / n_theta
    return r ** (n + k) * integral / math.comb(n + k - 1, k - 1)


@dataclass(frozen=True)
class ParsevalReport:
    """Circle average of ||S R^k x||^2 against its power-series value."""

    lhs: float
    rhs: float
    tail_bound: float
    residual: float
    r: float
    k: int
    n_theta: int
    n_trunc: int

    def __iter__(self):  # convenience unpacking (residual, tail)
        return iter((self.residual, self.tail_bound))


def parseval_check(t_op, s_op, k, r, x, n_theta=4096, n_trunc=None, tol=1e-12):
    """Compare (1/2pi) int ||S R(re^{i t},T)^k x||^2 dt with its series.

    The series side is truncated with a certified geometric tail bound
    derived from a power bound on T; if no power bound can be produced
    the check fails explicitly rather than truncating blindly.
    """
    x = as_vector(x)
    rad = spectral_radius(t_op)
    if rad is not None and r <= rad[0]:
        raise DomainError(f"radius {r} must exceed spectral radius estimate {rad[0]}")
    thetas = SpectralGrid.thetas(n_theta)
    vals = np.empty(n_theta)
    for i, th in enumerate(thetas):
        v = resolvent_apply(t_op, r * np.exp(1j * th), k, x)
        vals[i] = np.linalg.norm(s_op.apply(v)) ** 2
    lhs = float(np.mean(vals))

    pb = power_bound(t_op)
    s_norm = operator_norm(s_op).value
    norm_x = float(np.linalg.norm(x))
    rho = 1.0 / r**2
    fact = math.factorial(k - 1)
    if n_trunc is None:
        n_trunc = 64
        while True:
            tail = (
                (s_norm * pb.constant * norm_x / (r**k * fact)) ** 2
                * rho ** (-k)
                * polynomial_geometric_tail(n_trunc + k, 2 * (k - 1), rho)
            )
            if tail <= tol or n_trunc >= 2**20:
                break
            n_trunc *= 2
    else:
        tail = (
            (s_norm * pb.constant * norm_x / (r**k * fact)) ** 2
            * rho ** (-k)
            * polynomial_geometric_tail(n_trunc + k, 2 * (k - 1), rho)
        )
    rhs = 0.0
    v = x.copy()
    for n in range(n_trunc + 1):
        term = math.comb(n + k - 1, k - 1) * np.linalg.norm(s_op.apply(v)) / r ** (n + k)
        rhs += float(term) ** 2
        v = t_op.apply(v)
    return ParsevalReport(lhs, rhs, tail, abs(lhs - rhs), r, k, n_theta, n_trunc)


def resolvent_point_norm(t_op, s_op, lam, k=1, tol=1e-12):
    """||R(lambda, T)^k S|| at one spectral point.

    Diagonal pairs use exact kernel maximization, dense pairs a solve
    plus the Gram norm, row-functional pairs a certified coefficient
    series, and the shift with nonincreasing diagonal weights the
    closed-form weighted power series on c_0.
    """
    lam = _as_lambda(lam)
    if abs(lam) <= 1.0:
        raise DomainError(f"|lambda| = {abs(lam)} is not > 1")
    if isinstance(t_op, DiagonalOperator) and (s_op is None or isinstance(s_op, DiagonalOperator)):
        w = ConstSymbol(1.0) if s_op is None else s_op.symbol
        return diag_resolvent_norm(t_op.symbol, w, lam, k)
    if isinstance(t_op, DenseOperator):
        mat = resolvent_matrices(t_op, np.array([lam]), k)[0]
        if s_op is not None:
            if not isinstance(s_op, DenseOperator):
                raise UnboundedTruncationError("dense T needs dense (or identity) S")
            mat = mat @ s_op.matrix
        res = operator_norm(DenseOperator(mat), tol=tol)
        return res
    if isinstance(s_op, RowFunctional) and isinstance(t_op, DiagonalOperator):
        sym_c, sym_d = s_op.symbol, t_op.symbol

        def term(j):
            return sym_c.abs_values(j) ** 2 / np.abs(sym_d.lam_minus(lam, j)) ** (2 * k)

        ser = series_decreasing(term, rel_tol=1e-13)
        return NormResult(math.sqrt(ser.value), ser.rel_error / 2.0, "coefficient-series", witness=ser.n_terms)
    if isinstance(t_op, LeftShiftOperator) and isinstance(s_op, DiagonalOperator) and k == 1:
        sym = s_op.symbol
        if sym.abs_monotone != "nonincreasing":
            raise UnboundedTruncationError("shift path needs nonincreasing weights")
        inv_r = 1.0 / abs(lam)
        ser = geometric_power_series(lambda m: sym.abs_values(m + 1.0), inv_r, start=0, rel_tol=1e-13)
        return NormResult(inv_r * ser.value, ser.rel_error, "shift-weight-series", witness=ser.n_terms)
    raise UnboundedTruncationError(
        f"no norm route for resolvent of {t_op.kind} against {getattr(s_op, 'kind', 'identity')}"
    )


@dataclass
class SweepPoint:
    r: float
    sup: float
    n_theta: int
    flag: str = ""


def resolvent_sweep(t_op, s_op, k, grid, cond_cap=1e12):
    """sup over angles of ||R(r e^{i theta},T)^k S|| for each grid radius.

    The angle count doubles until the sup moves by less than the grid's
    refinement tolerance.  Dense sweeps stop early (with a flag) once the
    per-point norms indicate the solves are no longer trustworthy.
    """
    points = []
    truncated = False
    for r in grid.radii:
        if truncated:
            break
        n_theta = grid.n_theta
        sup_prev = None
        while True:
            sup_here = _sweep_sup(t_op, s_op, k, r, n_theta)
            if not grid.auto_double or (
                sup_prev is not None and abs(sup_here - sup_prev) <= grid.refine_tol * max(sup_here, 1e-300)
            ):
                break
            if n_theta * 2 > grid.n_theta_cap:
                break
            sup_prev = sup_here
            n_theta *= 2
        flag = ""
        if isinstance(t_op, DenseOperator) and sup_here > cond_cap:
            flag = "ill-conditioned-stop"
            truncated = True
        points.append(SweepPoint(float(r), sup_here, n_theta, flag))
    prof = GrowthProfile(
        radii=np.array([p.r for p in points]),
        sup_norms=np.array([p.sup for p in points]),
        n_theta_used=np.array([p.n_theta for p in points], dtype=int),
        meta={
            "k": k,
            "row_flags": [p.flag for p in points],
            "grid": {"j_min": grid.j_min, "j_max": grid.j_max, "n_theta": grid.n_theta},
        },
    )
    if truncated:
        prof.flags.append("truncated-schedule")
    return prof


def _sweep_sup(t_op, s_op, k, r, n_theta):
    if isinstance(t_op, DenseOperator):
        thetas = SpectralGrid.thetas(n_theta)
        lams = r * np.exp(1j * thetas)
        mats = resolvent_matrices(t_op, lams, k)
        if s_op is not None:
            if not isinstance(s_op, DenseOperator):
                raise UnboundedTruncationError("dense T needs dense (or identity) S")
            mats = mats @ s_op.matrix
        return float(np.max(batched_spectral_norm(mats)))
    if isinstance(t_op, LeftShiftOperator):
        # radially symmetric closed form; no angle refinement needed
        return resolvent_point_norm(t_op, s_op, r, k).value
    if isinstance(t_op, DiagonalOperator) and t_op.symbol.is_real:
        # per-index distances are monotone in cos(theta), so the angular
        # sup sits at theta = 0 (positive part) or pi (negative part)
        return max(
            resolvent_point_norm(t_op, s_op, complex(r), k).value,
            resolvent_point_norm(t_op, s_op, complex(-r), k).value,
        )
    best = 0.0
    for th in SpectralGrid.thetas(n_theta):
        best = max(best, resolvent_point_norm(t_op, s_op, r * np.exp(1j * th), k).value)
    return best

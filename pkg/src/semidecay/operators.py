"""Bounded linear operators at desk scale.

Five kinds are supported: dense matrices, diagonal (multiplication)
operators over sequence spaces, the left shift, row functionals, and
compositions.  Sequence-space norms are evaluated by exact maximization
of scalar kernels over the index j (never by silent truncation); dense
spectral norms use power iteration on the Gram operator.

All operators are immutable after construction and safe for concurrent
reads.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

from . import kernels
from .errors import (
    DimensionMismatchError,
    OperatorSpecError,
    UnboundedTruncationError,
)
from .symbols import ConstSymbol, DiagonalSymbol, ExplicitSymbol, OneMinusSymbol, parse_symbol

#: default index cap for brute-force suprema over sequence indices
J_MAX_BRUTE = 10**6


def as_vector(x):
    """Validate and return a finite complex vector (length >= 1)."""
    v = np.atleast_1d(np.asarray(x, dtype=complex))
    if v.ndim != 1 or v.size == 0:
        raise ValueError("vector must be one-dimensional with length >= 1")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def vec_norm(x, q=2.0):
    """l^q norm of a finite vector (q = inf for the sup norm)."""
    x = np.asarray(x)
    if q == math.inf:
        return float(np.max(np.abs(x))) if x.size else 0.0
    return float(np.sum(np.abs(x) ** q) ** (1.0 / q))


@dataclass(frozen=True)
class NormResult:
    """An operator-norm value with its reported accuracy and provenance."""

    value: float
    rel_error: float
    method: str
    witness: object = None
    iterations: int = 0
    converged: bool = True

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class SpectrumInfo:
    """Enumerable description of the spectrum (points plus radius)."""

    points: np.ndarray
    radius: float
    exact: bool


# ---------------------------------------------------------------------------
# kernel maximization over integer indices


def max_kernel_over_indices(kernel, *, hints=(), limit_value=None, s_max=1e12, scan_points=768):
    """Maximize a nonnegative scalar kernel over j in {1, 2, ...}.

    ``kernel`` must accept float arrays s >= 1 and agree with the integer
    kernel at integer arguments.  The search assumes the kernel is
    unimodal-or-monotone on [1, inf) (true for every built-in symbol
    pairing); closed-form argmax ``hints`` and the j -> inf ``limit_value``
    are folded in, so suprema attained only in the limit are reported
    with witness None.
    """
    cands = set(range(1, 65))
    lo, hi = 0.0, math.log10(s_max)
    for _ in range(4):
        s = np.logspace(lo, hi, scan_points)
        vals = np.asarray(kernel(s), dtype=float)
        top = int(np.argmax(vals))
        if top < scan_points - 2:
            break
        lo, hi = hi - 1.0, min(hi + 6.0, 18.0)
    else:
        top = scan_points - 1

    def refine(a, b):
        res = minimize_scalar(
            lambda t: -float(kernel(np.array([math.exp(t)]))[0]),
            bounds=(math.log(a), math.log(b)),
            method="bounded",
            options={"xatol": 1e-14},
        )
        return math.exp(res.x)

    lo_s = s[max(top - 1, 0)]
    hi_s = s[min(top + 1, scan_points - 1)]
    peaks = [refine(lo_s, max(hi_s, lo_s * (1 + 1e-12)))]
    for h in hints:
        if h is not None and h > 1:
            peaks.append(refine(max(1.0, h / 4.0), h * 4.0))
            peaks.append(float(h))
    for pk in peaks:
        cands.add(max(1, int(math.floor(pk))))
        cands.add(int(math.ceil(pk)))

    jarr = np.array(sorted(cands), dtype=float)
    vals = np.asarray(kernel(jarr), dtype=float)
    best = int(np.argmax(vals))
    value, witness = float(vals[best]), int(jarr[best])
    if limit_value is not None and limit_value > value:
        return float(limit_value), None
    return value, witness


def brute_force_kernel_sup(kernel, j_cap=J_MAX_BRUTE):
    """Plain max of a kernel over j <= j_cap (oracle path, chunked)."""
    best, arg = -math.inf, 1
    for start in range(1, j_cap + 1, 2**20):
        stop = min(start + 2**20, j_cap + 1)
        j = np.arange(start, stop, dtype=float)
        vals = np.asarray(kernel(j), dtype=float)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, arg = float(vals[k]), start + k
    return best, arg


# ---------------------------------------------------------------------------
# dense spectral norms (power iteration on the Gram operator)


def dense_spectral_norm(a, tol=1e-12, max_iter=10**4, rng=None):
    """Largest singular value of a dense matrix via Gram power iteration.

    The residual of the Hermitian eigenproblem bounds the eigenvalue
    error, so the reported ``rel_error`` is a certificate, not a guess.
    """
    a = np.asarray(a, dtype=complex)
    gram = a.conj().T @ a
    scale = np.linalg.norm(gram, "fro")
    if scale == 0.0:
        return NormResult(0.0, 0.0, "gram-power-iteration")
    if rng is None:
        rng = np.random.default_rng(0)
    n = gram.shape[0]
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    res = math.inf
    for it in range(1, max_iter + 1):
        w = gram @ v
        lam = float(np.real(np.vdot(v, w)))
        res = float(np.linalg.norm(w - lam * v))
        if res <= tol * max(lam, scale * 1e-300):
            break
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return NormResult(0.0, 0.0, "gram-power-iteration", iterations=it)
        v = w / nw
    sigma = math.sqrt(max(lam, 0.0))
    rel = res / (2.0 * lam) if lam > 0 else 0.0
    return NormResult(sigma, rel, "gram-power-iteration", iterations=it, converged=res <= tol * max(lam, 1e-300))


def batched_spectral_norm(mats, tol=1e-10, max_iter=10**4, rng=None):
    """Largest singular values of a stack of matrices (N, m, k) at once."""
    mats = np.asarray(mats, dtype=complex)
    grams = np.einsum("nji,njk->nik", mats.conj(), mats)
    nbatch, m = grams.shape[0], grams.shape[1]
    if rng is None:
        rng = np.random.default_rng(0)
    v = rng.standard_normal((nbatch, m)) + 1j * rng.standard_normal((nbatch, m))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    lam = np.zeros(nbatch)
    active = np.ones(nbatch, dtype=bool)
    for _ in range(max_iter):
        w = np.einsum("nik,nk->ni", grams[active], v[active])
        lam_a = np.real(np.einsum("ni,ni->n", v[active].conj(), w))
        res = np.linalg.norm(w - lam_a[:, None] * v[active], axis=1)
        lam[active] = lam_a
        nw = np.linalg.norm(w, axis=1)
        nz = nw > 0
        w[nz] /= nw[nz, None]
        v[active] = np.where(nz[:, None], w, v[active])
        done = (res <= tol * np.maximum(lam_a, 1e-300)) | ~nz
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not active.any():
            break
    return np.sqrt(np.maximum(lam, 0.0))


# ---------------------------------------------------------------------------
# operator kinds


class LinearOperator:
    """Base class; values are immutable, apply/adjoint_apply are pure."""

    kind = "abstract"
    space = "l2"
    #: None means sequence space (finite vectors act as truncations)
    dim = None

    def apply(self, x):
        raise NotImplementedError

    def adjoint_apply(self, x):
        raise NotImplementedError

    def norm(self, tol=1e-12):
        raise UnboundedTruncationError(
            f"{self.kind} operator has no norm hint or tail bound; refusing to truncate"
        )

    def spectrum(self):
        return None

    def _check_dim(self, x):
        if self.dim is not None and x.shape[0] != self.dim:
            raise DimensionMismatchError(self.dim, x.shape[0])


class DenseOperator(LinearOperator):
    kind = "dense"

    def __init__(self, matrix):
        a = np.asarray(matrix, dtype=complex)
        if a.ndim != 2:
            raise OperatorSpecError("entries", "dense operator needs a 2-d matrix")
        if not np.all(np.isfinite(a)):
            raise OperatorSpecError("entries", "dense operator has non-finite entries")
        self.matrix = a
        self.matrix.setflags(write=False)
        self.dim = a.shape[1]
        self.out_dim = a.shape[0]

    def apply(self, x):
        x = as_vector(x)
        if x.shape[0] != self.matrix.shape[1]:
            raise DimensionMismatchError(self.matrix.shape[1], x.shape[0])
        return self.matrix @ x

    def adjoint_apply(self, x):
        x = as_vector(x)
        if x.shape[0] != self.matrix.shape[0]:
            raise DimensionMismatchError(self.matrix.shape[0], x.shape[0])
        return self.matrix.conj().T @ x

    def norm(self, tol=1e-12):
        return dense_spectral_norm(self.matrix, tol=tol)

    def spectrum(self):
        if self.matrix.shape[0] != self.matrix.shape[1]:
            return None
        lam = np.linalg.eigvals(self.matrix)
        return SpectrumInfo(lam, float(np.max(np.abs(lam))) if lam.size else 0.0, exact=False)


class DiagonalOperator(LinearOperator):
    kind = "diagonal"

    def __init__(self, symbol, space="l2"):
        self.symbol = parse_symbol(symbol)
        self.space = space
        self.dim = self.symbol.dim if isinstance(self.symbol, ExplicitSymbol) else None

    def apply(self, x):
        x = as_vector(x)
        self._check_dim(x)
        j = np.arange(1, x.shape[0] + 1, dtype=float)
        return self.symbol.values(j) * x

    def adjoint_apply(self, x):
        x = as_vector(x)
        self._check_dim(x)
        j = np.arange(1, x.shape[0] + 1, dtype=float)
        return np.conj(self.symbol.values(j)) * x

    def norm(self, tol=1e-12):
        value = self.symbol.sup_abs()
        exact = self.symbol.abs_monotone != "none" or isinstance(
            self.symbol, (ExplicitSymbol, ConstSymbol)
        )
        return NormResult(value, 0.0 if exact else 1e-12, "symbol-sup")

    def spectrum(self):
        pts = self.symbol.spectrum_sample()
        return SpectrumInfo(pts, self.symbol.sup_abs(), exact=True)


class LeftShiftOperator(LinearOperator):
    """(Tx)_j = x_{j+1}; a contraction with ||T^n|| = 1 for every n."""

    kind = "left_shift"

    def __init__(self, space="c0"):
        self.space = space

    def apply(self, x):
        x = as_vector(x)
        out = np.zeros_like(x)
        out[:-1] = x[1:]
        return out

    def adjoint_apply(self, x):
        x = as_vector(x)
        out = np.zeros_like(x)
        out[1:] = x[:-1]
        return out

    def norm(self, tol=1e-12):
        return NormResult(1.0, 0.0, "shift-hint")


class RowFunctional(LinearOperator):
    """S x = sum_j c_j x_j, a functional into C (one-dimensional range)."""

    kind = "row_functional"

    def __init__(self, symbol, space="l2"):
        self.symbol = parse_symbol(symbol)
        self.space = space

    def apply(self, x):
        x = as_vector(x)
        j = np.arange(1, x.shape[0] + 1, dtype=float)
        return np.array([np.sum(self.symbol.values(j) * x)])

    def adjoint_apply(self, y, dim=64):
        y = as_vector(y)
        if y.shape[0] != 1:
            raise DimensionMismatchError(1, y.shape[0])
        j = np.arange(1, dim + 1, dtype=float)
        return np.conj(self.symbol.values(j)) * y[0]

    def norm(self, tol=1e-12):
        from .seriesutil import series_over_indices

        val2 = series_over_indices(lambda j: self.symbol.abs_values(j) ** 2, rel_tol=tol)
        return NormResult(
            math.sqrt(val2.value), val2.rel_error / 2.0, "coefficient-l2", witness=val2.n_terms
        )


class ComposedOperator(LinearOperator):
    """Composition ops[0] * ops[1] * ... (applied right to left)."""

    kind = "composite"

    def __init__(self, ops):
        if not ops:
            raise OperatorSpecError("ops", "composite needs at least one operator")
        self.ops = tuple(ops)
        self.space = ops[0].space
        self.dim = ops[-1].dim

    def apply(self, x):
        for op in reversed(self.ops):
            x = op.apply(x)
        return x

    def adjoint_apply(self, x):
        for op in self.ops:
            x = op.adjoint_apply(x)
        return x

    def norm(self, tol=1e-12):
        if all(isinstance(op, DenseOperator) for op in self.ops):
            mat = self.ops[0].matrix
            for op in self.ops[1:]:
                mat = mat @ op.matrix
            return dense_spectral_norm(mat, tol=tol)
        if all(isinstance(op, DiagonalOperator) for op in self.ops):
            syms = [op.symbol for op in self.ops]

            def kern(j):
                out = np.ones_like(np.asarray(j, dtype=float))
                for s in syms:
                    out = out * s.abs_values(j)
                return out

            limits = [s.limit for s in syms]
            lim = None
            if all(l is not None for l in limits):
                lim = float(np.prod([abs(l) for l in limits]))
            value, witness = max_kernel_over_indices(kern, limit_value=lim)
            return NormResult(value, 0.0, "diagonal-kernel-max", witness=witness)
        return super().norm(tol)


def identity(dim=None):
    """Identity operator: dense for finite dim, diagonal const 1 otherwise."""
    if dim is None:
        return DiagonalOperator(ConstSymbol(1.0))
    return DenseOperator(np.eye(dim, dtype=complex))


def one_minus(op):
    """I - T for diagonal or dense T (exact symbol form for diagonal)."""
    if isinstance(op, DiagonalOperator):
        return DiagonalOperator(OneMinusSymbol(op.symbol), space=op.space)
    if isinstance(op, DenseOperator):
        if op.matrix.shape[0] != op.matrix.shape[1]:
            raise DimensionMismatchError(op.matrix.shape[0], op.matrix.shape[1])
        return DenseOperator(np.eye(op.matrix.shape[0], dtype=complex) - op.matrix)
    raise UnboundedTruncationError(f"I - T unsupported for kind {op.kind}")


# ---------------------------------------------------------------------------
# module operations


def apply(op, x):
    """Apply op to a finite vector (truncation semantics on sequence spaces)."""
    return op.apply(as_vector(x))


def power_apply(op, n, x):
    """op^n x by repeated application; binary powering for dense kinds."""
    if n < 0:
        raise ValueError(f"power must be >= 0, got {n}")
    x = as_vector(x)
    if n == 0:
        return x.copy()
    if isinstance(op, DenseOperator):
        if op.matrix.shape[0] != op.matrix.shape[1]:
            raise DimensionMismatchError(op.matrix.shape[0], op.matrix.shape[1])
        if op.matrix.shape[1] != x.shape[0]:
            raise DimensionMismatchError(op.matrix.shape[1], x.shape[0])
        return np.linalg.matrix_power(op.matrix, n) @ x
    if isinstance(op, DiagonalOperator):
        op._check_dim(x)
        j = np.arange(1, x.shape[0] + 1, dtype=float)
        return op.symbol.values(j) ** n * x
    if isinstance(op, LeftShiftOperator):
        out = np.zeros_like(x)
        if n < x.shape[0]:
            out[: x.shape[0] - n] = x[n:]
        return out
    for _ in range(n):
        x = op.apply(x)
    return x


def operator_norm(op, tol=1e-12):
    """Operator norm with a reported relative error bound (NormResult)."""
    return op.norm(tol=tol)


def diag_power_norm(d_symbol, w_symbol, n, hints=()):
    """Exact sup_j w_j |d_j|^n for a diagonal pair (norm of T^n S).

    ``hints`` are closed-form continuous argmax locations when known
    (e.g. (n + a)/a for the d = 1 - 1/j, w = j^-a pair).
    """
    d_symbol = parse_symbol(d_symbol)
    w_symbol = parse_symbol(w_symbol)

    def kern(j):
        return w_symbol.abs_values(j) * d_symbol.abs_values(j) ** n

    lim = None
    if d_symbol.limit is not None and w_symbol.limit is not None:
        lim = abs(w_symbol.limit) * abs(d_symbol.limit) ** n
    value, witness = max_kernel_over_indices(kern, hints=hints, limit_value=lim)
    return NormResult(value, 0.0, "diagonal-kernel-max", witness=witness)


def diag_resolvent_norm(d_symbol, w_symbol, lam, k=1, hints=()):
    """Exact sup_j w_j / |lam - d_j|^k for a diagonal pair.

    This is the per-point norm of R(lam, T)^k S when T = diag(d) and
    S = diag(w) act on the same sequence space.  Cancellation-free
    lam - d_j forms keep it exact down to |lam| - 1 ~ 1e-15.
    """
    d_symbol = parse_symbol(d_symbol)
    w_symbol = parse_symbol(w_symbol)
    lam = complex(lam)

    def kern(j):
        return w_symbol.abs_values(j) / np.abs(d_symbol.lam_minus(lam, j)) ** k

    lim = None
    if d_symbol.limit is not None and w_symbol.limit is not None:
        dist = abs(lam - d_symbol.limit)
        lim = math.inf if dist == 0 else abs(w_symbol.limit) / dist**k
    hints = list(hints)
    if d_symbol.limit == 1.0:
        # scale where |lam - d_j| bottoms out for symbols 1 - c j^-gamma
        gamma = getattr(d_symbol, "gamma", 1.0)
        hints.append((1.0 / abs(lam - 1.0)) ** (1.0 / gamma))
    value, witness = max_kernel_over_indices(kern, hints=hints, limit_value=lim)
    return NormResult(value, 0.0, "diagonal-kernel-max", witness=witness)


@dataclass(frozen=True)
class PowerBound:
    """sup_n ||T^n|| information: sampled always, certified when possible."""

    constant: float
    certified: bool
    method: str
    samples: dict = field(repr=False, default_factory=dict)
    decay_ratio: float = 1.0


def power_bound(op, n_probe=64, tol=1e-10):
    """Estimate (and certify where possible) sup_n ||T^n||.

    Dense contractions with r(T) < 1 get a genuine certificate from a
    sampled power with norm < 1; diagonal and shift kinds are certified
    through their symbol.  Otherwise the sampled maximum is reported
    uncertified.
    """
    if isinstance(op, DiagonalOperator):
        s = op.symbol.sup_abs()
        k = max(1.0, s**n_probe) if s > 1 else 1.0
        return PowerBound(k, s <= 1.0, "symbol", {0: 1.0, 1: s})
    if isinstance(op, LeftShiftOperator):
        return PowerBound(1.0, True, "shift", {0: 1.0})
    if isinstance(op, DenseOperator):
        mat = op.matrix
        if mat.shape[0] != mat.shape[1]:
            raise DimensionMismatchError(mat.shape[0], mat.shape[1])
        samples = {0: 1.0}
        power = np.eye(mat.shape[0], dtype=complex)
        contraction_at = None
        for n in range(1, n_probe + 1):
            power = power @ mat
            samples[n] = dense_spectral_norm(power, tol=tol).value
            if contraction_at is None and samples[n] < 1.0:
                contraction_at = n
        k_sample = max(samples.values())
        if contraction_at is not None:
            q = samples[contraction_at]
            return PowerBound(k_sample, True, "contraction-power", samples, q ** (1.0 / contraction_at))
        return PowerBound(k_sample, False, "sampled", samples)
    raise UnboundedTruncationError(f"power bound unsupported for kind {op.kind}")


def sampled_data_operator(a, b, f, tau):
    """One-step transition operator of a sampled feedback loop.

    Returns T = e^(A tau) + (int_0^tau e^(A t) dt) B F as a dense
    operator, with the exponential and its integral computed together
    from one augmented matrix exponential.
    """
    if tau <= 0:
        raise ValueError(f"sampling period must be positive, got {tau}")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    f = np.asarray(f, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(a.shape, a.shape)
    n = a.shape[0]
    if b.shape[0] != n or f.shape[1] != n or b.shape[1] != f.shape[0]:
        raise DimensionMismatchError((n, b.shape), (f.shape, n))
    bf = b @ f
    aug = np.zeros((2 * n, 2 * n), dtype=complex)
    aug[:n, :n] = a
    aug[:n, n:] = bf
    big = expm(aug * tau)
    return DenseOperator(big[:n, :n] + big[:n, n:])


# ---------------------------------------------------------------------------
# operator spec files


def from_spec(spec):
    """Build an operator from a parsed spec dict (see README for formats)."""
    if not isinstance(spec, dict):
        raise OperatorSpecError("root", "operator spec must be a JSON object")
    kind = spec.get("kind")
    if kind == "dense":
        try:
            rows, cols = int(spec["rows"]), int(spec["cols"])
            flat = [complex(e[0], e[1]) for e in spec["entries"]]
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise OperatorSpecError("entries", f"dense spec malformed: {exc}") from None
        if len(flat) != rows * cols:
            raise OperatorSpecError("entries", f"expected {rows * cols} entries, got {len(flat)}")
        return DenseOperator(np.array(flat, dtype=complex).reshape(rows, cols))
    if kind == "diagonal":
        if "symbol" not in spec:
            raise OperatorSpecError("symbol", "diagonal spec needs a symbol")
        return DiagonalOperator(parse_symbol(spec["symbol"]), space=spec.get("space", "l2"))
    if kind == "left_shift":
        return LeftShiftOperator(space=spec.get("space", "c0"))
    if kind == "row_functional":
        if "symbol" not in spec:
            raise OperatorSpecError("symbol", "row_functional spec needs a symbol")
        return RowFunctional(parse_symbol(spec["symbol"]), space=spec.get("space", "l2"))
    raise OperatorSpecError("kind", f"unknown operator kind {kind!r}")


def load_operator(path):
    """Load an operator spec from a JSON file."""
    import json

    with open(path, encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise OperatorSpecError("file", f"{path}: {exc}") from None
    return from_spec(spec)

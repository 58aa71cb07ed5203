"""Diagonal symbols: scalar sequences d_j indexed by j = 1, 2, ...

A symbol is the data behind a diagonal (multiplication) operator on a
sequence space, and also behind row functionals and shift weights.  Each
symbol knows its limit value, monotonicity of |d_j|, and - crucially for
exactness near the unit circle - cancellation-free forms of 1 - d_j and
lam - d_j where a closed form exists.

Spec strings accepted by :func:`parse_symbol`:

    one_minus_inv_j            d_j = 1 - 1/j
    one_minus_inv_sqrt_j       d_j = 1 - 1/sqrt(j)
    one_minus_inv_j_pow:G      d_j = 1 - j^-G          (0 < G <= 1)
    inv_j_pow:A                d_j = j^-A              (A > 0)
    inv_j_pow_log:A,Q          d_j = j^-A log(e+j)^-Q
    inv_j_log:A                d_j = 1/(j log(j+1)^A)
    const:C                    d_j = C
    scale:C,REST               d_j = C * (REST)_j
    explicit:[...]             finite list; entries are numbers or [re, im]
"""

import json
import math

import numpy as np

from .errors import OperatorSpecError

_E = math.e


class DiagonalSymbol:
    """Base class; subclasses define ``values`` on real arguments s >= 1."""

    #: limit of d_j as j -> infinity (None when the sequence is finite)
    limit = None
    is_real = True
    #: monotonicity of |d_j|: "nonincreasing", "nondecreasing" or "none"
    abs_monotone = "none"
    label = "symbol"

    def values(self, j):
        raise NotImplementedError

    def abs_values(self, j):
        return np.abs(self.values(j))

    def one_minus(self, j):
        """1 - d_j; overridden where a cancellation-free form exists."""
        return 1.0 - self.values(j)

    def lam_minus(self, lam, j):
        """lam - d_j; cancellation-free for symbols accumulating at 1."""
        if self.limit == 1.0:
            return (lam - 1.0) + self.one_minus(j)
        return lam - self.values(j)

    def sup_abs(self):
        """Exact sup_j |d_j| over j in N (including the limit point)."""
        j = np.arange(1, 4097, dtype=float)
        best = float(np.max(self.abs_values(j)))
        if self.limit is not None:
            best = max(best, abs(self.limit))
        if self.abs_monotone == "none":
            # geometric probe out to large j for non-monotone tails
            jj = np.unique(np.floor(np.logspace(0, 12, 1024)))
            best = max(best, float(np.max(self.abs_values(jj))))
        return best

    def spectrum_sample(self, j_max=4096, j_far=10**12):
        """Representative points of the closure of {d_j} (plus the limit)."""
        j = np.arange(1, j_max + 1, dtype=float)
        far = np.unique(np.floor(np.logspace(math.log10(j_max + 1), math.log10(j_far), 256)))
        pts = np.concatenate([self.values(j), self.values(far)])
        if self.limit is not None:
            pts = np.append(pts, self.limit)
        return pts

    def __add__(self, other):
        if isinstance(other, DiagonalSymbol):
            return SumSymbol(self, other)
        return NotImplemented

    def conj(self):
        if self.is_real:
            return self
        return ConjSymbol(self)

    def __repr__(self):
        return f"<{type(self).__name__} {self.label}>"


class ExplicitSymbol(DiagonalSymbol):
    """Finite sequence; the induced operator is finite-dimensional."""

    def __init__(self, entries):
        self.entries = np.asarray(entries, dtype=complex)
        if self.entries.ndim != 1 or self.entries.size == 0:
            raise OperatorSpecError("symbol", "explicit symbol needs a nonempty 1-d list")
        if not np.all(np.isfinite(self.entries)):
            raise OperatorSpecError("symbol", "explicit symbol has non-finite entries")
        self.is_real = bool(np.all(self.entries.imag == 0))
        self.label = f"explicit[{self.entries.size}]"

    @property
    def dim(self):
        return self.entries.size

    def values(self, j):
        idx = np.asarray(j)
        k = np.rint(idx).astype(int) - 1
        if np.any(k < 0) or np.any(k >= self.entries.size):
            raise IndexError("explicit symbol index out of range")
        return self.entries[k]

    def sup_abs(self):
        return float(np.max(np.abs(self.entries)))

    def spectrum_sample(self, j_max=4096, j_far=10**12):
        return self.entries.copy()


class ConstSymbol(DiagonalSymbol):
    def __init__(self, c):
        self.c = complex(c)
        self.limit = self.c
        self.is_real = self.c.imag == 0
        self.abs_monotone = "nondecreasing"
        self.label = f"const:{c}"

    def values(self, j):
        return np.full(np.shape(j), self.c)

    def one_minus(self, j):
        return np.full(np.shape(j), 1.0 - self.c)

    def sup_abs(self):
        return abs(self.c)


class PowSymbol(DiagonalSymbol):
    """d_j = j^-alpha with alpha > 0; decreasing to 0."""

    limit = 0.0
    abs_monotone = "nonincreasing"

    def __init__(self, alpha):
        if alpha <= 0:
            raise OperatorSpecError("symbol", "inv_j_pow needs alpha > 0")
        self.alpha = float(alpha)
        self.label = f"inv_j_pow:{alpha}"

    def values(self, j):
        return np.asarray(j, dtype=float) ** (-self.alpha)

    def sup_abs(self):
        return 1.0


class PowLogSymbol(DiagonalSymbol):
    """d_j = j^-alpha * log(e+j)^-q."""

    limit = 0.0
    abs_monotone = "nonincreasing"

    def __init__(self, alpha, q):
        if alpha < 0 or q < 0 or alpha + q == 0:
            raise OperatorSpecError("symbol", "inv_j_pow_log needs alpha, q >= 0, not both 0")
        self.alpha = float(alpha)
        self.q = float(q)
        self.label = f"inv_j_pow_log:{alpha},{q}"

    def values(self, j):
        s = np.asarray(j, dtype=float)
        return s ** (-self.alpha) * np.log(_E + s) ** (-self.q)

    def sup_abs(self):
        return float(self.values(1.0))


class InvJLogSymbol(DiagonalSymbol):
    """d_j = 1/(j * log(j+1)^alpha); the slowly-decaying shift weights."""

    limit = 0.0
    abs_monotone = "nonincreasing"

    def __init__(self, alpha):
        if alpha < 0:
            raise OperatorSpecError("symbol", "inv_j_log needs alpha >= 0")
        self.alpha = float(alpha)
        self.label = f"inv_j_log:{alpha}"

    def values(self, j):
        s = np.asarray(j, dtype=float)
        return 1.0 / (s * np.log(s + 1.0) ** self.alpha)

    def sup_abs(self):
        return float(self.values(1.0))


class OneMinusPowSymbol(DiagonalSymbol):
    """d_j = 1 - c*j^-gamma, increasing to 1; spectrum in [1-c, 1)."""

    limit = 1.0
    abs_monotone = "nondecreasing"

    def __init__(self, gamma, c=1.0):
        if not (0 < gamma):
            raise OperatorSpecError("symbol", "one_minus_inv_j_pow needs gamma > 0")
        if not (0 < c <= 1):
            raise OperatorSpecError("symbol", "one_minus_inv_j_pow needs 0 < c <= 1")
        self.gamma = float(gamma)
        self.c = float(c)
        self.label = f"one_minus_inv_j_pow:{gamma}" + (f" (c={c})" if c != 1.0 else "")

    def values(self, j):
        return 1.0 - self.one_minus(j)

    def one_minus(self, j):
        return self.c * np.asarray(j, dtype=float) ** (-self.gamma)

    def sup_abs(self):
        return 1.0


class ScaledSymbol(DiagonalSymbol):
    def __init__(self, c, base):
        self.c = complex(c)
        self.base = base
        self.limit = None if base.limit is None else self.c * base.limit
        self.is_real = base.is_real and self.c.imag == 0
        self.abs_monotone = base.abs_monotone
        self.label = f"scale:{c},{base.label}"

    def values(self, j):
        return self.c * self.base.values(j)

    def abs_values(self, j):
        return abs(self.c) * self.base.abs_values(j)

    def sup_abs(self):
        return abs(self.c) * self.base.sup_abs()


class SumSymbol(DiagonalSymbol):
    def __init__(self, a, b):
        self.a = a
        self.b = b
        self.limit = None if (a.limit is None or b.limit is None) else a.limit + b.limit
        self.is_real = a.is_real and b.is_real
        self.label = f"({a.label})+({b.label})"

    def values(self, j):
        return self.a.values(j) + self.b.values(j)

    def one_minus(self, j):
        # exact when one summand has the closed one_minus form and the
        # other is small: 1-(a+b) = (1-a) - b
        return self.a.one_minus(j) - self.b.values(j)

    def lam_minus(self, lam, j):
        return self.a.lam_minus(lam, j) - self.b.values(j)


class ConjSymbol(DiagonalSymbol):
    def __init__(self, base):
        self.base = base
        self.limit = None if base.limit is None else np.conj(base.limit)
        self.is_real = base.is_real
        self.abs_monotone = base.abs_monotone
        self.label = f"conj({base.label})"

    def values(self, j):
        return np.conj(self.base.values(j))

    def abs_values(self, j):
        return self.base.abs_values(j)

    def sup_abs(self):
        return self.base.sup_abs()


class OneMinusSymbol(DiagonalSymbol):
    """w_j = 1 - d_j for a base symbol; used for S = I - T pairs."""

    def __init__(self, base):
        self.base = base
        self.limit = None if base.limit is None else 1.0 - base.limit
        self.is_real = base.is_real
        if base.limit == 1.0 and base.abs_monotone == "nondecreasing" and base.is_real:
            self.abs_monotone = "nonincreasing"
        self.label = f"one_minus({base.label})"

    def values(self, j):
        return self.base.one_minus(j)

    def one_minus(self, j):
        return self.base.values(j)


def parse_symbol(spec):
    """Parse a symbol spec string (see module docstring)."""
    if isinstance(spec, DiagonalSymbol):
        return spec
    if not isinstance(spec, str):
        raise OperatorSpecError("symbol", f"expected string, got {type(spec).__name__}")
    if spec == "one_minus_inv_j":
        return OneMinusPowSymbol(1.0)
    if spec == "one_minus_inv_sqrt_j":
        return OneMinusPowSymbol(0.5)
    name, _, arg = spec.partition(":")
    try:
        if name == "one_minus_inv_j_pow":
            return OneMinusPowSymbol(float(arg))
        if name == "inv_j_pow":
            return PowSymbol(float(arg))
        if name == "inv_j_pow_log":
            a, q = (float(v) for v in arg.split(","))
            return PowLogSymbol(a, q)
        if name == "inv_j_log":
            return InvJLogSymbol(float(arg))
        if name == "const":
            return ConstSymbol(complex(arg))
        if name == "scale":
            c, _, rest = arg.partition(",")
            return ScaledSymbol(complex(c), parse_symbol(rest))
        if name == "explicit":
            raw = json.loads(arg)
            entries = [complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in raw]
            return ExplicitSymbol(entries)
    except (ValueError, json.JSONDecodeError) as exc:
        raise OperatorSpecError("symbol", f"cannot parse {spec!r}: {exc}") from None
    raise OperatorSpecError("symbol", f"unknown symbol {spec!r}")

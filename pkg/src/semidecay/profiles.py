"""Sampled decay and growth profiles with log-log exponent fits."""

import io
import math
from dataclasses import dataclass, field

import numpy as np


def sample_schedule(n_max):
    """Power schedule {1..32} plus dyadic points 64..n_max."""
    if n_max < 16:
        raise ValueError(f"n_max must be >= 16, got {n_max}")
    pts = list(range(1, min(32, n_max) + 1))
    n = 64
    while n <= n_max:
        pts.append(n)
        n *= 2
    if pts[-1] != n_max:
        pts.append(n_max)
    return np.array(pts, dtype=int)


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    residual: float  # max |log deviation| over the window
    n_points: int


def fit_loglog(xs, ys, window=None):
    """Ordinary least squares of log y against log x over a trailing window.

    ``window`` selects indices; default is the trailing points spanning
    two decades (at least 8 samples).  Zero or negative values inside the
    window are rejected with the offending index.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if window is None:
        lo = xs[-1] / 256.0
        window = np.flatnonzero(xs >= lo)
    window = np.asarray(window)
    if window.size < 8:
        raise ValueError(f"need >= 8 samples in fitting window, got {window.size}")
    yw = ys[window]
    bad = np.flatnonzero(yw <= 0)
    if bad.size:
        raise ValueError(f"non-positive value at schedule index {int(window[bad[0]])}")
    lx, ly = np.log(xs[window]), np.log(yw)
    a = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(a, ly, rcond=None)
    res = float(np.max(np.abs(ly - a @ coef)))
    return ExponentFit(float(coef[0]), float(coef[1]), res, window.size)


@dataclass
class DecayProfile:
    """Samples (n, ||T^n S||) on the power schedule, with a fitted exponent."""

    ns: np.ndarray
    norms: np.ndarray
    fit: ExponentFit | None = None
    flags: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def fitted(self, window=None):
        return fit_loglog(self.ns, self.norms, window=window)

    def to_csv(self):
        buf = io.StringIO()
        buf.write("n,norm\n")
        for n, v in zip(self.ns, self.norms):
            buf.write(f"{int(n)},{v!r}\n")
        return buf.getvalue()


@dataclass
class GrowthProfile:
    """Samples (r, sup_theta ||R(r e^{i theta})^k S||) on a radius schedule."""

    radii: np.ndarray
    sup_norms: np.ndarray
    n_theta_used: np.ndarray
    fit: ExponentFit | None = None
    flags: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def fitted(self, window=None):
        if window is None:
            window = np.arange(len(self.radii))
        return fit_loglog(self.radii - 1.0, self.sup_norms, window=window)

    def to_csv(self):
        buf = io.StringIO()
        buf.write("r,sup_norm,n_theta_used,flags\n")
        for r, v, m, fl in zip(self.radii, self.sup_norms, self.n_theta_used, self._row_flags()):
            buf.write(f"{r!r},{v!r},{int(m)},{fl}\n")
        return buf.getvalue()

    def _row_flags(self):
        per_row = self.meta.get("row_flags")
        if per_row is None:
            return ["" for _ in self.radii]
        return per_row


def stability_trend(values, grow_ratio=1.25, window=3):
    """Classify a refinement sequence as "stable" or "growing".

    "growing" means the estimate increased by more than ``grow_ratio``
    in each of the last ``window`` successive refinements.
    """
    v = [x for x in values if x > 0 and math.isfinite(x)]
    if len(v) < window + 1:
        return "stable"
    ratios = [v[i + 1] / v[i] for i in range(len(v) - window - 1, len(v) - 1)]
    return "growing" if all(r > grow_ratio for r in ratios) else "stable"

"""Piecewise-linear curves on a uniform grid over [0, 1].

Everything downstream (Lorenz operators, iteration, risk measures) works with
nondecreasing piecewise-linear interpolants stored as their values at the
nodes k/M. The three primitive operations are evaluation, the generalized
inverse

    f^{-1}(u) = inf { y : f(y) >= u },

which returns the left endpoint of a flat segment, and the exact prefix
integral of the interpolant. All three are vectorized.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    BadParameter,
    EmptySample,
    NonFinite,
    NonMonotone,
    OutOfDomain,
    OutOfRange,
)
from .rng import normal_inverse_cdf

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

DEFAULT_GRID = 4096

_ENDPOINT_TOL = 1e-12


def format_float(x: float) -> str:
    """Shortest 17-significant-digit form, stable across runs."""
    return format(float(x), ".17g")


def _as_scalar_or_array(result: np.ndarray, scalar_input: bool):
    # callers run atleast_1d first, so a scalar input yields shape (1,)
    return float(result[0]) if scalar_input else result


@dataclass(frozen=True, eq=False)
class MonotoneCurve:
    """Nondecreasing piecewise-linear function sampled at k/M, k = 0..M."""

    values: np.ndarray
    lorenz_like: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        self._validate()

    def _validate(self):
        values = self.values
        if values.ndim != 1 or values.size < 2:
            raise BadParameter("a curve needs a 1-d array of at least two node values")
        if not np.isfinite(values).all():
            raise NonFinite("curve values must be finite")
        if np.any(np.diff(values) < 0.0):
            raise NonMonotone("curve values must be nondecreasing")
        if self.lorenz_like:
            if abs(values[0]) > _ENDPOINT_TOL or abs(values[-1] - 1.0) > _ENDPOINT_TOL:
                raise BadParameter(
                    "lorenz_like curve must run from 0 to 1 "
                    f"(got endpoints {values[0]!r}, {values[-1]!r})"
                )
            values = values.copy()
            values[0] = 0.0
            values[-1] = 1.0
            object.__setattr__(self, "values", values)

    @property
    def grid_size(self) -> int:
        """M: the number of segments."""
        return self.values.size - 1

    @cached_property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.values.size)

    @cached_property
    def _prefix(self) -> np.ndarray:
        # Exact trapezoid prefix integral at the nodes.
        v = self.values
        h = 1.0 / self.grid_size
        seg = 0.5 * h * (v[1:] + v[:-1])
        out = np.empty_like(v)
        out[0] = 0.0
        np.cumsum(seg, out=out[1:])
        return out

    def evaluate(self, x):
        """Interpolated value at x (scalar or array); domain is [0, 1]."""
        x_arr = np.asarray(x, dtype=float)
        scalar = x_arr.ndim == 0
        x_arr = np.atleast_1d(x_arr)
        if np.any(x_arr < -_ENDPOINT_TOL) or np.any(x_arr > 1.0 + _ENDPOINT_TOL):
            raise OutOfDomain("evaluation point outside [0, 1]")
        x_arr = np.clip(x_arr, 0.0, 1.0)
        out = np.interp(x_arr, self.grid, self.values)
        return _as_scalar_or_array(out, scalar)

    def __call__(self, x):
        return self.evaluate(x)

    def generalized_inverse(self, u, clamp: bool = False):
        """inf { y : f(y) >= u }; flat segments map to their left endpoint.

        With clamp=True, u below f(0) maps to 0 and u above f(1) maps to 1;
        otherwise such u raise OutOfRange.
        """
        v = self.values
        if np.any(np.diff(v) < 0.0):
            raise NonMonotone("generalized inverse needs a nondecreasing curve")
        u_arr = np.asarray(u, dtype=float)
        scalar = u_arr.ndim == 0
        u_arr = np.atleast_1d(u_arr)
        if not clamp and (np.any(u_arr < v[0]) or np.any(u_arr > v[-1])):
            raise OutOfRange("inverse argument outside the curve's range")
        u_clip = np.clip(u_arr, v[0], v[-1])
        # First node index k with v[k] >= u; 'left' guarantees v[k-1] < u.
        k = np.searchsorted(v, u_clip, side="left")
        h = 1.0 / self.grid_size
        out = np.zeros_like(u_clip)
        interior = k > 0
        ki = k[interior]
        lo = v[ki - 1]
        hi = v[ki]
        frac = (u_clip[interior] - lo) / (hi - lo)
        out[interior] = ((ki - 1) + frac) * h
        return _as_scalar_or_array(out, scalar)

    def prefix_integral(self, x):
        """Exact integral of the interpolant over [0, x]."""
        x_arr = np.asarray(x, dtype=float)
        scalar = x_arr.ndim == 0
        x_arr = np.atleast_1d(x_arr)
        if np.any(x_arr < -_ENDPOINT_TOL) or np.any(x_arr > 1.0 + _ENDPOINT_TOL):
            raise OutOfDomain("integration endpoint outside [0, 1]")
        x_arr = np.clip(x_arr, 0.0, 1.0)
        m = self.grid_size
        pos = x_arr * m
        k = np.minimum(pos.astype(int), m - 1)
        t = (pos - k) / m  # length of the partial segment
        left = self.values[k]
        at_x = np.interp(x_arr, self.grid, self.values)
        out = self._prefix[k] + 0.5 * t * (left + at_x)
        return _as_scalar_or_array(out, scalar)

    @property
    def total_integral(self) -> float:
        return float(self._prefix[-1])


@dataclass(frozen=True, eq=False)
class QuantileCurve(MonotoneCurve):
    """A quantile function sampled on the uniform grid."""

    @property
    def mean(self) -> float:
        return self.total_integral


def grid_curve(values, *, lorenz_like: bool = False, rectify: bool = False) -> MonotoneCurve:
    """Build a MonotoneCurve, optionally absorbing float noise by running max."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1 and arr.size >= 2 and np.isfinite(arr).all() and rectify:
        arr = np.maximum.accumulate(arr)
    return MonotoneCurve(arr, lorenz_like=lorenz_like)


# -- empirical and analytic quantile curves -----------------------------------


def empirical_quantile(samples, grid_size: int = DEFAULT_GRID) -> QuantileCurve:
    """Order-statistic quantile Q(p) = x_(ceil(p n)) sampled at the grid nodes.

    Q(0) is the sample minimum. The ceiling is taken in exact integer
    arithmetic, so node k picks order statistic ceil(k*n/M) with no float
    edge cases.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise EmptySample("empirical quantile of an empty sample")
    if not np.isfinite(x).all():
        raise NonFinite("samples must be finite")
    x = np.sort(x)
    n = x.size
    m = int(grid_size)
    if m < 1:
        raise BadParameter("grid_size must be at least 1")
    ks = np.arange(1, m + 1, dtype=np.int64)
    idx = -((-ks * n) // m)  # ceil(k*n/m)
    values = np.empty(m + 1)
    values[0] = x[0]
    values[1:] = x[idx - 1]
    return QuantileCurve(values)


@dataclass(frozen=True)
class AnalyticFamily:
    """A named quantile family with closed-form Q(p)."""

    kind: str
    params: tuple = ()

    @classmethod
    def uniform01(cls):
        return cls("uniform01")

    @classmethod
    def power(cls, a: float):
        if not a > 0.0:
            raise BadParameter("power family needs a > 0")
        return cls("power", (float(a),))

    @classmethod
    def kumaraswamy_limit(cls):
        """Distribution whose c.d.f. is 1-(1-x)^phi on [0, 1]."""
        return cls("kumaraswamy_limit")

    @classmethod
    def pareto(cls, scale: float, shape: float):
        if not scale > 0.0:
            raise BadParameter("pareto scale must be positive")
        if not shape > 1.0:
            raise BadParameter("pareto shape must exceed 1 for a finite mean")
        return cls("pareto", (float(scale), float(shape)))

    @classmethod
    def lognormal(cls, mean: float, sd: float):
        """Parameterized by the mean and standard deviation of the variable."""
        if not mean > 0.0 or not sd > 0.0:
            raise BadParameter("lognormal needs positive mean and sd")
        return cls("lognormal", (float(mean), float(sd)))

    @classmethod
    def lognormal_logscale(cls, mu: float, sigma: float):
        """Parameterized by the mean and sd of the underlying normal."""
        if not sigma > 0.0:
            raise BadParameter("lognormal needs positive sigma")
        mean = math.exp(mu + 0.5 * sigma * sigma)
        sd = mean * math.sqrt(math.expm1(sigma * sigma))
        return cls("lognormal", (mean, sd))

    @classmethod
    def point_mass(cls, c: float):
        if not math.isfinite(c):
            raise BadParameter("point mass location must be finite")
        return cls("point_mass", (float(c),))

    def quantile(self, p):
        """Q(p) for p in [0, 1]; may be +inf at p = 1 for heavy tails."""
        p_arr = np.asarray(p, dtype=float)
        scalar = p_arr.ndim == 0
        p_arr = np.atleast_1d(p_arr)
        if self.kind == "uniform01":
            out = p_arr.copy()
        elif self.kind == "power":
            (a,) = self.params
            out = p_arr ** (1.0 / a)
        elif self.kind == "kumaraswamy_limit":
            out = 1.0 - (1.0 - p_arr) ** GOLDEN
        elif self.kind == "pareto":
            scale, shape = self.params
            with np.errstate(divide="ignore"):
                out = scale * (1.0 - p_arr) ** (-1.0 / shape)
        elif self.kind == "lognormal":
            mean, sd = self.params
            sigma2 = math.log1p((sd / mean) ** 2)
            sigma = math.sqrt(sigma2)
            mu = math.log(mean) - 0.5 * sigma2
            out = np.empty_like(p_arr)
            for i, pi in enumerate(p_arr):
                if pi <= 0.0:
                    out[i] = 0.0
                elif pi >= 1.0:
                    out[i] = math.inf
                else:
                    out[i] = math.exp(mu + sigma * normal_inverse_cdf(pi))
        elif self.kind == "point_mass":
            (c,) = self.params
            out = np.full_like(p_arr, c)
        else:
            raise BadParameter(f"unknown analytic family {self.kind!r}")
        return _as_scalar_or_array(out, scalar)

    @property
    def mean(self) -> float:
        if self.kind == "uniform01":
            return 0.5
        if self.kind == "power":
            (a,) = self.params
            return a / (a + 1.0)
        if self.kind == "kumaraswamy_limit":
            # integral of 1 - (1-p)^phi over [0, 1]: phi/(1+phi) = phi - 1
            return GOLDEN - 1.0
        if self.kind == "pareto":
            scale, shape = self.params
            return scale * shape / (shape - 1.0)
        if self.kind == "lognormal":
            return self.params[0]
        if self.kind == "point_mass":
            return self.params[0]
        raise BadParameter(f"unknown analytic family {self.kind!r}")


def analytic_quantile(family: AnalyticFamily, grid_size: int = DEFAULT_GRID) -> QuantileCurve:
    """Sample a closed-form quantile on the grid.

    Families with an unbounded right endpoint (pareto, lognormal) replace the
    infinite node Q(1) with Q(1 - 1/(2M)); the lognormal left node is pinned
    to 0.
    """
    m = int(grid_size)
    if m < 2:
        raise BadParameter("grid_size must be at least 2")
    ps = np.linspace(0.0, 1.0, m + 1)
    values = np.asarray(family.quantile(ps), dtype=float)
    if family.kind in ("pareto", "lognormal"):
        values[-1] = family.quantile(1.0 - 0.5 / m)
    if family.kind == "lognormal":
        values[0] = 0.0
    return QuantileCurve(values)


# -- CSV round trip ------------------------------------------------------------


def write_curve_csv(curve: MonotoneCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "value"])
        for u, v in zip(curve.grid, curve.values):
            writer.writerow([format_float(u), format_float(v)])


def read_curve_csv(path, *, lorenz_like: bool = False) -> MonotoneCurve:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["u", "value"]:
            raise BadParameter(f"{path}: expected a 'u,value' header")
        rows = [row for row in reader if row]
    try:
        us = np.array([float(r[0]) for r in rows])
        vs = np.array([float(r[1]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise BadParameter(f"{path}: malformed curve row ({exc})") from exc
    if us.size < 2:
        raise BadParameter(f"{path}: a curve file needs at least two rows")
    expected = np.linspace(0.0, 1.0, us.size)
    if np.max(np.abs(us - expected)) > 1e-9:
        raise BadParameter(f"{path}: u column is not the uniform grid on [0, 1]")
    return MonotoneCurve(vs, lorenz_like=lorenz_like)

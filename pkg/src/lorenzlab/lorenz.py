"""Lorenz curves and the operators that act on them.

The primal operator takes a quantile function Q with positive mean to

    L(x) = (1/mu) * integral_0^x Q(u) du,

computed in exact piecewise-linear arithmetic on the grid. The reflected
operator is the equilibrium-transform analogue

    phi(x) = E[min(Q, 1 - x)] / mu,      psi = 1 - phi,
    L_ref(x) = 1 - psi^{-1}(1 - x),

restricted to distributions supported in [0, 1]. Both operators return
convex curves through (0, 0) and (1, 1).

psi is piecewise quadratic, so sampling it at the nodes and inverting the
interpolant would lose accuracy exactly where the curve is steep; instead
psi is evaluated exactly at arbitrary points (piecewise-linear prefix
integrals) and inverted by bisection, which is exact to the last bit of
the bisection interval.

reflected_transform always evaluates a second, independent route (the
nondecreasing integrand psi_in(y) = 1 - Q(1 - y) treated as a c.d.f., whose
inverse is integrated exactly by the area-complement rule, then inverted
the same way) and raises CrossCheckError if the two disagree beyond 1e-6;
with both routes exact the observed gap is rounding-level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import DEFAULT_GRID, MonotoneCurve, QuantileCurve
from .errors import (
    BadParameter,
    CrossCheckError,
    DegenerateAfterTruncation,
    NonFinite,
    NonMonotone,
    NonPositiveMean,
    NonPositiveTotal,
    SupportExceedsUnit,
)

_CONVEXITY_TOL = 1e-10
_CLASSICAL_TOL = 1e-10
_ENDPOINT_TOL = 1e-12
_ROUTE_AGREEMENT = 1e-6


@dataclass(frozen=True, eq=False)
class LorenzCurve(MonotoneCurve):
    """A curve from (0,0) to (1,1) produced by or fed to the operators.

    convex: second differences are checked nonnegative (1e-10 slack).
    classical: the curve stays inside 0 <= L(x) <= x.
    generalized: the curve may dip below zero (negative part of the
    support), in which case monotonicity is not required.
    """

    convex: bool = True
    classical: bool = True
    generalized: bool = False

    def _validate(self):
        object.__setattr__(self, "lorenz_like", True)
        values = self.values
        if values.ndim != 1 or values.size < 2:
            raise BadParameter("a curve needs a 1-d array of at least two node values")
        if not np.isfinite(values).all():
            raise NonFinite("curve values must be finite")
        if not self.generalized and np.any(np.diff(values) < 0.0):
            raise NonMonotone("curve values must be nondecreasing")
        if abs(values[0]) > _ENDPOINT_TOL or abs(values[-1] - 1.0) > _ENDPOINT_TOL:
            raise BadParameter(
                "curve must run from 0 to 1 "
                f"(got endpoints {values[0]!r}, {values[-1]!r})"
            )
        values = values.copy()
        values[0] = 0.0
        values[-1] = 1.0
        object.__setattr__(self, "values", values)
        if self.convex:
            d2 = values[2:] - 2.0 * values[1:-1] + values[:-2]
            if d2.size and d2.min() < -_CONVEXITY_TOL:
                raise BadParameter(f"curve is not convex (min d2 = {d2.min()!r})")
        if self.classical:
            if values.min() < -_CLASSICAL_TOL:
                raise BadParameter("classical curve must be nonnegative")
            excess = values - self.grid
            if excess.max() > _CLASSICAL_TOL:
                raise BadParameter("classical curve must stay below the diagonal")


def lorenz_transform(quantile: MonotoneCurve, *, allow_negative: bool = False) -> LorenzCurve:
    """Normalized prefix integral of a quantile curve.

    Negative quantile values produce a generalized curve (dips below zero)
    and must be acknowledged with allow_negative=True.
    """
    q = quantile.values
    if q[0] < -_ENDPOINT_TOL and not allow_negative:
        raise BadParameter(
            "quantile takes negative values; pass allow_negative=True "
            "for the generalized curve"
        )
    prefix = quantile.prefix_integral(quantile.grid)
    total = prefix[-1]
    if total <= 0.0:
        raise NonPositiveMean(f"mean must be positive, got {total!r}")
    vals = prefix / total
    classical = q[0] >= -_ENDPOINT_TOL
    if classical:
        vals = np.maximum.accumulate(vals)
    return LorenzCurve(vals, convex=True, classical=classical, generalized=not classical)


_BISECT_STEPS = 54  # interval width 2**-54 after the loop


def _bisect_inverse(psi, u: np.ndarray) -> np.ndarray:
    """inf { y in [0,1] : psi(y) >= u } for a nondecreasing psi with psi(1) = 1.

    psi takes and returns arrays; all targets are solved simultaneously.
    The upper bracket is returned, so the result is exact within 2**-54
    above the true infimum.
    """
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        above = psi(mid) >= u
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return hi


def _psi_route(q: QuantileCurve) -> np.ndarray:
    """Reflected operator through the nondecreasing integrand's c.d.f.

    psi_in(y) = 1 - Q(1 - y) is piecewise linear on the same grid (values are
    the reverse complement of Q's). Its inverse is integrated exactly at any
    point by the area-complement rule

        integral_0^u psi_in^{-1}(t) dt = u * y_u - integral_0^{y_u} psi_in,

    with y_u the generalized inverse (1 past the top of psi_in's range).
    No resampling loss.
    """
    grid = q.grid
    w = MonotoneCurve(1.0 - q.values[::-1])
    wmax = float(w.values[-1])

    def area(u):
        u = np.asarray(u, dtype=float)
        # w tops out at 1 - Q(0). Past that the infimum is over an empty set
        # and the split point is the right endpoint, not the clamped inverse.
        y = np.where(
            u > wmax, 1.0, w.generalized_inverse(np.minimum(u, wmax), clamp=True)
        )
        return u * y - w.prefix_integral(y)

    total = float(area(np.ones(1))[0])
    if total <= 0.0:
        raise NonPositiveMean("degenerate integrand in the reflected operator")
    # Rounding can push the ratio a few ulps outside [0, 1]; the true psi
    # never leaves it, and the bisection bracket relies on that.
    out = 1.0 - _bisect_inverse(
        lambda y: np.clip(area(y) / total, 0.0, 1.0), 1.0 - grid
    )
    return np.maximum.accumulate(out)


def unit_support(quantile: MonotoneCurve, *, normalize: bool = False) -> QuantileCurve:
    """Clip a nonnegative quantile into [0, 1], optionally scaling by its max.

    This is the support precondition of the reflected operator; the clip
    only absorbs float dust once the preconditions hold.
    """
    q = quantile.values
    if q[0] < -_ENDPOINT_TOL:
        raise BadParameter("reflected operator needs a nonnegative support")
    q = np.maximum(q, 0.0)
    qmax = q[-1]
    if normalize:
        if qmax <= 0.0:
            raise NonPositiveMean("cannot normalize an all-zero quantile")
        q = q / qmax
    elif qmax > 1.0 + 1e-9:
        raise SupportExceedsUnit(
            f"support reaches {qmax!r}; pass normalize=True to rescale"
        )
    return QuantileCurve(np.minimum(q, 1.0))


def _psi_of(qc: QuantileCurve, mu: float):
    """Exact evaluator for psi(y) = 1 - E[min(Q, 1-y)] / mu on a PL quantile."""

    def psi(y):
        t = 1.0 - np.asarray(y, dtype=float)
        pstar = qc.generalized_inverse(t, clamp=True)
        expected_min = qc.prefix_integral(pstar) + t * (1.0 - pstar)
        # E[min(Q, t)] <= mu exactly; clip what rounding leaks past it.
        return np.clip(1.0 - expected_min / mu, 0.0, 1.0)

    return psi


def reflected_inverse(quantile: MonotoneCurve, u) -> np.ndarray:
    """Generalized inverse of reflected_transform(quantile), evaluated exactly.

    L_ref(x) = 1 - psi^{-1}(1 - x) makes the inverse plain composition:
    L_ref^{-1}(u) = 1 - psi(1 - u), with psi computed exactly. The quantile
    must already satisfy the operator's support precondition.
    """
    qc = unit_support(quantile)
    mu = qc.mean
    if mu <= 0.0:
        raise NonPositiveMean(f"mean must be positive, got {mu!r}")
    u_arr = np.clip(np.atleast_1d(np.asarray(u, dtype=float)), 0.0, 1.0)
    return np.maximum.accumulate(1.0 - _psi_of(qc, mu)(1.0 - u_arr))


def reflected_transform(
    quantile: MonotoneCurve,
    *,
    normalize: bool = False,
    check: bool = True,
) -> LorenzCurve:
    """Reflected operator for distributions supported in [0, 1].

    normalize=True rescales the quantile by its maximum first (needed for
    supports that exceed 1). check=True also runs the psi-route evaluation
    and verifies agreement within 1e-6.
    """
    qc = unit_support(quantile, normalize=normalize)
    mu = qc.mean
    if mu <= 0.0:
        raise NonPositiveMean(f"mean must be positive, got {mu!r}")
    grid = qc.grid
    vals = 1.0 - _bisect_inverse(_psi_of(qc, mu), 1.0 - grid)
    vals = np.maximum.accumulate(vals)
    if check:
        other = _psi_route(qc)
        gap = float(np.max(np.abs(vals - other)))
        if gap > _ROUTE_AGREEMENT:
            raise CrossCheckError(
                f"reflected operator routes disagree by {gap!r} (> {_ROUTE_AGREEMENT})"
            )
    return LorenzCurve(vals, convex=True, classical=True)


def primal_inverse(quantile: MonotoneCurve, u) -> np.ndarray:
    """Generalized inverse of lorenz_transform(quantile), evaluated exactly.

    The transform of a piecewise-linear quantile is piecewise quadratic, so
    each cell inverts in closed form. Inverting the stored polyline instead
    would lose O(h^phi) accuracy in the cells where the curve is singular,
    which is exactly where the iteration needs it.
    """
    q = quantile.values
    if q[0] < -_ENDPOINT_TOL:
        raise BadParameter("cannot invert the transform of a negative quantile")
    prefix = quantile._prefix
    total = prefix[-1]
    if total <= 0.0:
        raise NonPositiveMean(f"mean must be positive, got {total!r}")
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    target = np.clip(u_arr, 0.0, 1.0) * total
    k = np.searchsorted(prefix, target, side="left")
    h = 1.0 / quantile.grid_size
    out = np.zeros_like(target)
    interior = k > 0
    ki = k[interior]
    r = target[interior] - prefix[ki - 1]
    a = q[ki - 1]
    slope = (q[ki] - a) / h
    # Stable quadratic root of (slope/2) d^2 + a d = r; exact linear limit.
    denom = a + np.sqrt(a * a + 2.0 * slope * r)
    delta = np.where(denom > 0.0, 2.0 * r / np.where(denom > 0.0, denom, 1.0), 0.0)
    out[interior] = (ki - 1) * h + np.minimum(delta, h)
    return out


def simple_reflect(curve: MonotoneCurve) -> LorenzCurve:
    """Point reflection through (1/2, 1/2): x -> 1 - L^{-1}(1 - x).

    Exact where the reflected curve's kinks land on grid nodes; otherwise
    correct to grid resolution.
    """
    grid = curve.grid
    vals = 1.0 - curve.generalized_inverse(1.0 - grid)
    vals = np.maximum.accumulate(vals)
    convex = curve.convex if isinstance(curve, LorenzCurve) else False
    classical = curve.classical if isinstance(curve, LorenzCurve) else False
    return LorenzCurve(vals, convex=convex, classical=classical)


def dual_curve(curve: MonotoneCurve) -> MonotoneCurve:
    """Node-exact concave dual: d(x) = 1 - L(1 - x). Involutive."""
    return MonotoneCurve(1.0 - curve.values[::-1], lorenz_like=True)


# -- generalized curves from raw samples --------------------------------------


@dataclass(frozen=True)
class GeneralizedLorenzPoints:
    """Partial-sum polyline of a sorted sample, scaled by the total.

    Points are (i/n, S_i/S_n) for i = 1..n; the origin is implied.
    sign_change_index is the 0-based position of the first nonnegative
    ratio when the sample has negative values, else None.
    """

    fractions: np.ndarray
    ratios: np.ndarray
    total: float
    sign_change_index: int | None


def generalized_lorenz(samples) -> GeneralizedLorenzPoints:
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise BadParameter("cannot build a curve from an empty sample")
    if not np.isfinite(x).all():
        raise NonFinite("samples must be finite")
    partial = np.cumsum(x)
    total = float(partial[-1])
    if total <= 0.0:
        raise NonPositiveTotal(f"sample total must be positive, got {total!r}")
    ratios = partial / total
    fractions = np.arange(1, x.size + 1, dtype=float) / x.size
    if x[0] >= 0.0:
        idx = None
    else:
        idx = int(np.argmax(ratios >= 0.0))
    return GeneralizedLorenzPoints(fractions, ratios, total, idx)


def truncate_generalized(
    points: GeneralizedLorenzPoints,
    mode: str = "increasing_section",
    grid_size: int = DEFAULT_GRID,
) -> LorenzCurve:
    """Cut a generalized polyline back to a classical curve.

    increasing_section keeps everything from the last minimum onward;
    positive_increasing additionally replaces the below-zero prefix with its
    interpolated zero crossing. The kept section is rescaled onto the unit
    square and resampled onto the grid.
    """
    if mode not in ("increasing_section", "positive_increasing"):
        raise BadParameter(f"unknown truncation mode {mode!r}")
    xs = np.concatenate([[0.0], points.fractions])
    ys = np.concatenate([[0.0], points.ratios])
    start = int(np.flatnonzero(ys == ys.min())[-1])
    xs = xs[start:]
    ys = ys[start:]
    if mode == "positive_increasing" and ys[0] < 0.0:
        j = int(np.argmax(ys >= 0.0))
        x_cross = xs[j - 1] + (xs[j] - xs[j - 1]) * (-ys[j - 1]) / (ys[j] - ys[j - 1])
        xs = np.concatenate([[x_cross], xs[j:]])
        ys = np.concatenate([[0.0], ys[j:]])
    if xs.size < 2 or xs[0] >= 1.0 or ys[0] >= 1.0:
        raise DegenerateAfterTruncation("nothing left after truncation")
    x_scaled = (xs - xs[0]) / (1.0 - xs[0])
    y_scaled = (ys - ys[0]) / (1.0 - ys[0])
    grid = np.linspace(0.0, 1.0, int(grid_size) + 1)
    vals = np.interp(grid, x_scaled, y_scaled)
    vals = np.maximum.accumulate(vals)
    return LorenzCurve(vals, convex=True, classical=True)

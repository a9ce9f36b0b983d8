"""Scalar risk measures and Lorenz-distance measures on return samples.

The classical measures (variance, mean absolute deviation, CVAR, Gini mean
difference) are all computed from sorted samples with explicit weight
vectors, which keeps their small-sample identities exact and testable:
CVAR weights sum to -1 and GMD weights sum to 0 in exact float arithmetic.

The Lorenz-distance family compares the sample's partial-sum polyline
L_hat(i/T) = S_i/S_T against an analytic target curve built from the two
golden-ratio limit shapes:

    k(x) = 1 - (1 - x)**(1/phi)   (concave-tail component)
    p(x) = x**phi                 (convex-tail component)

mixed on a lower tail [0, beta_down] and an upper tail [beta_up, 1], with a
chord across the belly. Distances are weighted by (1 - i/T)**(v-2), which
for v = 2 reduces the self-distance (identity target) to the Gini family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curves import GOLDEN
from .errors import BadParameter, BadSpec, EmptySample, NonFinite, NonPositiveMean
from .lorenz import LorenzCurve

MEASURE_KINDS = ("variance", "mad", "cvar", "gmd", "extended_gini", "gs1", "gs2")

_INV_GOLDEN = 1.0 / GOLDEN


def _sorted_sample(samples, min_size: int = 1) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1:
        raise BadParameter("samples must be one-dimensional")
    if x.size < min_size:
        raise EmptySample(f"need at least {min_size} samples, got {x.size}")
    if not np.isfinite(x).all():
        raise NonFinite("samples must be finite")
    return np.sort(x)


def variance(samples) -> float:
    x = _sorted_sample(samples)
    return float(np.var(x))


def mad(samples) -> float:
    x = _sorted_sample(samples)
    return float(np.mean(np.abs(x - x.mean())))


def cvar_weights(n: int, tail_fraction: float) -> np.ndarray:
    """Order-statistic weights of the discrete CVAR; fsum(weights) == -1.

    The first ceil(p*n) - 1 order statistics carry -1/(p*n) each; the
    boundary statistic carries the exact remainder, computed rationally so
    the total is -1 to the last bit.
    """
    if not 0.0 < tail_fraction < 1.0:
        raise BadParameter("tail fraction must lie in (0, 1)")
    if n < 1:
        raise EmptySample("need at least one sample")
    # Guard ceil against float slop like 0.05 * 100 = 5.000000000000000444.
    i = max(1, math.ceil(tail_fraction * n - 1e-9))
    q = 1.0 / (tail_fraction * n)
    w = np.zeros(n)
    w[: i - 1] = -q
    w[i - 1] = float(Fraction(q) * (i - 1) - 1)
    return w


def cvar(samples, tail_fraction: float = 0.05) -> float:
    """Expected shortfall of the lower tail, positive-loss convention."""
    x = _sorted_sample(samples)
    w = cvar_weights(x.size, tail_fraction)
    return float(np.dot(w, x))


def gmd_weights(n: int) -> np.ndarray:
    """Order-statistic weights of the Gini mean difference; they sum to 0
    exactly by sign symmetry."""
    if n < 2:
        raise EmptySample("Gini mean difference needs at least two samples")
    j = np.arange(1, n + 1, dtype=float)
    return 2.0 * (2.0 * j - 1.0 - n) / (n * (n - 1.0))


def gmd(samples) -> float:
    x = _sorted_sample(samples, min_size=2)
    return float(np.dot(gmd_weights(x.size), x))


def gmd_pairwise(samples) -> float:
    """Mean absolute difference over ordered pairs i != j (cross-check)."""
    x = _sorted_sample(samples, min_size=2)
    n = x.size
    return float(np.abs(x[:, None] - x[None, :]).sum() / (n * (n - 1)))


def _polyline_knots(sorted_x: np.ndarray) -> np.ndarray:
    """S_i/S_T for i = 1..T; requires a positive total."""
    partial = np.cumsum(sorted_x)
    total = partial[-1]
    if total <= 0.0:
        raise NonPositiveMean(f"sample total must be positive, got {total!r}")
    return partial / total


def extended_gini(samples, v: float) -> float:
    """Tail-weighted Gini: v(v-1)/(T-1) * sum (1-i/T)^(v-2) (i/T - S_i/S_T).

    v = 2 recovers the ordinary Gini coefficient (exactly GMD/(2*mean));
    v = 1 gives 0. The sum runs over i = 1..T-1 (the i = T term vanishes).
    """
    if not v >= 1.0:
        raise BadParameter("extended Gini needs v >= 1")
    x = _sorted_sample(samples, min_size=2)
    t = x.size
    knots = _polyline_knots(x)[:-1]
    xi = np.arange(1, t, dtype=float) / t
    weights = (1.0 - xi) ** (v - 2.0)
    return float(v * (v - 1.0) / (t - 1.0) * np.dot(weights, xi - knots))


def gini(samples) -> float:
    return extended_gini(samples, 2.0)


# -- target curves -------------------------------------------------------------


def _kuma(x):
    return 1.0 - (1.0 - x) ** _INV_GOLDEN


def _power(x):
    return x**GOLDEN


def _kuma_prefix(t: float) -> float:
    """integral_0^t of 1 - (1-x)^(1/phi)."""
    a = _INV_GOLDEN
    return t - (1.0 - (1.0 - t) ** (1.0 + a)) / (1.0 + a)


def _power_prefix(t: float) -> float:
    """integral_0^t of x^phi."""
    return t ** (1.0 + GOLDEN) / (1.0 + GOLDEN)


@dataclass(frozen=True)
class TargetCurveSpec:
    """Piecewise target curve: two golden-shape tails joined by a chord.

    Each tail mixes the two limit shapes with nonnegative weights summing to
    one. identity=True short-circuits to the diagonal (both tails trivial,
    integral exactly 1/2).
    """

    beta_down: float = 0.25
    beta_up: float = 0.75
    down_kuma: float = 0.3
    down_power: float = 0.7
    up_kuma: float = 0.8
    up_power: float = 0.2
    identity: bool = False

    def __post_init__(self):
        if self.identity:
            return
        if not 0.0 <= self.beta_down < self.beta_up <= 1.0:
            raise BadSpec(
                f"need 0 <= beta_down < beta_up <= 1, got "
                f"({self.beta_down!r}, {self.beta_up!r})"
            )
        for lo, hi, name in (
            (self.down_kuma, self.down_power, "down"),
            (self.up_kuma, self.up_power, "up"),
        ):
            if lo < 0.0 or hi < 0.0 or abs(lo + hi - 1.0) > 1e-12:
                raise BadSpec(f"{name}-tail weights must be >= 0 and sum to 1")
        anchor_down, anchor_up = self._anchors()
        if anchor_up < anchor_down:
            raise BadSpec(
                "belly chord would decrease: the upper-tail junction value "
                f"{anchor_up!r} lies below the lower-tail one {anchor_down!r}"
            )

    @classmethod
    def gs2_shape(cls, beta_up: float = 0.75) -> "TargetCurveSpec":
        """The restricted shape used by the absolute-value variant: no lower
        tail, pure concave upper tail."""
        return cls(beta_down=0.0, beta_up=beta_up, up_kuma=1.0, up_power=0.0)

    @classmethod
    def diagonal(cls) -> "TargetCurveSpec":
        return cls(identity=True)

    @property
    def is_gs2_shape(self) -> bool:
        return (
            not self.identity
            and self.beta_down == 0.0
            and self.up_kuma == 1.0
            and self.up_power == 0.0
        )

    def _anchors(self) -> tuple[float, float]:
        bd, bu = self.beta_down, self.beta_up
        anchor_down = self.down_kuma * _kuma(bd) + self.down_power * _power(bd)
        anchor_up = self.up_kuma * _kuma(bu) + self.up_power * _power(bu)
        return float(anchor_down), float(anchor_up)

    def evaluate(self, x):
        x_arr = np.asarray(x, dtype=float)
        scalar = x_arr.ndim == 0
        x_arr = np.atleast_1d(x_arr)
        if self.identity:
            out = x_arr.astype(float)
        else:
            down = self.down_kuma * _kuma(x_arr) + self.down_power * _power(x_arr)
            up = self.up_kuma * _kuma(x_arr) + self.up_power * _power(x_arr)
            y_d, y_u = self._anchors()
            slope = (y_u - y_d) / (self.beta_up - self.beta_down)
            chord = y_d + slope * (x_arr - self.beta_down)
            out = np.where(
                x_arr < self.beta_down, down, np.where(x_arr > self.beta_up, up, chord)
            )
        return float(out[0]) if scalar else out

    def integral(self) -> float:
        """Exact integral over [0, 1] (closed forms for both tail shapes)."""
        if self.identity:
            return 0.5
        bd, bu = self.beta_down, self.beta_up
        y_d, y_u = self._anchors()
        lower = self.down_kuma * _kuma_prefix(bd) + self.down_power * _power_prefix(bd)
        upper = self.up_kuma * (_kuma_prefix(1.0) - _kuma_prefix(bu)) + self.up_power * (
            _power_prefix(1.0) - _power_prefix(bu)
        )
        chord = 0.5 * (bu - bd) * (y_d + y_u)
        return float(lower + chord + upper)

    def curve(self, grid_size: int) -> LorenzCurve:
        x = np.linspace(0.0, 1.0, int(grid_size) + 1)
        return LorenzCurve(self.evaluate(x), convex=False, classical=True)


def gs_measure(samples, target: TargetCurveSpec, v: float = 2.5, absolute: bool = False) -> float:
    """Tail-weighted Lorenz distance to a target curve.

    value = mu * v(v-1) / int(target) * (1/(T-1))
            * sum_{i<T} (1 - i/T)^(v-2) |S_i/S_T - target(i/T)|

    absolute=True replaces the samples by their absolute values first (and
    mu by the absolute mean).
    """
    if not v >= 1.0:
        raise BadParameter("gs measure needs v >= 1")
    x = _sorted_sample(samples, min_size=2)
    if absolute:
        x = np.sort(np.abs(x))
    t = x.size
    knots = _polyline_knots(x)[:-1]
    mu = float(np.mean(x))
    xi = np.arange(1, t, dtype=float) / t
    weights = (1.0 - xi) ** (v - 2.0)
    deviation = np.dot(weights, np.abs(knots - target.evaluate(xi)))
    return float(mu * v * (v - 1.0) / target.integral() * deviation / (t - 1.0))


# -- dispatch ------------------------------------------------------------------


@dataclass(frozen=True)
class RiskMeasureConfig:
    kind: str
    v: float = 2.5
    tail_fraction: float = 0.05
    target: TargetCurveSpec | None = None

    def __post_init__(self):
        if self.kind not in MEASURE_KINDS:
            raise BadParameter(f"kind must be one of {MEASURE_KINDS}, got {self.kind!r}")
        if self.kind in ("extended_gini", "gs1", "gs2") and not self.v >= 1.0:
            raise BadParameter("v must be >= 1")
        if self.kind == "cvar" and not 0.0 < self.tail_fraction < 1.0:
            raise BadParameter("tail fraction must lie in (0, 1)")
        if self.kind in ("gs1", "gs2") and self.target is None:
            default = (
                TargetCurveSpec.gs2_shape() if self.kind == "gs2" else TargetCurveSpec()
            )
            object.__setattr__(self, "target", default)
        if self.kind == "gs2" and not self.target.is_gs2_shape:
            raise BadSpec(
                "gs2 requires the restricted target (beta_down = 0, pure "
                "concave upper tail)"
            )


def measure_value(samples, config: RiskMeasureConfig) -> float:
    kind = config.kind
    if kind == "variance":
        return variance(samples)
    if kind == "mad":
        return mad(samples)
    if kind == "cvar":
        return cvar(samples, config.tail_fraction)
    if kind == "gmd":
        return gmd(samples)
    if kind == "extended_gini":
        return extended_gini(samples, config.v)
    if kind == "gs1":
        return gs_measure(samples, config.target, config.v, absolute=False)
    return gs_measure(samples, config.target, config.v, absolute=True)


def measure_report(samples, config: RiskMeasureConfig) -> dict:
    """Value plus the quantities a reader needs to rescale or audit it."""
    x = np.asarray(samples, dtype=float)
    value = measure_value(samples, config)
    mu = float(np.mean(np.abs(x))) if config.kind == "gs2" else float(np.mean(x))
    report = {
        "kind": config.kind,
        "value": value,
        "mu": mu,
        "knots": int(x.size),
        "integral_target": (
            config.target.integral() if config.target is not None else None
        ),
    }
    return report

"""Iterating the Lorenz operators and their golden-ratio limits.

Each step treats the current curve as a c.d.f., re-extracts its quantile by
generalized inversion on the same grid, and applies the operator again. The
primal iteration converges to x**phi, the reflected one to
1 - (1 - x)**(1/phi), with phi the golden ratio.

The alpha sequence alpha_1 = 1, alpha_{n+1} = 1 + 1/alpha_n (ratios of
consecutive Fibonacci numbers) drives the theoretical envelopes: from the
second operator output on, the n-th iterate is pinched between the power
curves with exponents alpha_n and alpha_{n+1} (primal mode), or between the
complement curves with exponents 1/alpha_n and 1/alpha_{n+1} (reflected
mode). The first output is only guaranteed classical.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .curves import GOLDEN, DEFAULT_GRID, MonotoneCurve, QuantileCurve, format_float
from .errors import BadParameter
from .lorenz import (
    LorenzCurve,
    lorenz_transform,
    primal_inverse,
    reflected_inverse,
    reflected_transform,
    unit_support,
)

ENVELOPE_SLACK = 1e-6

_MODES = ("primal", "reflected")


def _check_mode(mode: str) -> None:
    if mode not in _MODES:
        raise BadParameter(f"mode must be one of {_MODES}, got {mode!r}")


def alpha_sequence(count: int) -> np.ndarray:
    """First `count` terms of alpha_1 = 1, alpha_{n+1} = 1 + 1/alpha_n."""
    if count < 1:
        raise BadParameter("need at least one term")
    out = np.empty(count)
    out[0] = 1.0
    for i in range(1, count):
        out[i] = 1.0 + 1.0 / out[i - 1]
    return out


def limit_curve(mode: str, grid_size: int = DEFAULT_GRID) -> LorenzCurve:
    """Limit of the iteration: x**phi, or its reflection 1 - (1-x)**(1/phi).

    `simple_reflected` is accepted as an alias for `reflected`: reflecting
    x**phi through (x, y) -> (1 - y, 1 - x) gives the same curve the
    reflected operator converges to.
    """
    if mode not in ("primal", "reflected", "simple_reflected"):
        raise BadParameter(
            "mode must be one of ('primal', 'reflected', 'simple_reflected'), "
            f"got {mode!r}"
        )
    x = np.linspace(0.0, 1.0, int(grid_size) + 1)
    if mode == "primal":
        vals = x**GOLDEN
    else:
        vals = 1.0 - (1.0 - x) ** (1.0 / GOLDEN)
    return LorenzCurve(vals, convex=True, classical=True)


def envelope_bounds(step: int, mode: str, x: np.ndarray):
    """Lower/upper envelope for the `step`-th operator output, step >= 1.

    The parity bookkeeping reduces to: the binding exponent pair is
    (alpha_step, alpha_{step+1}), and for power curves a larger exponent
    means a smaller curve.
    """
    _check_mode(mode)
    if step < 1:
        raise BadParameter("envelopes start at step 1")
    alphas = alpha_sequence(step + 1)
    hi_exp = max(alphas[step - 1], alphas[step])
    lo_exp = min(alphas[step - 1], alphas[step])
    if mode == "primal":
        return x**hi_exp, x**lo_exp
    return 1.0 - (1.0 - x) ** (1.0 / hi_exp), 1.0 - (1.0 - x) ** (1.0 / lo_exp)


def envelope_violation(curve: MonotoneCurve, index: int, mode: str) -> float:
    """Worst node excursion of `curve` outside its envelope.

    index is 0-based into the trace: index 0 (the first output) is only
    checked classical (0 <= L <= x); later outputs use the alpha envelopes.
    """
    x = curve.grid
    v = curve.values
    if index == 0:
        lower = np.zeros_like(x)
        upper = x
    else:
        lower, upper = envelope_bounds(index, mode, x)
    excess = np.maximum(lower - v, v - upper)
    return float(max(excess.max(), 0.0))


@dataclass
class EnvelopeReport:
    violations: list[float]
    ok: list[bool]

    @property
    def all_ok(self) -> bool:
        return all(self.ok)


def envelope_check(curves, mode: str, slack: float = ENVELOPE_SLACK) -> EnvelopeReport:
    violations = [envelope_violation(c, i, mode) for i, c in enumerate(curves)]
    return EnvelopeReport(violations, [v <= slack for v in violations])


@dataclass
class IterationTrace:
    mode: str
    grid_size: int
    tol: float
    curves: list[LorenzCurve] = field(default_factory=list)
    sup_to_limit: list[float] = field(default_factory=list)
    sup_successive: list[float] = field(default_factory=list)
    envelope_violations: list[float] = field(default_factory=list)
    envelope_ok: list[bool] = field(default_factory=list)
    converged: bool = False
    no_progress: bool = False

    @property
    def iterations(self) -> int:
        return len(self.curves)


# Stagnation detector: the last window of successive gaps is all above
# tolerance, roughly flat, and already down at grid-resolution scale.
_STALL_WINDOW = 5
_STALL_FLATNESS = 2.0
_STALL_GRID_FACTOR = 64.0


def _stalled(gaps: list[float], tol: float, grid_size: int) -> bool:
    if len(gaps) < _STALL_WINDOW:
        return False
    recent = gaps[-_STALL_WINDOW:]
    lo, hi = min(recent), max(recent)
    return (
        lo >= tol
        and hi <= _STALL_FLATNESS * lo
        and lo <= _STALL_GRID_FACTOR / grid_size
    )


def run_iteration(
    start: MonotoneCurve,
    mode: str,
    max_iter: int = 40,
    tol: float = 1e-4,
    *,
    normalize: bool = False,
    check: bool = True,
) -> IterationTrace:
    """Iterate the operator from a starting quantile curve.

    `start` is a quantile function on the grid. In reflected mode,
    normalize=True rescales the start by its maximum (later iterates live in
    [0, 1] automatically). Stops when successive curves agree within `tol`
    in sup norm, or after max_iter applications.
    """
    _check_mode(mode)
    if max_iter < 1:
        raise BadParameter("max_iter must be at least 1")
    grid_size = start.grid_size
    grid = start.grid
    limit = limit_curve(mode, grid_size)
    trace = IterationTrace(mode=mode, grid_size=grid_size, tol=tol)

    def apply(quantile: MonotoneCurve, first: bool) -> LorenzCurve:
        if mode == "primal":
            return lorenz_transform(quantile)
        return reflected_transform(
            quantile, normalize=normalize and first, check=check
        )

    # The next quantile is the generalized inverse of the operator output,
    # taken on the exact output (piecewise-quadratic primal, psi-composed
    # reflected) rather than on its grid sampling: inverting the stored
    # polyline would feed its interpolation error back into the loop at the
    # singular edge, flooring sup_to_limit near 5e-6 at M=4096.
    def next_quantile(quantile: MonotoneCurve, first: bool) -> QuantileCurve:
        if mode == "primal":
            return QuantileCurve(primal_inverse(quantile, grid))
        if normalize and first:
            quantile = unit_support(quantile, normalize=True)
        return QuantileCurve(reflected_inverse(quantile, grid))

    curve = apply(start, True)
    quantile = start
    first = True
    prev = None
    for _ in range(max_iter):
        trace.curves.append(curve)
        trace.sup_to_limit.append(float(np.max(np.abs(curve.values - limit.values))))
        if prev is None:
            trace.sup_successive.append(math.nan)
        else:
            gap = float(np.max(np.abs(curve.values - prev.values)))
            trace.sup_successive.append(gap)
            if gap < tol:
                trace.converged = True
        idx = len(trace.curves) - 1
        trace.envelope_violations.append(envelope_violation(curve, idx, mode))
        trace.envelope_ok.append(trace.envelope_violations[-1] <= ENVELOPE_SLACK)
        if trace.converged:
            break
        real_gaps = [g for g in trace.sup_successive if not math.isnan(g)]
        if _stalled(real_gaps, tol, grid_size):
            trace.no_progress = True
        prev = curve
        if len(trace.curves) == max_iter:
            break
        quantile = next_quantile(quantile, first)
        first = False
        curve = apply(quantile, False)
    return trace


def write_trace_csv(trace: IterationTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "sup_to_limit", "sup_successive", "envelope_ok"])
        for i in range(trace.iterations):
            writer.writerow(
                [
                    str(i + 1),
                    format_float(trace.sup_to_limit[i]),
                    format_float(trace.sup_successive[i]),
                    "true" if trace.envelope_ok[i] else "false",
                ]
            )


def fixed_point_residual(curve: MonotoneCurve, mode: str) -> float:
    """sup |operator(curve) - curve|: zero exactly at the operator's fixed point."""
    _check_mode(mode)
    quantile = QuantileCurve(curve.generalized_inverse(curve.grid))
    if mode == "primal":
        image = lorenz_transform(quantile)
    else:
        image = reflected_transform(quantile)
    return float(np.max(np.abs(image.values - curve.values)))


@dataclass(frozen=True)
class SelfSimilarityFit:
    """No-intercept least-squares fit of L' against a scale-invariance ratio."""

    eps_hat: float
    residual: float
    nodes_used: int


def self_similarity_residual(
    curve: MonotoneCurve, branch: str = "down", trim: float = 0.01
) -> SelfSimilarityFit:
    """Fit L'(x) = eps * g(x) on interior nodes.

    branch "down" uses g = L(x)/x (lower-tail scale invariance; the primal
    limit gives eps = phi); branch "upper" uses g = (1-L(x))/(1-x) (the
    reflected limit gives eps = 1/phi). Derivatives are central differences;
    `trim` cuts that fraction of the domain at each end, where the
    difference quotient of a power-law curve degrades.
    """
    if branch not in ("down", "upper"):
        raise BadParameter(f"branch must be 'down' or 'upper', got {branch!r}")
    v = curve.values
    m = curve.grid_size
    x = curve.grid[1:-1]
    deriv = (v[2:] - v[:-2]) * (m / 2.0)
    if branch == "down":
        g = v[1:-1] / x
    else:
        g = (1.0 - v[1:-1]) / (1.0 - x)
    mask = (x >= trim) & (x <= 1.0 - trim)
    deriv = deriv[mask]
    g = g[mask]
    if deriv.size < 2:
        raise BadParameter("not enough interior nodes for the fit")
    eps = float(np.dot(deriv, g) / np.dot(g, g))
    resid = float(np.sqrt(np.mean((deriv - eps * g) ** 2)))
    return SelfSimilarityFit(eps, resid, int(deriv.size))

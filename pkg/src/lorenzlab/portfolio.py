"""Long-only minimum-risk portfolios over a scenario matrix.

min_risk minimizes a risk measure of the portfolio return r = S @ w over the
simplex {w >= 0, sum w = 1}, optionally with a mean-return target, by
Nelder-Mead on an exterior quadratic penalty with an escalating coefficient
(rho = 100 * 10^k over five rounds). The solver itself never sees the
constraints; a final least-squares projection onto the active equality
constraints (with nonnegative pinning) brings the budget residual below
1e-8 and the target residual below 1e-6.

grid_oracle brute-forces the same problem on the weight lattice with the
given step, for small asset counts, as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadParameter,
    DimensionMismatch,
    InfeasibleTarget,
    NonPositiveMean,
    NonPositiveMeanRegion,
    NonPositiveTotal,
    TooManyAssets,
)
from .risk import RiskMeasureConfig, measure_value

BUDGET_TOL = 1e-8
TARGET_TOL = 1e-6
NONNEG_TOL = 1e-10

_PENALTY_ROUNDS = 5
_PENALTY_START = 100.0
_BIG = 1e12


def nelder_mead(
    f,
    x0: np.ndarray,
    *,
    initial_step: float = 0.1,
    diameter_tol: float = 1e-8,
    max_iter: int | None = None,
):
    """Plain Nelder-Mead: reflection 1, expansion 2, contraction 1/2,
    shrink 1/2. Stops when the simplex diameter (sup norm around the best
    vertex) falls below diameter_tol.

    Returns (x_best, f_best, iterations, final_diameter).
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    if max_iter is None:
        max_iter = 400 * n
    simplex = [x0]
    for i in range(n):
        step = np.zeros(n)
        step[i] = initial_step
        simplex.append(x0 + step)
    simplex = np.array(simplex)
    fvals = np.array([f(x) for x in simplex])

    iterations = 0
    while iterations < max_iter:
        order = np.argsort(fvals, kind="stable")
        simplex = simplex[order]
        fvals = fvals[order]
        diameter = float(np.max(np.abs(simplex[1:] - simplex[0])))
        if diameter <= diameter_tol:
            return simplex[0], float(fvals[0]), iterations, diameter
        iterations += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        reflected = centroid + (centroid - worst)
        f_r = f(reflected)
        if f_r < fvals[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            f_e = f(expanded)
            if f_e < f_r:
                simplex[-1], fvals[-1] = expanded, f_e
            else:
                simplex[-1], fvals[-1] = reflected, f_r
        elif f_r < fvals[-2]:
            simplex[-1], fvals[-1] = reflected, f_r
        else:
            contracted = centroid + 0.5 * (worst - centroid)
            f_c = f(contracted)
            if f_c < fvals[-1]:
                simplex[-1], fvals[-1] = contracted, f_c
            else:
                simplex[1:] = simplex[0] + 0.5 * (simplex[1:] - simplex[0])
                fvals[1:] = [f(x) for x in simplex[1:]]
    order = np.argsort(fvals, kind="stable")
    simplex = simplex[order]
    fvals = fvals[order]
    diameter = float(np.max(np.abs(simplex[1:] - simplex[0])))
    return simplex[0], float(fvals[0]), iterations, diameter


@dataclass(frozen=True)
class FrontierPoint:
    weights: np.ndarray
    mean: float
    risk: float
    target: float | None
    converged: bool
    iterations: int
    rho_final: float
    residual_budget: float
    residual_target: float
    min_weight: float
    message: str = ""


@dataclass
class FrontierResult:
    points: list[FrontierPoint] = field(default_factory=list)
    tickers: list[str] = field(default_factory=list)


def _validate_scenarios(scenarios) -> np.ndarray:
    s = np.asarray(scenarios, dtype=float)
    if s.ndim != 2 or s.shape[0] < 2 or s.shape[1] < 1:
        raise BadParameter("scenarios must be a T x N matrix with T >= 2")
    if not np.isfinite(s).all():
        raise BadParameter("scenarios must be finite")
    return s


def portfolio_returns(scenarios, weights) -> np.ndarray:
    """Per-scenario portfolio return, scenarios @ weights."""
    s = _validate_scenarios(scenarios)
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size != s.shape[1]:
        raise DimensionMismatch(
            f"weights have length {w.size}, scenarios have {s.shape[1]} columns"
        )
    if not np.isfinite(w).all():
        raise BadParameter("weights must be finite")
    return s @ w


def _penalized_objective(scenarios, config, target, rho):
    def objective(w: np.ndarray) -> float:
        r = scenarios @ w
        mu = float(r.mean())
        try:
            base = measure_value(r, config)
        except (NonPositiveMean, NonPositiveTotal):
            base = _BIG * (1.0 + max(0.0, -mu))
        penalty = (w.sum() - 1.0) ** 2
        penalty += float(np.sum(np.minimum(w, 0.0) ** 2))
        penalty += min(mu, 0.0) ** 2
        if target is not None:
            penalty += (mu - target) ** 2
        return base + rho * penalty

    return objective


def _project_onto_constraints(w, means, target):
    """Least-squares correction onto {sum w = 1} (and {means.w = target}),
    pinning coordinates that the correction would push below zero."""
    n = w.size
    free = w > -NONNEG_TOL  # coordinates already clipped stay pinned at 0
    w = np.where(free, w, 0.0)
    for _ in range(n + 1):
        mask = free.astype(float)
        if target is None:
            a = mask[None, :]
            b = np.array([1.0])
        else:
            a = np.vstack([mask, means * mask])
            b = np.array([1.0, target])
        rhs = b - a @ w
        gram = a @ a.T
        try:
            lam = np.linalg.solve(gram, rhs)
        except np.linalg.LinAlgError:
            lam = np.linalg.lstsq(gram, rhs, rcond=None)[0]
        candidate = w + a.T @ lam
        bad = candidate < -1e-12
        if not bad.any():
            w = candidate
            break
        free &= ~bad
        w = np.where(free, w, 0.0)
    w = np.where((w < 0.0) & (w >= -1e-12), 0.0, w)
    return w


def min_risk(
    scenarios,
    config: RiskMeasureConfig,
    target: float | None = None,
    w0=None,
) -> FrontierPoint:
    """Minimum-risk long-only weights, optionally at a mean-return target."""
    s = _validate_scenarios(scenarios)
    n = s.shape[1]
    means = s.mean(axis=0)
    if means.max() <= 0.0:
        raise NonPositiveMeanRegion("no long-only portfolio has a positive mean")
    if target is not None:
        if target > means.max() + 1e-12 or target < means.min() - 1e-12:
            raise InfeasibleTarget(
                f"target {target!r} outside the attainable range "
                f"[{means.min()!r}, {means.max()!r}]"
            )
        if target >= means.max() - 1e-12:
            # The only long-only portfolio attaining the maximal mean sits
            # entirely on the best asset; ties go to the lowest index.
            k = int(np.argmax(means))
            w = np.zeros(n)
            w[k] = 1.0
            r = s[:, k]
            return FrontierPoint(
                weights=w,
                mean=float(means[k]),
                risk=float(measure_value(r, config)),
                target=target,
                converged=True,
                iterations=0,
                rho_final=0.0,
                residual_budget=0.0,
                residual_target=abs(float(means[k]) - target),
                min_weight=0.0,
            )
    if w0 is not None:
        starts = [np.asarray(w0, dtype=float).copy()]
    else:
        # Nelder-Mead is local and the gs measures are not convex, so a cold
        # solve fans out from the center and from every vertex.
        starts = [np.full(n, 1.0 / n)]
        starts.extend(np.eye(n)[k] for k in range(n))

    def solve(start: np.ndarray) -> FrontierPoint:
        w = start.copy()
        rho = _PENALTY_START
        iterations = 0
        diameter = math.inf
        for round_idx in range(_PENALTY_ROUNDS):
            step = 0.1 if round_idx == 0 else 0.02
            w, _, its, diameter = nelder_mead(
                _penalized_objective(s, config, target, rho),
                w,
                initial_step=step,
                diameter_tol=1e-8,
            )
            iterations += its
            rho *= 10.0
        rho_final = rho / 10.0

        w = _project_onto_constraints(w, means, target)
        r = s @ w
        mu = float(r.mean())
        message = ""
        try:
            risk = float(measure_value(r, config))
        except (NonPositiveMean, NonPositiveTotal) as exc:
            risk = math.nan
            message = f"risk undefined at the solution: {exc}"
        residual_budget = abs(float(w.sum()) - 1.0)
        residual_target = 0.0 if target is None else abs(mu - target)
        stopped = diameter <= 1e-8
        feasible = (
            residual_budget <= BUDGET_TOL
            and residual_target <= TARGET_TOL
            and float(w.min()) >= -NONNEG_TOL
        )
        if not message and not stopped:
            message = "simplex diameter above tolerance at max_iter"
        return FrontierPoint(
            weights=w,
            mean=mu,
            risk=risk,
            target=target,
            converged=stopped and feasible and not math.isnan(risk),
            iterations=iterations,
            rho_final=rho_final,
            residual_budget=residual_budget,
            residual_target=residual_target,
            min_weight=float(w.min()),
            message=message,
        )

    def rank(p: FrontierPoint):
        if math.isnan(p.risk):
            return (2, math.inf)
        slack = (
            max(p.residual_budget - BUDGET_TOL, 0.0)
            + max(p.residual_target - TARGET_TOL, 0.0)
            + max(-p.min_weight - NONNEG_TOL, 0.0)
        )
        if slack > 0.0:
            return (1, slack)
        return (0, p.risk)

    # min is stable, so on exact ties the centered start wins.
    return min((solve(w) for w in starts), key=rank)


def efficient_frontier(
    scenarios,
    config: RiskMeasureConfig,
    n_points: int = 10,
    tickers: list[str] | None = None,
) -> FrontierResult:
    """Risk-minimal portfolios from the global minimum's mean up to the best
    single-asset mean. Failed points are recorded and the sweep continues."""
    s = _validate_scenarios(scenarios)
    if n_points < 2:
        raise BadParameter("a frontier needs at least two points")
    means = s.mean(axis=0)
    if means.max() <= 0.0:
        raise NonPositiveMeanRegion("no long-only portfolio has a positive mean")
    if tickers is None:
        tickers = [f"a{i + 1}" for i in range(s.shape[1])]

    anchor = min_risk(s, config)
    result = FrontierResult(points=[anchor], tickers=list(tickers))
    targets = np.linspace(anchor.mean, float(means.max()), n_points)
    w_prev = anchor.weights
    for t in targets[1:]:
        try:
            point = min_risk(s, config, target=float(t), w0=w_prev)
        except (InfeasibleTarget, NonPositiveMeanRegion) as exc:
            point = FrontierPoint(
                weights=np.full(s.shape[1], math.nan),
                mean=math.nan,
                risk=math.nan,
                target=float(t),
                converged=False,
                iterations=0,
                rho_final=0.0,
                residual_budget=math.nan,
                residual_target=math.nan,
                min_weight=math.nan,
                message=str(exc),
            )
        else:
            if point.converged:
                w_prev = point.weights
        result.points.append(point)
    return result


def _compositions(total: int, parts: int):
    """All nonnegative integer tuples of length `parts` summing to `total`,
    in lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def grid_oracle(
    scenarios,
    config: RiskMeasureConfig,
    step: float = 0.01,
    target: float | None = None,
):
    """Exhaustive lattice search over weights in multiples of `step`.

    With a target, candidates must match the mean within half a lattice
    rung: |mean(w) - target| <= (step/2) * (max asset mean - min asset mean).
    Ties keep the first (lexicographically smallest) weight vector.
    Returns (weights, risk).
    """
    s = _validate_scenarios(scenarios)
    n = s.shape[1]
    if n > 4:
        raise TooManyAssets(f"grid oracle is exhaustive; {n} assets is too many")
    k = round(1.0 / step)
    if k < 1 or abs(k * step - 1.0) > 1e-9:
        raise BadParameter("step must divide 1")
    means = s.mean(axis=0)
    band = 0.5 * step * float(means.max() - means.min()) + 1e-12
    best_w = None
    best_risk = math.inf
    for counts in _compositions(k, n):
        w = np.array(counts, dtype=float) / k
        if target is not None and abs(float(w @ means) - target) > band:
            continue
        try:
            risk = measure_value(s @ w, config)
        except (NonPositiveMean, NonPositiveTotal):
            continue
        if risk < best_risk:
            best_risk = float(risk)
            best_w = w
    if best_w is None:
        raise InfeasibleTarget("no lattice point satisfies the constraints")
    return best_w, best_risk

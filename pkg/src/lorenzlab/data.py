"""Price panels, return scenarios, and seeded copula resampling.

The pipeline is file-oriented: a price CSV (date column plus one column per
ticker, blank cells for missing quotes) is cleaned by coverage, turned into
simple or log returns at daily or weekly frequency, optionally cut to a
trailing window, and either used directly as historical scenarios or
expanded by a Gaussian-copula resampler that draws new rows whose marginals
are the historical ones (every simulated value is a historical value) and
whose rank correlations track the historical ones.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from datetime import date

import numpy as np

from .curves import format_float
from .errors import (
    BadParameter,
    DegenerateColumnWarning,
    DuplicateDate,
    EmptyAfterCleaning,
    InsufficientHistory,
    NonPositivePrice,
    ParseError,
)
from .rng import Xoshiro256pp, normal_cdf, normal_inverse_cdf


@dataclass
class PricePanel:
    dates: list[date]
    tickers: list[str]
    prices: np.ndarray  # T x N, NaN marks a missing quote

    @property
    def shape(self):
        return self.prices.shape


@dataclass
class CleaningReport:
    dropped_tickers: list[tuple[str, float]] = field(default_factory=list)
    dropped_dates: int = 0
    kept_dates: int = 0
    kept_tickers: int = 0

    def as_dict(self) -> dict:
        return {
            "dropped_tickers": [
                {"ticker": t, "coverage": c} for t, c in self.dropped_tickers
            ],
            "dropped_dates": self.dropped_dates,
            "kept": {"T": self.kept_dates, "N": self.kept_tickers},
        }


@dataclass
class ScenarioMatrix:
    values: np.ndarray  # T x N
    tickers: list[str]
    frequency: str = "daily"
    kind: str = "simple"
    source: str = "historical"
    seed: int | None = None
    dates: list[date] | None = None

    @property
    def shape(self):
        return self.values.shape


def load_price_panel(path) -> PricePanel:
    """Read a `date,<ticker>,...` CSV. Blank cells are missing; prices must
    be positive; dates must be unique. Rows are sorted by date."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2 or header[0].strip().lower() != "date":
            raise ParseError(f"{path}: expected a 'date,<tickers>' header")
        tickers = [h.strip() for h in header[1:]]
        rows = []
        seen: set[date] = set()
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}"
                )
            try:
                day = date.fromisoformat(row[0].strip())
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad date {row[0]!r}") from exc
            if day in seen:
                raise DuplicateDate(f"{path}:{lineno}: duplicate date {day}")
            seen.add(day)
            prices = np.empty(len(tickers))
            for j, cell in enumerate(row[1:]):
                cell = cell.strip()
                if not cell or cell.lower() == "nan":
                    prices[j] = math.nan
                    continue
                try:
                    value = float(cell)
                except ValueError as exc:
                    raise ParseError(
                        f"{path}:{lineno}: bad price {cell!r} for {tickers[j]}"
                    ) from exc
                if not value > 0.0 or not math.isfinite(value):
                    raise NonPositivePrice(
                        f"{path}:{lineno}: price {value!r} for {tickers[j]}"
                    )
                prices[j] = value
            rows.append((day, prices))
    if not rows:
        raise ParseError(f"{path}: no data rows")
    rows.sort(key=lambda item: item[0])
    dates = [day for day, _ in rows]
    matrix = np.vstack([p for _, p in rows])
    return PricePanel(dates, tickers, matrix)


def clean_panel(panel: PricePanel, coverage: float = 0.95):
    """Drop tickers under the coverage threshold (measured against the full
    original date axis), then drop dates that are incomplete for the
    surviving tickers. Returns (clean_panel, CleaningReport)."""
    if not 0.0 < coverage <= 1.0:
        raise BadParameter("coverage must lie in (0, 1]")
    t_all = len(panel.dates)
    present = ~np.isnan(panel.prices)
    ticker_cov = present.sum(axis=0) / t_all
    keep_col = ticker_cov >= coverage - 1e-12
    report = CleaningReport(
        dropped_tickers=[
            (panel.tickers[j], float(ticker_cov[j]))
            for j in range(len(panel.tickers))
            if not keep_col[j]
        ]
    )
    if not keep_col.any():
        raise EmptyAfterCleaning("every ticker fell below the coverage threshold")
    kept_prices = panel.prices[:, keep_col]
    keep_row = ~np.isnan(kept_prices).any(axis=1)
    report.dropped_dates = int(t_all - keep_row.sum())
    if not keep_row.any():
        raise EmptyAfterCleaning("no complete dates remain after cleaning")
    cleaned = PricePanel(
        dates=[d for d, k in zip(panel.dates, keep_row) if k],
        tickers=[t for t, k in zip(panel.tickers, keep_col) if k],
        prices=kept_prices[keep_row],
    )
    report.kept_dates, report.kept_tickers = cleaned.prices.shape
    return cleaned, report


def take_every(panel: PricePanel, k: int) -> PricePanel:
    """Keep every k-th date, starting with the first."""
    if k < 1:
        raise BadParameter("take_every needs k >= 1")
    return PricePanel(panel.dates[::k], list(panel.tickers), panel.prices[::k].copy())


def _week_key(day: date):
    iso = day.isocalendar()
    return (iso[0], iso[1])


def compute_returns(
    panel: PricePanel, frequency: str = "daily", kind: str = "simple"
) -> ScenarioMatrix:
    """Per-period returns of a complete (cleaned) panel.

    Weekly frequency keeps the last observation of each ISO week before
    differencing."""
    if frequency not in ("daily", "weekly"):
        raise BadParameter(f"frequency must be daily or weekly, got {frequency!r}")
    if kind not in ("simple", "log"):
        raise BadParameter(f"kind must be simple or log, got {kind!r}")
    if np.isnan(panel.prices).any():
        raise BadParameter("panel has missing values; clean it first")
    dates = panel.dates
    prices = panel.prices
    if frequency == "weekly":
        keep = [
            i
            for i in range(len(dates))
            if i + 1 == len(dates) or _week_key(dates[i]) != _week_key(dates[i + 1])
        ]
        dates = [dates[i] for i in keep]
        prices = prices[keep]
    if len(dates) < 2:
        raise InsufficientHistory("need at least two observations for returns")
    ratio = prices[1:] / prices[:-1]
    values = np.log(ratio) if kind == "log" else ratio - 1.0
    return ScenarioMatrix(
        values=values,
        tickers=list(panel.tickers),
        frequency=frequency,
        kind=kind,
        source="historical",
        dates=dates[1:],
    )


def historical_scenarios(scenarios: ScenarioMatrix, window: int = 500) -> ScenarioMatrix:
    """The most recent `window` rows, kept in order."""
    if window < 1:
        raise BadParameter("window must be positive")
    t = scenarios.values.shape[0]
    if t < window:
        raise InsufficientHistory(f"have {t} rows, need {window}")
    return ScenarioMatrix(
        values=scenarios.values[-window:].copy(),
        tickers=list(scenarios.tickers),
        frequency=scenarios.frequency,
        kind=scenarios.kind,
        source=scenarios.source,
        seed=scenarios.seed,
        dates=None if scenarios.dates is None else scenarios.dates[-window:],
    )


def average_ranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks with ties averaged."""
    uniq, inverse, counts = np.unique(x, return_inverse=True, return_counts=True)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    avg = starts + (counts + 1) / 2.0
    return avg[inverse]


def spearman_matrix(values: np.ndarray) -> np.ndarray:
    """Rank correlation matrix; constant columns get zero correlation."""
    values = np.asarray(values, dtype=float)
    t, n = values.shape
    ranks = np.column_stack([average_ranks(values[:, j]) for j in range(n)])
    constant = values.max(axis=0) == values.min(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.corrcoef(ranks, rowvar=False)
    corr = np.atleast_2d(corr)
    for j in np.flatnonzero(constant):
        corr[j, :] = 0.0
        corr[:, j] = 0.0
        corr[j, j] = 1.0
    corr[np.isnan(corr)] = 0.0
    np.fill_diagonal(corr, 1.0)
    return corr


def _normal_scores_correlation(values: np.ndarray) -> np.ndarray:
    t, n = values.shape
    scores = np.empty_like(values)
    for j in range(n):
        u = average_ranks(values[:, j]) / (t + 1.0)
        scores[:, j] = [normal_inverse_cdf(ui) for ui in u]
    constant = values.max(axis=0) == values.min(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.corrcoef(scores, rowvar=False)
    corr = np.atleast_2d(corr)
    for j in np.flatnonzero(constant):
        corr[j, :] = 0.0
        corr[:, j] = 0.0
        corr[j, j] = 1.0
    corr[np.isnan(corr)] = 0.0
    np.fill_diagonal(corr, 1.0)
    return corr


def _nearest_correlation_cholesky(corr: np.ndarray) -> np.ndarray:
    """Cholesky factor after clipping eigenvalues at 1e-10 and restoring the
    unit diagonal."""
    vals, vecs = np.linalg.eigh(corr)
    vals = np.maximum(vals, 1e-10)
    fixed = (vecs * vals) @ vecs.T
    d = np.sqrt(np.diag(fixed))
    fixed = fixed / np.outer(d, d)
    fixed = 0.5 * (fixed + fixed.T)
    jitter = 0.0
    for _ in range(6):
        try:
            return np.linalg.cholesky(fixed + jitter * np.eye(len(fixed)))
        except np.linalg.LinAlgError:
            jitter = 1e-12 if jitter == 0.0 else jitter * 10.0
    raise BadParameter("correlation matrix could not be factorized")


def copula_simulate(
    scenarios: ScenarioMatrix, n: int = 1000, seed: int = 0
) -> ScenarioMatrix:
    """Gaussian-copula resampling of a historical scenario matrix.

    Marginals are the historical empirical quantiles (x_(ceil(u*T))), so
    every simulated value appears in the history. Each output row uses its
    own counter-derived substream of the seed, so row i is identical across
    runs and independent of n.
    """
    values = np.asarray(scenarios.values, dtype=float)
    t, n_assets = values.shape
    if t < 2:
        raise InsufficientHistory("need at least two historical rows")
    if n < 1:
        raise BadParameter("n must be positive")
    constant = values.max(axis=0) == values.min(axis=0)
    if constant.any():
        names = [scenarios.tickers[j] for j in np.flatnonzero(constant)]
        warnings.warn(
            f"constant columns {names}: rank correlations undefined, using 0",
            DegenerateColumnWarning,
            stacklevel=2,
        )
    corr = _normal_scores_correlation(values)
    chol = _nearest_correlation_cholesky(corr)
    sorted_cols = np.sort(values, axis=0)
    out = np.empty((n, n_assets))
    for i in range(n):
        rng = Xoshiro256pp.substream(seed, i)
        eps = np.array([rng.normal() for _ in range(n_assets)])
        correlated = chol @ eps
        for j in range(n_assets):
            u = normal_cdf(correlated[j])
            idx = min(max(math.ceil(u * t), 1), t)
            out[i, j] = sorted_cols[idx - 1, j]
    return ScenarioMatrix(
        values=out,
        tickers=list(scenarios.tickers),
        frequency=scenarios.frequency,
        kind=scenarios.kind,
        source="simulated",
        seed=seed,
    )


# -- CSV round trips -----------------------------------------------------------


def write_prices_csv(panel: PricePanel, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date"] + list(panel.tickers))
        for day, row in zip(panel.dates, panel.prices):
            cells = ["" if math.isnan(v) else format_float(v) for v in row]
            writer.writerow([day.isoformat()] + cells)


def write_scenarios_csv(scenarios: ScenarioMatrix, path) -> None:
    """Historical matrices keep their date column; simulated ones have none."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if scenarios.dates is not None:
            writer.writerow(["date"] + list(scenarios.tickers))
            for day, row in zip(scenarios.dates, scenarios.values):
                writer.writerow([day.isoformat()] + [format_float(v) for v in row])
        else:
            writer.writerow(list(scenarios.tickers))
            for row in scenarios.values:
                writer.writerow([format_float(v) for v in row])


def read_scenarios_csv(path) -> ScenarioMatrix:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or not header:
            raise ParseError(f"{path}: empty scenario file")
        has_dates = header[0].strip().lower() == "date"
        tickers = [h.strip() for h in (header[1:] if has_dates else header)]
        if not tickers:
            raise ParseError(f"{path}: no ticker columns")
        dates = [] if has_dates else None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            cells = row[1:] if has_dates else row
            if len(cells) != len(tickers):
                raise ParseError(f"{path}:{lineno}: wrong number of cells")
            if has_dates:
                try:
                    dates.append(date.fromisoformat(row[0].strip()))
                except ValueError as exc:
                    raise ParseError(f"{path}:{lineno}: bad date {row[0]!r}") from exc
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad value ({exc})") from exc
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return ScenarioMatrix(
        values=np.array(rows, dtype=float),
        tickers=tickers,
        dates=dates,
    )

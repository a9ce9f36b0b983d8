import csv
import math

import numpy as np
import pytest

from lorenzlab import (
    AnalyticFamily,
    LorenzCurve,
    alpha_sequence,
    analytic_quantile,
    empirical_quantile,
    envelope_check,
    envelope_violation,
    fixed_point_residual,
    limit_curve,
    run_iteration,
    self_similarity_residual,
    write_trace_csv,
)
from lorenzlab.errors import BadParameter

from oracles import (
    ENVELOPE_X12_GRID_SUP,
    PHI,
    PRIMAL_LIMIT_HALF,
    REFLECTED_LIMIT_HALF,
)


def test_alpha_sequence_walks_to_phi():
    a = alpha_sequence(41)
    assert a[0] == 1.0
    assert a[1] == 2.0
    assert a[2] == 1.5
    assert a[3] == pytest.approx(5.0 / 3.0, abs=1e-15)
    assert abs(a[40] - PHI) < 1e-15
    with pytest.raises(BadParameter):
        alpha_sequence(0)


def test_limit_curves_match_oracles():
    primal = limit_curve("primal", 4096)
    assert primal.values[2048] == pytest.approx(PRIMAL_LIMIT_HALF, abs=1e-15)
    reflected = limit_curve("reflected", 4096)
    assert reflected.values[2048] == pytest.approx(REFLECTED_LIMIT_HALF, abs=1e-15)
    alias = limit_curve("simple_reflected", 4096)
    assert np.array_equal(alias.values, reflected.values)
    with pytest.raises(BadParameter):
        limit_curve("sideways")


def test_uniform_chain_walks_the_exponent_ladder():
    start = analytic_quantile(AnalyticFamily.uniform01(), 4096)
    trace = run_iteration(start, "primal", max_iter=3, tol=0.0)
    x = start.grid
    assert np.allclose(trace.curves[0].values, x**2, atol=1e-15)
    assert np.max(np.abs(trace.curves[1].values - x**1.5)) < 1e-3
    assert np.max(np.abs(trace.curves[2].values - x ** (5.0 / 3.0))) < 1e-3


def test_point_mass_start_reaches_square_exactly():
    start = analytic_quantile(AnalyticFamily.point_mass(0.4), 256)
    trace = run_iteration(start, "primal", max_iter=2, tol=0.0)
    x = start.grid
    assert np.allclose(trace.curves[0].values, x, atol=1e-12)
    assert np.allclose(trace.curves[1].values, x**2, atol=1e-11)


def test_stopping_rule_uses_successive_sup():
    start = analytic_quantile(AnalyticFamily.uniform01(), 4096)
    trace = run_iteration(start, "primal", max_iter=40, tol=1e-4)
    assert trace.converged
    assert trace.iterations < 40
    assert trace.sup_successive[-1] < 1e-4
    # first entry has no predecessor
    assert math.isnan(trace.sup_successive[0])


def test_coarse_grid_trips_the_stall_flag():
    # with tol = 0 convergence is unreachable; once the successive gaps go
    # flat at rounding scale the stall detector should stop the loop
    start = empirical_quantile([0.35, 0.9], 64)
    trace = run_iteration(start, "reflected", max_iter=40, tol=0.0)
    assert not trace.converged
    assert trace.no_progress
    assert trace.iterations <= 40


def test_trace_csv_round_trip(tmp_path):
    start = analytic_quantile(AnalyticFamily.uniform01(), 256)
    trace = run_iteration(start, "primal", max_iter=5, tol=0.0)
    path = tmp_path / "trace.csv"
    write_trace_csv(trace, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["iteration", "sup_to_limit", "sup_successive", "envelope_ok"]
    assert len(rows) == trace.iterations + 1
    assert rows[1][0] == "1"
    assert float(rows[2][1]) == trace.sup_to_limit[1]
    assert rows[1][3] in ("true", "false")


def test_envelope_violation_catches_a_curve_outside_its_band():
    x = np.linspace(0.0, 1.0, 4097)
    impostor = LorenzCurve(x**1.2)
    got = envelope_violation(impostor, 3, "primal")
    assert got == pytest.approx(ENVELOPE_X12_GRID_SUP, abs=1e-15)
    # the same curve is fine as a first output, where only classical holds
    assert envelope_violation(impostor, 0, "primal") == 0.0


def test_envelope_check_passes_genuine_iterates(primal_traces):
    trace = primal_traces["power3"]
    report = envelope_check(trace.curves[:20], "primal")
    assert report.all_ok
    assert len(report.violations) == 20


def test_fixed_point_residual_of_the_diagonal():
    ident = LorenzCurve(np.linspace(0.0, 1.0, 4097))
    assert fixed_point_residual(ident, "primal") == pytest.approx(0.25, abs=1e-12)
    assert fixed_point_residual(ident, "reflected") == pytest.approx(0.25, abs=1e-9)


def test_self_similarity_exponents_at_the_limits():
    fit = self_similarity_residual(limit_curve("primal", 4096), branch="down")
    assert fit.eps_hat == pytest.approx(PHI, abs=1e-3)
    fit = self_similarity_residual(limit_curve("reflected", 4096), branch="upper")
    assert fit.eps_hat == pytest.approx(1.0 / PHI, abs=1e-3)
    with pytest.raises(BadParameter):
        self_similarity_residual(limit_curve("primal", 128), branch="lower")


def test_reflected_normalize_only_rescales_the_first_step():
    start = analytic_quantile(AnalyticFamily.lognormal(0.5, 0.2), 512)
    trace = run_iteration(start, "reflected", max_iter=3, tol=0.0, normalize=True)
    for curve in trace.curves:
        assert curve.classical

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lorenzlab import (
    AnalyticFamily,
    MonotoneCurve,
    QuantileCurve,
    analytic_quantile,
    empirical_quantile,
    format_float,
    grid_curve,
    read_curve_csv,
    write_curve_csv,
)
from lorenzlab.errors import (
    BadParameter,
    EmptySample,
    NonFinite,
    NonMonotone,
    OutOfDomain,
    OutOfRange,
)

from oracles import (
    LOGNORMAL_MEDIAN,
    LOGNORMAL_Q75,
    LOGNORMAL_SIGMA,
    PARETO_Q_HALF,
    PHI,
)


def monotone_values(draw_min=2, draw_max=40):
    return st.lists(
        st.floats(0.0, 10.0, allow_nan=False),
        min_size=draw_min,
        max_size=draw_max,
    ).map(lambda incs: np.cumsum(np.asarray(incs)))


# ---------------------------------------------------------------- validation


def test_rejects_decreasing():
    with pytest.raises(NonMonotone):
        MonotoneCurve(np.array([0.0, 0.5, 0.4, 1.0]))


def test_rejects_nan_and_inf():
    with pytest.raises(NonFinite):
        MonotoneCurve(np.array([0.0, math.nan, 1.0]))
    with pytest.raises(NonFinite):
        MonotoneCurve(np.array([0.0, 0.5, math.inf]))


def test_rejects_short_and_multidim():
    with pytest.raises(BadParameter):
        MonotoneCurve(np.array([1.0]))
    with pytest.raises(BadParameter):
        MonotoneCurve(np.zeros((3, 3)))


def test_lorenz_like_snaps_endpoint_dust():
    c = MonotoneCurve(np.array([1e-14, 0.5, 1.0 - 1e-14]), lorenz_like=True)
    assert c.values[0] == 0.0
    assert c.values[-1] == 1.0


def test_lorenz_like_rejects_wrong_endpoints():
    with pytest.raises(BadParameter):
        MonotoneCurve(np.array([0.1, 0.5, 1.0]), lorenz_like=True)
    with pytest.raises(BadParameter):
        MonotoneCurve(np.array([0.0, 0.5, 0.9]), lorenz_like=True)


# ---------------------------------------------------------------- evaluation


def test_evaluate_at_nodes_and_between():
    c = MonotoneCurve(np.array([0.0, 1.0, 4.0]))
    assert c.evaluate(0.0) == 0.0
    assert c.evaluate(0.5) == 1.0
    assert c.evaluate(0.75) == pytest.approx(2.5)
    assert c(1.0) == 4.0


def test_evaluate_out_of_domain():
    c = MonotoneCurve(np.array([0.0, 1.0]))
    with pytest.raises(OutOfDomain):
        c.evaluate(-0.01)
    with pytest.raises(OutOfDomain):
        c.evaluate(1.01)
    # endpoint dust is absorbed
    assert c.evaluate(1.0 + 1e-13) == 1.0


def test_generalized_inverse_takes_left_edge_of_flats():
    c = MonotoneCurve(np.array([0.0, 0.5, 0.5, 1.0]))
    assert c.generalized_inverse(0.5) == pytest.approx(1.0 / 3.0)


def test_generalized_inverse_range_checks():
    c = MonotoneCurve(np.array([0.2, 0.5, 1.0]))
    with pytest.raises(OutOfRange):
        c.generalized_inverse(0.1)
    assert c.generalized_inverse(0.1, clamp=True) == 0.0
    assert c.generalized_inverse(2.0, clamp=True) == 1.0


@given(monotone_values())
def test_generalized_inverse_is_a_left_inverse(vals):
    c = MonotoneCurve(vals)
    us = np.linspace(vals[0], vals[-1], 17)
    xs = c.generalized_inverse(us)
    # f(f^-1(u)) >= u for a nondecreasing polyline, with equality off flats
    assert np.all(c.evaluate(xs) >= us - 1e-9 * max(1.0, vals[-1]))


# ---------------------------------------------------------------- integration


def test_prefix_integral_matches_trapezoid_at_nodes():
    vals = np.array([0.0, 1.0, 1.5, 4.0, 4.0])
    c = MonotoneCurve(vals)
    for k in range(1, 5):
        want = np.trapezoid(vals[: k + 1], dx=0.25)
        assert c.prefix_integral(k * 0.25) == pytest.approx(want, abs=1e-15)
    assert c.total_integral == pytest.approx(np.trapezoid(vals, dx=0.25))


def test_prefix_integral_partial_cell():
    c = MonotoneCurve(np.array([0.0, 2.0]))  # integrand 2x on [0, 1]
    assert c.prefix_integral(0.5) == pytest.approx(0.25)
    assert c.prefix_integral(np.array([0.0, 1.0]))[1] == pytest.approx(1.0)


@given(monotone_values(), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_prefix_integral_monotone_and_bounded(vals, a, b):
    if a > b:
        a, b = b, a
    c = MonotoneCurve(vals)
    lo, hi = c.prefix_integral(a), c.prefix_integral(b)
    assert hi >= lo - 1e-12
    assert hi - lo <= vals[-1] * (b - a) + 1e-9 * max(1.0, vals[-1])


def test_quantile_mean():
    q = QuantileCurve(np.array([0.0, 1.0]))
    assert q.mean == pytest.approx(0.5)


# ---------------------------------------------------------------- constructors


def test_grid_curve_rectify():
    c = grid_curve(np.array([0.0, 0.5, 0.4, 1.0]), rectify=True)
    assert np.array_equal(c.values, [0.0, 0.5, 0.5, 1.0])
    with pytest.raises(NonMonotone):
        grid_curve(np.array([0.0, 0.5, 0.4, 1.0]))


def test_empirical_quantile_small_case():
    q = empirical_quantile([0.9, 0.35], 4)
    assert np.array_equal(q.values, [0.35, 0.35, 0.35, 0.9, 0.9])


def test_empirical_quantile_order_statistics():
    sample = [3.0, 1.0, 2.0]
    q = empirical_quantile(sample, 6)
    # node k holds order statistic ceil(3k/6)
    assert np.array_equal(q.values, [1.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0])
    assert set(q.values) <= set(sample)


def test_empirical_quantile_empty():
    with pytest.raises(EmptySample):
        empirical_quantile([], 8)


# ---------------------------------------------------------------- families


def test_uniform_and_power_quantiles():
    u = AnalyticFamily.uniform01()
    assert u.quantile(0.3) == pytest.approx(0.3)
    assert u.mean == pytest.approx(0.5)
    p = AnalyticFamily.power(3.0)
    assert p.quantile(0.125) == pytest.approx(0.5)
    assert p.mean == pytest.approx(0.75)


def test_kumaraswamy_limit_mean_is_phi_minus_one():
    k = AnalyticFamily.kumaraswamy_limit()
    assert k.quantile(0.5) == pytest.approx(1.0 - 0.5**PHI)
    assert k.mean == pytest.approx(PHI - 1.0, abs=1e-15)


def test_pareto_golden_parent():
    fam = AnalyticFamily.pareto(1.0, 1.0 + PHI)
    assert fam.quantile(0.5) == pytest.approx(PARETO_Q_HALF, abs=1e-14)
    assert fam.mean == pytest.approx(PHI, abs=1e-14)
    assert fam.quantile(1.0) == math.inf


def test_lognormal_mean_sd_parameterization():
    fam = AnalyticFamily.lognormal(0.5, 0.2)
    assert fam.quantile(0.5) == pytest.approx(LOGNORMAL_MEDIAN, abs=1e-13)
    assert fam.quantile(0.75) == pytest.approx(LOGNORMAL_Q75, abs=1e-13)


def test_lognormal_logscale_agrees():
    a = AnalyticFamily.lognormal(0.5, 0.2)
    b = AnalyticFamily.lognormal_logscale(math.log(LOGNORMAL_MEDIAN), LOGNORMAL_SIGMA)
    for p in (0.1, 0.5, 0.9):
        assert a.quantile(p) == pytest.approx(b.quantile(p), abs=1e-13)


def test_family_parameter_validation():
    with pytest.raises(BadParameter):
        AnalyticFamily.power(0.0)
    with pytest.raises(BadParameter):
        AnalyticFamily.pareto(1.0, 1.0)
    with pytest.raises(BadParameter):
        AnalyticFamily.lognormal(-0.5, 0.2)
    with pytest.raises(BadParameter):
        AnalyticFamily.point_mass(math.inf)


def test_analytic_quantile_tail_handling():
    fam = AnalyticFamily.pareto(1.0, 1.0 + PHI)
    q = analytic_quantile(fam, 64)
    assert q.values[-1] == pytest.approx(fam.quantile(1.0 - 1.0 / 128.0))
    ln = analytic_quantile(AnalyticFamily.lognormal(0.5, 0.2), 64)
    assert ln.values[0] == 0.0
    with pytest.raises(BadParameter):
        analytic_quantile(fam, 1)


# ---------------------------------------------------------------- round trips


def test_curve_csv_round_trip_is_bit_exact(tmp_path):
    q = analytic_quantile(AnalyticFamily.lognormal(0.5, 0.2), 128)
    path = tmp_path / "curve.csv"
    write_curve_csv(q, path)
    back = read_curve_csv(path)
    assert np.array_equal(back.values, q.values)


def test_read_curve_csv_rejects_bad_input(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("u,value\n0.0,0.0\n")
    with pytest.raises(BadParameter):
        read_curve_csv(path)
    path.write_text("x,y\n0.0,0.0\n1.0,1.0\n")
    with pytest.raises(BadParameter):
        read_curve_csv(path)
    path.write_text("u,value\n0.0,0.0\n0.7,0.5\n1.0,1.0\n")
    with pytest.raises(BadParameter):
        read_curve_csv(path)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_float_round_trips(x):
    assert float(format_float(x)) == x

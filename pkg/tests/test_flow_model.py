from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from goodman_lab.exact_algebra import ExtendedSlope, Mat2Z, QuadExt
from goodman_lab.flow_model import (EscapedQuadrant, LocalHyperbolicModel, MetricSample, NoSignChange,
                                    NotHyperbolic, SuspensionFlow, ZeroDirection, average_metric,
                                    find_invariant_slope, frame_slope, local_first_return, metric_margin,
                                    slope_transport)

SQ5 = QuadExt(0, 1, 5)


def test_cat_map_frame(cat):
    assert cat.lam == QuadExt(Fraction(3, 2), Fraction(1, 2), 5)
    assert cat.D == 5
    A = cat.monodromy
    u = cat.unstable_dir
    Au = (A.a * u[0] + A.b * u[1], A.c * u[0] + A.d * u[1])
    assert Au == (cat.lam * u[0], cat.lam * u[1])
    s = cat.stable_dir
    As = (A.a * s[0] + A.b * s[1], A.c * s[0] + A.d * s[1])
    assert As == (s[0] / cat.lam, s[1] / cat.lam)


def test_non_hyperbolic_rejected():
    with pytest.raises(NotHyperbolic):
        SuspensionFlow.from_rows([[1, 1], [0, 1]])
    with pytest.raises(NotHyperbolic):
        SuspensionFlow.from_rows([[0, -1], [1, 0]])


def test_frame_slope_examples(cat):
    assert frame_slope(cat, cat.unstable_dir) == ExtendedSlope.finite(0)
    assert frame_slope(cat, cat.stable_dir, 3).is_infinite
    assert frame_slope(cat, (1, 0)) == ExtendedSlope.finite(-1)
    assert frame_slope(cat, (0, 1)) == ExtendedSlope(cat.lam)
    with pytest.raises(ZeroDirection):
        frame_slope(cat, (0, 0))


def test_transport_examples(cat):
    one = ExtendedSlope.finite(1)
    assert slope_transport(cat, one, 0) == one
    assert slope_transport(cat, one, 1) == ExtendedSlope(QuadExt(Fraction(7, 2), Fraction(-3, 2), 5))
    assert slope_transport(cat, ExtendedSlope.infinite(), 5).is_infinite


@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(0, 4))
def test_transport_matches_pushforward(x, y, k):
    flow = SuspensionFlow.from_rows([[2, 1], [1, 1]])
    if (x, y) == (0, 0):
        return
    pushed = (flow.monodromy ** k).apply((x, y))
    assert frame_slope(flow, pushed) == slope_transport(flow, frame_slope(flow, (x, y)), k)


def test_local_model_contraction_and_expansion():
    model = LocalHyperbolicModel(Fraction(2))
    x = Fraction(1)
    assert local_first_return(model, 0, x) == Fraction(1, 2)  # m = 0 contracts
    assert local_first_return(model, Fraction(-2), x) > x  # steep negative slopes expand
    with pytest.raises(EscapedQuadrant):
        local_first_return(model, ExtendedSlope.infinite(), x)
    with pytest.raises(EscapedQuadrant):
        local_first_return(model, Fraction(2), x)


def test_invariant_slope_bisection():
    model = LocalHyperbolicModel(Fraction(2))
    res = find_invariant_slope(model, Fraction(1))
    # the exact fixed point: (1 - m) / 2 = 1 gives m = -1
    assert res.m == pytest.approx(-1, abs=1e-9)
    assert res.residual < 1e-9
    tight = find_invariant_slope(model, Fraction(1), tolerance=1e-13)
    assert tight.residual < 1e-12


def test_invariant_slope_degenerate():
    res = find_invariant_slope(lambda m, y: y, 0.5, m_lo=-3.0)
    assert res.residual == 0 and res.m == -3.0
    with pytest.raises(NoSignChange):
        find_invariant_slope(lambda m, y: y + 1, 0.5, m_lo=-3.0)


def test_flat_metric_average(cat):
    g0 = MetricSample.flat(cat, 16, 8)
    res = average_metric(cat, g0, 10)
    assert res.sample.is_positive_definite()
    assert res.lam_bar > 1.05
    assert res.lam_bar_unstable > 1 and res.lam_bar_stable > 1
    assert res.quadrature_error < 1e-6


def test_instantaneous_seed_keeps_margin(cat):
    g0 = MetricSample.suspension(cat, 16, 8)
    before = min(metric_margin(g0)[:2])
    assert before == pytest.approx(float(cat.lam))
    res = average_metric(cat, g0, 4)
    assert res.lam_bar >= before - 1e-9


def test_metric_margin_sweep_nondecreasing(cat):
    g0 = MetricSample.flat(cat, 16, 8)
    lams = [average_metric(cat, g0, T).lam_bar for T in (2, 4, 8)]
    assert all(b >= a - 1e-6 for a, b in zip(lams, lams[1:]))


def test_threads_env(monkeypatch, cat):
    from goodman_lab.flow_model import worker_count
    monkeypatch.setenv("GOODMAN_LAB_THREADS", "1")
    assert worker_count() == 1
    g0 = MetricSample.flat(cat, 8, 4)
    one = average_metric(cat, g0, 3).lam_bar
    monkeypatch.setenv("GOODMAN_LAB_THREADS", "3")
    assert average_metric(cat, g0, 3).lam_bar == one

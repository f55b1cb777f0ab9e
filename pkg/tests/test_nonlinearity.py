"""Absorption laws: evaluation, derivatives, and tail classification."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from absorblab.errors import DomainError, InconclusiveClassificationError
from absorblab.nonlinearity import (
    Nonlinearity,
    classify_conditions,
    dh_dw,
    eval_H,
    eval_h,
    h_of_w,
    log_h_at_log,
)

LOG15 = Nonlinearity.log_power(1.5)
POW2 = Nonlinearity.power(2.0)


def test_eval_h_closed_points():
    assert eval_h(LOG15, math.e - 1.0) == pytest.approx(1.0, rel=1e-14)
    assert eval_h(Nonlinearity.power(3.0), 2.0) == pytest.approx(4.0, rel=1e-14)
    assert eval_h(POW2, 7.0) == pytest.approx(7.0, rel=1e-14)


def test_constructor_domain_guards():
    with pytest.raises(DomainError):
        Nonlinearity.log_power(0.0)
    with pytest.raises(DomainError):
        Nonlinearity.power(1.0)


@given(s=st.floats(1e-6, 1e6), alpha=st.floats(1.05, 2.0))
@settings(max_examples=80, deadline=None)
def test_h_of_w_agrees_with_linear_evaluation(s, alpha):
    spec = Nonlinearity.log_power(alpha)
    w = math.log1p(s)
    assert float(h_of_w(spec, w)) == pytest.approx(eval_h(spec, s), rel=1e-12)


def test_h_of_w_clamps_negative_log_heights():
    assert float(h_of_w(LOG15, -0.5)) == 0.0
    assert float(h_of_w(POW2, -3.0)) == 0.0


def test_h_of_w_far_beyond_double_range():
    # for the log family h(e^w - 1) = w^alpha exactly once e^w overflows
    assert float(h_of_w(LOG15, 2592.0)) == pytest.approx(2592.0**1.5, rel=1e-14)


@given(w=st.floats(1e-3, 60.0), alpha=st.floats(1.05, 2.0))
@settings(max_examples=60, deadline=None)
def test_dh_dw_matches_finite_differences(w, alpha):
    spec = Nonlinearity.log_power(alpha)
    d = 1e-6 * max(1.0, w)
    fd = (float(h_of_w(spec, w + d)) - float(h_of_w(spec, w - d))) / (2.0 * d)
    assert float(dh_dw(spec, w)) == pytest.approx(fd, rel=5e-6, abs=1e-9)


def test_dh_dw_power_family_derivative():
    # h(e^w - 1) = (e^w - 1)^(p-1); check the chain rule at a plain point
    w = 1.3
    u = math.expm1(w)
    want = (POW2.p - 1.0) * u ** (POW2.p - 2.0) * math.exp(w)
    assert float(dh_dw(POW2, w)) == pytest.approx(want, rel=1e-10)


def test_log_h_at_log_deep_heights():
    # x = ln u with u astronomically large: ln h = alpha ln ln(1+u) ~ alpha ln x
    got = float(log_h_at_log(LOG15, 5000.0))
    assert got == pytest.approx(1.5 * math.log(5000.0), rel=1e-12)


def test_eval_H_power_closed_form():
    s = 3.7
    assert eval_H(POW2, s) == pytest.approx(s**3 / 3.0, rel=1e-12)
    assert eval_H(Nonlinearity.power(4.0), 2.0) == pytest.approx(2.0**5 / 5.0, rel=1e-12)


def test_eval_H_log_family_against_direct_quadrature():
    ref, _ = quad(lambda t: t * np.log1p(t) ** 1.5, 0.0, 10.0, epsabs=1e-13, epsrel=1e-13)
    assert ref == pytest.approx(140.79037783771238, rel=1e-12)  # pins the oracle itself
    assert eval_H(LOG15, 10.0) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize(
    "alpha,slow_tail,barrier_tail",
    [
        (0.8, False, False),
        (1.2, True, False),
        (1.5, True, False),
        (2.0, True, False),
        (2.5, True, True),
        (3.0, True, True),
    ],
)
def test_classification_log_family(alpha, slow_tail, barrier_tail):
    report = classify_conditions(Nonlinearity.log_power(alpha))
    assert report.osgood is slow_tail
    assert report.keller_osserman is barrier_tail
    assert report.all_tails_divergent is (not barrier_tail)


def test_classification_power_family():
    report = classify_conditions(POW2)
    assert report.osgood is True
    assert report.keller_osserman is True


def test_classification_custom_numeric_route():
    # h(s) = s behaves like the power family with p = 2
    spec = Nonlinearity.custom(lambda s: s, declared_slope=1.0)
    report = classify_conditions(spec)
    assert report.osgood is True
    assert report.keller_osserman is True
    assert report.confidence["osgood_numeric"] is True


def test_classification_custom_borderline_is_inconclusive():
    # h(s) = ln(1+s) sits exactly on the slow-tail borderline
    spec = Nonlinearity.custom(lambda s: math.log1p(s), declared_slope=1.0)
    with pytest.raises(InconclusiveClassificationError) as err:
        classify_conditions(spec)
    assert abs(err.value.slope + 1.0) < 0.05


def test_custom_constructor_rejects_decreasing_laws():
    with pytest.raises(DomainError):
        Nonlinearity.custom(lambda s: 1.0 / (1.0 + s), declared_slope=-1.0)


def test_params_round_trip_fields():
    assert LOG15.params()["alpha"] == 1.5
    assert POW2.params()["p"] == 2.0
    assert LOG15.params()["family"] == "log_power"

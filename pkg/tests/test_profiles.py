"""Stationary radial profiles: shooting, bounds, blow-up, asymptotic fits."""

import math

import numpy as np
import pytest
from scipy.integrate import solve_bvp

from absorblab.errors import (
    BracketError,
    DomainError,
    InsufficientRangeError,
    PreconditionError,
)
from absorblab.nonlinearity import Nonlinearity, h_of_w
from absorblab.profiles import (
    apriori_bound,
    boundary_blowup_profile,
    c_alpha,
    fit_asymptotics,
    ko_tail,
    shoot_profile,
)

LOG15 = Nonlinearity.log_power(1.5)
LOG20 = Nonlinearity.log_power(2.0)
POW3 = Nonlinearity.power(3.0)

# center-height table, log scale, one-dimensional, radii (2, 4, 6, 8);
# corroborated independently by the collocation test below
FROZEN_W_N1 = {
    1.0: (1.351885, 4.682502, 14.374092, 35.369383),
    2.0: (2.698758, 9.112310, 24.493546, 54.693780),
    8.0: (6.316676, 18.270229, 42.994914, 87.400621),
}


def test_growth_constant_closed_form():
    assert c_alpha(1.5) == 0.25**4  # ((2-a)/2)^(2/(2-a)) at a = 3/2
    assert c_alpha(1.2) == pytest.approx(0.4**2.5, rel=1e-14)
    with pytest.raises(DomainError):
        c_alpha(2.0)


def test_profile_center_height_table():
    radii = np.array([2.0, 4.0, 6.0, 8.0])
    for a, expected in FROZEN_W_N1.items():
        prof = shoot_profile(LOG15, a, 1, 8.0)
        got = prof.sample(radii)[0]
        np.testing.assert_allclose(got, expected, rtol=2e-6)


def test_profile_matches_independent_collocation():
    # same boundary-value problem solved by scipy's collocation method from
    # a flat initial guess; agreement validates the shooting route
    N, a, r_max = 1, 2.0, 4.0

    def rhs(r, y):
        W, dW = y
        Wp = np.maximum(W, 0.0)
        src = -np.expm1(-Wp) * h_of_w(LOG15, Wp)
        drift = np.divide((N - 1) * dW, r, out=np.zeros_like(r), where=r > 0)
        return np.vstack([dW, src - dW**2 - drift])

    def bc(ya, yb):
        return np.array([ya[0] - math.log1p(a), ya[1]])

    r_nodes = np.linspace(1e-9, r_max, 400)
    flat = np.vstack([np.full_like(r_nodes, math.log1p(a)), np.zeros_like(r_nodes)])
    sol = solve_bvp(rhs, bc, r_nodes, flat, tol=1e-10, max_nodes=200000)
    assert sol.status == 0
    prof = shoot_profile(LOG15, a, N, r_max)
    for r in (1.0, 2.0, 3.0, 4.0):
        assert prof.w_at(r) == pytest.approx(float(sol.sol(r)[0]), abs=1e-7)


def test_profile_center_conditions():
    prof = shoot_profile(LOG15, 3.0, 1, 6.0)
    assert prof.w_at(0.0) == pytest.approx(math.log1p(3.0), abs=1e-9)
    assert prof.sample(np.array([0.0]))[1][0] == pytest.approx(0.0, abs=1e-9)


def test_profiles_increase_in_radius_and_center_height():
    radii = np.linspace(0.0, 6.0, 61)
    p1 = shoot_profile(LOG15, 1.0, 3, 6.0, grid=radii)
    p2 = shoot_profile(LOG15, 2.0, 3, 6.0, grid=radii)
    assert np.all(np.diff(p1.w_values) >= 0.0)
    assert np.max(p1.w_values - p2.w_values) < 0.0


def test_higher_dimension_flattens_profiles():
    # the drift term spreads mass; growth is slower in higher dimension
    p1 = shoot_profile(LOG15, 2.0, 1, 6.0)
    p3 = shoot_profile(LOG15, 2.0, 3, 6.0)
    assert p3.w_at(6.0) < p1.w_at(6.0)


def test_apriori_bound_power_family_closed_form():
    # p = 3: the energy integral is elementary and the bound solves
    # 2 (1/b - 1/v) = sqrt(2) R
    b, R = 1.0, 0.5
    got = apriori_bound(POW3, b, R)
    want = 1.0 / (1.0 / b - R / math.sqrt(2.0))
    assert got == pytest.approx(want, rel=1e-9)


def test_apriori_bound_saturates_for_wide_balls():
    # beyond the finite reach of the energy integral no bound exists
    with pytest.raises(BracketError):
        apriori_bound(POW3, 1.0, 10.0)


def test_apriori_bound_dominates_profiles():
    for a in (1.0, 2.0):
        prof = shoot_profile(LOG15, a, 3, 4.0)
        for R in (1.0, 2.0, 4.0):
            v_at = math.expm1(prof.w_at(R))
            assert v_at <= apriori_bound(LOG15, a, R) * (1.0 + 1e-9)


def test_apriori_bound_increases_in_radius_and_height():
    assert apriori_bound(LOG15, 1.0, 2.0) < apriori_bound(LOG15, 1.0, 3.0)
    assert apriori_bound(LOG15, 1.0, 2.0) < apriori_bound(LOG15, 2.0, 2.0)


def test_ko_tail_power_closed_form():
    # H = s^4/4 gives 1/sqrt(H) = 2/s^2, so the tail from v is exactly 2/v
    assert ko_tail(POW3, 2.0) == pytest.approx(1.0, rel=1e-9)
    assert ko_tail(POW3, 8.0) == pytest.approx(0.25, rel=1e-9)


def test_ko_tail_diverges_without_barrier():
    with pytest.raises(PreconditionError):
        ko_tail(LOG15, 5.0)


def test_boundary_blowup_power_family_converges():
    prof, rep = boundary_blowup_profile(
        POW3, 1.0, 1, (10.0, 100.0, 1000.0), np.linspace(0.0, 1.0, 201)
    )
    # interior Cauchy differences contract as the boundary height grows
    assert rep.cauchy_sup_w[1] < 0.25 * rep.cauchy_sup_w[0]
    assert np.all(np.diff(rep.center_values) > 0.0)
    # the returned profile hits the largest boundary height
    assert prof.w_values[-1] == pytest.approx(math.log1p(1000.0), abs=1e-9)
    assert prof.kind == "boundary_blowup"


def test_boundary_blowup_requires_barrier_condition():
    with pytest.raises(PreconditionError):
        boundary_blowup_profile(LOG15, 1.0, 1, (10.0, 100.0))


def test_fit_recovers_quartic_log_growth():
    prof = shoot_profile(LOG15, 1.0, 3, 10.0)
    fit = fit_asymptotics(prof, 1.5)
    assert fit.window == (8.0, 10.0)
    assert fit.target_exponent == 4.0
    assert fit.target_constant == c_alpha(1.5)
    # measured pre-asymptotic values at this radius; frozen as regression pins
    assert fit.exponent_hat == pytest.approx(3.784028289957581, rel=1e-6)
    assert fit.constant_hat == pytest.approx(0.007161216387606927, rel=1e-5)


def test_fit_borderline_exponential_rate():
    prof = shoot_profile(LOG20, 1.0, 3, 10.0)
    fit = fit_asymptotics(prof, 2.0)
    assert fit.kind == "exponential_in_r"
    assert fit.exponent_hat == pytest.approx(0.9967253727278454, rel=1e-6)
    # within the headline 5 percent band around slope 1
    assert abs(fit.exponent_hat - 1.0) < 0.05


def test_fit_requires_enough_range():
    prof = shoot_profile(LOG15, 1.0, 1, 2.0)  # W(2) = 1.35, far too low
    with pytest.raises(InsufficientRangeError):
        fit_asymptotics(prof, 1.5)


def test_profile_frozen_deep_values():
    p15 = shoot_profile(LOG15, 1.0, 3, 10.0)
    assert p15.w_at(10.0) == pytest.approx(43.63683788420581, rel=1e-7)
    p20 = shoot_profile(LOG20, 1.0, 3, 10.0)
    assert p20.w_at(10.0) == pytest.approx(558.1053407531698, rel=1e-7)

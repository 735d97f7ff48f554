import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from ptrack.errors import BranchMismatchError, ConsistencyError, EntropyError, InvalidParameterError
from ptrack.interaction_lab import exact_F
from ptrack.pressure_law import gamma_law, h_of_v, j1, j2_normalized
from ptrack.wave_curves import (
    F,
    F_taylor,
    State,
    WaveKind,
    a_of,
    curve_u,
    integral_u,
    make_state,
    rh_residuals,
    shock_speed,
    shock_u,
    v_of_a,
    v_taylor,
)

gammas = st.sampled_from([0.5, 1.0, 2.0, 3.0])


def test_strength_coordinate_values(law1):
    assert a_of(law1, 1.0, 1.0) == 0.0
    assert a_of(law1, math.e, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert v_of_a(law1, 0.0, 1.0) == 1.0
    assert v_of_a(law1, 1.0, 1.0) == pytest.approx(math.e, rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(gammas, st.floats(0.5, 2.0), st.floats(0.5, 2.0))
def test_strength_coordinate_antisymmetric_and_invertible(g, v, vb):
    law = gamma_law(g)
    assert a_of(law, v, vb) == pytest.approx(-a_of(law, vb, v), abs=1e-14)
    assert v_of_a(law, a_of(law, v, vb), vb) == pytest.approx(v, rel=1e-11)


def test_velocity_jump_values(law1):
    assert F(law1, 0.0, 1.0) == 0.0
    assert F(law1, math.log(2.0), 1.0) == pytest.approx(math.sqrt(0.5), rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(gammas, st.floats(1e-5, 3e-5))
def test_velocity_jump_leading_term(g, a):
    # below 1e-5 the double-precision radicand loses about eps / a
    law = gamma_law(g)
    assert abs(F(law, a, 1.0) / a - 1.0) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(gammas, st.floats(1e-9, 1e-5))
def test_velocity_jump_leading_term_high_precision(g, a):
    law = gamma_law(g)
    assert abs(float(exact_F(law, a, 1.0, backend="mpmath")) / a - 1.0) <= 1e-10


@pytest.mark.xfail(strict=True, reason="relative deviation is J1 a^2, about 5.6e-10 at a = 1e-4")
def test_velocity_jump_leading_term_up_to_1e_4(law3):
    a = 1e-4
    assert abs(F(law3, a, 1.0) / a - 1.0) <= 1e-10


def test_velocity_jump_relative_deviation_is_quadratic(law3):
    a = 1e-4
    dev = F(law3, a, 1.0) / a - 1.0
    assert dev == pytest.approx(j1(law3, 1.0) * a * a, rel=1e-3)


def test_truncated_expansion_values(law3):
    assert F_taylor(law3, 0.0, 1.0) == 0.0
    a = 0.01
    want = a * (1 + a * a / 18 + 4.5 * a ** 3)
    assert F_taylor(law3, a, 1.0, normalization="def") == pytest.approx(want, rel=1e-15)
    # the quartic term is odd in a
    jt = j2_normalized(law3, 1.0, "taylor")
    assert F_taylor(law3, -a, 1.0) == pytest.approx(a * (1 + a * a / 18 - jt * a ** 3), rel=1e-15)
    with pytest.raises(InvalidParameterError):
        F_taylor(law3, a, 1.0, order=5)


def test_truncated_expansion_remainder_orders(law3):
    # third-order truncation leaves an a^4 remainder, the fourth-order one a^5
    amps = [0.02, 0.01, 0.005]
    for order, want in ((3, 16.0), (4, 32.0)):
        rem = [F(law3, a, 1.0) - F_taylor(law3, a, 1.0, order=order) for a in amps]
        ratios = [rem[k] / rem[k + 1] for k in range(2)]
        assert ratios[-1] == pytest.approx(want, rel=0.1)


def test_cubic_volume_expansion_order(law3):
    amps = [0.02, 0.01, 0.005]
    rem = [v_of_a(law3, a, 1.0) - 1.0 - v_taylor(law3, a, 1.0) for a in amps]
    assert 12.0 <= rem[1] / rem[2] <= 20.0
    assert v_taylor(law3, 0.0, 1.0) == 0.0


def test_curve_values_and_branches(law1):
    left = make_state(law1, 0.0, 1.0)
    for kind in WaveKind:
        for fam in (1, 2):
            assert curve_u(law1, kind, fam, left, 1.0) == 0.0
    assert curve_u(law1, WaveKind.RAREFACTION, 2, make_state(law1, 0.0, 1.0), 0.5) == pytest.approx(
        math.log(2.0), rel=1e-14)
    assert curve_u(law1, WaveKind.SHOCK, 1, left, 0.5) == pytest.approx(
        -math.sqrt(0.5), rel=1e-14)
    with pytest.raises(BranchMismatchError):
        curve_u(law1, WaveKind.SHOCK, 1, left, 2.0)
    with pytest.raises(BranchMismatchError):
        curve_u(law1, WaveKind.RAREFACTION, 2, left, 2.0)


def test_shock_speeds(law1):
    left = make_state(law1, 0.0, 1.0)
    right = make_state(law1, -math.sqrt(0.5), 2.0)
    assert shock_speed(law1, left, right, 2) == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-14)
    left1 = make_state(law1, 0.0, 2.0)
    right1 = make_state(law1, -math.sqrt(0.5), 1.0)
    assert shock_speed(law1, left1, right1, 1) == pytest.approx(-1.0 / math.sqrt(2.0), rel=1e-14)


def test_shock_speed_rejections(law1):
    left = make_state(law1, 0.0, 1.0)
    with pytest.raises(ConsistencyError):
        shock_speed(law1, left, make_state(law1, 0.3, 2.0), 2)
    # a rarefaction-direction jump is not an admissible shock
    with pytest.raises(EntropyError):
        shock_speed(law1, left, make_state(law1, math.sqrt(0.5), 0.5), 2)


@settings(max_examples=80, deadline=None)
@given(gammas, st.sampled_from([1, 2]), st.floats(0.6, 1.8), st.floats(1.01, 3.0), st.floats(-0.5, 0.5))
def test_rankine_hugoniot_residuals_on_shock_curve(g, fam, vl, factor, ul):
    law = gamma_law(g)
    vr = vl / factor if fam == 1 else vl * factor
    left = make_state(law, ul, vl)
    right = make_state(law, curve_u(law, WaveKind.SHOCK, fam, left, vr), vr)
    sig = shock_speed(law, left, right, fam)
    r1, r2 = rh_residuals(law, left, right, sig)
    assert abs(r1) < 1e-9 and abs(r2) < 1e-9


@settings(max_examples=50, deadline=None)
@given(gammas, st.floats(0.6, 1.8), st.floats(0.0, 0.4), st.floats(0.0, 0.4))
def test_shock_branch_monotone(g, vl, x1, x2):
    assume(abs(x1 - x2) > 1e-6)
    law = gamma_law(g)
    left = make_state(law, 0.0, vl)
    v1, v2 = vl * (1 - x1), vl * (1 - x2)
    # 1-shocks: larger compression gives a smaller right velocity
    assert (curve_u(law, WaveKind.SHOCK, 1, left, v1) < curve_u(law, WaveKind.SHOCK, 1, left, v2)) == (x1 > x2)


@pytest.mark.parametrize("g", [0.5, 1.0, 3.0])
def test_shock_and_integral_curves_have_second_order_contact(g):
    # the two branches agree to O(dv^3): halving dv divides the gap by 8
    law = gamma_law(g)
    left = make_state(law, 0.0, 1.0)
    gaps = []
    for dv in (1e-2, 5e-3, 2.5e-3):
        v = 1.0 - dv
        gaps.append(shock_u(law, left, v) - integral_u(law, 1, left, v))
    assert gaps[0] / gaps[1] == pytest.approx(8.0, rel=0.05)
    assert gaps[1] / gaps[2] == pytest.approx(8.0, rel=0.05)


def test_state_invariants(law3):
    st_ = make_state(law3, 0.2, 2.0)
    assert st_.s == st_.u + h_of_v(law3, 2.0)
    assert st_.r == st_.u - h_of_v(law3, 2.0)
    assert isinstance(st_, State)

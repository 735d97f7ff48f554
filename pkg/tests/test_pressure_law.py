import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptrack.errors import DomainError, InvalidParameterError, RangeError
from ptrack.pressure_law import (
    PressureLaw,
    bakhvalov_discriminant,
    bakhvalov_holds,
    find_violation_interval,
    find_violation_intervals,
    gamma_law,
    h_of_v,
    h_of_v_quadrature,
    j1,
    j2,
    j2_blowup,
    j2_normalized,
    j2_taylor,
    law_from_json,
    spline_law,
    v_of_h,
    wave_speed,
)

gammas = st.sampled_from([0.5, 0.8, 1.0, 1.4, 2.0, 3.0])
volumes = st.floats(0.2, 5.0)


def test_gamma_law_derivatives_at_one():
    assert gamma_law(3).derivatives(1.0) == (1.0, -3.0, 12.0, -60.0, 360.0)


def test_isothermal_and_quadratic_values():
    assert gamma_law(1).p(2.0) == 0.5
    assert gamma_law(2).dp(1.0) == -2.0


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_gamma_law_rejects_bad_exponent(bad):
    with pytest.raises(InvalidParameterError):
        gamma_law(bad)


def test_wave_speed_values(law3, law1):
    assert wave_speed(law3, 1.0) == pytest.approx(math.sqrt(3.0), rel=1e-15)
    assert wave_speed(law1, 1.0) == 1.0
    c = wave_speed(law3, 1e6)
    assert 0.0 < c < 1e-8


def test_wave_speed_outside_domain(law3):
    with pytest.raises(DomainError):
        wave_speed(law3, -1.0)


def test_h_values(law1):
    assert h_of_v(law1, 1.0) == 0.0
    assert h_of_v(law1, math.exp(-1.0)) == pytest.approx(1.0, rel=1e-14)
    assert h_of_v(gamma_law(2), 4.0) == pytest.approx(-math.sqrt(2.0), rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(gammas, volumes)
def test_h_quadrature_matches_closed_form(g, v):
    law = gamma_law(g)
    assert h_of_v_quadrature(law, v) == pytest.approx(h_of_v(law, v), rel=1e-10, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(gammas, volumes)
def test_h_inverse_round_trip(g, v):
    law = gamma_law(g)
    assert v_of_h(law, h_of_v(law, v)) == pytest.approx(v, rel=1e-11)


def test_v_of_h_values(law1, law3):
    assert v_of_h(law1, 0.0) == 1.0
    assert v_of_h(law1, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)
    # h is bounded below by -sqrt(3) for gamma = 3
    with pytest.raises(RangeError):
        v_of_h(law3, -2.0)


@settings(max_examples=40, deadline=None)
@given(gammas, volumes)
def test_h_is_decreasing(g, v):
    law = gamma_law(g)
    assert h_of_v(law, v * 1.01) < h_of_v(law, v)


def test_interaction_coefficients_gamma_three(law3):
    assert j1(law3, 1.0) == pytest.approx(1.0 / 18.0, rel=1e-14)
    assert j2(law3, 1.0) == pytest.approx(4.5, rel=1e-14)
    assert j2_blowup(law3, 1.0) == pytest.approx(27.0, rel=1e-14)
    assert j2_taylor(law3, 1.0) == pytest.approx(4.5 * 3.0 ** -4.5, rel=1e-14)
    assert j2_normalized(law3, 1.0, "def") == j2(law3, 1.0)
    with pytest.raises(InvalidParameterError):
        j2_normalized(law3, 1.0, "other")


def test_isothermal_has_zero_quartic_coefficient(law1):
    assert j2(law1, 1.0) == 0.0
    assert bakhvalov_discriminant(law1, 1.0) == 0.0


def test_taylor_coefficients_against_series_oracle(law3):
    # independent oracle: closed-form F(a)/a for gamma = 3, expanded by mpmath
    mpmath.mp.dps = 40
    root3 = mpmath.sqrt(3)

    def ratio(a):
        v = 1 / (1 - a / root3)
        return mpmath.sqrt((v - 1) * (1 - v ** -3) / a ** 2)

    coef = mpmath.taylor(lambda a: ratio(a) if a != 0 else mpmath.mpf(1), mpmath.mpf("1e-30"), 3)
    assert float(coef[2]) == pytest.approx(j1(law3, 1.0), rel=1e-8)
    assert float(coef[3]) == pytest.approx(j2_taylor(law3, 1.0), rel=1e-8)


def test_discriminant_value(law3):
    assert bakhvalov_discriminant(law3, 1.0) == pytest.approx(72.0, rel=1e-14)
    assert bakhvalov_discriminant(gamma_law(0.5), 1.0) < 0.0


@settings(max_examples=60, deadline=None)
@given(st.floats(0.3, 4.0), volumes)
def test_quartic_coefficient_sign_matches_discriminant(g, v):
    law = gamma_law(g)
    d = bakhvalov_discriminant(law, v)
    if abs(d) < 1e-12:
        return
    assert (j2(law, v) > 0) == (d > 0)
    assert bakhvalov_holds(law, v) == (d <= 0)


@settings(max_examples=40, deadline=None)
@given(gammas, st.floats(0.5, 3.0))
def test_derivatives_consistent_with_finite_differences(g, v):
    law = gamma_law(g)
    step = 1e-4
    d = [law.derivatives(v + k * step) for k in (-1, 1)]
    exact = law.derivatives(v)
    for n in range(4):
        fd = (d[1][n] - d[0][n]) / (2 * step)
        assert fd == pytest.approx(exact[n + 1], rel=1e-6)


def test_violation_interval_gamma_three(law3):
    assert find_violation_interval(law3, (0.5, 2.0)) == (0.5, 2.0)


def test_no_violation_interval_isothermal(law1):
    assert find_violation_interval(law1, (0.5, 2.0)) is None
    assert find_violation_intervals(law1, (0.5, 2.0)) == []


def _bump_law(alpha=0.01, width=0.2):
    """p = 1/v plus a small Gaussian bump centred at v = 1."""

    def derivs(v):
        x = (v - 1.0) / width
        phi = alpha * math.exp(-x * x)
        return (
            1.0 / v + phi,
            -1.0 / v ** 2 - 2 * x / width * phi,
            2.0 / v ** 3 + (4 * x * x - 2) / width ** 2 * phi,
            -6.0 / v ** 4 + (-8 * x ** 3 + 12 * x) / width ** 3 * phi,
            24.0 / v ** 5 + (16 * x ** 4 - 48 * x * x + 12) / width ** 4 * phi,
        )

    def p_mp(v):
        x = (v - 1) / width
        return 1 / v + alpha * mpmath.exp(-x * x)

    return PressureLaw(derivs, (1e-3, 1e3), "bump"), p_mp


def test_violation_interval_of_bump_law_matches_mpmath_oracle():
    law, p_mp = _bump_law()
    mpmath.mp.dps = 30

    def disc(v):
        d1, d2, d3 = (mpmath.diff(p_mp, v, n) for n in (1, 2, 3))
        return 3 * d2 ** 2 - 2 * d1 * d3

    grid = np.linspace(0.5, 2.0, 301)
    signs = [disc(mpmath.mpf(float(x))) > 0 for x in grid]
    edges = []
    for k in range(len(grid) - 1):
        if signs[k] != signs[k + 1]:
            edges.append(float(mpmath.findroot(disc, (grid[k], grid[k + 1]), solver="anderson")))
    runs = []
    lo = 0.5 if signs[0] else None
    for e in edges:
        if lo is None:
            lo = e
        else:
            runs.append((lo, e))
            lo = None
    if lo is not None:
        runs.append((lo, 2.0))
    assert runs, "oracle found no violation"
    want = max(runs, key=lambda iv: iv[1] - iv[0])
    got = find_violation_interval(law, (0.5, 2.0))
    assert got == pytest.approx(want, abs=1e-8)
    assert len(find_violation_intervals(law, (0.5, 2.0))) == len(runs)


def test_table_law_inverse_and_h():
    ref = gamma_law(2.0)
    knots = [[v, ref.p(v)] for v in np.linspace(0.3, 3.0, 40)]
    law = spline_law(knots)
    for v in (0.5, 1.0, 1.7, 2.5):
        assert h_of_v(law, v) == pytest.approx(h_of_v(ref, v), abs=1e-4)
        assert v_of_h(law, h_of_v(law, v)) == pytest.approx(v, rel=1e-10)


def test_table_law_rejections():
    with pytest.raises(InvalidParameterError):
        spline_law([[1, 1], [2, 0.5], [3, 0.3]])
    with pytest.raises(InvalidParameterError):
        spline_law([[0.5, 1], [1, 2], [2, 3], [3, 4]])  # increasing pressure
    with pytest.raises(InvalidParameterError):
        spline_law([[2.0, 1 / 2], [3.0, 1 / 3], [4.0, 1 / 4], [5.0, 1 / 5]])  # misses v = 1


def test_law_from_json():
    assert law_from_json({"kind": "gamma", "gamma": 3}).p(2.0) == 2.0 ** -3
    for bad in ({}, {"kind": "gamma"}, {"kind": "unknown"}, [1, 2]):
        with pytest.raises(InvalidParameterError):
            law_from_json(bad)

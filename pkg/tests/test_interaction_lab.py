import math

import pytest
from hypothesis import given, settings, strategies as st

from ptrack import interaction_lab as lab
from ptrack.errors import InvalidParameterError
from ptrack.pressure_law import gamma_law, j2, j2_normalized, wave_speed
from ptrack.wave_curves import WaveKind, curve_u, make_state


def test_shock_shock_plug_in(law3):
    assert lab.predict_shock_shock(law3, 1.0, 0.0) == 0.0
    assert lab.predict_shock_shock(law3, 1.0, 0.1, normalization="def") == pytest.approx(0.1009, rel=1e-14)


def test_front_shock_plug_in(law3):
    assert lab.predict_front_shock(law3, 0.0, 0.01) == 0.01
    # 0.01 (1 + 4.5 * 0.2^3) = 0.01 * 1.036
    assert lab.predict_front_shock(law3, 0.2, 0.01, normalization="def") == pytest.approx(0.01036, rel=1e-14)
    assert lab.predict_front_shock(law3, 0.2, -0.01) == lab.predict_front_shock(law3, 0.2, 0.01)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.3, 4.0), st.floats(1e-3, 0.1))
def test_shock_shock_amplifies_iff_quartic_coefficient_positive(g, a):
    law = gamma_law(g)
    out = lab.predict_shock_shock(law, 1.0, a)
    if g == 1.0:
        assert out == a
    else:
        assert (out > a) == (j2(law, 1.0) > 0)


def test_reflection_formula():
    assert lab.predict_reflection(None, 1e-3, 0.0) == 1e-3
    assert lab.predict_reflection(None, 1e-3, 0.25) == pytest.approx(0.5e-3, rel=1e-15)
    assert lab.predict_reflection(None, 1.0, 0.25, first_order=False) == pytest.approx(0.6, rel=1e-15)
    for bad in ((-1.0, 0.1), (1.0, 0.5), (1.0, -0.1)):
        with pytest.raises(InvalidParameterError):
            lab.predict_reflection(None, *bad)


def _large_first_shock(law):
    near = make_state(law, 0.0, 1.0)
    far_v = 100.0
    far = make_state(law, math.sqrt((far_v - 1.0) * (law.p(1.0) - law.p(far_v))), far_v)
    assert curve_u(law, WaveKind.SHOCK, 1, far, 1.0) == pytest.approx(0.0, abs=1e-15)
    return far, near


def test_reflection_against_exact_interaction(law3):
    far, near = _large_first_shock(law3)
    t = lab.shock_curve_tan(law3, far, near)
    assert 0.0 < t < 0.5
    eps = [1e-3 * 2.0 ** -k for k in range(4)]
    defect = [lab.exact_reflection(law3, far, near, e) - lab.predict_reflection(law3, e, t, first_order=False)
              for e in eps]
    ratios = [defect[k] / defect[k + 1] for k in range(3)]
    assert ratios[-1] == pytest.approx(4.0, rel=0.05)
    # the first-order form is off by O(tan^2) relative to the exact slope form
    rho = lab.exact_reflection(law3, far, near, 1e-6) / 1e-6
    assert rho == pytest.approx((1 - t) / (1 + t), rel=1e-5)
    assert abs(rho - (1 - 2 * t)) == pytest.approx(2 * t * t / (1 + t), rel=1e-3)


def test_appendix_coefficients_isothermal(law1):
    c = lab.appendix_coefficients(law1, 1.0)
    assert c["A"] == 1.0
    assert c["B"] == pytest.approx(0.5, rel=1e-15)
    assert c["C"] == pytest.approx(0.125, rel=1e-15)
    assert c["D"] == pytest.approx(0.0, abs=1e-15)
    c1 = lab.appendix_coefficients(law1, 1.0, family=1)
    assert (c1["A"], c1["C"]) == (-c["A"], -c["C"])
    with pytest.raises(InvalidParameterError):
        lab.appendix_coefficients(law1, 1.0, family=3)


@pytest.mark.parametrize("g,v", [(0.5, 0.7), (2.0, 1.3), (3.0, 1.0)])
def test_leading_coefficient_is_inverse_sound_speed(g, v):
    law = gamma_law(g)
    assert lab.appendix_coefficients(law, v)["A"] == pytest.approx(1.0 / wave_speed(law, v), rel=1e-14)


def test_h_jump_plug_in(law3):
    assert lab.h_jump_expansion(law3, 1.0, 0.0) == 0.0
    s = 0.01
    cubic = 144.0 / 96.0 / 27.0
    quartic = 1728.0 / (64.0 * 3.0 ** 4.5) + 12.0 * (-60.0) / (96.0 * 3.0 ** 3.5)
    want = -s + cubic * s ** 3 + quartic * s ** 4
    assert lab.h_jump_expansion(law3, 1.0, s) == pytest.approx(want, rel=1e-14)
    assert quartic == pytest.approx(lab.quartic_h_coefficient(law3, 1.0), rel=1e-14)


def test_intersection_point_base_and_symmetric_case(law3):
    assert lab.intersection_point_g(law3, 0.0, 0.0) == (0.0, 1.0)
    s = 0.05
    u_g, h_g = lab.intersection_point_g(law3, s, s)
    assert h_g - 1.0 == pytest.approx(lab.quartic_h_coefficient(law3, 1.0) * s ** 4, rel=1e-8)


def test_intersection_point_matches_exact_crossing(law3):
    s = 0.02
    approx = lab.intersection_point_g(law3, s / 2, s)
    exact = lab.exact_intersection_g(law3, s / 2, s, backend="mpmath")
    assert abs(approx[0] - float(exact[0])) < 10 * s ** 5
    assert abs(approx[1] - float(exact[1])) < 10 * s ** 5


def test_slope_degenerate_input(law3):
    with pytest.raises(InvalidParameterError):
        lab.slope_of_shock(law3, 0.0, 0.0)


def test_right_chord_slope_is_little_o_of_cube(law3):
    scaled = []
    for s in (0.2, 0.1, 0.05, 0.025):
        r = lab.right_shock_offset(law3, s)
        scaled.append(abs(lab.exact_chord_slope(law3, r, s, backend="mpmath")) / s ** 3)
    assert all(a > 2.0 * b for a, b in zip(scaled, scaled[1:]))
    assert scaled[-1] < 1e-6


def test_left_chord_slope_leading_coefficient(law3):
    coef = lab.left_shock_slope_prediction(law3, 1.0)
    assert coef < 0.0
    gaps = []
    for sb in (0.1, 0.05, 0.025, 0.0125):
        rb = lab.left_shock_offset(law3, sb)
        gaps.append(abs(lab.exact_chord_slope(law3, rb, sb, backend="mpmath") / sb ** 3 - coef))
    assert all(a > 2.0 * b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-5 * abs(coef)


def test_symmetric_slope_coefficient(law3):
    k = lab.quartic_h_coefficient(law3, 1.0)
    vals = [lab.slope_of_shock(law3, s, s) / s ** 3 for s in (0.04, 0.02, 0.01)]
    errs = [abs(v - 0.5 * k) for v in vals]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    assert errs[-1] < 1e-4 * k


@pytest.fixture(scope="module")
def reports3(law3):
    return {r.name: r for r in lab.verify_all(law3, 1.0)}


@pytest.mark.parametrize("name", ["front_shock_rarefaction", "front_shock_compression", "v_taylor",
                                  "F_taylor", "delta_quartic", "delta_quartic_family1", "h_jump",
                                  "u_g", "h_g", "shock_shock"])
def test_registered_ratio_tests_pass(reports3, name):
    rep = reports3[name]
    assert rep.passed, lab.format_table([rep])
    assert rep.order >= rep.expected_order - 0.3
    assert all(a > b for a, b in zip(rep.amplitudes, rep.amplitudes[1:]))


@pytest.mark.xfail(strict=True, reason="the symmetric shock-shock remainder is O(a^6); its ratio is near 64")
def test_shock_shock_remainder_ratio_band(reports3):
    rep = reports3["shock_shock"]
    assert all(24.0 <= r <= 40.0 for r in rep.ratios[-2:])


def test_shock_shock_remainder_is_sixth_order(reports3):
    rep = reports3["shock_shock"]
    assert all(50.0 <= r <= 70.0 for r in rep.ratios[-2:])


def test_isothermal_interactions_are_exact():
    reps = lab.verify_all(gamma_law(1.0), 1.0, names=["shock_shock"])
    assert reps[0].passed
    assert "exact" in reps[0].note


def test_ratio_harness_on_synthetic_remainder():
    rep = lab.ratio_test("synthetic", lambda a: a ** 5, lambda a: 0.0, 5, band=(24, 40), a0=0.1)
    assert rep.passed
    assert rep.order == pytest.approx(5.0, abs=1e-12)
    assert rep.ratios[-1] == pytest.approx(32.0)
    bad = lab.ratio_test("synthetic", lambda a: a ** 3, lambda a: 0.0, 5, a0=0.1)
    assert not bad.passed


def test_report_table_and_json(reports3):
    text = lab.format_table(list(reports3.values()))
    assert "F_taylor" in text and "PASS" in text
    assert reports3["h_jump"].to_json()["name"] == "h_jump"


def test_printed_amplification_constant_positive(law3):
    assert lab.paper_X(law3, 1.0) > 0.0
    assert lab.paper_X(law3, 1.0, normalization="taylor") > 0.0
    assert j2_normalized(law3, 1.0, "def") > 0.0

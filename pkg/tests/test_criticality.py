import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cayleypotts import criticality as cr
from cayleypotts.renorm import Params, Stability, fixed_points

QS = range(2, 21)


def test_thresholds_examples():
    assert cr.t1(3) == 0.25
    assert cr.t2(3) == pytest.approx((1 + math.sqrt(73)) / 36, rel=1e-15)
    assert cr.t2(3) == pytest.approx(0.2651, abs=1e-4)
    assert cr.t1(2) == pytest.approx(1 / 3)
    assert cr.t2(2) == pytest.approx(1 / 3, rel=1e-15)
    assert cr.t3(2) == pytest.approx(3, rel=1e-15)
    assert cr.t3(3) == pytest.approx(5.34233, abs=1e-5)


def test_comparison_temperatures():
    assert cr.t_wangwu(2) == pytest.approx((math.sqrt(2) - 1) / (1 + math.sqrt(2)))
    assert cr.t_wangwu(2) == pytest.approx(0.1716, abs=1e-4)
    assert cr.t_bethe_peierls(5) == pytest.approx(1 / 6)


@pytest.mark.parametrize("q", QS)
def test_temperature_ordering(q):
    assert 0 < cr.t_wangwu(q) < cr.t1(q) <= cr.t2(q) < 1 < cr.t3(q)
    if q > 2:
        assert cr.t1(q) < cr.t2(q)


def test_q_below_two_rejected():
    for f in (cr.t1, cr.t2, cr.t3, cr.t_wangwu, cr.zc_at_t3):
        with pytest.raises(ValueError):
            f(1)


def test_zc_ferro_examples():
    assert cr.zc_ferro(0.1, 3) == 1
    assert cr.zc_ferro(0.25, 3) == 1
    z = cr.zc_ferro(0.26, 3)
    assert 0 < z < 1
    assert z == pytest.approx(0.99761994, abs=1e-8)
    with pytest.raises(cr.OutOfRange):
        cr.zc_ferro(0.3, 3)
    with pytest.raises(cr.OutOfRange):
        cr.zc_ferro(-0.1, 3)


@pytest.mark.parametrize("q", range(2, 11))
def test_branch_continuity_at_t1(q):
    t = cr.t1(q)
    assert cr.n_minus(t, q) == pytest.approx(1, abs=1e-12)
    assert cr.n_plus(t, q) == pytest.approx((q - 1) * (q + 1) ** 3 / (2 * q - 1) ** 3, rel=1e-12)
    assert cr.zc_ferro(t - 1e-9, q) == 1
    if q > 2:
        assert cr.zc_ferro(t + 1e-9, q) == pytest.approx(1, abs=1e-7)


@pytest.mark.parametrize("q", range(2, 11))
def test_branches_meet_at_t2(q):
    t = cr.t2(q)
    assert cr.n_plus(t, q) == pytest.approx(cr.n_minus(t, q), rel=1e-6)


def test_n_plus_closed_form():
    assert cr.n_plus(0.1, 5) == pytest.approx((141 * math.sqrt(329) + 6457) / 4394, rel=1e-13)
    assert cr.n_minus(0.2, 3) == pytest.approx((39 - math.sqrt(21)) / 36, rel=1e-13)


def test_n_branches_out_of_range():
    with pytest.raises(cr.OutOfRange):
        cr.n_plus(0.5, 3)
    with pytest.raises(cr.OutOfRange):
        cr.n_minus(0.0, 3)


def test_zc_pm_examples():
    lo, hi = cr.zc_pm(8, 3)
    assert lo == pytest.approx(0.0071, abs=5e-5)
    assert hi == pytest.approx(0.3886, abs=5e-5)
    lo, hi = cr.zc_pm(4, 2)
    r = math.sqrt(23625)
    assert lo == pytest.approx((157 - r) / 32, rel=1e-12)
    assert hi == pytest.approx((157 + r) / 32, rel=1e-12)
    assert cr.zc_pm_ising(4) == pytest.approx((lo, hi), rel=1e-12)
    with pytest.raises(cr.OutOfRange):
        cr.zc_pm(3, 3)
    with pytest.raises(cr.OutOfRange):
        cr.zc_pm_ising(2.5)


@pytest.mark.parametrize("q", range(2, 11))
def test_zc_pm_at_t3_is_a_double_point(q):
    lo, hi = cr.zc_pm(cr.t3(q), q)
    assert lo == pytest.approx(hi, rel=1e-6)
    assert cr.zc_at_t3(q) == pytest.approx(lo, rel=1e-6)


@pytest.mark.parametrize("t", [3.5, 5.0, 12.0, 40.0])
def test_ising_specialisation_matches_general(t):
    assert cr.zc_pm_ising(t) == pytest.approx(cr.zc_pm(t, 2), rel=1e-12)


@pytest.mark.parametrize("q", [2, 3, 5, 8])
def test_zc_pm_ordering(q):
    for t in cr.t3(q) * np.geomspace(1.0 + 1e-3, 30, 15):
        lo, hi = cr.zc_pm(t, q)
        assert 0 < lo < hi
        if q >= 3:
            assert hi < 1


# ---------------------------------------------------------------------------
# discriminant factors against independent reconstructions


def _fixed_point_cubic(z, t, q):
    """Coefficients (w^3, w^2, w, 1) of z (a w + b)^2 - w (c w + 1)^2, expanded by hand."""
    a, b, c = 1 + (q - 2) * t, t, (q - 1) * t
    return -(c**2), z * a * a - 2 * c, 2 * z * a * b - 1, z * b * b


def _cubic_discriminant(A, B, C, D):
    return 18 * A * B * C * D - 4 * B**3 * D + B * B * C * C - 4 * A * C**3 - 27 * A * A * D * D


@pytest.mark.parametrize(
    "z, t, q",
    [(0.7, 0.2, 3), (2 + 1j, 3.0, 5), (0.1, 8.0, 2), (1.3 - 0.4j, 0.05, 7), (5.0, 0.9, 4)],
)
def test_q_ferro_is_the_discriminant_factor(z, t, q):
    disc = _cubic_discriminant(*_fixed_point_cubic(z, t, q))
    factor = -z * (t - 1) ** 2 * (1 - t + q * t) ** 2
    assert disc == pytest.approx(factor * cr.q_ferro(z, t, q), rel=1e-9)


def _real_fixed_point_multipliers(z, t, q):
    roots = np.roots(_fixed_point_cubic(z, t, q))
    a, b, c = 1 + (q - 2) * t, t, (q - 1) * t
    # derivative of z ((a w + b)/(c w + 1))^2, differentiated by hand
    return [2 * z * (a * w + b) * (a - b * c) / (c * w + 1) ** 3 for w in roots]


@pytest.mark.parametrize("q", [2, 3, 5])
@pytest.mark.parametrize("frac", [0.2, 0.5, 0.8, 0.99])
def test_roots_of_q_ferro_have_multiplier_one(q, frac):
    t = frac * cr.t2(q)
    for z in (cr.n_plus(t, q), cr.n_minus(t, q)):
        mults = _real_fixed_point_multipliers(z, t, q)
        assert min(abs(m - 1) for m in mults) < 1e-6


@pytest.mark.parametrize("q", [2, 3, 5])
@pytest.mark.parametrize("scale", [1.05, 2.0, 5.0])
def test_roots_of_q2_have_multiplier_minus_one(q, scale):
    t = scale * cr.t3(q)
    for z in cr.zc_pm(t, q):
        mults = _real_fixed_point_multipliers(z, t, q)
        assert min(abs(m + 1) for m in mults) < 1e-6


def _quadratic_coeffs(f, t, q):
    c0 = f(0.0, t, q)
    p, m = f(1.0, t, q), f(-1.0, t, q)
    return (p + m) / 2 - c0, (p - m) / 2, c0


@pytest.mark.parametrize("t, q", [(0.1, 3), (2.0, 3), (9.0, 5), (0.4, 2)])
def test_q2_roots_match_period_doubling_condition(t, q):
    # complex roots included: both roots of Q2 give a fixed point of multiplier -1
    for z in np.roots(_quadratic_coeffs(cr.q2_antiferro, t, q)):
        mults = _real_fixed_point_multipliers(z, t, q)
        assert min(abs(m + 1) for m in mults) < 1e-6


@pytest.mark.parametrize("q", [2, 3, 5, 8])
def test_certificates_on_grid(q):
    for t in np.linspace(cr.t2(q) / 20, cr.t2(q), 20):
        for z in (cr.n_plus(t, q), cr.n_minus(t, q)):
            assert abs(cr.q_ferro(z, t, q)) < 1e-8 * cr.poly_scale_at(cr.q_ferro, z, t, q)
    for t in cr.t3(q) * np.geomspace(1, 20, 20):
        for z in cr.zc_pm(t, q):
            assert abs(cr.q2_antiferro(z, t, q)) < 1e-8 * cr.poly_scale_at(cr.q2_antiferro, z, t, q)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1.0001, 100.0), st.integers(2, 12))
def test_q1_positive_for_antiferro(z, t, q):
    assert cr.q1_antiferro(z, t, q) > 0


@pytest.mark.parametrize("q", [3, 5, 8])
def test_zc_ferro_is_a_neutral_parameter(q):
    lo, hi = cr.t1(q), cr.t2(q)
    for t in np.linspace(lo, hi, 6)[1:-1]:
        reps = fixed_points(Params(cr.zc_ferro(t, q), t, q), 1)
        assert sum(r.stability is Stability.NEUTRAL for r in reps) == 1


# ---------------------------------------------------------------------------


def test_accumulation_examples():
    assert cr.accumulation_points(0.5, 3).points == ()
    assert cr.accumulation_points(8, 3).points == pytest.approx(cr.zc_pm(8, 3))
    pts = cr.accumulation_points(4, 2).points
    # the quoted 0.1031 is a rounding slip for (157 - sqrt(23625)) / 32 = 0.10299
    assert pts == pytest.approx((0.1031, 1.0, 9.709), abs=1e-3)
    assert cr.accumulation_points(1.0, 3).points == ()
    assert cr.accumulation_points(0.1, 3).points == (1.0,)
    assert cr.accumulation_points(0.0, 3).points == (1.0,)
    assert cr.accumulation_points(3.0, 3).points == ()


def test_ising_double_point_merges_with_one():
    # at t = t3(2) = 3 the pair collapses onto z = 1
    pts = cr.accumulation_points(3.0, 2).points
    assert pts == pytest.approx((1.0,))


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 50), st.integers(2, 9))
def test_accumulation_set_invariants(t, q):
    s = cr.accumulation_points(t, q)
    assert len(s) in (0, 1, 2, 3)
    assert all(p > 0 for p in s)
    assert list(s.points) == sorted(s.points)


def test_accumulation_set_validates():
    with pytest.raises(ValueError):
        cr.AccumulationSet(3, 0.5, (-1.0,))
    assert cr.AccumulationSet(3, 8, (0.3, 0.1)).points == (0.1, 0.3)

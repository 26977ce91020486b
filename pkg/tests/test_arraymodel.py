import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opa_steer.arraymodel import (
    ArraySpec,
    SteeringSpec,
    grating_lobe_directions,
    long_period_info,
    lpgl_directions,
    max_pitch,
    min_phase_range_for_ideal,
    rationalize,
    steering_from_M,
)
from opa_steer.errors import DegenerateSteeringError, DomainError


def test_array_spec_counts():
    spec = ArraySpec(3, 2, 0.5, 0.7)
    assert spec.shape == (7, 5)
    assert spec.pixel_count == 35
    assert ArraySpec.square(201).half_extent_x == 100


@pytest.mark.parametrize("kwargs", [
    dict(half_extent_x=-1, half_extent_z=0),
    dict(half_extent_x=1, half_extent_z=1, pitch_x=0.0),
    dict(half_extent_x=1, half_extent_z=1, pitch_z=float("inf")),
])
def test_array_spec_rejects_bad_fields(kwargs):
    with pytest.raises(DomainError):
        ArraySpec(**kwargs)


class TestSteeringFromM:

    def test_m14(self):
        assert steering_from_M(14, 0.5) == pytest.approx(8.2132, abs=5e-5)

    def test_m4(self):
        assert steering_from_M(4, 0.5) == pytest.approx(30.0, abs=1e-12)

    def test_endfire(self):
        assert steering_from_M(2, 0.5) == 90.0

    def test_no_real_angle(self):
        with pytest.raises(DomainError):
            steering_from_M(1.5, 0.5)


class TestLongPeriod:

    def test_m14(self):
        info = long_period_info(SteeringSpec(steering_from_M(14, 0.5)), 0.5)
        assert info.M == pytest.approx(14, abs=1e-9)
        assert info.d == pytest.approx(7.0, abs=1e-9)
        assert info.alpha == 1

    @pytest.mark.parametrize("M, alpha", [(7.5, 2), (7.25, 4), (7.05, 20), (7, 1)])
    def test_alpha_examples(self, M, alpha):
        info = long_period_info(SteeringSpec(steering_from_M(M, 0.5)), 0.5)
        assert info.alpha == alpha
        assert not info.quasi_periodic

    def test_alpha_from_rounded_angle(self):
        # 15.466 deg carries M = 7.5 only to ~5e-6
        assert long_period_info(SteeringSpec(15.466), 0.5).quasi_periodic
        assert long_period_info(SteeringSpec(15.466), 0.5, tol=1e-5).alpha == 2

    def test_thirty_degrees(self):
        info = long_period_info(SteeringSpec(30.0), 0.5)
        assert info.M == pytest.approx(4.0)
        assert info.d == pytest.approx(2.0)
        assert info.delta_psi_deg == pytest.approx(90.0)

    def test_broadside_is_degenerate(self):
        with pytest.raises(DegenerateSteeringError):
            long_period_info(SteeringSpec(0.0), 0.5)

    def test_irrational_hits_cap(self):
        q, exact = rationalize(math.pi, cap=50)
        assert (q, exact) == (50, False)


class TestMaxPitch:

    @pytest.mark.parametrize("theta, expected", [(5, 5.74), (10, 2.88), (20, 1.46), (30, 1.0),
                                                 (50, 0.65)])
    def test_quoted_values(self, theta, expected):
        assert max_pitch(theta) == pytest.approx(expected, abs=0.005)

    def test_half_wavelength(self):
        assert max_pitch(90) == pytest.approx(0.5)

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            max_pitch(0)

    def test_strictly_decreasing(self):
        values = [max_pitch(t) for t in range(1, 91)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestGratingLobes:

    def test_none_at_half_wavelength(self):
        assert grating_lobe_directions(SteeringSpec(10), 0.5) == []

    def test_broadside_two_lambda_by_enumeration(self):
        expected = []
        for m in range(-10, 11):
            s = m / 2.0
            if m != 0 and abs(s) <= 1:
                expected.append((m, math.degrees(math.asin(s))))
        got = grating_lobe_directions(SteeringSpec(0.0), 2.0)
        assert [m for m, _ in got] == [-2, -1, 1, 2]
        for (m, a), (me, ae) in zip(got, sorted(expected, key=lambda x: x[1])):
            assert m == me
            assert a == pytest.approx(ae, abs=1e-12)
        assert got[2][1] == pytest.approx(30.0)

    def test_large_pitch_lobe_inside_fov(self):
        lobes = grating_lobe_directions(SteeringSpec(10), 5.44)
        assert any(abs(a) <= 10 for _, a in lobes)

    def test_clean_fov_below_max_pitch(self):
        # lobes may exist, but none inside the field of view the pitch was sized for
        for fov in range(1, 90):
            a = 0.999 * max_pitch(fov)
            for t in range(-fov, fov + 1):
                lobes = grating_lobe_directions(SteeringSpec(t), a)
                assert all(abs(ang) > fov for _, ang in lobes)


class TestLpgl:

    def test_m14_count(self):
        st_ = SteeringSpec(steering_from_M(14, 0.5))
        orders = lpgl_directions(st_, 1)
        assert sum(not main for *_, main in orders) == 14
        assert max(l for l, *_ in orders) == 7

    def test_m705_count(self):
        st_ = SteeringSpec(steering_from_M(7.05, 0.5))
        orders = lpgl_directions(st_, 20)
        assert sum(not main for *_, main in orders) == 140

    def test_endfire_enumeration(self):
        orders = lpgl_directions(SteeringSpec(90.0), 1)
        assert [l for l, *_ in orders] == [-1, 0, 1]
        assert [main for *_, main in orders] == [False, False, True]
        assert orders[0][1] == pytest.approx(-90.0)

    def test_broadside_degenerate(self):
        with pytest.raises(DegenerateSteeringError):
            lpgl_directions(SteeringSpec(0.0), 1)


@pytest.mark.parametrize("M, expected", [(14, 336.0), (4, 288.0), (1, 180.0)])
def test_min_phase_range(M, expected):
    assert min_phase_range_for_ideal(M) == pytest.approx(expected)


@settings(max_examples=200, deadline=None)
@given(theta=st.floats(0.5, 89.5), pitch=st.floats(0.2, 6.0))
def test_round_trip_M(theta, pitch):
    s = SteeringSpec(theta)
    info = long_period_info(s, pitch)
    if info.M > 1:
        assert steering_from_M(info.M, pitch) == pytest.approx(theta, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(theta=st.floats(0.5, 90.0))
def test_lpgl_count_alpha1(theta):
    s = SteeringSpec(theta)
    orders = lpgl_directions(s, 1)
    assert sum(not m for *_, m in orders) == 2 * int(math.floor(1 / math.sin(math.radians(theta)) + 1e-9))


@settings(max_examples=100, deadline=None)
@given(theta=st.floats(-80, 80), pitch=st.floats(0.3, 8.0), alpha=st.integers(1, 5))
def test_predicted_sines(theta, pitch, alpha):
    s = SteeringSpec(theta)
    sin_s = math.sin(math.radians(theta))
    for m, a in grating_lobe_directions(s, pitch):
        assert abs(math.sin(math.radians(a)) - (sin_s + m / pitch)) < 1e-12
    if abs(theta) >= 0.5:
        for l, a, _ in lpgl_directions(s, alpha):
            assert abs(math.sin(math.radians(a)) - l / alpha * sin_s) < 1e-12

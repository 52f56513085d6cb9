import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qcaves.analytics import (
    WrappingReport,
    angular_displacement,
    average_wrapping_time,
    interference_lifetime,
    loop_count,
    nodal_angle,
    theta_initial,
    theta_limit,
    vorticity_positive_between,
    wrapping_interval,
)
from qcaves.errors import CurveGap, EmptyEnsemble, ThresholdOutOfRange
from qcaves.singularities import Kind, SingularCurve, SymmetricPairParams, node_position
from qcaves.trajectories import Status, Trajectory, TrajectorySample

PARAMS = SymmetricPairParams()


def theta_oracle(t):
    """Angle of the nodal line for x0 = 10, v = 2, sigma0 = sqrt 2: arg(-t + 4i) - arg(-5 + 4i)."""
    return math.degrees(math.atan2(4.0, -t) - math.atan2(4.0, -5.0))


def synthetic(t, z, omega=None):
    omega = np.zeros_like(t) if omega is None else omega
    samples = [TrajectorySample(float(a), complex(b), 0j, 0.0, float(w), 0j) for a, b, w in zip(t, z, omega)]
    return Trajectory(samples, complex(z[0]), float(t[0]), float(t[-1]), Status.COMPLETED)


def still_curve(t0=0.0, t1=10.0, z=0j):
    ts = np.linspace(t0, t1, 101)
    return SingularCurve(Kind.STAGNATION, 0, [(float(a), z) for a in ts], 0.1)


def test_limiting_angles():
    assert theta_initial(PARAMS) == pytest.approx(-51.3402, abs=1e-4)
    assert theta_limit(PARAMS) == pytest.approx(38.6598, abs=1e-4)
    assert angular_displacement(PARAMS) == pytest.approx(90.0, abs=1e-12)


@pytest.mark.parametrize("t", [0.0, 1.0, 3.52, 5.0, 7.32, 10.0, 40.0])
def test_theta_matches_oracle(t):
    assert nodal_angle(PARAMS, t).theta == pytest.approx(theta_oracle(t), abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 30))
def test_theta_matches_node_direction(t):
    z = node_position(PARAMS, 2, t)
    direction = math.degrees(math.atan(z.imag / z.real))
    assert nodal_angle(PARAMS, t).theta == pytest.approx(direction, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 20))
def test_rotation_rate(t):
    h = 1e-5
    fd = (nodal_angle(PARAMS, t + h).theta - nodal_angle(PARAMS, t - h).theta) / (2 * h)
    rate = nodal_angle(PARAMS, t).dtheta_dt
    assert rate == pytest.approx(fd, rel=1e-6)
    # independent of x0 and v: (hbar/m) 2 sigma0^2 / (4 sigma0^4 + hbar^2 t^2 / m^2)
    assert rate == pytest.approx(math.degrees(4.0 / (16.0 + t * t)), rel=1e-12)


def test_rate_independent_of_x0_and_v():
    other = SymmetricPairParams(x0=6.0, v=1.3)
    for t in (0.0, 2.0, 9.0):
        assert nodal_angle(other, t).dtheta_dt == pytest.approx(nodal_angle(PARAMS, t).dtheta_dt, rel=1e-12)


def test_lifetime():
    lt = interference_lifetime(PARAMS, 10.0)
    assert lt.t_in == pytest.approx(3.519060, abs=1e-6)
    assert lt.t_out == pytest.approx(7.318332, abs=1e-6)
    assert lt.lifetime == pytest.approx(lt.t_out - lt.t_in)
    assert nodal_angle(PARAMS, lt.t_in).theta == pytest.approx(-10.0, abs=1e-9)
    assert nodal_angle(PARAMS, lt.t_out).theta == pytest.approx(10.0, abs=1e-9)


def test_lifetime_grows_with_threshold():
    assert interference_lifetime(PARAMS, 5.0).lifetime < interference_lifetime(PARAMS, 20.0).lifetime


@pytest.mark.parametrize("bad", [0.0, -1.0, 38.7, 60.0])
def test_threshold_out_of_range(bad):
    with pytest.raises(ThresholdOutOfRange):
        interference_lifetime(PARAMS, bad)


# loop counting ---------------------------------------------------------------------


def ray_turns(rel):
    """Independent loop oracle: signed returns to the starting ray, not counting the start itself."""
    w = rel * np.exp(-1j * np.angle(rel[0]))
    im, re = w.imag[1:], w.real[1:]
    up = (im[:-1] < 0) & (im[1:] >= 0) & (re[1:] > 0)
    down = (im[:-1] >= 0) & (im[1:] < 0) & (re[1:] > 0)
    return int(up.sum() - down.sum())


@settings(max_examples=60, deadline=None)
@given(st.floats(-3.7, 3.7), st.floats(0.2, 2.0), st.floats(-math.pi, math.pi))
def test_loop_count_matches_ray_oracle(turns, radius, phase):
    # whole turns are a floating-point tie between n and n - 1
    assume(abs(turns - round(turns)) > 0.01)
    t = np.linspace(0.0, 10.0, 2001)
    z = radius * np.exp(1j * (phase + 2 * math.pi * turns * t / 10.0))
    traj = synthetic(t, z)
    got = loop_count(traj, still_curve(), (0.0, 10.0))
    assert got == ray_turns(z)
    assert got == int(math.trunc(turns))


def test_loop_count_relative_to_moving_curve():
    t = np.linspace(0.0, 10.0, 2001)
    centre = 0.3 * t + 0.1j * t
    z = centre + 0.5 * np.exp(2j * math.pi * 2.2 * t / 10.0)
    curve = SingularCurve(Kind.STAGNATION, 0, [(float(a), complex(c)) for a, c in zip(t, centre)], 0.005)
    assert loop_count(synthetic(t, z), curve, (0.0, 10.0)) == 2
    # a fixed curve at the start point is not encircled the same way
    assert loop_count(synthetic(t, z), still_curve(), (0.0, 10.0)) != 2


def test_loop_count_window_and_gap():
    t = np.linspace(0.0, 10.0, 2001)
    z = np.exp(2j * math.pi * t / 2.5)  # four turns in total
    traj = synthetic(t, z)
    assert loop_count(traj, still_curve(), (0.0, 5.0)) == 2
    with pytest.raises(CurveGap):
        loop_count(traj, still_curve(2.0, 10.0), (0.0, 5.0))


# wrapping interval -----------------------------------------------------------------


def bumpy_omega(t, centres, depth=5.0):
    omega = np.ones_like(t)
    for c in centres:
        omega -= depth * np.exp(-((t - c) ** 2) / 0.01)
    return omega


def test_wrapping_interval_from_minima():
    t = np.arange(0.0, 10.0 + 1e-9, 0.005)
    omega = bumpy_omega(t, [3.7, 4.6, 5.5, 6.9])
    rep = wrapping_interval(synthetic(t, np.zeros_like(t), omega))
    assert rep.minima == pytest.approx((3.7, 4.6, 5.5, 6.9), abs=1e-9)
    assert rep.t_first == pytest.approx(3.7) and rep.t_last == pytest.approx(6.9)
    assert rep.duration == pytest.approx(3.2)
    assert not rep.no_minima
    assert vorticity_positive_between(synthetic(t, np.zeros_like(t), omega), rep)


def test_wrapping_interval_ignores_small_wiggles():
    t = np.arange(0.0, 10.0 + 1e-9, 0.005)
    omega = bumpy_omega(t, [3.0, 8.0]) + 0.01 * np.sin(40 * t)
    rep = wrapping_interval(synthetic(t, np.zeros_like(t), omega))
    assert rep.n_minima == 2


def test_wrapping_interval_no_minima():
    t = np.arange(0.0, 10.0 + 1e-9, 0.005)
    rep = wrapping_interval(synthetic(t, np.zeros_like(t), np.ones_like(t)))
    assert rep.no_minima and rep.duration == 0.0
    assert not vorticity_positive_between(synthetic(t, np.zeros_like(t), np.ones_like(t)), rep)


def test_wrapping_interval_needs_fine_sampling():
    t = np.arange(0.0, 10.0 + 1e-9, 0.05)
    with pytest.raises(ValueError):
        wrapping_interval(synthetic(t, np.zeros_like(t)))


def test_negative_vorticity_between_spikes_detected():
    t = np.arange(0.0, 10.0 + 1e-9, 0.005)
    omega = bumpy_omega(t, [3.0, 7.0], depth=100.0)
    # a dip below zero that is small next to the spikes, so not a vorticity minimum
    omega -= 1.5 * np.exp(-((t - 5.0) ** 2) / 0.04)
    traj = synthetic(t, np.zeros_like(t), omega)
    rep = wrapping_interval(traj)
    assert rep.n_minima == 2
    assert not vorticity_positive_between(traj, rep)


def test_average_wrapping_time():
    reports = [
        WrappingReport(1.0, 3.0, 2.0, 2),
        WrappingReport(2.0, 6.0, 4.0, 3),
        WrappingReport(math.nan, math.nan, 0.0, 0, no_minima=True),
    ]
    assert average_wrapping_time(reports) == pytest.approx(3.0)
    with pytest.raises(EmptyEnsemble):
        average_wrapping_time(reports[2:])
    with pytest.raises(EmptyEnsemble):
        average_wrapping_time([])

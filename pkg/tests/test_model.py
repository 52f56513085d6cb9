import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcaves.errors import WindowTooSmall
from qcaves.model import (
    ModelParams,
    PacketParams,
    QuadratureSpec,
    evaluate,
    gaussian_overlap,
    norm_on_real_axis,
    sigma_t,
    wave_scalar,
)

HEAD_ON = ModelParams.head_on()

coords = st.floats(-6, 6, allow_nan=False)
times = st.floats(0, 10, allow_nan=False)


def packet_reference(pk, hbar, mass, z, t):
    """Direct transcription of a free Gaussian, independent of the package code."""
    st_ = pk.sigma0 * (1 + 1j * hbar * t / (2 * mass * pk.sigma0**2))
    xt = pk.x0 + pk.v * t
    p = mass * pk.v
    e = p * p / (2 * mass)
    amp = (2 * math.pi * st_**2) ** -0.25
    return amp * cmath.exp(-((z - xt) ** 2) / (4 * st_ * pk.sigma0) + 1j * p * (z - xt) / hbar + 1j * e * t / hbar)


def test_head_on_configuration():
    left, right = HEAD_ON.packets
    assert (left.x0, left.v, right.x0, right.v) == (-10.0, 2.0, 10.0, -2.0)
    assert left.sigma0 == pytest.approx(math.sqrt(2))
    assert HEAD_ON.hbar == HEAD_ON.mass == 1.0


@pytest.mark.parametrize("kwargs", [{"sigma0": 0.0}, {"sigma0": -1.0}, {"x0": math.nan}])
def test_packet_validation(kwargs):
    base = {"x0": 0.0, "v": 1.0, "sigma0": 1.0}
    base.update(kwargs)
    with pytest.raises(ValueError):
        PacketParams(**base)


def test_model_validation():
    with pytest.raises(ValueError):
        ModelParams((), 1.0, 1.0)
    with pytest.raises(ValueError):
        ModelParams(HEAD_ON.packets, hbar=0.0)


def test_sigma_t_spreading():
    pk = HEAD_ON.packets[0]
    assert sigma_t(pk, 1.0, 1.0, 0.0) == pytest.approx(pk.sigma0)
    assert sigma_t(pk, 1.0, 1.0, 4.0) == pytest.approx(math.sqrt(2) * (1 + 1j))


@settings(max_examples=200, deadline=None)
@given(coords, st.floats(-3, 3), times)
def test_matches_reference(x, y, t):
    z = complex(x, y)
    ref = sum(packet_reference(pk, 1.0, 1.0, z, t) for pk in HEAD_ON.packets)
    psi = wave_scalar(HEAD_ON, z, t)[0]
    assert abs(psi - ref) <= 1e-12 * max(1.0, abs(ref))


def test_value_at_collision_centre():
    # both packets meet at the origin at t = 5; |Psi| = 2 |A_5|
    s5 = math.sqrt(2) * (1 + 1.25j)
    expected = 2 * abs((2 * math.pi * s5**2) ** -0.25)
    assert abs(wave_scalar(HEAD_ON, 0j, 5.0)[0]) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.839579, abs=1e-6)


@settings(max_examples=100, deadline=None)
@given(coords, st.floats(-3, 3), times)
def test_parity(x, y, t):
    # mirror-symmetric pair: Psi(-z) = Psi(z)
    a = wave_scalar(HEAD_ON, complex(x, y), t)
    b = wave_scalar(HEAD_ON, complex(-x, -y), t)
    assert abs(a[0] - b[0]) <= 1e-13 * max(1.0, abs(a[0]))
    assert abs(a[1] + b[1]) <= 1e-13 * max(1.0, abs(a[1]))


@settings(max_examples=100, deadline=None)
@given(st.floats(-4, 4), st.floats(-2, 2), times)
def test_derivatives_by_cauchy_riemann(x, y, t):
    # analytic in z: d/dx and -i d/dy both equal d/dz
    h = 1e-5
    z = complex(x, y)
    psi, dpsi, d2psi = wave_scalar(HEAD_ON, z, t)
    fx = (wave_scalar(HEAD_ON, z + h, t)[0] - wave_scalar(HEAD_ON, z - h, t)[0]) / (2 * h)
    fy = (wave_scalar(HEAD_ON, z + 1j * h, t)[0] - wave_scalar(HEAD_ON, z - 1j * h, t)[0]) / (2j * h)
    scale = max(abs(dpsi), 1e-3)
    assert abs(fx - dpsi) < 1e-6 * scale + 1e-9
    assert abs(fy - dpsi) < 1e-6 * scale + 1e-9
    gx = (wave_scalar(HEAD_ON, z + h, t)[1] - wave_scalar(HEAD_ON, z - h, t)[1]) / (2 * h)
    assert abs(gx - d2psi) < 1e-6 * max(abs(d2psi), 1e-3) + 1e-9


def test_evaluate_matches_scalar_bitwise():
    x = np.linspace(-8, 8, 61)
    y = np.linspace(-4, 4, 31)
    z = x[:, None] + 1j * y[None, :]
    w = evaluate(HEAD_ON, z, 3.3)
    assert w.psi.shape == z.shape
    for idx in [(0, 0), (30, 15), (60, 30), (17, 4)]:
        point = evaluate(HEAD_ON, np.array([z[idx]]), 3.3)
        assert np.abs(point.psi[0]) == np.abs(w.psi[idx])
        assert point.dpsi[0] == w.dpsi[idx]


def test_evaluate_chunking_is_invisible():
    z = np.linspace(-8, 8, 10_001) + 0.5j
    whole = evaluate(HEAD_ON, z, 2.0).psi
    parts = np.concatenate([evaluate(HEAD_ON, z[i : i + 777], 2.0).psi for i in range(0, len(z), 777)])
    assert np.array_equal(whole, parts)


@pytest.mark.parametrize("t", [0.0, 2.5, 5.0, 7.5, 10.0])
def test_norm_matches_overlap_oracle(t):
    oracle = (
        gaussian_overlap(HEAD_ON, 0, 0, t)
        + gaussian_overlap(HEAD_ON, 1, 1, t)
        + 2 * gaussian_overlap(HEAD_ON, 0, 1, t).real
    )
    assert norm_on_real_axis(HEAD_ON, t) == pytest.approx(oracle.real, abs=1e-10)
    assert oracle.real == pytest.approx(2.0, abs=1e-12)


def test_single_packet_norm_is_one():
    model = ModelParams((PacketParams(3.0, -1.0, 0.7),))
    for t in (0.0, 4.0):
        assert norm_on_real_axis(model, t) == pytest.approx(1.0, abs=1e-10)


def test_norm_window_too_small():
    with pytest.raises(WindowTooSmall):
        norm_on_real_axis(HEAD_ON, 0.0, QuadratureSpec(width_sigmas=1.0))

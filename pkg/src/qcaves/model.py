"""Superposition of free Gaussian wave packets continued into the complex plane.

Each packet is

    psi(z, t) = A_t exp(-(z - x_t)^2 / (4 sigma_t sigma_0) + i p (z - x_t)/hbar + i E t/hbar)

with ``sigma_t = sigma_0 (1 + i hbar t / (2 m sigma_0^2))``, ``x_t = x_0 + v t``,
``p = m v``, ``E = p^2 / 2m`` and ``A_t = (2 pi sigma_t^2)^(-1/4)`` on the
principal branch. Gaussians are entire, so every derivative is closed form.

Two evaluation paths exist: :func:`evaluate` is numpy based and accepts arrays
(used for grids and anything that must agree bitwise with a grid), and
:func:`wave_scalar` is a ``cmath`` kernel for the hot loop of the trajectory
integrator. Both implement the same expressions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import WindowTooSmall

__all__ = [
    "PacketParams",
    "ModelParams",
    "WaveValue",
    "QuadratureSpec",
    "sigma_t",
    "evaluate",
    "wave_scalar",
    "norm_on_real_axis",
    "gaussian_overlap",
]


@dataclass(frozen=True)
class PacketParams:
    """One free Gaussian packet: initial center, velocity, initial width."""

    x0: float
    v: float
    sigma0: float

    def __post_init__(self):
        for name in ("x0", "v", "sigma0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.sigma0 <= 0:
            raise ValueError("sigma0 must be positive")


@dataclass(frozen=True)
class ModelParams:
    packets: tuple[PacketParams, ...]
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "packets", tuple(self.packets))
        if not self.packets:
            raise ValueError("at least one packet is required")
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValueError("hbar must be positive")
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise ValueError("mass must be positive")

    @classmethod
    def symmetric(cls, x0=10.0, v=2.0, sigma0=math.sqrt(2.0), hbar=1.0, mass=1.0):
        """Head-on pair: left packet at -x0 moving +v, right packet at +x0 moving -v."""
        return cls(
            packets=(PacketParams(-x0, v, sigma0), PacketParams(x0, -v, sigma0)),
            hbar=hbar,
            mass=mass,
        )

    @classmethod
    def head_on(cls):
        """The head-on collision studied throughout: x0 = 10, v = 2, sigma0 = sqrt(2), atomic units."""
        return cls.symmetric()


@dataclass(frozen=True)
class WaveValue:
    psi: complex
    dpsi: complex
    d2psi: complex
    z: complex
    t: float


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Simpson settings for real-axis integrals.

    ``n_start`` panels are doubled until two successive estimates agree to
    ``rel_tol``. ``tail_tol`` bounds the integrand at the window edges.
    """

    rel_tol: float = 1e-12
    n_start: int = 512
    max_doublings: int = 14
    tail_tol: float = 1e-14
    width_sigmas: float = 10.0


def sigma_t(packet, hbar, mass, t):
    """Complex time-dependent spreading ``sigma0 (1 + i hbar t / (2 m sigma0^2))``."""
    s0 = packet.sigma0
    return s0 * (1 + 1j * hbar * t / (2.0 * mass * s0 * s0))


def _packet_terms(packet, hbar, mass, t):
    st = sigma_t(packet, hbar, mass, t)
    p = mass * packet.v
    energy = p * p / (2.0 * mass)
    xt = packet.x0 + packet.v * t
    amp = (2.0 * math.pi * st * st) ** -0.25
    return st, p, energy, xt, amp


_CHUNK = 4096


def evaluate(model, z, t):
    """Psi and its first two z-derivatives at complex ``z`` (scalar or array) and real ``t``."""
    z = np.asarray(z, dtype=np.complex128)
    # numpy's complex loops round differently for 0-d operands and for long
    # buffered arrays; fixed-size 1-d chunks keep a point evaluation bitwise
    # identical to the same point inside any grid.
    flat = z.reshape(-1)
    psi = np.empty_like(flat)
    dpsi = np.empty_like(flat)
    d2psi = np.empty_like(flat)
    for start in range(0, flat.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        psi[sl], dpsi[sl], d2psi[sl] = _evaluate_1d(model, flat[sl].copy(), t)
    if z.ndim == 0:
        return WaveValue(complex(psi[0]), complex(dpsi[0]), complex(d2psi[0]), complex(z), float(t))
    shape = z.shape
    return WaveValue(psi.reshape(shape), dpsi.reshape(shape), d2psi.reshape(shape), z, float(t))


def _evaluate_1d(model, z, t):
    hbar, mass = model.hbar, model.mass
    psi = np.zeros_like(z)
    dpsi = np.zeros_like(z)
    d2psi = np.zeros_like(z)
    for packet in model.packets:
        st, p, energy, xt, amp = _packet_terms(packet, hbar, mass, t)
        width = 2.0 * st * packet.sigma0
        dz = z - xt
        phase = -(dz * dz / (2.0 * width)) + 1j * p * dz / hbar + 1j * energy * t / hbar
        g = amp * np.exp(phase)
        f = -dz / width + 1j * p / hbar
        psi = psi + g
        dpsi = dpsi + g * f
        d2psi = d2psi + g * (f * f - 1.0 / width)
    return psi, dpsi, d2psi


def wave_scalar(model, z, t):
    """Fast scalar ``(psi, dpsi, d2psi)``; same expressions as :func:`evaluate`."""
    hbar, mass = model.hbar, model.mass
    psi = dpsi = d2psi = 0j
    for packet in model.packets:
        s0 = packet.sigma0
        st = s0 * (1 + 1j * hbar * t / (2.0 * mass * s0 * s0))
        p = mass * packet.v
        dz = z - (packet.x0 + packet.v * t)
        width = 2.0 * st * s0
        g = (2.0 * math.pi * st * st) ** -0.25 * cmath.exp(
            -dz * dz / (2.0 * width) + 1j * p * dz / hbar + 1j * (p * p / (2.0 * mass)) * t / hbar
        )
        f = -dz / width + 1j * p / hbar
        psi += g
        dpsi += g * f
        d2psi += g * (f * f - 1.0 / width)
    return psi, dpsi, d2psi


def _window(model, t, width_sigmas):
    centers = [abs(pk.x0 + pk.v * t) for pk in model.packets]
    widths = [abs(sigma_t(pk, model.hbar, model.mass, t)) for pk in model.packets]
    return max(centers) + width_sigmas * max(widths)


def norm_on_real_axis(model, t, quadrature=None):
    """Integral of |Psi(x, t)|^2 over the real axis by composite Simpson.

    The window is ``[-L, L]`` with ``L = max|x_t| + width_sigmas * max|sigma_t|``.
    """
    q = quadrature or QuadratureSpec()
    half = _window(model, t, q.width_sigmas)

    def density(x):
        return np.abs(evaluate(model, x, t).psi) ** 2

    edge = float(max(density(np.array([-half, half]))))
    if edge > q.tail_tol:
        raise WindowTooSmall(f"integrand {edge:.3e} at window edge exceeds {q.tail_tol:.1e}")

    n = q.n_start
    previous = None
    for _ in range(q.max_doublings + 1):
        x = np.linspace(-half, half, n + 1)
        y = density(x)
        h = 2.0 * half / n
        estimate = h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())
        if previous is not None and abs(estimate - previous) <= q.rel_tol * abs(estimate):
            return float(estimate)
        previous = estimate
        n *= 2
    return float(estimate)


def gaussian_overlap(model, a, b, t=0.0):
    """Closed-form inner product <psi_a | psi_b> on the real axis for packets ``a`` and ``b``.

    Computed from the Gaussian integral of the product of two Gaussians; used as
    an independent check of the quadrature.
    """
    hbar, mass = model.hbar, model.mass
    pa, pb = model.packets[a], model.packets[b]
    sa, ma, ea, xa, aa = _packet_terms(pa, hbar, mass, t)
    sb, mb, eb, xb, ab = _packet_terms(pb, hbar, mass, t)
    # conj(psi_a) psi_b = C exp(-alpha x^2 + beta x + gamma)
    wa = np.conj(2.0 * sa * pa.sigma0)
    wb = 2.0 * sb * pb.sigma0
    alpha = 1.0 / (2.0 * wa) + 1.0 / (2.0 * wb)
    beta = xa / wa + xb / wb - 1j * ma / hbar + 1j * mb / hbar
    gamma = (
        -xa * xa / (2.0 * wa)
        - xb * xb / (2.0 * wb)
        + 1j * ma * xa / hbar
        - 1j * mb * xb / hbar
        - 1j * (ma * ma / (2 * mass)) * t / hbar
        + 1j * (mb * mb / (2 * mass)) * t / hbar
    )
    pref = np.conj(aa) * ab
    return complex(pref * np.sqrt(np.pi / alpha) * np.exp(beta * beta / (4.0 * alpha) + gamma))

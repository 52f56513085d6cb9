"""Quantum momentum function p = (hbar/i) dPsi/dz / Psi and derived flow quantities.

The logarithmic derivative is formed as a ratio, never through a complex
logarithm, so there are no branch cuts to track.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContourThroughPole, NonIntegerWinding, PoleProximity
from .model import evaluate, wave_scalar

__all__ = [
    "PSI_FLOOR",
    "FlowValue",
    "momentum",
    "momentum_derivative",
    "flow_scalar",
    "quantum_potential",
    "circle",
    "rectangle",
    "contour_integral",
    "winding_count",
    "winding_value",
]

PSI_FLOOR = 1e-12


@dataclass(frozen=True)
class FlowValue:
    p: complex
    dp_dz: complex
    gamma: float
    omega: float
    q: complex


def _checked(model, z, t, psi_floor):
    psi, dpsi, d2psi = wave_scalar(model, complex(z), float(t))
    amp = abs(psi)
    if not amp >= psi_floor:
        raise PoleProximity(z, t, amp)
    return psi, dpsi, d2psi


def momentum(model, z, t, psi_floor=PSI_FLOOR):
    """p(z, t); raises :class:`PoleProximity` where |Psi| < ``psi_floor``."""
    psi, dpsi, _ = _checked(model, z, t, psi_floor)
    return model.hbar / 1j * (dpsi / psi)


def _flow_from_wave(model, psi, dpsi, d2psi):
    hbar, mass = model.hbar, model.mass
    g1 = dpsi / psi
    g2 = d2psi / psi
    p = hbar / 1j * g1
    dp_dz = hbar / 1j * (g2 - g1 * g1)
    q = hbar / (2.0 * mass * 1j) * dp_dz
    return FlowValue(p, dp_dz, 2.0 * dp_dz.real, 2.0 * dp_dz.imag, q)


def momentum_derivative(model, z, t, psi_floor=PSI_FLOOR):
    """Full :class:`FlowValue` at (z, t): p, dp/dz, divergence, vorticity, quantum potential."""
    return _flow_from_wave(model, *_checked(model, z, t, psi_floor))


def flow_scalar(model, z, t):
    """Unchecked ``(|Psi|, FlowValue)``; the caller owns the pole test."""
    psi, dpsi, d2psi = wave_scalar(model, z, t)
    return abs(psi), _flow_from_wave(model, psi, dpsi, d2psi)


def quantum_potential(model, gamma, omega):
    """Q = (hbar / 4 m i)(Gamma + i Omega)."""
    return model.hbar / (4.0 * model.mass * 1j) * (gamma + 1j * omega)


def circle(center, radius, n=512):
    """Counterclockwise closed polyline approximating a circle (vertices only, no repeat)."""
    theta = 2.0 * np.pi * np.arange(n) / n
    return complex(center) + radius * np.exp(1j * theta)


def rectangle(x_min, x_max, y_min, y_max):
    """Counterclockwise rectangle vertices."""
    return np.array(
        [complex(x_min, y_min), complex(x_max, y_min), complex(x_max, y_max), complex(x_min, y_max)]
    )


def _resample(vertices, min_samples):
    vertices = np.asarray(vertices, dtype=np.complex128)
    nv = len(vertices)
    if nv < 3:
        raise ValueError("a closed contour needs at least three vertices")
    per_edge = max(1, math.ceil(min_samples / nv))
    starts = vertices
    ends = np.roll(vertices, -1)
    frac = np.arange(per_edge) / per_edge
    return (starts[:, None] + (ends - starts)[:, None] * frac[None, :]).reshape(-1)


def contour_integral(model, t, contour, psi_floor=PSI_FLOOR, min_samples=2048):
    """Trapezoid-rule value of the closed integral of p dz along ``contour``.

    ``contour`` is a sequence of vertices; the last connects back to the first.
    Edges are subdivided so that at least ``min_samples`` points are used.
    """
    pts = _resample(contour, min_samples)
    wave = evaluate(model, pts, t)
    amp = np.abs(wave.psi)
    if np.any(amp < psi_floor):
        k = int(np.argmin(amp))
        raise ContourThroughPole(f"contour passes within the pole floor at z={pts[k]}")
    p = model.hbar / 1j * (wave.dpsi / wave.psi)
    dz = np.roll(pts, -1) - pts
    return complex(np.sum(0.5 * (p + np.roll(p, -1)) * dz))


def winding_count(model, t, contour, psi_floor=PSI_FLOOR, min_samples=2048, tol=0.01):
    """Number of nodes enclosed by ``contour``: the closed integral of p dz over 2 pi hbar.

    Raises :class:`NonIntegerWinding` if the raw value is further than ``tol``
    from an integer.
    """
    raw = winding_value(model, t, contour, psi_floor, min_samples)
    count = round(raw.real)
    if abs(raw - count) > tol:
        raise NonIntegerWinding(f"winding value {raw} is not within {tol} of an integer")
    return count


def winding_value(model, t, contour, psi_floor=PSI_FLOOR, min_samples=2048):
    """Unrounded closed integral of p dz divided by 2 pi hbar."""
    return contour_integral(model, t, contour, psi_floor, min_samples) / (2.0 * math.pi * model.hbar)

"""Embedded Dormand-Prince 5(4) stepper for a single complex ODE dz/dt = f(t, z).

Scalar-only on purpose: trajectories are one complex coordinate and the
right-hand side is evaluated with ``cmath``, so avoiding numpy here is what
makes ensembles cheap. Step size follows the PI controller of Hairer, Norsett
and Wanner (DOPRI5). Dense output is cubic Hermite on (z, dz/dt).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

__all__ = ["StepRecord", "GuardTripped", "IntegrationResult", "dopri54", "hermite"]

# Butcher tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# 5th order weights minus embedded 4th order weights
E1 = 71 / 57600
E3 = -71 / 16695
E4 = 71 / 1920
E5 = -17253 / 339200
E6 = 22 / 525
E7 = -1 / 40

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 10.0
BETA = 0.04
EXPO = 0.2 - 0.75 * BETA


class GuardTripped(Exception):
    """Raised by a right-hand side that refuses to evaluate at (t, z)."""


@dataclass
class StepRecord:
    t: float
    z: complex
    dz: complex


@dataclass
class IntegrationResult:
    steps: list  # accepted StepRecords including the initial state
    status: str  # "completed", "guard" or "step_limit"
    n_rejected: int = 0


def hermite(a: StepRecord, b: StepRecord, t: float) -> complex:
    """Cubic Hermite interpolant through (z, dz/dt) at the ends of one step."""
    h = b.t - a.t
    s = (t - a.t) / h
    s2 = s * s
    s3 = s2 * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    return h00 * a.z + h10 * h * a.dz + h01 * b.z + h11 * h * b.dz


def _initial_step(f, t0, z0, f0, direction, rtol, atol, max_step):
    sk = atol + rtol * abs(z0)
    d0 = abs(z0) / sk
    d1 = abs(f0) / sk
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, max_step)
    try:
        f1 = f(t0 + direction * h0, z0 + direction * h0 * f0)
    except GuardTripped:
        return min(1e-6, max_step)
    d2 = abs(f1 - f0) / sk / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, max_step)


def dopri54(
    f: Callable[[float, complex], complex],
    t0: float,
    z0: complex,
    t1: float,
    rtol: float = 1e-9,
    atol: float = 1e-11,
    max_step: float = 0.01,
    max_steps: int = 10_000_000,
    min_step: float = 1e-14,
) -> IntegrationResult:
    """Integrate from ``t0`` to ``t1`` (either direction).

    ``f`` may raise :class:`GuardTripped`; the trial step is then shrunk. The
    run ends with status ``"guard"`` once the step would fall below ``min_step``
    times the interval length, which means the solution itself has entered
    the forbidden zone.
    """
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    f0 = f(t0, z0)
    steps = [StepRecord(t0, z0, f0)]
    h = _initial_step(f, t0, z0, f0, direction, rtol, atol, max_step)
    h_floor = min_step * max(span, 1.0)
    t, z = t0, z0
    fac_old = 1e-4
    rejected = 0
    last_rejected = False
    n = 0

    while direction * (t1 - t) > 0:
        if n >= max_steps:
            return IntegrationResult(steps, "step_limit", rejected)
        n += 1
        remaining = abs(t1 - t)
        if h >= remaining or remaining - h < 1e-12 * max(span, 1.0):
            h = remaining
        hs = direction * h
        try:
            k1 = f0
            k2 = f(t + C2 * hs, z + hs * A21 * k1)
            k3 = f(t + C3 * hs, z + hs * (A31 * k1 + A32 * k2))
            k4 = f(t + C4 * hs, z + hs * (A41 * k1 + A42 * k2 + A43 * k3))
            k5 = f(t + C5 * hs, z + hs * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
            k6 = f(t + hs, z + hs * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))
            z_new = z + hs * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
            t_new = t1 if h == remaining else t + hs
            k7 = f(t_new, z_new)
        except GuardTripped:
            rejected += 1
            last_rejected = True
            h *= 0.25
            if h < h_floor:
                return IntegrationResult(steps, "guard", rejected)
            continue

        err_vec = hs * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
        sk = atol + rtol * max(abs(z), abs(z_new))
        err = abs(err_vec) / sk

        fac11 = err**EXPO if err > 0 else 0.0
        if err <= 1.0:
            fac = fac11 / fac_old**BETA
            fac = max(1.0 / FAC_MAX, min(1.0 / FAC_MIN, fac / SAFETY))
            h_new = h / fac if fac > 0 else h * FAC_MAX
            fac_old = max(err, 1e-4)
            t, z, f0 = t_new, z_new, k7
            steps.append(StepRecord(t, z, f0))
            if last_rejected:
                h_new = min(h_new, h)
            last_rejected = False
            h = min(h_new, max_step)
        else:
            rejected += 1
            last_rejected = True
            h = h / min(1.0 / FAC_MIN, fac11 / SAFETY)
            if h < h_floor:
                return IntegrationResult(steps, "guard", rejected)

    return IntegrationResult(steps, "completed", rejected)

"""Complex quantum trajectories dz/dt = p(z, t)/m, isochrone shooting and pair separation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, PoleAbort, PoleProximity, StepLimit
from .integrate import GuardTripped, dopri54, hermite
from .model import wave_scalar
from .qmf import flow_scalar

__all__ = [
    "IntegratorOptions",
    "Status",
    "TrajectorySample",
    "Trajectory",
    "SeparationReport",
    "IsochronePoint",
    "propagate",
    "isochrone",
    "separation_metrics",
    "single_packet_exact",
]


@dataclass(frozen=True)
class IntegratorOptions:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = 0.01
    pole_guard: float = 1e-6
    max_steps: int = 10_000_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "pole_guard", "max_steps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


class Status(str, enum.Enum):
    COMPLETED = "Completed"
    POLE_ABORT = "PoleAbort"
    STEP_LIMIT = "StepLimit"


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    z: complex
    p: complex
    gamma: float
    omega: float
    q: complex


@dataclass
class Trajectory:
    samples: list
    z0: complex
    t0: float
    t1: float
    status: Status
    n_steps: int = 0
    n_rejected: int = 0

    @property
    def t(self):
        return np.array([s.t for s in self.samples])

    @property
    def z(self):
        return np.array([s.z for s in self.samples])

    @property
    def p(self):
        return np.array([s.p for s in self.samples])

    @property
    def gamma(self):
        return np.array([s.gamma for s in self.samples])

    @property
    def omega(self):
        return np.array([s.omega for s in self.samples])

    @property
    def q(self):
        return np.array([s.q for s in self.samples])

    @property
    def end(self):
        return self.samples[-1].z

    def raise_for_status(self):
        """Raise :class:`PoleAbort` or :class:`StepLimit` unless completed."""
        if self.status is Status.POLE_ABORT:
            last = self.samples[-1]
            raise PoleAbort(
                f"trajectory from z0={self.z0} entered the pole guard near t={last.t:.6g}, z={last.z:.6g}"
            )
        if self.status is Status.STEP_LIMIT:
            raise StepLimit(f"trajectory from z0={self.z0} exhausted its step budget")
        return self


@dataclass(frozen=True)
class SeparationReport:
    dz0: complex
    dzT: complex
    ratio: float
    ftle: float
    degenerate: bool = False


def single_packet_exact(packet, hbar, mass, z0, t):
    """Closed-form trajectory of a lone Gaussian: z(t) = x_t + (z0 - x0) sigma_t / sigma0."""
    t = np.asarray(t, dtype=float)
    s0 = packet.sigma0
    st = s0 * (1 + 1j * hbar * t / (2.0 * mass * s0 * s0))
    return packet.x0 + packet.v * t + (z0 - packet.x0) * st / s0


def _sample_times(t0, t1, dt):
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    n = int(math.floor(span / dt + 1e-9))
    times = [t0 + direction * k * dt for k in range(n + 1)]
    if abs(times[-1] - t1) > 1e-9 * max(dt, 1.0):
        times.append(t1)
    else:
        times[-1] = t1
    return times


def _sample_at(model, t, z):
    _, fl = flow_scalar(model, z, t)
    return TrajectorySample(t, z, fl.p, fl.gamma, fl.omega, fl.q)


def propagate(model, z0, t0, t1, opts=None, sample_dt=0.01):
    """Integrate one complex trajectory from (z0, t0) to t1, forward or backward.

    Samples are returned every ``sample_dt`` (plus both endpoints), interpolated
    from the adaptive steps and with flow quantities re-evaluated at each
    sample point. A run that reaches the pole guard ends with
    ``Status.POLE_ABORT`` and keeps the samples taken before it.
    """
    opts = opts or IntegratorOptions()
    z0 = complex(z0)
    t0, t1 = float(t0), float(t1)
    if t0 == t1:
        raise ValueError("t0 and t1 must differ")
    if not sample_dt > 0:
        raise ValueError("sample_dt must be positive")
    psi0 = abs(wave_scalar(model, z0, t0)[0])
    if psi0 <= opts.pole_guard:
        raise PoleProximity(z0, t0, psi0)

    hbar_over_im = model.hbar / (1j * model.mass)
    guard = opts.pole_guard

    def rhs(t, z):
        psi, dpsi, _ = wave_scalar(model, z, t)
        if abs(psi) < guard:
            raise GuardTripped
        return hbar_over_im * (dpsi / psi)

    result = dopri54(
        rhs,
        t0,
        z0,
        t1,
        rtol=opts.rel_tol,
        atol=opts.abs_tol,
        max_step=opts.max_step,
        max_steps=opts.max_steps,
    )
    status = {
        "completed": Status.COMPLETED,
        "guard": Status.POLE_ABORT,
        "step_limit": Status.STEP_LIMIT,
    }[result.status]

    steps = result.steps
    reached = steps[-1].t
    direction = 1.0 if t1 > t0 else -1.0
    samples = []
    k = 0
    for ts in _sample_times(t0, t1, sample_dt):
        if direction * (ts - reached) > 0:
            break
        while k < len(steps) - 2 and direction * (steps[k + 1].t - ts) < 0:
            k += 1
        if ts == steps[0].t:
            z = steps[0].z
        elif ts == reached:
            z = steps[-1].z
        else:
            z = hermite(steps[k], steps[k + 1], ts)
        samples.append(_sample_at(model, ts, z))
    if status is not Status.COMPLETED and samples[-1].t != reached:
        samples.append(_sample_at(model, reached, steps[-1].z))

    return Trajectory(samples, z0, t0, t1, status, len(steps) - 1, result.n_rejected)


@dataclass(frozen=True)
class IsochronePoint:
    arrival_x: float
    branch: int
    z0: complex | None
    ok: bool
    residual: float = math.nan
    message: str = ""

    @property
    def launch_side(self):
        """0 if the launch point lies left of the imaginary axis, 1 if right; ``None`` on failure."""
        if self.z0 is None:
            return None
        return 1 if self.z0.real > 0 else 0


def _branch(x):
    return 1 if x > 0 else 0


def isochrone(model, t_star, arrival_points, opts=None, t_launch=0.0, sample_dt=0.05, check_tol=1e-6):
    """Launch points at ``t_launch`` whose trajectories reach the real axis at ``t_star``.

    Each arrival point is shot backward from (x_f + 0i, t_star) and the result is
    replayed forward as a check; ``residual`` is |Im z(t_star)| of the replay.
    Failures are reported per point with ``ok=False`` rather than raised.
    """
    opts = opts or IntegratorOptions()
    out = []
    for xf in arrival_points:
        xf = float(xf)
        branch = _branch(xf)
        try:
            back = propagate(model, complex(xf, 0.0), t_star, t_launch, opts, sample_dt)
            back.raise_for_status()
            z0 = back.end
            fwd = propagate(model, z0, t_launch, t_star, opts, sample_dt)
            fwd.raise_for_status()
            residual = abs(fwd.end.imag)
        except (PoleAbort, PoleProximity, StepLimit) as exc:
            out.append(IsochronePoint(xf, branch, None, False, math.nan, str(exc)))
            continue
        ok = residual < check_tol
        msg = "" if ok else f"forward replay misses the real axis by {residual:.3e}"
        out.append(IsochronePoint(xf, branch, z0, ok, residual, msg))
    return out


def separation_metrics(a, b):
    """Final/initial separation of two trajectories sampled on a common grid."""
    if a.t0 != b.t0 or a.t1 != b.t1 or len(a.samples) != len(b.samples):
        raise GridMismatch("trajectories do not share endpoints and sample grid")
    ta, tb = a.t, b.t
    if not np.array_equal(ta, tb):
        raise GridMismatch("trajectories are sampled at different times")
    dz0 = b.samples[0].z - a.samples[0].z
    dzT = b.samples[-1].z - a.samples[-1].z
    if dz0 == 0:
        if dzT == 0:
            return SeparationReport(dz0, dzT, 0.0, -math.inf, degenerate=True)
        return SeparationReport(dz0, dzT, math.inf, math.inf, degenerate=True)
    ratio = abs(dzT) / abs(dz0)
    if ratio == 0:
        return SeparationReport(dz0, dzT, 0.0, -math.inf, degenerate=True)
    span = abs(float(ta[-1] - ta[0]))
    return SeparationReport(dz0, dzT, ratio, math.log(ratio) / span)

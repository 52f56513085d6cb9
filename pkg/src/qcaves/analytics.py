"""Nodal-line kinematics and per-trajectory wrapping metrics.

Angles are in degrees throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.signal import find_peaks

from .errors import CurveGap, EmptyEnsemble, ThresholdOutOfRange
from .model import PacketParams, sigma_t
from .singularities import node_position

__all__ = [
    "NodalLineState",
    "LifetimeReport",
    "WrappingReport",
    "theta_initial",
    "theta_limit",
    "nodal_angle",
    "angular_displacement",
    "interference_lifetime",
    "wrapping_interval",
    "vorticity_positive_between",
    "loop_count",
    "average_wrapping_time",
]


@dataclass(frozen=True)
class NodalLineState:
    t: float
    theta: float
    dtheta_dt: float


@dataclass(frozen=True)
class LifetimeReport:
    theta_thresh: float
    t_in: float
    t_out: float
    lifetime: float


@dataclass(frozen=True)
class WrappingReport:
    t_first: float
    t_last: float
    duration: float
    n_minima: int
    minima: tuple = ()
    loops: int | None = None
    no_minima: bool = False


def theta_initial(params):
    """Nodal-line angle at t = 0: atan(-hbar x0 / (2 m v sigma0^2))."""
    return math.degrees(math.atan(-params.hbar * params.x0 / (2.0 * params.mass * params.v * params.sigma0**2)))


def theta_limit(params):
    """Limiting nodal-line angle as t -> infinity: atan(2 m v sigma0^2 / (hbar x0))."""
    return math.degrees(math.atan(2.0 * params.mass * params.v * params.sigma0**2 / (params.hbar * params.x0)))


def _line_angle(z):
    ang = math.degrees(math.atan2(z.imag, z.real))
    # a line through the origin: fold into (-90, 90]
    if ang > 90.0:
        ang -= 180.0
    elif ang <= -90.0:
        ang += 180.0
    return ang


def _theta(params, t):
    return _line_angle(node_position(params, 0, t))


def _dtheta_dt(params, t):
    # theta = arg(i pi (n + 1/2)) - arg(D(t)), so dtheta/dt = -Im(D'/D)
    hbar, m, s0, x0, v = params.hbar, params.mass, params.sigma0, params.x0, params.v
    st = sigma_t(PacketParams(x0, -v, s0), hbar, m, t)
    dst = 1j * hbar / (2.0 * m * s0)
    den = 1j * m * v / hbar - (x0 - v * t) / (2.0 * s0 * st)
    dden = v / (2.0 * s0 * st) + (x0 - v * t) * dst / (2.0 * s0 * st * st)
    return math.degrees(-(dden / den).imag)


def nodal_angle(params, t):
    """Angle of the nodal line with the positive real axis, and its rotation rate."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return NodalLineState(float(t), _theta(params, t), _dtheta_dt(params, t))


def angular_displacement(params):
    """Total rotation of the nodal line, theta_inf - theta_0."""
    return theta_limit(params) - theta_initial(params)


def interference_lifetime(params, theta_thresh=10.0, xtol=1e-12):
    """Time the nodal line spends within ``theta_thresh`` degrees of the real axis."""
    th0, thinf = theta_initial(params), theta_limit(params)
    if not 0.0 < theta_thresh < min(abs(th0), thinf):
        raise ThresholdOutOfRange(
            f"threshold {theta_thresh} deg must lie in (0, {min(abs(th0), thinf):.4f})"
        )

    def crossing(target, lo):
        hi = max(2.0 * lo, 1.0)
        while _theta(params, hi) < target:
            hi *= 2.0
            if hi > 1e12:
                raise ThresholdOutOfRange(f"nodal line never reaches {target} deg")
        return brentq(lambda t: _theta(params, t) - target, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)

    t_in = crossing(-theta_thresh, 0.0)
    t_out = crossing(theta_thresh, t_in)
    return LifetimeReport(float(theta_thresh), t_in, t_out, t_out - t_in)


def wrapping_interval(traj, prominence=0.05, curve=None, max_dt=0.005):
    """Interval between the first and last prominent minimum of the vorticity.

    A minimum qualifies if its prominence is at least ``prominence`` times the
    range of Omega along the trajectory. Fewer than two qualifying minima give a
    report flagged ``no_minima`` with zero duration. If ``curve`` is given the
    loop count around it over the interval is filled in.
    """
    t = traj.t
    if len(t) > 1 and np.max(np.abs(np.diff(t))) > max_dt * (1 + 1e-9):
        raise ValueError(f"trajectory must be sampled at intervals of at most {max_dt}")
    omega = traj.omega
    spread = float(omega.max() - omega.min()) if len(omega) else 0.0
    idx = np.array([], dtype=int)
    if spread > 0:
        idx, _ = find_peaks(-omega, prominence=prominence * spread)
    minima = tuple(float(x) for x in t[idx])
    if len(idx) < 2:
        t_first = t_last = minima[0] if minima else math.nan
        report = WrappingReport(t_first, t_last, 0.0, len(idx), minima, None, True)
    else:
        report = WrappingReport(minima[0], minima[-1], minima[-1] - minima[0], len(idx), minima)
    if curve is not None:
        report = WrappingReport(
            report.t_first, report.t_last, report.duration, report.n_minima, report.minima,
            loop_count(traj, curve, report), report.no_minima,
        )
    return report


def vorticity_positive_between(traj, report):
    """True if Omega > 0 throughout the wrapping interval apart from the spikes.

    Each detected minimum excludes the contiguous run of non-positive samples
    that contains it; every other interior sample must be positive.
    """
    if report.no_minima:
        return False
    t = traj.t
    omega = traj.omega
    inside = (t > report.t_first) & (t < report.t_last)
    excused = np.zeros_like(inside)
    nonpos = omega <= 0
    for tm in report.minima:
        k = int(np.argmin(np.abs(t - tm)))
        if not nonpos[k]:
            continue
        lo = k
        while lo > 0 and nonpos[lo - 1]:
            lo -= 1
        hi = k
        while hi < len(t) - 1 and nonpos[hi + 1]:
            hi += 1
        excused[lo : hi + 1] = True
    return bool(np.all(omega[inside & ~excused] > 0))


def loop_count(traj, curve, window=None):
    """Counterclockwise turns of the trajectory around a singular curve.

    ``window`` is a :class:`WrappingReport` or a ``(t_a, t_b)`` pair; by default
    the trajectory's own wrapping interval, or its full span if it has none.
    The unwrapped angle of z_traj - z_curve is accumulated over the window and
    the number of completed turns is returned (truncated toward zero, so
    clockwise motion counts negative).
    """
    if window is None:
        window = wrapping_interval(traj) if _fine_enough(traj) else None
    if isinstance(window, WrappingReport):
        window = None if window.no_minima else (window.t_first, window.t_last)
    t = traj.t
    t_a, t_b = (min(t[0], t[-1]), max(t[0], t[-1])) if window is None else window
    ct = curve.t
    eps = 1e-9 * max(1.0, abs(t_b))
    if ct[0] > t_a + eps or ct[-1] < t_b - eps:
        raise CurveGap(f"curve spans [{ct[0]}, {ct[-1]}], window needs [{t_a}, {t_b}]")
    sel = (t >= t_a - eps) & (t <= t_b + eps)
    ts = t[sel]
    rel = traj.z[sel] - curve.at(ts)
    if len(rel) < 2:
        return 0
    angle = np.unwrap(np.angle(rel))
    turns = (angle[-1] - angle[0]) / (2.0 * math.pi)
    return int(math.trunc(turns))


def _fine_enough(traj, max_dt=0.005):
    t = traj.t
    return len(t) < 2 or np.max(np.abs(np.diff(t))) <= max_dt * (1 + 1e-9)


def average_wrapping_time(reports):
    """Mean wrapping duration over the reports that have a wrapping interval."""
    reports = list(reports)
    used = [r.duration for r in reports if not r.no_minima]
    if not used:
        raise EmptyEnsemble("no trajectory in the ensemble has a wrapping interval")
    return float(np.mean(used))

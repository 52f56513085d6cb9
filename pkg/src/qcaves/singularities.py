"""Nodes (Psi = 0) and stagnation points (dPsi/dz = 0): closed-form seeds,
Newton refinement and continuation in time.

Indexing: node ``n`` is the closed-form node ``z_n``; stagnation point ``n``
sits between nodes ``n - 1`` and ``n``, so the stagnation point at the origin of
the symmetric pair is ``n = 0`` and index ``-n`` mirrors index ``n``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergedToWrongKind,
    CurveLost,
    DegenerateDenominator,
    NoConvergence,
)
from .model import ModelParams, PacketParams, sigma_t, wave_scalar

__all__ = [
    "Kind",
    "SymmetricPairParams",
    "SingularPoint",
    "SingularCurve",
    "node_position",
    "nodes_analytic",
    "refine",
    "stagnation_points",
    "track_curve",
]


class Kind(str, enum.Enum):
    NODE = "node"
    STAGNATION = "stagnation"


@dataclass(frozen=True)
class SymmetricPairParams:
    """Head-on pair: packets at -x0 (moving +v) and +x0 (moving -v).

    ``x0`` is the right packet's center and ``v`` its inbound speed; with this
    convention the closed-form node formula reproduces the nodal-line angles
    directly.
    """

    x0: float = 10.0
    v: float = 2.0
    sigma0: float = math.sqrt(2.0)
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.sigma0 > 0 and self.hbar > 0 and self.mass > 0):
            raise ValueError("sigma0, hbar and mass must be positive")

    def to_model(self):
        return ModelParams.symmetric(self.x0, self.v, self.sigma0, self.hbar, self.mass)

    @classmethod
    def from_model(cls, model):
        """Inverse of :meth:`to_model`; ``None`` if ``model`` is not a mirror-symmetric pair."""
        if len(model.packets) != 2:
            return None
        left, right = sorted(model.packets, key=lambda pk: pk.x0)
        if (
            left.x0 == -right.x0
            and left.v == -right.v
            and left.sigma0 == right.sigma0
        ):
            return cls(right.x0, -right.v, right.sigma0, model.hbar, model.mass)
        return None


@dataclass(frozen=True)
class SingularPoint:
    kind: Kind
    n: int | None
    z: complex
    t: float
    newton_residual: float
    iterations: int = 0


@dataclass
class SingularCurve:
    kind: Kind
    n: int | None
    samples: list  # (t, z) pairs
    dt: float

    @property
    def t(self):
        return np.array([s[0] for s in self.samples])

    @property
    def z(self):
        return np.array([s[1] for s in self.samples])

    def at(self, t):
        """Position at time ``t`` by linear interpolation of the samples."""
        ts = self.t
        zs = self.z
        return np.interp(t, ts, zs.real) + 1j * np.interp(t, ts, zs.imag)


def _denominator(params, t):
    st = sigma_t(PacketParams(params.x0, -params.v, params.sigma0), params.hbar, params.mass, t)
    return 1j * params.mass * params.v / params.hbar - (params.x0 - params.v * t) / (
        2.0 * params.sigma0 * st
    )


def node_position(params, n, t):
    """Closed-form node z_n(t) = i pi (n + 1/2) / [i m v/hbar - (x0 - v t)/(2 sigma0 sigma_t)]."""
    den = _denominator(params, t)
    if abs(den) < 1e-300:
        raise DegenerateDenominator(f"node denominator vanishes at t={t}")
    return 1j * math.pi * (n + 0.5) / den


def nodes_analytic(params, t, n_range=(-4, 3), residual_tol=1e-8):
    """Closed-form nodes for every ``n`` in the inclusive range ``n_range``.

    Each node is checked against the wave function: |Psi(z_n)| must be below
    ``residual_tol * |A_t|``.
    """
    model = params.to_model()
    amp = abs((2.0 * math.pi * sigma_t(model.packets[0], params.hbar, params.mass, t) ** 2) ** -0.25)
    lo, hi = n_range
    out = []
    for n in range(lo, hi + 1):
        z = node_position(params, n, t)
        resid = abs(wave_scalar(model, z, t)[0])
        if not resid < residual_tol * amp:
            raise NoConvergence(f"closed-form node n={n} at t={t} leaves |Psi|={resid:.3e}")
        out.append(SingularPoint(Kind.NODE, n, z, float(t), resid / amp, 0))
    return out


def _packet_scale(model, z, t):
    """Sum of the individual packet magnitudes at (z, t); the scale against which cancellation is judged."""
    total = 0.0
    for pk in model.packets:
        total += abs(wave_scalar(ModelParams((pk,), model.hbar, model.mass), z, t)[0])
    return total


def refine(model, kind, t, seed, n=None, tol=1e-12, max_iter=50):
    """Newton iteration for a node (on Psi) or a stagnation point (on dPsi/dz)."""
    kind = Kind(kind)
    z = complex(seed)
    step = math.inf
    for it in range(max_iter + 1):
        psi, dpsi, d2psi = wave_scalar(model, z, t)
        f, df = (psi, dpsi) if kind is Kind.NODE else (dpsi, d2psi)
        if f == 0:
            step = 0.0
            break
        if df == 0 or it == max_iter:
            raise NoConvergence(f"Newton for {kind.value} from seed {seed} at t={t} did not converge")
        delta = f / df
        z -= delta
        step = abs(delta)
        if not math.isfinite(step):
            raise NoConvergence(f"Newton for {kind.value} from seed {seed} at t={t} diverged")
        if step < tol * max(1.0, abs(z)):
            it += 1
            break
    if kind is Kind.STAGNATION:
        psi = wave_scalar(model, z, t)[0]
        if abs(psi) < 1e-10 * _packet_scale(model, z, t):
            raise ConvergedToWrongKind(f"stagnation search from {seed} landed on a node at {z}")
    return SingularPoint(kind, n, z, float(t), step, it)


def _stagnation_seed(params, n, t):
    return 0.5 * (node_position(params, n - 1, t) + node_position(params, n, t))


def stagnation_points(params, t, n_range=(-4, 4)):
    """Refined stagnation points for the symmetric pair, seeded between adjacent nodes."""
    model = params.to_model()
    lo, hi = n_range
    return [refine(model, Kind.STAGNATION, t, _stagnation_seed(params, n, t), n=n) for n in range(lo, hi + 1)]


def _seed_for(model, kind, n, t, seed):
    if seed is not None:
        return complex(seed)
    params = SymmetricPairParams.from_model(model)
    if params is None or n is None:
        raise ValueError("a seed is required unless the model is a symmetric pair and n is given")
    if kind is Kind.NODE:
        return node_position(params, n, t)
    return _stagnation_seed(params, n, t)


def track_curve(model, kind, n, t_range, dt=0.01, seed=None, max_jump=0.1, max_corrector_iter=10):
    """Follow a node or stagnation point through ``t_range`` by predictor-corrector continuation.

    The predictor is the previous point (first step) or a linear extrapolation
    of the last two; the corrector is :func:`refine`. A step is halved when the
    corrector needs more than ``max_corrector_iter`` iterations, fails, or moves
    the point by more than ``max_jump``; below ``dt / 64`` the curve is lost.
    """
    kind = Kind(kind)
    t_start, t_end = map(float, t_range)
    if t_end <= t_start:
        raise ValueError("t_range must be increasing")
    first = refine(model, kind, t_start, _seed_for(model, kind, n, t_start, seed), n=n)
    samples = [(t_start, first.z)]
    min_dt = dt / 64.0
    h = dt
    t = t_start
    while t < t_end - 1e-12 * max(1.0, abs(t_end)):
        h_try = min(h, t_end - t)
        # land exactly on the regular grid when possible
        t_new = t_end if t_end - t <= h_try * (1 + 1e-9) else t + h_try
        if len(samples) >= 2:
            (ta, za), (tb, zb) = samples[-2], samples[-1]
            pred = zb + (zb - za) * (t_new - tb) / (tb - ta)
        else:
            pred = samples[-1][1]
        try:
            pt = refine(model, kind, t_new, pred, n=n, max_iter=max_corrector_iter)
            jump = abs(pt.z - samples[-1][1])
            good = jump < max_jump
        except (NoConvergence, ConvergedToWrongKind):
            good = False
        if not good:
            h = h_try / 2.0
            if h < min_dt:
                raise CurveLost(f"{kind.value} curve n={n} lost near t={t:.6g}")
            continue
        samples.append((t_new, pt.z))
        t = t_new
        h = min(dt, h * 2.0)
    return SingularCurve(kind, n, samples, dt)

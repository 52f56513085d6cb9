"""Reference trajectories for the head-on collision.

Each one is built from a target behaviour rather than a fixed launch point: a
trajectory arriving in the first side fringe that wraps a stagnation curve, a
pair of isochrone launches about 0.3 apart that wrap neighbouring stagnation
curves, and a pair 0.01 apart on either side of the launch point that feeds a
node.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytics import loop_count
from .singularities import Kind, SymmetricPairParams, node_position, track_curve
from .trajectories import Status, isochrone, propagate, separation_metrics

__all__ = [
    "stagnation_curves",
    "node_curves",
    "wrapping_trajectory",
    "dominant_curve",
    "separation_pair",
    "divergent_pair",
    "PairResult",
]


def stagnation_curves(model, n_range=(-4, 4), t_range=(0.0, 10.0), dt=0.01):
    lo, hi = n_range
    return {n: track_curve(model, Kind.STAGNATION, n, t_range, dt) for n in range(lo, hi + 1)}


def node_curves(model, n_range=(-4, 3), t_range=(0.0, 10.0), dt=0.01):
    lo, hi = n_range
    return {n: track_curve(model, Kind.NODE, n, t_range, dt) for n in range(lo, hi + 1)}


def wrapping_trajectory(model, arrival_x=1.3, t_star=5.0, t_end=10.0, opts=None, sample_dt=0.005):
    """Isochrone launch arriving at ``arrival_x`` on the real axis at ``t_star``, run to ``t_end``.

    The default arrival lies in the first side fringe, between the nodes at
    pi/4 and 3 pi/4, where trajectories wrap the stagnation curve n = 1.
    """
    point = isochrone(model, t_star, [arrival_x], opts)[0]
    if not point.ok:
        raise RuntimeError(f"isochrone shooting failed at x={arrival_x}: {point.message}")
    traj = propagate(model, point.z0, 0.0, t_end, opts, sample_dt).raise_for_status()
    return point, traj


def dominant_curve(traj, curves, window=None):
    """Index of the curve the trajectory winds around most (at least one full turn), else ``None``."""
    counts = {n: loop_count(traj, c, window) for n, c in curves.items()}
    best = max(counts, key=counts.get)
    return best if counts[best] >= 1 else None


@dataclass
class PairResult:
    a: object
    b: object
    report: object
    curves: tuple = (None, None)
    arrivals: tuple = (None, None)


def separation_pair(
    model,
    curves,
    arrivals=None,
    t_star=5.0,
    t_end=10.0,
    target=0.3,
    opts=None,
    sample_dt=0.02,
):
    """Two isochrone launches about ``target`` apart that wrap different stagnation curves.

    Launches are grouped by the side they start from (sign of Re z0), and the
    pair with wrapped curves differing and |dz0| closest to ``target`` wins.
    """
    if arrivals is None:
        arrivals = np.round(np.arange(1.6, 3.0001, 0.01), 2)
    pts = [p for p in isochrone(model, t_star, arrivals, opts) if p.ok]
    runs = []
    for p in pts:
        tr = propagate(model, p.z0, 0.0, t_end, opts, sample_dt)
        if tr.status is not Status.COMPLETED:
            continue
        n = dominant_curve(tr, curves, (0.0, t_end))
        if n is not None:
            runs.append((p, tr, n))
    best = None
    for i, (pa, ta, na) in enumerate(runs):
        for pb, tb, nb in runs[i + 1 :]:
            if na == nb or (pa.z0.real > 0) != (pb.z0.real > 0):
                continue
            gap = abs(abs(pb.z0 - pa.z0) - target)
            if best is None or gap < best[0]:
                best = (gap, pa, ta, na, pb, tb, nb)
    if best is None:
        raise RuntimeError("no isochrone pair wraps two different stagnation curves")
    _, pa, ta, na, pb, tb, nb = best
    return PairResult(ta, tb, separation_metrics(ta, tb), (na, nb), (pa.arrival_x, pb.arrival_x))


def divergent_pair(model, node_n=0, dz0=0.01, t_star=5.0, t_end=10.0, eps=1e-3, opts=None, sample_dt=0.01):
    """Launches ``dz0`` apart centred on the point whose trajectory runs into node ``node_n`` at ``t_star``.

    That point is found by shooting back from just short of the node on the
    real axis. The two launches pass the node curve on opposite sides.
    """
    params = SymmetricPairParams.from_model(model)
    if params is None:
        raise ValueError("divergent_pair needs a symmetric two-packet model")
    x_node = node_position(params, node_n, t_star).real
    back = propagate(model, complex(x_node - eps, 0.0), t_star, 0.0, opts, sample_dt).raise_for_status()
    centre = back.end
    a = propagate(model, centre - dz0 / 2, 0.0, t_end, opts, sample_dt).raise_for_status()
    b = propagate(model, centre + dz0 / 2, 0.0, t_end, opts, sample_dt).raise_for_status()
    return PairResult(a, b, separation_metrics(a, b))

"""Matplotlib renderings of the exported data. Figures go to files, never to a screen."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .analytics import nodal_angle, theta_initial, theta_limit  # noqa: E402
from .fields import DPSI_LEVEL, PSI_LEVEL  # noqa: E402

GOLDEN = (math.sqrt(5) - 1.0) / 2.0

STYLE = {
    "font.size": 9,
    "axes.labelsize": 10,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "lines.linewidth": 1.0,
    "savefig.dpi": 150,
    "figure.facecolor": "white",
}

NODE_COLOR = "#d9559b"
STAG_COLOR = "#5b3c8f"
TRAJ_COLORS = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e"]


def new_figure(width=7.0, height=None, **kwargs):
    """Figure with the package style; height defaults to width times the golden ratio."""
    plt.rcParams.update(STYLE)
    return plt.figure(figsize=(width, height or width * GOLDEN), **kwargs)


def save(fig, path):
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def caves_figure(volume, node_curves, stag_curves, trajectories=(), t_slice=5.0):
    """Space-time view of the nodal/stagnation curves and a t-slice of both isosurface fields."""
    spec = volume.spec
    fig = new_figure(10.0, 4.5)
    ax3 = fig.add_subplot(1, 2, 1, projection="3d")
    for c in node_curves.values():
        ax3.plot(c.z.real, c.z.imag, c.t, color=NODE_COLOR, lw=1.2)
    for c in stag_curves.values():
        ax3.plot(c.z.real, c.z.imag, c.t, color=STAG_COLOR, lw=1.2, ls="--")
    for k, tr in enumerate(trajectories):
        ax3.plot(tr.z.real, tr.z.imag, tr.t, color=TRAJ_COLORS[k % len(TRAJ_COLORS)], lw=0.8)
    ax3.set_xlim(spec.x_min, spec.x_max)
    ax3.set_ylim(spec.y_min, spec.y_max)
    ax3.set_zlim(spec.t_min, spec.t_max)
    ax3.set_xlabel("x")
    ax3.set_ylabel("y")
    ax3.set_zlabel("t")

    k = int(np.argmin(np.abs(spec.t - t_slice)))
    ax = fig.add_subplot(1, 2, 2)
    extent = (spec.x_min, spec.x_max, spec.y_min, spec.y_max)
    ax.imshow(volume.abs_psi[:, :, k].T, origin="lower", extent=extent, aspect="auto", cmap="Greys")
    ax.contour(spec.x, spec.y, volume.abs_psi[:, :, k].T, levels=[PSI_LEVEL], colors=NODE_COLOR)
    ax.contour(spec.x, spec.y, volume.abs_dpsi[:, :, k].T, levels=[DPSI_LEVEL], colors=STAG_COLOR)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"t = {spec.t[k]:g}: |Psi| = {PSI_LEVEL}, |dPsi/dz| = {DPSI_LEVEL}")
    fig.tight_layout()
    return fig


def trajectories_figure(trajectories, node_curves, stag_curves, labels=None, flow_index=0):
    """Trajectories among the singular curves, and divergence/vorticity along one of them."""
    fig = new_figure(10.0, 4.5)
    ax3 = fig.add_subplot(1, 2, 1, projection="3d")
    for c in node_curves.values():
        ax3.plot(c.z.real, c.z.imag, c.t, color=NODE_COLOR, lw=1.0)
    for c in stag_curves.values():
        ax3.plot(c.z.real, c.z.imag, c.t, color=STAG_COLOR, lw=1.0, ls="--")
    labels = labels or [str(k + 1) for k in range(len(trajectories))]
    for k, tr in enumerate(trajectories):
        ax3.plot(tr.z.real, tr.z.imag, tr.t, color=TRAJ_COLORS[k % len(TRAJ_COLORS)], label=labels[k])
    ax3.set_xlim(-4, 4)
    ax3.set_ylim(-3, 3)
    ax3.set_xlabel("x")
    ax3.set_ylabel("y")
    ax3.set_zlabel("t")
    ax3.legend(loc="upper left")

    ax = fig.add_subplot(1, 2, 2)
    tr = trajectories[flow_index]
    ax.plot(tr.t, tr.gamma, label="divergence")
    ax.plot(tr.t, tr.omega, label="vorticity")
    ax.axhline(0.0, color="0.6", lw=0.5)
    ax.set_xlabel("t")
    ax.set_title(f"trajectory {labels[flow_index]}")
    ax.legend()
    fig.tight_layout()
    return fig


def nodal_line_figure(params, nodes_by_t, stags_by_t, times=(0.0, 2.5, 5.0, 7.5, 10.0), extent=4.0):
    """Nodal line at several times with its limiting direction and the nodal trajectories."""
    fig = new_figure(5.5, 5.5)
    ax = fig.add_subplot(1, 1, 1)
    r = np.array([-2 * extent, 2 * extent])
    for t in times:
        th = math.radians(nodal_angle(params, t).theta)
        ax.plot(r * math.cos(th), r * math.sin(th), color="k", lw=0.8)
    th = math.radians(theta_limit(params))
    ax.plot(r * math.cos(th), r * math.sin(th), color="k", lw=0.8, ls="--")
    slope = 2 * params.mass * params.v * params.sigma0**2 / (params.hbar * params.x0)
    xs = np.array([-extent, extent])
    for n in sorted({p.n for pts in nodes_by_t.values() for p in pts}):
        ax.plot(xs, slope * xs - (2 * n + 1) * math.pi * params.sigma0**2 / params.x0, color="0.5", ls=":", lw=0.7)
    for pts in nodes_by_t.values():
        ax.plot([p.z.real for p in pts], [p.z.imag for p in pts], "o", color=NODE_COLOR, ms=3)
    for pts in stags_by_t.values():
        ax.plot([p.z.real for p in pts], [p.z.imag for p in pts], "o", color=STAG_COLOR, ms=3)
    ax.set_xlim(-extent, extent)
    ax.set_ylim(-extent, extent)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"theta0 = {theta_initial(params):.2f} deg, theta_inf = {theta_limit(params):.2f} deg")
    fig.tight_layout()
    return fig


def nodal_angle_figure(t, theta, dtheta, lifetime=None):
    fig = new_figure(6.0)
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(t, theta, color="k", label="theta (deg)")
    ax.set_xlabel("t")
    ax.set_ylabel("theta (deg)")
    if lifetime is not None:
        ax.axvspan(lifetime.t_in, lifetime.t_out, color="0.9")
        ax.axhline(lifetime.theta_thresh, color="0.6", lw=0.5)
        ax.axhline(-lifetime.theta_thresh, color="0.6", lw=0.5)
    ax2 = ax.twinx()
    ax2.plot(t, dtheta, color=NODE_COLOR)
    ax2.set_ylabel("dtheta/dt (deg per unit time)", color=NODE_COLOR)
    fig.tight_layout()
    return fig

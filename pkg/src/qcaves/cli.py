"""Command-line front end.

Exit status: 0 success, 1 I/O failure, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from .analytics import (
    average_wrapping_time,
    interference_lifetime,
    nodal_angle,
    theta_initial,
    theta_limit,
    angular_displacement,
    loop_count,
    vorticity_positive_between,
    wrapping_interval,
)
from .config import head_on_config, parse_arrivals, parse_complex, parse_config
from .errors import ConfigError, NumericalError
from .fields import DPSI_LEVEL, PSI_LEVEL, GridSpec, sample_grid, write_csv, write_vtk
from .singularities import Kind, SymmetricPairParams, nodes_analytic, stagnation_points, track_curve
from .trajectories import Status, isochrone, propagate

log = logging.getLogger("qcaves")

TRAJ_COLUMNS = ("t", "re_z", "im_z", "re_p", "im_p", "gamma", "omega", "re_q", "im_q")


def _g(x):
    return "%.9g" % x


def _write_rows(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(r if isinstance(r, str) else _g(r) for r in row) + "\n")


def _write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _opt(args, name, default=None):
    """Command-line override if the subcommand has it and it was given."""
    value = getattr(args, name, None)
    return default if value is None else value


def _finite(x):
    return None if x is None or not math.isfinite(x) else float(x)


def write_trajectory_csv(path, traj):
    rows = (
        (s.t, s.z.real, s.z.imag, s.p.real, s.p.imag, s.gamma, s.omega, s.q.real, s.q.imag)
        for s in traj.samples
    )
    _write_rows(path, TRAJ_COLUMNS, rows)


def _require_pair(cfg, what):
    params = SymmetricPairParams.from_model(cfg.model)
    if params is None:
        raise ConfigError(f"{what} needs a mirror-symmetric two-packet model", key="model.packets")
    return params


def _figures_dir(out):
    path = os.path.join(out, "figures")
    os.makedirs(path, exist_ok=True)
    return path


# subcommands -------------------------------------------------------------------------


def cmd_caves(cfg, args, out):
    spec = cfg.grid or GridSpec()
    volume = sample_grid(cfg.model, spec)
    write_vtk(volume, "abs_psi", os.path.join(out, "abs_psi.vtk"))
    write_vtk(volume, "abs_dpsi", os.path.join(out, "abs_dpsi.vtk"))
    if _opt(args, "csv"):
        write_csv(volume, os.path.join(out, "fields.csv"))
    _write_json(
        os.path.join(out, "caves.json"),
        {
            "files": {"abs_psi": "abs_psi.vtk", "abs_dpsi": "abs_dpsi.vtk"},
            "isosurface_levels": {"abs_psi": PSI_LEVEL, "abs_dpsi": DPSI_LEVEL},
            "grid": spec.__dict__,
        },
    )
    if args.figures:
        from . import plotting
        from .reproduce import node_curves, stagnation_curves

        params = SymmetricPairParams.from_model(cfg.model)
        nodes = node_curves(cfg.model, (-4, 3), (spec.t_min, spec.t_max)) if params else {}
        stags = stagnation_curves(cfg.model, (-4, 4), (spec.t_min, spec.t_max)) if params else {}
        plotting.save(
            plotting.caves_figure(volume, nodes, stags), os.path.join(_figures_dir(out), "caves.png")
        )
    return 0


def _launches(cfg, args):
    """Launch points, either explicit or from isochrone shooting, with per-point metadata."""
    tcfg = cfg.trajectories
    if _opt(args, "z0"):
        zs = [parse_complex(z) for z in _opt(args, "z0")]
        return [(z, {"z0": z}) for z in zs], []
    if "launch_points" in tcfg and not (_opt(args, "arrivals") or _opt(args, "t_star") is not None):
        return [(z, {"z0": z}) for z in tcfg["launch_points"]], []
    if cfg.isochrone is None and not _opt(args, "arrivals"):
        raise ConfigError("no launch points: give --z0, trajectories.launch_points or an isochrone", key="--z0")
    iso = dict(cfg.isochrone or {"t_star": 5.0})
    t_star = _opt(args, "t_star", iso["t_star"])
    arrivals = parse_arrivals(_opt(args, "arrivals")) if _opt(args, "arrivals") else cfg.arrival_points()
    points = isochrone(cfg.model, t_star, arrivals, cfg.integrator, t_launch=iso.get("t_launch", 0.0))
    launches = []
    failed = []
    for p in points:
        meta = {
            "arrival_x": p.arrival_x,
            "branch": p.branch,
            "launch_side": p.launch_side,
            "z0": p.z0,
            "ok": p.ok,
            "residual": _finite(p.residual),
        }
        if p.ok:
            launches.append((p.z0, meta))
        else:
            meta["message"] = p.message
            failed.append(meta)
    return launches, failed


def _time_span(cfg, args):
    tcfg = cfg.trajectories
    iso = cfg.isochrone or {}
    t0 = _opt(args, "t0", tcfg.get("t0", iso.get("t_launch", 0.0)))
    t1 = _opt(args, "t1", tcfg.get("t1", iso.get("t_end", 10.0)))
    if t0 == t1:
        raise ConfigError("t0 and t1 must differ", key="--t1")
    return t0, t1


def cmd_trajectories(cfg, args, out):
    launches, failed = _launches(cfg, args)
    t0, t1 = _time_span(cfg, args)
    dt = cfg.trajectories.get("sample_dt", 0.005)
    summary = []
    bad = 0
    for k, (z0, meta) in enumerate(launches):
        tr = propagate(cfg.model, z0, t0, t1, cfg.integrator, dt)
        name = f"traj_{k:03d}.csv"
        write_trajectory_csv(os.path.join(out, name), tr)
        entry = dict(meta, file=name, status=tr.status.value, z_end=tr.end, t_end=tr.samples[-1].t)
        summary.append(entry)
        if tr.status is not Status.COMPLETED:
            bad += 1
    _write_json(os.path.join(out, "trajectories.json"), {"trajectories": summary, "isochrone_failures": failed})
    if args.figures and summary:
        from . import plotting
        from .reproduce import node_curves, stagnation_curves

        trs = [propagate(cfg.model, z0, t0, t1, cfg.integrator, dt) for z0, _ in launches[:5]]
        params = SymmetricPairParams.from_model(cfg.model)
        lo, hi = sorted((t0, t1))
        nodes = node_curves(cfg.model, (-4, 3), (lo, hi)) if params else {}
        stags = stagnation_curves(cfg.model, (-4, 4), (lo, hi)) if params else {}
        plotting.save(
            plotting.trajectories_figure(trs, nodes, stags),
            os.path.join(_figures_dir(out), "trajectories.png"),
        )
    if bad:
        log.error("%d of %d trajectories did not complete (pole guard or step limit)", bad, len(launches))
        return 3
    return 0


def cmd_singularities(cfg, args, out):
    _require_pair(cfg, "singularities")
    s = cfg.singularities
    lo, hi = s.get("n_range", [-4, 4])
    t_range = s.get("t_range", [0.0, 10.0])
    dt = s.get("dt", 0.01)
    rows = []
    # node n sits between stagnation points n and n + 1
    for n in range(lo, hi):
        c = track_curve(cfg.model, Kind.NODE, n, t_range, dt)
        rows.extend(("node", str(n), t, z.real, z.imag) for t, z in c.samples)
    for n in range(lo, hi + 1):
        c = track_curve(cfg.model, Kind.STAGNATION, n, t_range, dt)
        rows.extend(("stagnation", str(n), t, z.real, z.imag) for t, z in c.samples)
    _write_rows(os.path.join(out, "singularities.csv"), ("kind", "n", "t", "re_z", "im_z"), rows)
    return 0


def _nodal_series(params, cfg):
    a = cfg.analytics
    t_max = a.get("t_max", 10.0)
    dt = a.get("nodal_dt", 0.05)
    ts = np.linspace(0.0, t_max, int(round(t_max / dt)) + 1)
    states = [nodal_angle(params, float(t)) for t in ts]
    return ts, states


def cmd_nodal_line(cfg, args, out):
    params = _require_pair(cfg, "nodal-line")
    thresh = _opt(args, "theta_thresh", cfg.theta_thresh)
    ts, states = _nodal_series(params, cfg)
    _write_rows(
        os.path.join(out, "nodal_line.csv"),
        ("t", "theta_deg", "dtheta_dt"),
        ((s.t, s.theta, s.dtheta_dt) for s in states),
    )
    lt = interference_lifetime(params, thresh)
    report = {
        "theta_thresh": lt.theta_thresh,
        "t_in": lt.t_in,
        "t_out": lt.t_out,
        "lifetime": lt.lifetime,
        "theta_0": theta_initial(params),
        "theta_inf": theta_limit(params),
        "angular_displacement": angular_displacement(params),
    }
    _write_json(os.path.join(out, "lifetime.json"), report)
    if args.figures:
        from . import plotting

        figs = _figures_dir(out)
        plotting.save(
            plotting.nodal_angle_figure(ts, [s.theta for s in states], [s.dtheta_dt for s in states], lt),
            os.path.join(figs, "nodal_angle.png"),
        )
        times = (0.0, 2.5, 5.0, 7.5, 10.0)
        nodes = {t: nodes_analytic(params, t, (-4, 3)) for t in times}
        stags = {t: stagnation_points(params, t, (-4, 4)) for t in times}
        plotting.save(plotting.nodal_line_figure(params, nodes, stags), os.path.join(figs, "nodal_line.png"))
    return 0


def cmd_metrics(cfg, args, out):
    if cfg.isochrone is None and not _opt(args, "arrivals"):
        raise ConfigError("metrics needs an isochrone section or --arrivals", key="isochrone")
    iso = dict(cfg.isochrone or {"t_star": 5.0})
    t_star = _opt(args, "t_star", iso["t_star"])
    arrivals = parse_arrivals(_opt(args, "arrivals")) if _opt(args, "arrivals") else cfg.arrival_points()
    t_launch, t_end = iso.get("t_launch", 0.0), iso.get("t_end", 10.0)
    dt = min(cfg.trajectories.get("sample_dt", 0.005), 0.005)
    params = SymmetricPairParams.from_model(cfg.model)
    curves = {}
    if params is not None:
        curves = {
            n: track_curve(cfg.model, Kind.STAGNATION, n, (min(t_launch, t_end), max(t_launch, t_end)))
            for n in range(-4, 5)
        }
    entries = []
    reports = []
    for p in isochrone(cfg.model, t_star, arrivals, cfg.integrator, t_launch=t_launch):
        entry = {"arrival_x": p.arrival_x, "branch": p.branch, "launch_side": p.launch_side, "z0": p.z0}
        if not p.ok:
            entry.update(status="IsochroneFailed", message=p.message)
            entries.append(entry)
            continue
        tr = propagate(cfg.model, p.z0, t_launch, t_end, cfg.integrator, dt)
        entry["status"] = tr.status.value
        if tr.status is Status.COMPLETED:
            rep = wrapping_interval(tr, cfg.prominence)
            reports.append(rep)
            loops = {str(n): loop_count(tr, c, rep) for n, c in curves.items()}
            entry.update(
                t_first=_finite(rep.t_first),
                t_last=_finite(rep.t_last),
                duration=rep.duration,
                n_minima=rep.n_minima,
                no_minima=rep.no_minima,
                loops=loops,
                vorticity_positive=vorticity_positive_between(tr, rep),
            )
        entries.append(entry)
    summary = {
        "t_star": t_star,
        "prominence": cfg.prominence,
        "n_trajectories": len(entries),
        "n_with_wrapping": sum(1 for r in reports if not r.no_minima),
        "n_no_minima": sum(1 for r in reports if r.no_minima),
        "average_wrapping_time": average_wrapping_time(reports) if any(not r.no_minima for r in reports) else None,
    }
    if params is not None:
        lt = interference_lifetime(params, _opt(args, "theta_thresh", cfg.theta_thresh))
        summary["nodal_lifetime"] = lt.lifetime
    _write_json(os.path.join(out, "metrics.json"), {"summary": summary, "trajectories": entries})
    return 0


def cmd_reproduce(cfg, args, out):
    """Everything behind the three figures, using the head-on collision configuration."""
    from . import plotting
    from .reproduce import divergent_pair, node_curves, separation_pair, stagnation_curves, wrapping_trajectory

    figures = args.figures
    args.figures = False
    for name, fn in (
        ("caves", cmd_caves),
        ("singularities", cmd_singularities),
        ("nodal-line", cmd_nodal_line),
        ("metrics", cmd_metrics),
    ):
        sub = os.path.join(out, name)
        os.makedirs(sub, exist_ok=True)
        log.info("reproduce: %s", name)
        fn(cfg, args, sub)

    params = _require_pair(cfg, "reproduce")
    log.info("reproduce: trajectories")
    sub = os.path.join(out, "trajectories")
    os.makedirs(sub, exist_ok=True)
    nodes = node_curves(cfg.model)
    stags = stagnation_curves(cfg.model)
    point, t1 = wrapping_trajectory(cfg.model, opts=cfg.integrator)
    pair = separation_pair(cfg.model, stags, opts=cfg.integrator, sample_dt=0.005)
    div = divergent_pair(cfg.model, opts=cfg.integrator, sample_dt=0.005)
    named = {"1": t1, "2": pair.a, "3": pair.b, "4": div.a, "5": div.b}
    for label, tr in named.items():
        write_trajectory_csv(os.path.join(sub, f"trajectory_{label}.csv"), tr)
    rep = wrapping_interval(t1, cfg.prominence)
    _write_json(
        os.path.join(sub, "trajectories.json"),
        {
            "trajectory_1": {
                "arrival_x": point.arrival_x,
                "z0": point.z0,
                "t_first": rep.t_first,
                "t_last": rep.t_last,
                "duration": rep.duration,
                "loops": {str(n): loop_count(t1, c, rep) for n, c in stags.items()},
                "vorticity_positive": vorticity_positive_between(t1, rep),
            },
            "pair_2_3": {
                "arrivals": list(pair.arrivals),
                "curves": list(pair.curves),
                "dz0": abs(pair.report.dz0),
                "dzT": abs(pair.report.dzT),
                "ratio": pair.report.ratio,
                "ftle": pair.report.ftle,
            },
            "pair_4_5": {
                "dz0": abs(div.report.dz0),
                "dzT": abs(div.report.dzT),
                "ratio": div.report.ratio,
                "ftle": div.report.ftle,
            },
        },
    )
    if figures:
        log.info("reproduce: figures")
        figs = _figures_dir(out)
        from .fields import sample_grid

        volume = sample_grid(cfg.model, cfg.grid or GridSpec())
        plotting.save(plotting.caves_figure(volume, nodes, stags, [t1]), os.path.join(figs, "fig1_caves.png"))
        plotting.save(
            plotting.trajectories_figure(list(named.values()), nodes, stags, list(named)),
            os.path.join(figs, "fig2_trajectories.png"),
        )
        times = (0.0, 2.5, 5.0, 7.5, 10.0)
        plotting.save(
            plotting.nodal_line_figure(
                params,
                {t: nodes_analytic(params, t, (-4, 3)) for t in times},
                {t: stagnation_points(params, t, (-4, 4)) for t in times},
            ),
            os.path.join(figs, "fig3_nodal_line.png"),
        )
        ts, states = _nodal_series(params, cfg)
        plotting.save(
            plotting.nodal_angle_figure(
                ts, [s.theta for s in states], [s.dtheta_dt for s in states], interference_lifetime(params, cfg.theta_thresh)
            ),
            os.path.join(figs, "nodal_angle.png"),
        )
    return 0


COMMANDS = {
    "caves": (cmd_caves, "export |Psi| and |dPsi/dz| volumes as legacy VTK"),
    "trajectories": (cmd_trajectories, "integrate complex trajectories from launch points or an isochrone"),
    "singularities": (cmd_singularities, "track node and stagnation curves"),
    "nodal-line": (cmd_nodal_line, "nodal-line angle, rotation rate and interference lifetime"),
    "metrics": (cmd_metrics, "wrapping intervals and average wrapping time over an isochrone ensemble"),
    "reproduce": (cmd_reproduce, "reproduce the data behind all figures for the head-on collision"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="qcaves", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", help="JSON run configuration (default: head-on collision)")
        p.add_argument("--out", metavar="DIR", help="output directory (default: config 'outputs' or ./qcaves-out)")
        p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=name == "reproduce",
                       help="render matplotlib figures next to the data files")
        p.add_argument("-v", "--verbose", action="store_true")
        if name in ("trajectories", "metrics"):
            p.add_argument("--t-star", type=float, help="isochrone arrival time")
            p.add_argument("--arrivals", metavar="A:B:N", help="N isochrone arrival points from A to B; write --arrivals=-3:3:40 for negative A")
        if name == "trajectories":
            p.add_argument("--z0", action="append", help="launch point, e.g. 0.5+0.2j; write --z0=-1+2j for negative values (repeatable)")
            p.add_argument("--t0", type=float, help="start time")
            p.add_argument("--t1", type=float, help="end time")
        if name in ("nodal-line", "metrics"):
            p.add_argument("--theta-thresh", type=float, help="lifetime threshold in degrees")
        if name == "caves":
            p.add_argument("--csv", action="store_true", help="also write fields.csv")
    return parser


def _apply_overrides(raw, args):
    raw = copy.deepcopy(raw)
    if _opt(args, "theta_thresh") is not None:
        raw.setdefault("analytics", {})["theta_thresh"] = _opt(args, "theta_thresh")
    if _opt(args, "t_star") is not None:
        raw.setdefault("isochrone", {"t_star": _opt(args, "t_star")})["t_star"] = _opt(args, "t_star")
    return raw


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    fn = COMMANDS[args.command][0]
    try:
        if args.command == "reproduce" or not args.config:
            raw = head_on_config()
        else:
            with open(args.config) as fh:
                raw = json.load(fh)
        raw = _apply_overrides(raw, args)
        cfg = parse_config(raw)
        out = args.out or cfg.outputs or "qcaves-out"
        os.makedirs(out, exist_ok=True)
        _write_json(os.path.join(out, "config.json"), raw)
        return fn(cfg, args, out)
    except ConfigError as exc:
        print(f"qcaves: config error [{exc.key}]: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"qcaves: config error [<file>]: not valid JSON ({exc})", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"qcaves: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"qcaves: I/O error: {exc}", file=sys.stderr)
        return 1


run = main

if __name__ == "__main__":
    sys.exit(main())

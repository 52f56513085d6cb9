"""JSON run configuration with a strict schema."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .errors import ConfigError
from .fields import GridSpec
from .model import ModelParams, PacketParams
from .trajectories import IntegratorOptions

__all__ = ["RunConfig", "SCHEMA", "load_config", "parse_config", "head_on_config", "parse_complex", "parse_arrivals"]

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "string"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


SCHEMA = _obj(
    {
        "model": _obj(
            {
                "packets": {
                    "type": "array",
                    "minItems": 1,
                    "items": _obj({"x0": _NUM, "v": _NUM, "sigma0": _POS}, ["x0", "v", "sigma0"]),
                },
                "hbar": _POS,
                "mass": _POS,
            },
            ["packets"],
        ),
        "grid": _obj(
            {
                "x_min": _NUM, "x_max": _NUM, "nx": {"type": "integer", "minimum": 2},
                "y_min": _NUM, "y_max": _NUM, "ny": {"type": "integer", "minimum": 2},
                "t_min": _NUM, "t_max": _NUM, "nt": {"type": "integer", "minimum": 2},
            }
        ),
        "isochrone": _obj(
            {
                "t_star": _NUM,
                "arrival_points": {"type": "array", "items": _NUM, "minItems": 1},
                "arrival_range": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
                "arrival_count": {"type": "integer", "minimum": 1},
                "t_launch": _NUM,
                "t_end": _NUM,
            },
            ["t_star"],
        ),
        "trajectories": _obj(
            {
                "launch_points": {"type": "array", "items": _COMPLEX, "minItems": 1},
                "t0": _NUM,
                "t1": _NUM,
                "sample_dt": _POS,
            }
        ),
        "integrator": _obj(
            {
                "rel_tol": _POS,
                "abs_tol": _POS,
                "max_step": _POS,
                "pole_guard": _POS,
                "max_steps": {"type": "integer", "minimum": 1},
            }
        ),
        "singularities": _obj(
            {
                "n_range": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                "t_range": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
                "dt": _POS,
            }
        ),
        "analytics": _obj(
            {
                "theta_thresh": _POS,
                "prominence": _POS,
                "nodal_dt": _POS,
                "t_max": _POS,
            }
        ),
        "outputs": {"type": "string"},
    },
    ["model"],
)


@dataclass
class RunConfig:
    model: ModelParams
    grid: GridSpec | None = None
    isochrone: dict | None = None
    trajectories: dict = field(default_factory=dict)
    integrator: IntegratorOptions = field(default_factory=IntegratorOptions)
    singularities: dict = field(default_factory=dict)
    analytics: dict = field(default_factory=dict)
    outputs: str | None = None
    raw: dict = field(default_factory=dict)

    @property
    def theta_thresh(self):
        return self.analytics.get("theta_thresh", 10.0)

    @property
    def prominence(self):
        return self.analytics.get("prominence", 0.05)

    def arrival_points(self):
        """Arrival abscissae from ``arrival_points`` or ``arrival_range`` + ``arrival_count``."""
        iso = self.isochrone or {}
        if "arrival_points" in iso:
            return [float(x) for x in iso["arrival_points"]]
        if "arrival_range" in iso:
            a, b = iso["arrival_range"]
            return [float(x) for x in np.linspace(a, b, iso.get("arrival_count", 40))]
        raise ConfigError("isochrone needs arrival_points or arrival_range", key="isochrone.arrival_points")


def _key_path(error):
    path = ".".join(str(p) for p in error.absolute_path)
    if error.validator == "additionalProperties":
        extra = sorted(set(error.instance) - set(error.schema.get("properties", {})))
        if extra:
            return ".".join(filter(None, [path, extra[0]]))
    if error.validator == "required":
        missing = error.message.split("'")[1] if "'" in error.message else ""
        return ".".join(filter(None, [path, missing]))
    return path or "<root>"


def parse_complex(value):
    """A complex number from a number, a ``[re, im]`` pair or a string such as ``"1-2j"``."""
    if isinstance(value, (list, tuple)):
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    return complex(value)


def parse_arrivals(text):
    """``a:b:n`` -> n evenly spaced points from a to b inclusive."""
    try:
        a, b, n = text.split(":")
        n = int(n)
        if n < 1:
            raise ValueError
        return [float(x) for x in np.linspace(float(a), float(b), n)]
    except ValueError:
        raise ConfigError(f"--arrivals expects a:b:n, got {text!r}", key="--arrivals") from None


def parse_config(data):
    """Validate a decoded JSON document and build a :class:`RunConfig`."""
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        key = _key_path(err)
        raise ConfigError(f"invalid config at '{key}': {err.message}", key=key)

    m = data["model"]
    try:
        model = ModelParams(
            tuple(PacketParams(p["x0"], p["v"], p["sigma0"]) for p in m["packets"]),
            m.get("hbar", 1.0),
            m.get("mass", 1.0),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid model: {exc}", key="model") from None
    try:
        grid = GridSpec(**data["grid"]) if "grid" in data else None
    except ValueError as exc:
        raise ConfigError(f"invalid grid: {exc}", key="grid") from None
    integrator = IntegratorOptions(**data.get("integrator", {}))
    traj = dict(data.get("trajectories", {}))
    if "launch_points" in traj:
        try:
            traj["launch_points"] = [parse_complex(v) for v in traj["launch_points"]]
        except ValueError:
            raise ConfigError("launch points must be complex numbers", key="trajectories.launch_points") from None
    iso = data.get("isochrone")
    if iso is not None and "arrival_range" in iso and "arrival_points" in iso:
        raise ConfigError("give either arrival_points or arrival_range", key="isochrone.arrival_range")
    sing = data.get("singularities", {})
    if "n_range" in sing and sing["n_range"][0] > sing["n_range"][1]:
        raise ConfigError("n_range must be increasing", key="singularities.n_range")
    if "t_range" in sing and not sing["t_range"][0] < sing["t_range"][1]:
        raise ConfigError("t_range must be increasing", key="singularities.t_range")
    return RunConfig(
        model=model,
        grid=grid,
        isochrone=iso,
        trajectories=traj,
        integrator=integrator,
        singularities=dict(sing),
        analytics=dict(data.get("analytics", {})),
        outputs=data.get("outputs"),
        raw=data,
    )


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})", key="<file>") from None
    return parse_config(data)


def head_on_config():
    """Head-on collision in atomic units (hbar = m = 1) with the default grid and a t* = 5 isochrone."""
    return {
        "model": {
            "packets": [
                {"x0": -10.0, "v": 2.0, "sigma0": math.sqrt(2.0)},
                {"x0": 10.0, "v": -2.0, "sigma0": math.sqrt(2.0)},
            ],
            "hbar": 1.0,
            "mass": 1.0,
        },
        "grid": {
            "x_min": -8.0, "x_max": 8.0, "nx": 201,
            "y_min": -4.0, "y_max": 4.0, "ny": 101,
            "t_min": 0.0, "t_max": 10.0, "nt": 101,
        },
        "isochrone": {"t_star": 5.0, "arrival_range": [-3.0, 3.0], "arrival_count": 40, "t_launch": 0.0, "t_end": 10.0},
        "trajectories": {"t0": 0.0, "t1": 10.0, "sample_dt": 0.005},
        "integrator": {"rel_tol": 1e-9, "abs_tol": 1e-11, "max_step": 0.01, "pole_guard": 1e-6},
        "singularities": {"n_range": [-4, 4], "t_range": [0.0, 10.0], "dt": 0.01},
        "analytics": {"theta_thresh": 10.0, "prominence": 0.05, "nodal_dt": 0.05, "t_max": 10.0},
    }

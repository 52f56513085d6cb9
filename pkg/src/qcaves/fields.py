"""|Psi| and |dPsi/dz| on a structured (x, y, t) grid, with VTK and CSV writers.

Volumes are stored as ``(nx, ny, nt)`` arrays; flattening in Fortran order
gives the on-disk ordering (x fastest, then y, then t).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import AllocationTooLarge
from .model import evaluate

__all__ = [
    "PSI_LEVEL",
    "DPSI_LEVEL",
    "GridSpec",
    "FieldVolume",
    "sample_grid",
    "write_vtk",
    "read_vtk",
    "write_csv",
    "slice_contours",
    "enclosed_by_contour",
]

# isosurface levels that show the vortical and stagnation tubes
PSI_LEVEL = 0.053
DPSI_LEVEL = 0.106

MAX_POINTS = 10**9
FIELDS = ("abs_psi", "abs_dpsi")


@dataclass(frozen=True)
class GridSpec:
    x_min: float = -8.0
    x_max: float = 8.0
    nx: int = 201
    y_min: float = -4.0
    y_max: float = 4.0
    ny: int = 101
    t_min: float = 0.0
    t_max: float = 10.0
    nt: int = 101

    def __post_init__(self):
        for axis in "xyt":
            lo, hi, n = getattr(self, f"{axis}_min"), getattr(self, f"{axis}_max"), getattr(self, f"n{axis}")
            if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
                raise ValueError(f"{axis}_max must exceed {axis}_min")
            if int(n) != n or n < 2:
                raise ValueError(f"n{axis} must be an integer >= 2")

    @property
    def shape(self):
        return (self.nx, self.ny, self.nt)

    @property
    def size(self):
        return self.nx * self.ny * self.nt

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def y(self):
        return np.linspace(self.y_min, self.y_max, self.ny)

    @property
    def t(self):
        return np.linspace(self.t_min, self.t_max, self.nt)

    @property
    def spacing(self):
        return (
            (self.x_max - self.x_min) / (self.nx - 1),
            (self.y_max - self.y_min) / (self.ny - 1),
            (self.t_max - self.t_min) / (self.nt - 1),
        )


@dataclass
class FieldVolume:
    spec: GridSpec
    abs_psi: np.ndarray
    abs_dpsi: np.ndarray

    def field(self, name):
        if name not in FIELDS:
            raise ValueError(f"unknown field {name!r}; expected one of {FIELDS}")
        return getattr(self, name)


def sample_grid(model, spec):
    """Evaluate |Psi| and |dPsi/dz| at every grid point, one t-slice at a time."""
    if spec.size > MAX_POINTS:
        raise AllocationTooLarge(f"{spec.size} grid points exceed the limit of {MAX_POINTS}")
    x, y, ts = spec.x, spec.y, spec.t
    z = x[:, None] + 1j * y[None, :]
    abs_psi = np.empty(spec.shape)
    abs_dpsi = np.empty(spec.shape)
    for k, t in enumerate(ts):
        w = evaluate(model, z, float(t))
        abs_psi[:, :, k] = np.abs(w.psi)
        abs_dpsi[:, :, k] = np.abs(w.dpsi)
    return FieldVolume(spec, abs_psi, abs_dpsi)


def _fmt(values):
    return ["%.9g" % v for v in values]


def write_vtk(volume, field, path, per_line=9):
    """Legacy ASCII VTK, DATASET STRUCTURED_POINTS, one scalar field."""
    data = volume.field(field).reshape(-1, order="F")
    spec = volume.spec
    level = PSI_LEVEL if field == "abs_psi" else DPSI_LEVEL
    dx, dy, dt = spec.spacing
    header = [
        "# vtk DataFile Version 3.0",
        f"qcaves {field} (x, y, t) volume; suggested isosurface level {level}",
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {spec.nx} {spec.ny} {spec.nt}",
        "ORIGIN " + " ".join(_fmt([spec.x_min, spec.y_min, spec.t_min])),
        "SPACING " + " ".join(_fmt([dx, dy, dt])),
        f"POINT_DATA {data.size}",
        f"SCALARS {field} double 1",
        "LOOKUP_TABLE default",
    ]
    text = _fmt(data)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(header))
        fh.write("\n")
        for start in range(0, len(text), per_line):
            fh.write(" ".join(text[start : start + per_line]))
            fh.write("\n")


def read_vtk(path):
    """Parse a file written by :func:`write_vtk` into ``(header, values)``.

    ``header`` holds ``dimensions``, ``origin``, ``spacing``, ``name`` and
    ``point_data``; ``values`` is the flat array in file order.
    """
    with open(path) as fh:
        lines = fh.read().split("\n")
    header = {}
    k = 0
    while k < len(lines):
        parts = lines[k].split()
        k += 1
        if not parts:
            continue
        key = parts[0]
        if key == "DIMENSIONS":
            header["dimensions"] = tuple(int(p) for p in parts[1:4])
        elif key == "ORIGIN":
            header["origin"] = tuple(float(p) for p in parts[1:4])
        elif key == "SPACING":
            header["spacing"] = tuple(float(p) for p in parts[1:4])
        elif key == "POINT_DATA":
            header["point_data"] = int(parts[1])
        elif key == "SCALARS":
            header["name"] = parts[1]
        elif key == "LOOKUP_TABLE":
            break
    values = np.array(" ".join(lines[k:]).split(), dtype=float)
    return header, values


def write_csv(volume, path):
    """Header ``x,y,t,abs_psi,abs_dpsi``; one row per grid point, x fastest."""
    spec = volume.spec
    xs = _fmt(spec.x)
    ys = _fmt(spec.y)
    ts = _fmt(spec.t)
    psi = _fmt(volume.abs_psi.reshape(-1, order="F"))
    dpsi = _fmt(volume.abs_dpsi.reshape(-1, order="F"))
    nx, ny = spec.nx, spec.ny
    with open(path, "w", newline="\n") as fh:
        fh.write("x,y,t,abs_psi,abs_dpsi\n")
        row = 0
        for k in range(spec.nt):
            for j in range(ny):
                prefix_y = "," + ys[j] + "," + ts[k] + ","
                fh.write(
                    "".join(
                        xs[i] + prefix_y + psi[row + i] + "," + dpsi[row + i] + "\n" for i in range(nx)
                    )
                )
                row += nx


def slice_contours(volume, field, level, t_index):
    """Marching-squares level lines of one t-slice as (N, 2) arrays of (x, y)."""
    import contourpy

    spec = volume.spec
    data = volume.field(field)[:, :, t_index]
    gen = contourpy.contour_generator(spec.x, spec.y, data.T)
    return gen.lines(level)


def enclosed_by_contour(lines, point):
    """True if ``point`` (complex) lies inside some closed level line."""
    from matplotlib.path import Path

    xy = (point.real, point.imag)
    for line in lines:
        if len(line) >= 4 and np.allclose(line[0], line[-1]) and Path(line).contains_point(xy):
            return True
    return False


def grid_as_dict(spec):
    return asdict(spec)

"""Complex quantum trajectories, quantum caves and nodal-line analytics for colliding Gaussian packets."""

__version__ = "0.1.0"

from .errors import ConfigError, NumericalError, QCavesError  # noqa: E402
from .model import ModelParams, PacketParams, evaluate, norm_on_real_axis, wave_scalar  # noqa: E402
from .qmf import flow_scalar, momentum, momentum_derivative, winding_count  # noqa: E402
from .trajectories import IntegratorOptions, Status, isochrone, propagate, separation_metrics  # noqa: E402
from .singularities import Kind, SymmetricPairParams, nodes_analytic, stagnation_points, track_curve  # noqa: E402
from .analytics import interference_lifetime, loop_count, nodal_angle, wrapping_interval  # noqa: E402
from .fields import GridSpec, sample_grid, write_vtk  # noqa: E402

__all__ = [
    "__version__",
    "ConfigError", "NumericalError", "QCavesError",
    "ModelParams", "PacketParams", "evaluate", "norm_on_real_axis", "wave_scalar",
    "flow_scalar", "momentum", "momentum_derivative", "winding_count",
    "IntegratorOptions", "Status", "isochrone", "propagate", "separation_metrics",
    "Kind", "SymmetricPairParams", "nodes_analytic", "stagnation_points", "track_curve",
    "interference_lifetime", "loop_count", "nodal_angle", "wrapping_interval",
    "GridSpec", "sample_grid", "write_vtk",
]

import csv
import math

import numpy as np
import pytest

from qcaves.errors import AllocationTooLarge
from qcaves.fields import (
    DPSI_LEVEL,
    PSI_LEVEL,
    GridSpec,
    enclosed_by_contour,
    read_vtk,
    sample_grid,
    slice_contours,
    write_csv,
    write_vtk,
)
from qcaves.model import ModelParams, evaluate
from qcaves.singularities import SymmetricPairParams, node_position

HEAD_ON = ModelParams.head_on()
SMALL = GridSpec(-4.0, 4.0, 21, -2.0, 2.0, 11, 0.0, 10.0, 5)


@pytest.fixture(scope="module")
def small_volume():
    return sample_grid(HEAD_ON, SMALL)


def test_grid_axes():
    spec = GridSpec()
    assert spec.shape == (201, 101, 101)
    assert spec.spacing == pytest.approx((0.08, 0.08, 0.1))
    assert spec.x[0] == -8.0 and spec.x[-1] == 8.0


@pytest.mark.parametrize("bad", [{"nx": 1}, {"x_min": 1.0, "x_max": 0.0}, {"t_max": math.inf}])
def test_grid_validation(bad):
    with pytest.raises(ValueError):
        GridSpec(**bad)


def test_allocation_guard():
    with pytest.raises(AllocationTooLarge):
        sample_grid(HEAD_ON, GridSpec(nx=2000, ny=1000, nt=1000))


def test_sample_grid_bitwise(small_volume):
    z = SMALL.x[:, None] + 1j * SMALL.y[None, :]
    for k, t in enumerate(SMALL.t):
        w = evaluate(HEAD_ON, z, float(t))
        assert np.array_equal(np.abs(w.psi), small_volume.abs_psi[:, :, k])
        assert np.array_equal(np.abs(w.dpsi), small_volume.abs_dpsi[:, :, k])


def test_unknown_field(small_volume):
    with pytest.raises(ValueError):
        small_volume.field("phase")


@pytest.mark.parametrize("field", ["abs_psi", "abs_dpsi"])
def test_vtk_round_trip(tmp_path, small_volume, field):
    path = tmp_path / f"{field}.vtk"
    write_vtk(small_volume, field, path)
    header, values = read_vtk(path)
    assert header["dimensions"] == SMALL.shape
    assert header["origin"] == (-4.0, -2.0, 0.0)
    assert header["spacing"] == pytest.approx(SMALL.spacing)
    assert header["point_data"] == SMALL.size
    assert header["name"] == field
    # x varies fastest, then y, then t
    back = values.reshape(SMALL.shape, order="F")
    data = small_volume.field(field)
    assert np.allclose(back, data, rtol=1e-8, atol=0)
    assert back[3, 7, 2] == pytest.approx(data[3, 7, 2], rel=1e-8)
    level = PSI_LEVEL if field == "abs_psi" else DPSI_LEVEL
    assert f"level {level}" in path.read_text().splitlines()[1]


def test_vtk_is_deterministic(tmp_path, small_volume):
    a, b = tmp_path / "a.vtk", tmp_path / "b.vtk"
    write_vtk(small_volume, "abs_psi", a)
    write_vtk(sample_grid(HEAD_ON, SMALL), "abs_psi", b)
    assert a.read_bytes() == b.read_bytes()


def test_csv_layout(tmp_path, small_volume):
    path = tmp_path / "f.csv"
    write_csv(small_volume, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "y", "t", "abs_psi", "abs_dpsi"]
    assert len(rows) == SMALL.size + 1
    i, j, k = 5, 3, 2
    row = rows[1 + i + SMALL.nx * (j + SMALL.ny * k)]
    assert float(row[0]) == pytest.approx(SMALL.x[i])
    assert float(row[1]) == pytest.approx(SMALL.y[j])
    assert float(row[2]) == pytest.approx(SMALL.t[k])
    assert float(row[3]) == pytest.approx(small_volume.abs_psi[i, j, k], rel=1e-8)
    assert float(row[4]) == pytest.approx(small_volume.abs_dpsi[i, j, k], rel=1e-8)


def test_inner_nodes_enclosed_at_t5():
    spec = GridSpec(t_min=5.0, t_max=6.0, nt=2)
    volume = sample_grid(HEAD_ON, spec)
    lines = slice_contours(volume, "abs_psi", PSI_LEVEL, 0)
    params = SymmetricPairParams()
    for n in range(-4, 4):
        assert enclosed_by_contour(lines, node_position(params, n, 5.0))
    # stagnation point at the origin sits in a region of large |Psi|
    assert not enclosed_by_contour(lines, 0j)


def test_enclosure_requires_closed_lines():
    open_line = np.array([[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    assert not enclosed_by_contour([open_line], 0j)
    assert enclosed_by_contour([np.vstack([open_line, open_line[:1]])], 0j)

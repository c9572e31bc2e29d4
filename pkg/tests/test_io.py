import math
from pathlib import Path

import numpy as np
import pytest

from tumorpen import load_config, run_simulation
from tumorpen.diagnostics import DiagnosticsRecord
from tumorpen.grid import make_grid
from tumorpen.io import (
    atomic_write,
    read_diagnostics,
    read_field_snapshot,
    write_diagnostics,
    write_field_snapshot,
)
from tumorpen.presets import InitialData, initial_state
from tumorpen.state import State

FIXTURES = Path(__file__).parent / "fixtures"


def test_empty_diagnostics_is_header_only(tmp_path):
    path = write_diagnostics([], tmp_path / "d.csv")
    assert path.read_text() == ",".join(DiagnosticsRecord.field_names()) + "\n"


def test_zero_record_row(tmp_path):
    path = write_diagnostics([DiagnosticsRecord(t=0.5)], tmp_path / "d.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[1] == "0.5," + ",".join(["0.0"] * (len(DiagnosticsRecord.field_names()) - 1))


def test_diagnostics_round_trip(tmp_path, rng):
    recs = [DiagnosticsRecord(*rng.standard_normal(len(DiagnosticsRecord.field_names()))) for _ in range(5)]
    path = write_diagnostics(recs, tmp_path / "d.csv")
    assert read_diagnostics(path) == recs


def test_zero_snapshot_grid_csv(tmp_path):
    g = make_grid(1.0, 8, 2)
    s = State.zeros(g, phi=g.zeros())
    lines = write_field_snapshot(s, tmp_path / "s.csv").read_text().splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    assert body[0] == "P,Q,D,C,v0,v1,m0,m1,phi"
    assert len(body) == 1 + 64
    assert all(set(row.split(",")) == {"0.0"} for row in body[1:])
    header = [ln for ln in lines if ln.startswith("#")]
    assert "# dimension = 2" in header and "# N = 8" in header and "# h = 0.5" in header


@pytest.mark.parametrize("dim", [2, 3])
def test_snapshot_round_trip_bit_identical(tmp_path, rng, dim):
    g = make_grid(0.7, 8, dim)
    s = initial_state(InitialData(tumor_radius=0.5), g)
    s.t = 0.123456789
    s.v = rng.standard_normal((dim,) + g.shape)
    s.m = s.rho * s.v
    back = read_field_snapshot(write_field_snapshot(s, tmp_path / "s.csv"))
    assert back.grid == g and back.t == s.t
    for name in ("P", "Q", "D", "C", "v", "m", "phi"):
        assert getattr(back, name).tobytes() == getattr(s, name).tobytes()


def test_vtk_legacy_structure(tmp_path):
    g = make_grid(1.0, 8, 2)
    s = initial_state(InitialData(tumor_radius=0.5), g)
    text = write_field_snapshot(s, tmp_path / "s.vtk", "vtk-legacy").read_text().splitlines()
    assert text[0] == "# vtk DataFile Version 3.0"
    assert text[3] == "DATASET STRUCTURED_POINTS"
    assert text[4] == "DIMENSIONS 9 9 1"
    assert "CELL_DATA 64" in text
    k = text.index("SCALARS phi double 1")
    values = np.array([float(x) for x in text[k + 2 : k + 2 + 64]])
    # x varies fastest
    np.testing.assert_array_equal(values.reshape(8, 8).T, s.phi)
    with pytest.raises(ValueError):
        write_field_snapshot(s, tmp_path / "s.h5", "hdf5")


def test_atomic_write_keeps_old_file_on_failure(tmp_path):
    path = tmp_path / "out.txt"
    path.write_text("old")

    with pytest.raises(TypeError):
        atomic_write(path, 12345)
    assert path.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


def test_golden_run_matches_fixture(tmp_path):
    result = run_simulation(load_config(FIXTURES / "golden.cfg"))
    a = write_diagnostics(result.records, tmp_path / "a.csv")
    expected = read_diagnostics(FIXTURES / "golden_diagnostics.csv")
    got = read_diagnostics(a)
    assert len(got) == len(expected)
    for r, e in zip(got, expected):
        for x, y in zip(r.values(), e.values()):
            assert math.isclose(x, y, rel_tol=1e-9, abs_tol=1e-15)


def test_golden_run_is_byte_identical(tmp_path):
    paths = []
    for name in ("a.csv", "b.csv"):
        result = run_simulation(load_config(FIXTURES / "golden.cfg"))
        paths.append(write_diagnostics(result.records, tmp_path / name))
    assert paths[0].read_bytes() == paths[1].read_bytes()

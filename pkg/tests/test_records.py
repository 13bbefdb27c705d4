import numpy as np
import pytest

from iontomo import fock, records, tomography
from iontomo.dynamics import DriveParams
from iontomo.tomography import QuadSpec

P = DriveParams(0.1, 1.0)
Q = QuadSpec(1.0, 0.5, 4)


def test_sampled_grid_round_trip(tmp_path):
    grid = tomography.simulate_scan(fock.fock_state(20, 1), tomography.scan_plan(P, Q), 50, 3, P)
    path = records.write_grid(tmp_path / "g.csv", grid, {"seed": 3, "params": P})
    back, meta = records.read_grid(path)
    assert meta["mode"] == "sampled" and meta["shots"] == 50
    assert meta["params"] == {"eta": 0.1, "omega_ratio": 1.0, "delta_ratio": 0.0}
    assert np.array_equal(back.counts, grid.counts)
    assert np.array_equal(back.k, grid.k) and np.array_equal(back.theta, grid.theta)


def test_exact_grid_round_trip_is_bit_exact(tmp_path):
    grid = tomography.exact_grid(fock.coherent_state(30, 0.3 + 0.2j), Q)
    back, _ = records.read_grid(records.write_grid(tmp_path / "g.csv", grid, {}))
    assert np.array_equal(back.chi(), grid.chi())


def test_header_layout(tmp_path):
    path = records.write_table(tmp_path / "t.csv", "summary", ("a", "b"), [(1, 0.5)], {"z": 1, "a": 2})
    lines = path.read_text().splitlines()
    assert lines[0] == "# iontomo summary v1"
    assert lines[1] == '# meta: {"a": 2, "z": 1}'
    assert lines[2] == "# columns: a,b"
    assert lines[3] == "1,0.5"


def test_density_matrix_round_trip(tmp_path):
    grid = tomography.exact_grid(fock.fock_state(20, 1), Q)
    res = tomography.reconstruct(grid, 6, Q, truth=fock.fock_state(20, 1))
    rho, meta = records.read_density_matrix(records.write_reconstruction(tmp_path / "r.csv", res, {}))
    assert np.array_equal(rho, res.rho.data)
    assert meta["n_out"] == 6 and meta["quadrature"] == Q.as_dict()
    assert meta["fidelity"] == res.fidelity_vs_truth


def test_wrong_kind_rejected(tmp_path):
    path = records.write_table(tmp_path / "t.csv", "summary", ("a",), [(1,)], {})
    with pytest.raises(ValueError):
        records.read_grid(path)
    with pytest.raises(ValueError):
        records.read_density_matrix(path)
    (tmp_path / "junk.csv").write_text("hello\n")
    with pytest.raises(ValueError):
        records.read_table(tmp_path / "junk.csv")


def test_complex_and_nonfinite_meta(tmp_path):
    path = records.write_table(tmp_path / "t.csv", "x", ("a",), [], {"c": 1 + 2j, "f": float("inf")})
    _, meta, _, rows = records.read_table(path)
    assert meta == {"c": [1.0, 2.0], "f": "inf"} and rows == []

import json

import numpy as np
import pytest

from iontomo import cli, records


def run(tmp_path, mode, cfg, *extra):
    path = tmp_path / f"{mode}.json"
    path.write_text(json.dumps(cfg))
    return cli.main([mode, "--config", str(path), *extra])


SMALL = {"grid": {"k_max": 3.0, "dk": 0.25, "n_theta": 8}, "dim": 30, "n_out": 10}


def test_roundtrip_writes_outputs(tmp_path, capsys):
    cfg = dict(SMALL, state={"kind": "coherent", "alpha": [0.3, 0.2]}, shots=2000, seed=1)
    assert run(tmp_path, "roundtrip", cfg, "--out", str(tmp_path / "o")) == 0
    out = tmp_path / "o"
    assert {p.name for p in out.iterdir()} == {"grid.csv", "reconstruction.csv", "summary.csv"}
    _, meta, cols, rows = records.read_table(out / "summary.csv")
    assert cols == ["state", "shots", "fidelity", "trace_error"]
    assert rows[0][0] == "coherent(0.3+0.2j)"
    assert float(rows[0][2]) > 0.9
    assert "wall_time" in capsys.readouterr().out


def test_min_fidelity_sets_exit_code(tmp_path):
    cfg = dict(SMALL, state={"kind": "fock", "n": 1}, shots=1, min_fidelity=0.999)
    assert run(tmp_path, "roundtrip", cfg, "--out", str(tmp_path / "o")) == 1


def test_scan_then_reconstruct(tmp_path):
    cfg = dict(SMALL, state={"kind": "even_cat", "alpha": 0.6}, grid=dict(SMALL["grid"], exact=True))
    assert run(tmp_path, "scan", cfg, "--out", str(tmp_path / "s")) == 0
    grid = tmp_path / "s" / "grid.csv"
    assert run(tmp_path, "reconstruct", cfg, "--grid", str(grid), "--out", str(tmp_path / "r")) == 0
    rho, meta = records.read_density_matrix(tmp_path / "r" / "reconstruction.csv")
    assert meta["fidelity"] > 0.95  # coarse mesh
    assert rho.shape == (10, 10)


def test_reconstruct_without_state_has_no_fidelity(tmp_path):
    cfg = dict(SMALL, state={"kind": "vacuum"}, grid=dict(SMALL["grid"], exact=True))
    run(tmp_path, "scan", cfg, "--out", str(tmp_path / "s"))
    cfg2 = {k: v for k, v in SMALL.items()}
    cfg2["grid"] = dict(SMALL["grid"], exact=True)
    assert run(tmp_path, "reconstruct", cfg2, "--grid", str(tmp_path / "s" / "grid.csv"), "--out", str(tmp_path / "r")) == 0
    _, meta = records.read_density_matrix(tmp_path / "r" / "reconstruction.csv")
    assert "fidelity" not in meta


def test_state_from_file(tmp_path):
    rho = np.diag([0.25, 0.75, 0.0]).astype(complex)
    records.write_density_matrix(tmp_path / "rho.csv", rho, {})
    cfg = dict(SMALL, state={"kind": "file", "path": str(tmp_path / "rho.csv")}, grid=dict(SMALL["grid"], exact=True))
    assert run(tmp_path, "roundtrip", cfg, "--out", str(tmp_path / "o")) == 0


def test_cat_outputs(tmp_path):
    cfg = {"params": {"eta": 0.1, "omega_ratio": 1.0}, "dim": 40}
    assert run(tmp_path, "cat", cfg, "--out", str(tmp_path / "c")) == 0
    names = {p.name for p in (tmp_path / "c").iterdir()}
    assert {"cat_summary.csv", "cat_post_state.csv", "cat_populations.csv"} <= names


def test_validate_small_sweep(tmp_path):
    cfg = {"validate": {"taus": [1.0, 3.0], "etas": [0.05], "omegas": [1.0], "dim": 40}}
    assert run(tmp_path, "validate", cfg, "--out", str(tmp_path / "v")) == 0
    report = json.loads((tmp_path / "v" / "validate_report.json").read_text())
    assert report["passed"]


@pytest.mark.parametrize(
    "cfg",
    [
        {"dim": 1},
        {"shots": 0},
        {"state": {"kind": "squeezed"}},
        {"prep": {"a": 0.5, "b": 0.5}},
        {"grid": {"k_max": 1.0, "dk": 0.3}},
        {"bogus": 1},
    ],
)
def test_config_errors_exit_2(tmp_path, cfg, capsys):
    assert run(tmp_path, "roundtrip", cfg, "--out", str(tmp_path / "o")) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "ConfigError"


def test_detuned_validate_is_structured_error(tmp_path, capsys):
    cfg = {"params": {"eta": 0.1, "omega_ratio": 1.0, "delta_ratio": 0.3}, "validate": {"closed_form": True}}
    assert run(tmp_path, "validate", cfg, "--out", str(tmp_path / "v")) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert "detuning" in err["message"].lower() or "delta" in err["message"].lower()


def test_mode_mismatch(tmp_path):
    assert run(tmp_path, "scan", {"mode": "cat"}) == 2

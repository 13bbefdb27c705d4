"""Delimiter-separated text records with self-describing headers.

Every file starts with three comment lines::

    # iontomo <kind> v1
    # meta: {...JSON, sorted keys...}
    # columns: c1,c2,...

followed by comma-separated UTF-8 rows. Floats are written with ``repr`` so
values round-trip exactly and reruns are byte-identical.

Grid files (``kind = chargrid``)
    sampled mode: ``k,theta,prep_id,shots,count,p_hat`` (prep_id is ``cos``
    or ``sin``, two rows per point); exact mode: ``k,theta,re_chi,im_chi``.
    ``meta`` carries ``mode`` plus params, tau, seed and the run config.
Reconstruction files (``kind = densitymatrix``)
    ``row,col,re,im``; ``meta`` carries ``n_out``, the quadrature spec,
    ``trace_error``, ``hermiticity_error`` and ``fidelity`` when known.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .tomography import PREP_IDS, CharFnGrid, ReconstructionResult

VERSION = "v1"
GRID_SAMPLED_COLUMNS = ("k", "theta", "prep_id", "shots", "count", "p_hat")
GRID_EXACT_COLUMNS = ("k", "theta", "re_chi", "im_chi")
DM_COLUMNS = ("row", "col", "re", "im")


def _jsonable(obj):
    if is_dataclass(obj):
        return {k: _jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_table(path, kind: str, columns: Sequence[str], rows: Iterable, meta: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# iontomo {kind} {VERSION}\n")
        fh.write("# meta: " + json.dumps(_jsonable(meta), sort_keys=True) + "\n")
        fh.write("# columns: " + ",".join(columns) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_table(path):
    """Return ``(kind, meta, columns, rows)`` with rows as lists of strings."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    if len(lines) < 3 or not lines[0].startswith("# iontomo "):
        raise ValueError(f"{path}: not an iontomo record file")
    kind = lines[0].split()[2]
    meta = json.loads(lines[1].split(":", 1)[1])
    columns = lines[2].split(":", 1)[1].strip().split(",")
    rows = list(csv.reader(lines[3:]))
    return kind, meta, columns, rows


def write_grid(path, grid: CharFnGrid, meta: dict) -> Path:
    meta = dict(meta, mode=grid.mode)
    if grid.mode == "exact":
        chi = grid.chi()
        rows = ((k, t, c.real, c.imag) for k, t, c in zip(grid.k, grid.theta, chi))
        return write_table(path, "chargrid", GRID_EXACT_COLUMNS, rows, meta)
    meta["shots"] = grid.shots

    def rows():
        for k, t, cnt in zip(grid.k, grid.theta, grid.counts):
            for pid, c in zip(PREP_IDS, cnt):
                yield (k, t, pid, grid.shots, int(c), c / grid.shots)

    return write_table(path, "chargrid", GRID_SAMPLED_COLUMNS, rows(), meta)


def read_grid(path):
    """Return ``(CharFnGrid, meta)`` from a grid file."""
    kind, meta, columns, rows = read_table(path)
    if kind != "chargrid":
        raise ValueError(f"{path}: expected a chargrid file, got {kind}")
    if meta.get("mode") == "exact":
        arr = np.array([[float(x) for x in r] for r in rows]).reshape(-1, 4)
        grid = CharFnGrid("exact", arr[:, 0], arr[:, 1], chi_values=arr[:, 2] + 1j * arr[:, 3])
        return grid, meta
    ks, ts, counts = [], [], []
    shots = None
    for i in range(0, len(rows), 2):
        pair = rows[i : i + 2]
        if len(pair) != 2 or [r[2] for r in pair] != list(PREP_IDS):
            raise ValueError(f"{path}: malformed sampled rows near line {i + 4}")
        ks.append(float(pair[0][0]))
        ts.append(float(pair[0][1]))
        counts.append([int(pair[0][4]), int(pair[1][4])])
        shots = int(pair[0][3])
    grid = CharFnGrid(
        "sampled", ks, ts, counts=np.array(counts, dtype=np.int64).reshape(-1, 2), shots=shots or 0
    )
    return grid, meta


def write_density_matrix(path, rho: np.ndarray, meta: dict) -> Path:
    n = rho.shape[0]
    rows = ((i, j, rho[i, j].real, rho[i, j].imag) for i in range(n) for j in range(n))
    return write_table(path, "densitymatrix", DM_COLUMNS, rows, dict(meta, n_out=n))


def write_reconstruction(path, result: ReconstructionResult, meta: dict) -> Path:
    info = dict(
        meta,
        quadrature=result.grid_spec.as_dict(),
        trace_error=result.trace_error,
        hermiticity_error=result.hermiticity_error,
        min_eigenvalue=result.min_eigenvalue,
        quadrature_estimate=result.quadrature_estimate,
        warnings=list(result.warnings),
    )
    if result.fidelity_vs_truth is not None:
        info["fidelity"] = result.fidelity_vs_truth
    return write_density_matrix(path, result.rho.data, info)


def read_density_matrix(path):
    kind, meta, columns, rows = read_table(path)
    if kind != "densitymatrix":
        raise ValueError(f"{path}: expected a densitymatrix file, got {kind}")
    n = int(meta["n_out"])
    rho = np.zeros((n, n), complex)
    for r in rows:
        rho[int(r[0]), int(r[1])] = float(r[2]) + 1j * float(r[3])
    return rho, meta

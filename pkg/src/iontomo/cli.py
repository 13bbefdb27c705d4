"""Command-line driver.

    iontomo validate|cat|scan|reconstruct|roundtrip [--config FILE] [flags]

The configuration file is JSON; command-line flags override its values.
Exit status: 0 success, 1 a check or tolerance failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import catgen, dynamics, fock, records, tomography
from .dynamics import AtomPrep, DriveParams
from .errors import ClosedFormNotApplicable, ConfigError, IonTomoError
from .fock import IonState

log = logging.getLogger("iontomo")

MODES = ("validate", "cat", "scan", "reconstruct", "roundtrip")
STATE_KINDS = ("vacuum", "fock", "coherent", "even_cat", "odd_cat", "file")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _complex(v, name: str) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    try:
        return complex(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a number or [re, im], got {v!r}") from None


@dataclass
class ExperimentConfig:
    mode: str
    params: DriveParams = field(default_factory=lambda: DriveParams(0.1, 1.0))
    prep: AtomPrep = field(default_factory=AtomPrep.ground)
    state: Optional[dict] = None
    grid: dict = field(default_factory=dict)
    shots: int = 10_000
    seed: int = 0
    dim: int = 64
    n_out: int = 24
    out: str = "out"
    psd_repair: bool = False
    workers: int = 1
    cat: dict = field(default_factory=dict)
    validate: dict = field(default_factory=dict)
    grid_file: Optional[str] = None
    min_fidelity: Optional[float] = None

    def quad(self) -> tomography.QuadSpec:
        g = self.grid
        return tomography.QuadSpec(
            float(g.get("k_max", 6.0)), float(g.get("dk", 0.1)), int(g.get("n_theta", 40))
        )

    def resolved(self) -> dict:
        """Plain-JSON view embedded in every output header.

        ``out`` and ``workers`` are left out: they do not change results, and
        keeping them would break byte-identity between equivalent runs.
        """
        d = records._jsonable(self)
        d.pop("out")
        d.pop("workers")
        return d


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def build_config(mode: str, raw: dict, overrides: dict) -> ExperimentConfig:
    raw = dict(raw)
    raw.update({k: v for k, v in overrides.items() if v is not None})
    unknown = set(raw) - set(ExperimentConfig.__dataclass_fields__) - {"mode"}
    _check(not unknown, f"unknown configuration keys: {sorted(unknown)}")
    try:
        p = raw.get("params", {})
        params = DriveParams(
            float(p.get("eta", 0.1)),
            float(p.get("omega_ratio", 1.0)),
            float(p.get("delta_ratio", 0.0)),
        )
        pr = raw.get("prep", {})
        a, b = float(pr.get("a", 1.0)), float(pr.get("b", 0.0))
        _check(abs(a * a + b * b - 1.0) <= 1e-9, f"prep: A^2 + B^2 = {a * a + b * b}, expected 1")
        norm = np.hypot(a, b)
        prep = AtomPrep(a / norm, b / norm, float(pr.get("phase", 0.0)))
    except (TypeError, ValueError, IonTomoError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None

    cfg = ExperimentConfig(
        mode=mode,
        params=params,
        prep=prep,
        state=dict(raw["state"]) if raw.get("state") is not None else None,
        grid=dict(raw.get("grid", {})),
        shots=int(raw.get("shots", 10_000)),
        seed=int(raw.get("seed", 0)),
        dim=int(raw.get("dim", 64)),
        n_out=int(raw.get("n_out", 24)),
        out=str(raw.get("out", "out")),
        psd_repair=bool(raw.get("psd_repair", False)),
        workers=int(raw.get("workers", 1)),
        cat=dict(raw.get("cat", {})),
        validate=dict(raw.get("validate", {})),
        grid_file=raw.get("grid_file"),
        min_fidelity=raw.get("min_fidelity"),
    )
    _check(cfg.dim >= 2, f"dim must be >= 2, got {cfg.dim}")
    _check(cfg.n_out >= 2, f"n_out must be >= 2, got {cfg.n_out}")
    _check(cfg.shots >= 1, f"shots must be >= 1, got {cfg.shots}")
    _check(cfg.workers >= 1, f"workers must be >= 1, got {cfg.workers}")
    kind = (cfg.state or {}).get("kind", "vacuum")
    _check(kind in STATE_KINDS, f"state.kind must be one of {STATE_KINDS}, got {kind!r}")
    try:
        cfg.quad()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def make_state(spec: Optional[dict], n: int) -> IonState:
    spec = spec or {}
    kind = spec.get("kind", "vacuum")
    if kind == "vacuum":
        return fock.vacuum(n)
    if kind == "fock":
        return fock.fock_state(n, int(spec.get("n", 0)))
    if kind == "coherent":
        return fock.coherent_state(n, _complex(spec.get("alpha", 0.0), "state.alpha"))
    if kind in ("even_cat", "odd_cat"):
        return catgen.even_odd_cat(n, _complex(spec.get("alpha", 1.0), "state.alpha"), kind[:-4])
    if kind == "file":
        rho, _ = records.read_density_matrix(spec["path"])
        m = rho.shape[0]
        _check(m <= n, f"state file has {m} levels, more than dim={n}")
        return IonState.density(tomography._pad(rho, n), fock.vib_space(n))
    raise ConfigError(f"unknown state kind {kind!r}")


# ---------------------------------------------------------------------------
# subcommands


def _default_taus():
    return list(np.linspace(2 * np.pi / 12, 2 * np.pi, 12))


def run_validate(cfg: ExperimentConfig) -> int:
    v = cfg.validate
    taus = [float(t) for t in v.get("taus", _default_taus())]
    etas = [float(e) for e in v.get("etas", [0.01, 0.05, 0.1])]
    omegas = [float(o) for o in v.get("omegas", [0.5, 2.0, 5.0])]
    n = int(v.get("dim", 96))
    margin_spec = v.get("margin", "auto")
    tol = float(v.get("tolerance", 1e-7))
    out = Path(cfg.out)
    report: dict[str, Any] = {"config": cfg.resolved(), "checks": {}}

    if v.get("closed_form", True) and not cfg.params.resonant:
        err = ClosedFormNotApplicable(
            f"closed-form propagator requires Delta = 0; config has delta_ratio = {cfg.params.delta_ratio}"
        )
        report["error"] = {"type": type(err).__name__, "precondition": "delta_ratio == 0", "message": str(err)}
        _write_json(out / "validate_report.json", report)
        print(json.dumps(report["error"]), file=sys.stderr)
        return EXIT_CONFIG

    sweep = []
    for eta in etas:
        for om in omegas:
            p = DriveParams(eta, om)
            margin = dynamics.truncation_margin(p, n) if margin_spec == "auto" else int(margin_spec)
            for tau in taus:
                d = dynamics.propagator_pair(p, tau, n, margin).discrepancy
                sweep.append({"eta": eta, "omega_ratio": om, "tau": tau, "margin": margin, "discrepancy": d})
    max_d = max(s["discrepancy"] for s in sweep)
    report["checks"]["propagator_equivalence"] = {
        "passed": max_d <= tol,
        "tolerance": tol,
        "max_discrepancy": max_d,
        "dim": n,
        "margin": margin_spec,
        "tau_grid": taus,
        "eta_grid": etas,
        "omega_grid": omegas,
        "points": sweep,
    }

    rng = np.random.default_rng(cfg.seed)
    trials = int(v.get("keystone_trials", 20))
    kn = int(v.get("keystone_dim", 48))
    worst = 0.0
    for _ in range(trials):
        rho = _random_density(rng, 8, kn)
        s = rng.uniform()
        prep = AtomPrep(np.sqrt(s), np.sqrt(1 - s), rng.uniform(0, 2 * np.pi))
        p = DriveParams(0.05, rng.uniform(0.5, 4.0))
        tau = rng.uniform(0.1, 2 * np.pi - 0.1)
        closed = tomography.ground_probability(p, tau, prep, rho)
        full = dynamics.evolve(p, tau, prep, rho, method="oracle")
        worst = max(worst, abs(closed - catgen.branch_probabilities(full)[0]))
    report["checks"]["ground_probability_keystone"] = {
        "passed": worst <= 1e-9,
        "tolerance": 1e-9,
        "max_discrepancy": worst,
        "trials": trials,
    }
    ok = all(c["passed"] for c in report["checks"].values())
    report["passed"] = ok
    _write_json(out / "validate_report.json", report)
    for name, c in report["checks"].items():
        print(f"{'PASS' if c['passed'] else 'FAIL'} {name} max={c['max_discrepancy']:.3e} tol={c['tolerance']:g}")
    return EXIT_OK if ok else EXIT_FAIL


def _random_density(rng, rank_dim: int, n: int) -> IonState:
    a = rng.normal(size=(rank_dim, rank_dim)) + 1j * rng.normal(size=(rank_dim, rank_dim))
    r = a @ a.conj().T
    r /= np.trace(r)
    return IonState.density(tomography._pad(r, n), fock.vib_space(n))


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(records._jsonable(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def run_cat(cfg: ExperimentConfig) -> int:
    c = cfg.cat
    alpha0 = _complex(c.get("alpha0", 0.0), "cat.alpha0")
    run = catgen.cat_protocol(
        cfg.params, alpha0, int(c.get("q", 0)), str(c.get("want", "G")), cfg.dim
    )
    out = Path(cfg.out)
    meta = {"config": cfg.resolved()}
    first, second = run.target.components
    records.write_table(
        out / "cat_summary.csv",
        "catsummary",
        ("outcome", "probability", "p_g", "p_e", "fidelity", "tau", "alpha_cat",
         "comp1_re", "comp1_im", "comp2_re", "comp2_im"),
        [(run.outcome.result, run.outcome.probability, run.p_g, run.p_e, run.fidelity, run.tau,
          run.target.alpha_cat, first.real, first.imag, second.real, second.imag)],
        meta,
    )
    rho = run.outcome.post_state.dm()
    records.write_density_matrix(out / "cat_post_state.csv", rho, meta)
    pops = np.real(np.diag(rho))
    records.write_table(
        out / "cat_populations.csv", "populations", ("n", "population"), enumerate(pops), meta
    )
    print(
        f"outcome={run.outcome.result} probability={run.outcome.probability:.10f} "
        f"fidelity={run.fidelity:.12f}"
    )
    if cfg.min_fidelity is not None and run.fidelity < float(cfg.min_fidelity):
        return EXIT_FAIL
    return EXIT_OK


def _scan(cfg: ExperimentConfig, truth: IonState) -> tomography.CharFnGrid:
    quad = cfg.quad()
    if cfg.grid.get("exact", False):
        return tomography.exact_grid(truth, quad)
    tau = float(cfg.grid.get("tau", np.pi))
    bounds = (0.0, float(cfg.grid.get("omega_max", np.inf)))
    plan = tomography.scan_plan(cfg.params, quad, tau, bounds)
    return tomography.simulate_scan(
        truth, plan, cfg.shots, cfg.seed, cfg.params, workers=cfg.workers, omega_bounds=bounds
    )


def _grid_meta(cfg: ExperimentConfig) -> dict:
    return {
        "config": cfg.resolved(),
        "params": cfg.params,
        "tau": float(cfg.grid.get("tau", np.pi)),
        "seed": cfg.seed,
    }


def run_scan(cfg: ExperimentConfig) -> int:
    truth = make_state(cfg.state, cfg.dim)
    grid = _scan(cfg, truth)
    path = records.write_grid(Path(cfg.out) / "grid.csv", grid, _grid_meta(cfg))
    print(f"wrote {len(grid)} points to {path}")
    return EXIT_OK


def run_reconstruct(cfg: ExperimentConfig) -> int:
    _check(cfg.grid_file is not None, "reconstruct needs grid_file (or --grid)")
    grid, _ = records.read_grid(cfg.grid_file)
    truth = make_state(cfg.state, cfg.dim) if cfg.state is not None else None
    res = tomography.reconstruct(grid, cfg.n_out, cfg.quad(), psd_repair=cfg.psd_repair, truth=truth)
    path = records.write_reconstruction(
        Path(cfg.out) / "reconstruction.csv", res, {"config": cfg.resolved()}
    )
    print(f"wrote {path} trace_error={res.trace_error:.3e}")
    return EXIT_OK


def run_roundtrip(cfg: ExperimentConfig) -> int:
    t0 = time.perf_counter()
    truth = make_state(cfg.state, cfg.dim)
    grid = _scan(cfg, truth)
    res = tomography.reconstruct(grid, cfg.n_out, cfg.quad(), psd_repair=cfg.psd_repair, truth=truth)
    out = Path(cfg.out)
    meta = {"config": cfg.resolved()}
    records.write_grid(out / "grid.csv", grid, _grid_meta(cfg))
    records.write_reconstruction(out / "reconstruction.csv", res, meta)
    label = _state_label(cfg.state)
    shots = "exact" if grid.mode == "exact" else cfg.shots
    records.write_table(
        out / "summary.csv",
        "summary",
        ("state", "shots", "fidelity", "trace_error"),
        [(label, shots, res.fidelity_vs_truth, res.trace_error)],
        meta,
    )
    wall = time.perf_counter() - t0
    print(
        f"state={label} shots={shots} fidelity={res.fidelity_vs_truth:.6f} "
        f"trace_error={res.trace_error:.3e} wall_time={wall:.2f}s"
    )
    for w in res.warnings:
        log.warning(w)
    if cfg.min_fidelity is not None and res.fidelity_vs_truth < float(cfg.min_fidelity):
        return EXIT_FAIL
    return EXIT_OK


def _state_label(spec: Optional[dict]) -> str:
    spec = spec or {}
    kind = spec.get("kind", "vacuum")
    if kind == "fock":
        return f"fock({int(spec.get('n', 0))})"
    if kind in ("coherent", "even_cat", "odd_cat"):
        a = _complex(spec.get("alpha", 1.0 if "cat" in kind else 0.0), "state.alpha")
        return f"{kind}({a.real:g}{a.imag:+g}j)"
    return kind


RUNNERS = {
    "validate": run_validate,
    "cat": run_cat,
    "scan": run_scan,
    "reconstruct": run_reconstruct,
    "roundtrip": run_roundtrip,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iontomo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        sp = sub.add_parser(mode)
        sp.add_argument("--config", type=Path, help="JSON configuration file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--dim", type=int, help="Fock dimension for simulation")
        sp.add_argument("--shots", type=int)
        sp.add_argument("--out", type=str, help="output directory")
        sp.add_argument("--psd-repair", action="store_true", default=None)
        sp.add_argument("--workers", type=int)
        if mode == "reconstruct":
            sp.add_argument("--grid", dest="grid_file", type=str, help="grid file to invert")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        raw = {}
        if args.config is not None:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
            if raw.get("mode", args.mode) != args.mode:
                raise ConfigError(f"config mode {raw['mode']!r} does not match subcommand {args.mode!r}")
        overrides = {
            "seed": args.seed,
            "dim": args.dim,
            "shots": args.shots,
            "out": args.out,
            "psd_repair": args.psd_repair,
            "workers": args.workers,
            "grid_file": getattr(args, "grid_file", None),
        }
        cfg = build_config(args.mode, raw, overrides)
    except (ConfigError, json.JSONDecodeError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    try:
        return RUNNERS[args.mode](cfg)
    except ConfigError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    except IonTomoError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

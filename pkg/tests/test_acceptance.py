"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v``; the summary
lines appear in a final "acceptance criteria" section.
"""

import filecmp
import json
import warnings

import numpy as np
import pytest

from iontomo import catgen, cli, dynamics, fock, tomography
from iontomo.dynamics import AtomPrep, DriveParams
from iontomo.metrics import fidelity, trace_distance
from iontomo.tomography import QuadSpec

from conftest import ACCEPTANCE_LINES, random_density, random_pure


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def random_prep(rng):
    a = rng.uniform(0.0, 1.0)
    return AtomPrep(a, np.sqrt(1 - a * a), rng.uniform(0, 2 * np.pi))


def projective_pg(params, tau, prep, rho, tau0=0.0):
    vib = dynamics.free_evolution(rho, tau0)
    with warnings.catch_warnings():
        warnings.simplefilter("error", dynamics.TruncationWarning)
        out = dynamics.evolve(params, tau, prep, vib, method="oracle")
    n = rho.dim
    return float(np.trace(out.dm()[:n, :n]).real)


def test_criterion_1_propagator_equivalence():
    taus = np.linspace(2 * np.pi / 12, 2 * np.pi, 12)
    worst, where = 0.0, None
    for eta in (0.01, 0.05, 0.1):
        for omega in (0.5, 2.0, 5.0):
            p = DriveParams(eta, omega)
            for tau in taus:
                d = dynamics.propagator_pair(p, tau, 96, margin=8).discrepancy
                if d > worst:
                    worst, where = d, (eta, omega, round(tau, 3))
    report(1, worst <= 1e-7, f"max bulk discrepancy {worst:.3e} (tol 1e-7) at eta, Omega/nu, tau = {where}")


def test_criterion_2_hyperbolic_structure(rng):
    worst = 0.0
    for _ in range(20):
        p = DriveParams(rng.uniform(0.01, 0.1), rng.uniform(0.5, 5.0))
        tau = rng.uniform(0.0, 2 * np.pi)
        prep = random_prep(rng)
        vib = random_pure(rng, 64, support=6)
        out, comps = dynamics.evolve(p, tau, prep, vib, components=True)
        direct = dynamics.exact_propagator(p, tau, 64).matrix @ fock.product_state(prep.ket(), vib).data
        worst = max(worst, np.abs(dynamics.assemble(prep, comps).data - direct).max())
        worst = max(worst, np.abs(out.data - direct).max())
    report(2, worst <= 1e-10, f"max reassembly error {worst:.3e} over 20 inputs (tol 1e-10)")


def test_criterion_3_cat_generation():
    p = DriveParams(0.1, 1.0)
    g = catgen.cat_protocol(p, 0.0, 0, "G", 64)
    e = catgen.cat_protocol(p, 0.0, 0, "E", 64)
    alpha = 2 * p.coupling
    fg = fidelity(catgen.even_odd_cat(64, alpha, "even"), g.outcome.post_state)
    fe = fidelity(catgen.even_odd_cat(64, alpha, "odd"), e.outcome.post_state)
    x = np.exp(-2 * alpha**2)
    perr = max(abs(g.p_g - 0.5 * (1 + x)), abs(g.p_e - 0.5 * (1 - x)))
    overlap = abs(np.vdot(g.outcome.post_state.data, e.outcome.post_state.data))
    ok = fg >= 1 - 1e-7 and fe >= 1 - 1e-7 and perr <= 1e-9 and overlap <= 1e-10
    report(3, ok, f"1-F_even {1 - fg:.1e}, 1-F_odd {1 - fe:.1e}, prob error {perr:.1e}, overlap {overlap:.1e}")


def test_criterion_4_ground_probability_keystone(rng):
    worst = 0.0
    for i in range(20):
        n = 48
        if i % 2:
            rho = random_density(rng, n, rank=3, support=6)
        else:
            rho = random_pure(rng, n, support=6)
        p = DriveParams(rng.uniform(0.01, 0.1), rng.uniform(0.5, 5.0))
        tau = rng.uniform(0.05, 2 * np.pi - 0.05)
        prep = random_prep(rng)
        closed = tomography.ground_probability(p, tau, prep, rho)
        worst = max(worst, abs(closed - projective_pg(p, tau, prep, rho)))
    report(4, worst <= 1e-9, f"max |P_g closed - projective| {worst:.3e} over 20 triples, half mixed (tol 1e-9)")


def test_criterion_5_characteristic_identities(rng):
    from scipy.special import eval_laguerre

    rho = random_density(rng, 50, support=8)
    errs = {"chi(0)": 0.0, "conj": 0.0, "shift": 0.0, "laguerre": 0.0}
    for _ in range(25):
        k, th = rng.uniform(-5, 5), rng.uniform(0, 2 * np.pi)
        c = tomography.char_fn_exact(rho, k, th)
        errs["chi(0)"] = max(errs["chi(0)"], abs(tomography.char_fn_exact(rho, 0.0, th) - 1))
        errs["conj"] = max(errs["conj"], abs(tomography.char_fn_exact(rho, -k, th) - np.conj(c)))
        errs["shift"] = max(
            errs["shift"],
            abs(tomography.char_fn_exact(rho, k, th + np.pi) - tomography.char_fn_exact(rho, -k, th)),
        )
    for m in range(6):
        state = fock.fock_state(64, m)
        for k in np.linspace(0, 6, 13):
            ref = eval_laguerre(m, k * k) * np.exp(-k * k / 2)
            got = tomography.char_fn_exact(state, k, rng.uniform(0, np.pi))
            errs["laguerre"] = max(errs["laguerre"], abs(got - ref))
    ok = errs["chi(0)"] <= 1e-12 and errs["conj"] <= 1e-12 and errs["shift"] <= 1e-12 and errs["laguerre"] <= 1e-9
    report(5, ok, ", ".join(f"{k} {v:.1e}" for k, v in errs.items()))


def test_criterion_6_noiseless_round_trip():
    n = 64
    states = {
        "vacuum": fock.vacuum(n),
        "fock1": fock.fock_state(n, 1),
        "coherent1": fock.coherent_state(n, 1.0),
        "even_cat1": catgen.even_odd_cat(n, 1.0, "even"),
    }
    parts, ok = [], True
    for name, s in states.items():
        res = tomography.reconstruct(tomography.exact_grid(s), 24, truth=s)
        ok &= res.fidelity_vs_truth >= 0.99 and res.trace_error <= 1e-2
        parts.append(f"{name} F={res.fidelity_vs_truth:.5f} tr_err={res.trace_error:.1e}")
    report(6, ok, "; ".join(parts))


def test_criterion_7_sampled_reconstruction():
    n = 64
    truth = fock.fock_state(n, 1)
    p = DriveParams(0.1, 1.0)
    plan = tomography.scan_plan(p)
    shots_list = (100, 1000, 10_000)
    mean_td, mean_f = {}, None
    for shots in shots_list:
        tds, fs = [], []
        for seed in range(10):
            grid = tomography.simulate_scan(truth, plan, shots, seed, p)
            res = tomography.reconstruct(grid, 24, truth=truth)
            tds.append(trace_distance(tomography._match_dim(truth, 24), res.rho))
            fs.append(res.fidelity_vs_truth)
        mean_td[shots] = np.mean(tds)
        if shots == 10_000:
            mean_f = float(np.mean(fs))
    slope = np.polyfit(np.log(shots_list), np.log([mean_td[s] for s in shots_list]), 1)[0]
    ok = mean_f >= 0.95 and abs(slope + 0.5) <= 0.15
    report(7, ok, f"mean F at 1e4 shots {mean_f:.4f} (>= 0.95), trace-distance slope {slope:.3f} (-0.5 +/- 0.15)")


def test_criterion_8_control_map(rng):
    p = DriveParams(0.1, 1.7)
    taus = rng.uniform(0, 2 * np.pi, 100)
    k_err = th_err = 0.0
    for tau in taus:
        k, th = tomography.controls_to_kt(p, tau)
        k_err = max(k_err, abs(k - 4 * p.coupling * np.sin(tau / 2)))
        th_err = max(th_err, abs(tomography.theta_base(tau) + tau / 2))
    shift_err = 0.0
    rho = random_density(rng, 40, rank=2, support=5)
    for _ in range(10):
        tau, tau0 = rng.uniform(0.1, 2 * np.pi - 0.1), rng.uniform(0, 2 * np.pi)
        k, th = tomography.controls_to_kt(p, tau, tau0)
        k0, th0 = tomography.controls_to_kt(p, tau)
        assert abs(tomography.wrap_angle(th - th0 - tau0)) < 1e-12
        pc = projective_pg(p, tau, tomography.COS_PREP, rho, tau0)
        ps = projective_pg(p, tau, tomography.SIN_PREP, rho, tau0)
        measured = tomography.char_fn_from_pg(pc, ps)
        shift_err = max(shift_err, abs(measured - tomography.char_fn_exact(rho, k, th)))
    ok = k_err <= 1e-12 and th_err <= 1e-12 and shift_err <= 1e-10
    report(8, ok, f"k error {k_err:.1e}, theta_base error {th_err:.1e}, free-evolution chi error {shift_err:.1e}")


def test_criterion_9_determinism(tmp_path):
    cfg = {
        "state": {"kind": "even_cat", "alpha": 1.0},
        "shots": 2000,
        "seed": 42,
        "dim": 48,
        "n_out": 16,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    dirs = []
    for i, workers in enumerate((1, 4)):
        out = tmp_path / f"run{i}"
        assert cli.main(["roundtrip", "--config", str(path), "--out", str(out), "--workers", str(workers)]) == 0
        dirs.append(out)
    names = sorted(p.name for p in dirs[0].iterdir())
    match, mismatch, errors = filecmp.cmpfiles(dirs[0], dirs[1], names, shallow=False)
    ok = bool(names) and not mismatch and not errors
    report(9, ok, f"{len(match)}/{len(names)} files byte-identical across runs with 1 and 4 workers")

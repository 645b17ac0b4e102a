"""Acceptance suite: one test per primary criterion, each printing a
pass/fail line.  Run with ``pytest tests/test_acceptance.py -v -s``."""

import csv
import math
import time

import numpy as np
from scipy import stats as sps

from entwit import check, cli, oracle
from entwit.gates import CoarseParams, lambda_sets
from entwit.protocols import (backaction_fidelity, optimize_block_size,
                              p2_outcome_probability, simulate_p0, simulate_p1,
                              simulate_p2, simulate_p3, witness_rule, p2_params)
from entwit.resources import YieldCurve, hashing_yield
from entwit.states import Family, binary_entropy, make_state
from entwit.stats import (BinomialFailModel, CounterDifferenceModel,
                          build_sigma, discrimination_rule,
                          success_probability_discriminate,
                          success_probability_witness)


def _report(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion {num}: {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {num}: {name} {detail}"


def test_criterion_01_p0_p1_equivalence():
    start = time.perf_counter()
    grid = np.linspace(0.0, 1.0, 101)
    worst_pmf = 0.0
    worst_ps = 0.0
    for n in (10, 20, 40):
        m0 = BinomialFailModel(n, 1.0)
        m1 = CounterDifferenceModel(n, n + 1, Family.AMPLITUDE_DAMPING)
        r0 = build_sigma(m0, 0.95, 0.5)
        r1 = build_sigma(m1, 0.95, 0.5)
        for f in grid:
            f = float(f)
            worst_pmf = max(worst_pmf, float(np.abs(m0.pmf(f) - m1.pmf(f)).max()))
            worst_ps = max(worst_ps, abs(success_probability_witness(f, r0)
                                         - success_probability_witness(f, r1)))
    elapsed = time.perf_counter() - start
    _report(1, "p0/p1 statistic and success equivalence",
            worst_pmf < 1e-12 and worst_ps < 1e-12 and elapsed < 1.0,
            f"pmf diff {worst_pmf:.2e}, Ps diff {worst_ps:.2e}, {elapsed:.2f}s")


def test_criterion_02_discrimination_saturation():
    start = time.perf_counter()
    pairs = [(f1, f2) for f1 in np.linspace(0.2, 1.0, 9)
             for f2 in np.linspace(0.0, 0.95, 9) if f1 > f2]
    worst = 0.0
    for n in range(1, 21):
        model = BinomialFailModel(n, 1.0)
        js = np.arange(n + 1)
        for f1, f2 in pairs:
            rule = discrimination_rule(model, float(f1), float(f2))
            ps = success_probability_discriminate(rule)
            tv = 0.5 * np.abs(sps.binom.pmf(js, n, 1 - f1)
                              - sps.binom.pmf(js, n, 1 - f2)).sum()
            worst = max(worst, abs(ps - 0.5 * (1 + tv)))
    worst_dense = 0.0
    for n in (1, 2, 3):
        model = BinomialFailModel(n, 1.0)
        for f1, f2 in ((0.9, 0.8), (0.95, 0.5), (0.7, 0.6)):
            rule = discrimination_rule(model, f1, f2)
            ps = success_probability_discriminate(rule)
            rho1 = oracle.density_of(make_state("amp", f1))
            rho2 = oracle.density_of(make_state("amp", f2))
            big1 = big2 = np.array([[1.0 + 0j]])
            for _ in range(n):
                big1 = np.kron(big1, rho1)
                big2 = np.kron(big2, rho2)
            t_dense = oracle.trace_distance(big1, big2)
            worst_dense = max(worst_dense, abs(ps - 0.5 * (1 + t_dense)))
    elapsed = time.perf_counter() - start
    _report(2, "optimal discrimination saturates the trace distance",
            worst < 1e-10 and worst_dense < 1e-9 and elapsed < 5.0,
            f"tv gap {worst:.2e}, dense gap {worst_dense:.2e}, {elapsed:.2f}s")


def test_criterion_03_block_size_29():
    start = time.perf_counter()
    r_star = optimize_block_size("discriminate", "werner", range(2, 101),
                                 F1=0.99, F2=0.95)
    elapsed = time.perf_counter() - start
    _report(3, "parity-gap block size for (0.99, 0.95) is 29",
            r_star == 29 and elapsed < 0.1, f"r*={r_star}, {elapsed:.3f}s")


def test_criterion_04_backaction_formula():
    worst = 0.0
    for f in (0.25, 0.7, 0.9, 1.0):
        spec = make_state("werner", f)
        dense = oracle.backaction_fidelity(spec)
        formula = f * f + f * (1 - f) / 3 + 2 * ((1 - f) / 3) ** 2
        worst = max(worst, abs(dense - formula))
    exact = (backaction_fidelity(make_state("werner", 1.0)) == 1.0
             and backaction_fidelity(make_state("werner", 0.25)) == 0.25)
    _report(4, "two-pair back-action reproduces the fidelity map",
            worst < 1e-9 and exact, f"max dev {worst:.2e}")


def test_criterion_05_lambda_determinism_and_recovery():
    start = time.perf_counter()
    bad = 0
    for d in range(2, 121):
        for m in [m for m in range(1, d + 1) if d % m == 0]:
            dt = d // m
            g = ((np.arange(d) + dt - 1) // dt) % m
            delta = (g[(np.arange(d)[:, None] + np.arange(d)[None, :]) % d]
                     - g[:, None]) % m
            flat = (np.arange(d)[None, :] * m + delta).ravel()
            counts = np.bincount(flat, minlength=d * m).reshape(d, m)
            cum = counts.cumsum(axis=1)
            for delta0 in range(1, m + 1):
                hit = cum[:, delta0 - 1]
                lam1_hi = dt * (delta0 - 1)
                if np.any(hit[:lam1_hi + 1] != d):
                    bad += 1
                lam3 = np.arange(min(delta0 * dt, d), dt * (m - 1) + 1)
                if lam3.size and np.any(hit[lam3] != 0):
                    bad += 1
    worst_fid = 0.0
    for d, m in ((8, 2), (8, 4), (12, 6), (16, 4), (16, 8)):
        for delta0 in sorted({1, m // 2 or 1, m}):
            params = CoarseParams(d, m, delta0)
            sets = lambda_sets(params)
            for j in (*sets.lam1, *sets.lam3):
                _, fid = oracle.p2_recovery(j, params)
                worst_fid = max(worst_fid, 1.0 - fid)
    elapsed = time.perf_counter() - start
    _report(5, "deterministic readout classes and auxiliary recovery",
            bad == 0 and worst_fid < 1e-9 and elapsed < 30.0,
            f"violations {bad}, recovery loss {worst_fid:.2e}, {elapsed:.1f}s")


def test_criterion_06_yield_endpoints_and_shape():
    ok_one = hashing_yield(make_state("werner", 1.0)) == 1.0
    worst_deph = max(abs(hashing_yield(make_state("dephasing", float(f)))
                         - max(0.0, 1.0 - binary_entropy(float(f))))
                     for f in np.linspace(0.0, 1.0, 41))
    curve = YieldCurve.build("werner")
    env = curve.envelope
    monotone = bool(np.all(np.diff(env) >= -1e-12))
    slopes = np.diff(env) / np.diff(curve.grid)
    concave = bool(np.all(np.diff(slopes) <= 1e-8))
    y95 = curve(0.95)
    in_window = 0.63 <= y95 <= 0.70
    _report(6, "yield endpoints, dephasing entropy and envelope shape",
            ok_one and worst_deph < 1e-12 and monotone and concave and in_window,
            f"deph dev {worst_deph:.2e}, Y(0.95)={y95:.4f}")


def test_criterion_07_exponential_resource_advantage():
    start = time.perf_counter()
    curve = YieldCurve.build("amp")
    ns = np.arange(50, 1001)
    ok = True
    worst_ratio = 0.0
    for f in np.linspace(0.9, 0.999, 12):
        y = curve(float(f))
        r_p1 = np.ceil(np.log2(ns + 1) / y)
        bound = 4.0 * np.log2(ns)
        ok = ok and bool(np.all(r_p1 <= bound))
        worst_ratio = max(worst_ratio, float((r_p1 / bound).max()))
    elapsed = time.perf_counter() - start
    _report(7, "error counting pays only log of the copy-by-copy bill",
            ok and elapsed < 10.0,
            f"worst R_P1/(4 log2 R_P0) = {worst_ratio:.3f}, {elapsed:.1f}s")


def test_criterion_08_monte_carlo_agreement():
    start = time.perf_counter()
    trials = 100_000
    grid = np.linspace(0.0, 1.0, 11)
    total = 0
    within = 0
    runs = []

    rule = witness_rule("p0", "amp", 0.9, 0.5, n=20)
    runs.append(("p0", rule, lambda spec, rng:
                 simulate_p0(spec, 20, rule, rng, trials), "amp"))
    rule1 = witness_rule("p1", "amp", 0.9, 0.5, n=20)
    runs.append(("p1-amp", rule1, lambda spec, rng, r=rule1:
                 simulate_p1(spec, 20, 21, r, rng, trials), "amp"))
    rule1w = witness_rule("p1", "werner", 0.7, 0.5, n=60)
    runs.append(("p1-werner", rule1w, lambda spec, rng, r=rule1w:
                 simulate_p1(spec, 60, 121, r, rng, trials), "werner"))
    rule2 = witness_rule("p2", "amp", 0.9, 0.5, n=47, d=48)
    coarse = p2_params(47, 48, 12, None, rule2)
    runs.append(("p2", rule2, lambda spec, rng, r=rule2:
                 simulate_p2(spec, 47, coarse, r, rng, trials), "amp"))
    rule3 = witness_rule("p3", "werner", 0.9, 0.5, N=60, r=3)
    runs.append(("p3-werner", rule3, lambda spec, rng, r=rule3:
                 simulate_p3(spec, 60, 3, r, rng, trials), "werner"))
    rule3d = witness_rule("p3", "dephasing", 0.9, 0.5, N=60, r=3)
    runs.append(("p3-dephasing", rule3d, lambda spec, rng, r=rule3d:
                 simulate_p3(spec, 60, 3, r, rng, trials), "dephasing"))

    for seed_offset, (name, rule, runner, family) in enumerate(runs):
        model = rule.model
        for f in grid:
            f = float(f)
            spec = make_state(family, f)
            if name == "p2":
                analytic = p2_outcome_probability(model, coarse, f)
            else:
                analytic = float(model.pmf(f)[rule.mask].sum())
            rng = np.random.default_rng(987_000 + seed_offset)
            sim = runner(spec, rng)
            se = math.sqrt(max(analytic * (1 - analytic), 0.0) / trials)
            total += 1
            if abs(sim.above_frequency - analytic) <= 3 * se + 1e-12:
                within += 1
    elapsed = time.perf_counter() - start
    frac = within / total
    _report(8, "seeded Monte Carlo matches analytic frequencies",
            frac >= 0.95 and elapsed < 120.0,
            f"{within}/{total} points within 3 SE, {elapsed:.1f}s")


def test_criterion_09_symbolic_vs_dense_suite():
    start = time.perf_counter()
    results = check.run_suite("full")
    elapsed = time.perf_counter() - start
    worst = max(r.max_err for r in results)
    _report(9, "symbolic engine agrees with the dense oracle",
            all(r.passed for r in results) and elapsed < 60.0,
            f"{len(results)} checks, worst err {worst:.2e}, {elapsed:.1f}s")


def test_criterion_10_fig8_regeneration(tmp_path):
    code = cli.main(["figure", "fig8", "--out", str(tmp_path)])
    ok = code == 0
    with open(tmp_path / "fig8.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    p0_r = {float(r["R"]) for r in rows if r["protocol"] == "p0"}
    p1_r = [float(r["R"]) for r in rows
            if r["protocol"] == "p1" and float(r["F"]) >= 0.9]
    ok = ok and p0_r == {150.0} and p1_r and max(p1_r) < 20
    _report(10, "four-protocol comparison regenerates at caption parameters",
            ok, f"R_P0={sorted(p0_r)}, max R_P1={max(p1_r):.0f}")

"""Acceptance criteria, one test each. Every test prints a single PASS/FAIL line."""
import json
import math
import time
from pathlib import Path

import numpy as np

from exmix import chameleon as ch
from exmix import diagnostics as dg
from exmix import exact_small as ex
from exmix import harness as h
from exmix import spectral as spc
from exmix.graph_core import as_modified, complete_graph, cycle_graph, hypercube, path_graph

PINS = json.loads((Path(__file__).parent / "data" / "pinned_ratios.json").read_text())


def _report(capsys, num, title, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {num:2d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
    assert ok, detail


def test_01_fill_probability(capsys):
    t0 = time.perf_counter()
    params = ch.RoundParams(alpha=0.2, t_round=5.0, burn_in=10.0, goodness_trials=2000, seed=1)
    batch = ch.run_chameleon(cycle_graph(6), [0], 3, params, 100000, seed=2024)
    p, se = batch.fill_estimate()
    took = time.perf_counter() - t0
    ok = abs(p - 0.2) <= 3 * se and took <= 180 and batch.summary()["truncated"] == 0
    _report(capsys, 1, "fill probability on C6", ok, f"P[Fill]={p:.5f} se={se:.5f} |z|={abs(p - 0.2) / se:.2f} in {took:.1f}s")


def test_02_ink_identity(capsys):
    t0 = time.perf_counter()
    params = ch.RoundParams(t_round=1.5, burn_in=0.25, goodness_trials=500)
    worst = 0.0
    count = 0
    for g, black, red in ((path_graph(3), [0], 2), (cycle_graph(4), [1], 3)):
        rows = ch.verify_ink_identity(g, black, red, [0.5, 1.0, 2.0], params, 100000, 11)
        worst = max(worst, max(abs(r.z_score) for r in rows))
        count += len(rows)
    took = time.perf_counter() - t0
    _report(capsys, 2, "ink identity on P3 and C4", worst <= 4 and took <= 120, f"{count} cells, max |z|={worst:.2f} in {took:.1f}s")


def test_03_aldous_gaps(capsys):
    cases = [(complete_graph(4), [1, 2, 3]), (cycle_graph(5), [2]), (cycle_graph(6), [2, 3]), (hypercube(3), [2])]
    worst = max(ex.aldous_check(g, ks)["max_discrepancy"] for g, ks in cases)
    _report(capsys, 3, "gap(EX) = gap(IP) = gap(RW1)", worst <= 1e-8, f"max discrepancy {worst:.2e}")


def test_04_hypercube_relaxation(capsys):
    errs = [abs(spc.eigendecompose(hypercube(d)).rel - d / 2) for d in range(2, 7)]
    _report(capsys, 4, "rel(Q_d) = d/2, d = 2..6", max(errs) <= 1e-10, f"max error {max(errs):.2e}")


def test_05_sandwiches(capsys):
    rows = [r for g in (complete_graph(4), cycle_graph(6), hypercube(3)) for r in h.sandwich_checks(g, 1 / 8, 2)]
    bad = [f"{r['inputs']['graph']}:{r['name']}" for r in rows if r["verdict"] != "pass"]
    tight = min(r["margin"] for r in rows)
    _report(capsys, 5, "mixing sandwiches on K4, C6, Q3", not bad, f"{len(rows)} inequalities, smallest margin {tight:.3e}, failures {bad}")


def test_06_exclusion_vs_single_walk(capsys):
    rows = [r for g in (complete_graph(4), cycle_graph(6), hypercube(3)) for r in h.ex_vs_rw1_check(g)]
    ratio = min(r["bound_or_oracle"] / r["measured"] for r in rows)
    ok = all(r["verdict"] == "pass" for r in rows)
    _report(capsys, 6, "mix EX(k) >= 2^-13 mix RW(1)", ok, f"{len(rows)} (graph, k) cases, smallest mix EX / (2^-13 mix RW) = {ratio:.0f}")


def test_07_lagrange_minimum(capsys):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(3, 21))
        a = int(rng.integers(1, n))
        delta = float(rng.uniform(0.02, 0.98))
        closed = spc.lagrange_min_distance(a / n, delta)
        num, _ = spc.simplex_min_distance(n, a, delta)
        worst = max(worst, abs(num - closed))
    _report(capsys, 7, "Lagrange closed form vs simplex minimization", worst <= 1e-6, f"20 pairs, max |diff| = {worst:.2e}")


def test_08_counting_lemmas(capsys):
    cases = dg.default_nice_matrix()
    nice_fail = []
    white_cases = 0
    white_fail = []
    for i, (g, s, t) in enumerate(cases):
        try:
            rep = dg.nice_set(g, s, t)
            if rep.complement_size > rep.counting_bound:
                nice_fail.append(i)
        except dg.CountingError:
            nice_fail.append(i)
        # the white-set size bound applies from T = rel log(1/eps) on
        sd = spc.eigendecompose(as_modified(g).base)
        out = dg.white_set_checks(g, s, max(t, sd.rel * math.log(1 / 0.05)), 0.05)
        if out["size_verdict"] != "skipped":
            white_cases += 1
            if out["size_verdict"] != "pass":
                white_fail.append(i)
    ok = len(cases) >= 50 and not nice_fail and not white_fail
    _report(capsys, 8, "counting lemmas", ok, f"Nice bound on {len(cases)} cases ({len(nice_fail)} fail), white-set bound on {white_cases} cases ({len(white_fail)} fail)")


def test_09_negative_association(capsys):
    worst = -math.inf
    verdicts = []
    for g in (cycle_graph(6), hypercube(3)):
        for k in (2, 3):
            res = dg.na_cna_tests(g, k, [0.5, 1.0, 2.0], 100000, seed=h.derive_seed(9, f"{g.name}-{k}"))
            verdicts.append(res["verdict"])
            worst = max(worst, max(r["max_excess_over_3se"] for r in res["rows"]))
    cov = dg.exact_stationary_covariance(complete_graph(3), 2)
    k3 = float(np.abs(cov[~np.eye(3, dtype=bool)] + 1 / 9).max())
    ok = all(v == "pass" for v in verdicts) and k3 <= 1e-12
    _report(capsys, 9, "negative association", ok, f"max (cov - 3se) = {worst:.2e}, K3 covariance error {k3:.1e}")


def test_10_doob_decay(capsys):
    notes = []
    ok = True
    for big_n in (5, 9, 17):
        for alpha in (0.1, 0.2):
            chain = ch.DoobChain(big_n, alpha)
            c = ch.supermartingale_verify(chain)
            paths = ch.simulate_y(chain, 30, 20000, seed=h.derive_seed(10, f"{big_n}-{alpha}"))
            miss = 1 - paths / big_n
            mean = miss.mean(axis=0)
            se = miss.std(axis=0, ddof=1) / math.sqrt(len(miss))
            bound = c ** np.arange(31) * math.sqrt(big_n)
            good = c < 1 and np.all(mean <= bound + 3 * se)
            ok &= bool(good)
            notes.append(f"N={big_n} a={alpha} c={c:.4f}")
    _report(capsys, 10, "Doob-chain decay", ok, "; ".join(notes))


def test_11_chernoff_sign(capsys):
    grid = dg.exponent_grid(points=10, lam=0.05)
    top = float(grid[:, 2].max())
    _report(capsys, 11, "Chernoff exponent sign", len(grid) == 100 and top <= -0.0008, f"max (1/d) log L over {len(grid)} points = {top:.6f}")


def test_12_pinned_ratios(capsys):
    oli = h.oliveira_ratios()
    oli_dev = max(abs(r["ratio"] / PINS["oliveira"][r["graph"]][str(r["k"])] - 1) for r in oli)
    hyp = h.hypercube_shape_ratios((2, 3, 4, 5), exact_max_dim=4, trials=20000, seed=0)
    hyp_fac = max(max(r["ratio"] / PINS["hypercube_shape"][str(r["d"])], PINS["hypercube_shape"][str(r["d"])] / r["ratio"]) for r in hyp)
    ok = oli_dev <= 0.01 and hyp_fac <= 2
    shape = ", ".join(f"d={r['d']}:{r['ratio']:.3f}" for r in hyp)
    _report(capsys, 12, "theorem-shape ratios", ok, f"Oliveira max rel dev {oli_dev:.1e} over {len(oli)}; hypercube {shape}, max factor {hyp_fac:.3f}")

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from exmix import spectral as spc
from exmix.diagnostics import interaction_bound_check
from exmix.graph_core import cycle_graph, hypercube, torus
from exmix.simulate import (
    EventStream,
    extend,
    hat_interactions,
    interaction_counts,
    interval_map,
    mc_pair_interactions,
    mc_positions,
    occupation_matrix,
    run_processes,
    sample_events,
    total_rate,
)


def _stream(g, times, edges, coins=None, mode="standard"):
    return EventStream(g, 10.0, mode, 0, np.array(times, float), np.array(edges, np.int64), None if coins is None else np.array(coins, np.int8))


def test_empty_horizon():
    es = sample_events(cycle_graph(5), 0.0, seed=1)
    assert len(es) == 0


def test_negative_horizon():
    with pytest.raises(ValueError):
        sample_events(cycle_graph(5), -1.0)


@pytest.mark.parametrize("mode", ["standard", "modified"])
def test_event_count_poisson(mode):
    g = hypercube(3)
    h = 2.0
    rate = total_rate(g, mode)
    assert rate == pytest.approx(g.m / g.d * (2 if mode == "modified" else 1))
    counts = np.array([len(sample_events(g, h, mode, seed=s)) for s in range(10000)])
    mean = rate * h
    assert abs(counts.mean() - mean) <= 4 * math.sqrt(mean / len(counts))
    assert counts.var() == pytest.approx(mean, rel=0.1)


def test_stream_determinism_and_prefix():
    g = torus(4, 2)
    a = sample_events(g, 30.0, "modified", seed=11)
    b = sample_events(g, 30.0, "modified", seed=11)
    assert a.times.tobytes() == b.times.tobytes()
    assert a.edges.tobytes() == b.edges.tobytes() and a.coins.tobytes() == b.coins.tobytes()
    assert np.all(np.diff(a.times) > 0) and a.times[-1] <= 30.0
    c = extend(a, 60.0)
    assert np.array_equal(c.times[: len(a)], a.times)
    assert a.coins is not None and sample_events(g, 1.0, "standard", 0).coins is None


def test_interval_map_identity_without_events():
    g = cycle_graph(6)
    assert interval_map(_stream(g, [], []), 0.0, 5.0).tolist() == list(range(6))


def test_interval_map_single_transposition():
    g = cycle_graph(6)
    e = g.edge_index()[(2, 3)]
    perm = interval_map(_stream(g, [1.0], [e], [1], "modified"), 0.0, 2.0)
    assert perm.tolist() == [0, 1, 3, 2, 4, 5]
    # a zero coin leaves everything in place
    perm0 = interval_map(_stream(g, [1.0], [e], [0], "modified"), 0.0, 2.0)
    assert perm0.tolist() == list(range(6))


def test_interval_map_range_error():
    es = sample_events(cycle_graph(5), 1.0, seed=0)
    with pytest.raises(ValueError):
        interval_map(es, 0.0, 2.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.floats(0, 10), st.floats(0, 10), st.sampled_from(["standard", "modified"]))
def test_interval_map_composition(seed, a, b, mode):
    g = torus(3, 2)
    es = sample_events(g, 10.0, mode, seed)
    s, t = sorted((a, b))
    left = interval_map(es, 0.0, s)
    right = interval_map(es, s, t)
    assert np.array_equal(right[left], interval_map(es, 0.0, t))
    assert sorted(interval_map(es, 0.0, t).tolist()) == list(range(g.n))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.floats(0, 8), st.sampled_from(["standard", "modified"]))
def test_processes_are_functions_of_stream(seed, t, mode):
    g = hypercube(3)
    es = sample_events(g, 8.0, mode, seed)
    init = [0, 3, 5]
    tr = run_processes(es, init)
    perm = interval_map(es, 0.0, t)
    assert tr.ip_at(t) == tuple(int(perm[x]) for x in init)
    assert tr.ex_at(t) == frozenset(tr.ip_at(t))
    assert tr.rw_at(t) == int(perm[0])
    # complement duality: EX(n - k) from the complement is the complement pathwise
    comp = [v for v in range(g.n) if v not in init]
    assert run_processes(es, comp).ex_at(t) == frozenset(range(g.n)) - tr.ex_at(t)


def test_duplicate_initial_vertices():
    es = sample_events(cycle_graph(5), 1.0)
    with pytest.raises(ValueError):
        run_processes(es, [1, 1])
    with pytest.raises(ValueError):
        mc_positions(cycle_graph(5), [1, 1], [1.0], 10, 0)


def test_single_particle_law_matches_heat_kernel():
    g = cycle_graph(6)
    sd = spc.eigendecompose(g)
    t = 1.3
    trials = 100000
    pos = mc_positions(g, [0], [t], trials, seed=5)[:, 0, 0]
    freq = np.bincount(pos, minlength=6) / trials
    row = spc.heat_kernel(sd, t)[0]
    se = np.sqrt(row * (1 - row) / trials)
    assert np.all(np.abs(freq - row) <= 4 * se)


def test_exclusion_occupation_matches_heat_kernel():
    g = hypercube(3)
    sd = spc.eigendecompose(g)
    init = [0, 1, 6]
    t = 0.8
    trials = 100000
    pos = mc_positions(g, init, [t], trials, seed=9)[:, 0, :]
    occ = occupation_matrix(pos, g.n).mean(axis=0)
    oracle = spc.heat_kernel(sd, t)[init].sum(axis=0)
    se = np.sqrt(oracle * (1 - oracle) / trials)
    assert np.all(np.abs(occ - oracle) <= 4 * se)


def test_stationary_start_stays_uniform():
    g = cycle_graph(5)
    rng = np.random.default_rng(2)
    # uniform 2-subsets, one stream each; the law at time 0 is already stationary
    pairs = [tuple(rng.choice(5, 2, replace=False)) for _ in range(4000)]
    for t in (0.5, 2.0):
        counts = {}
        for i, p in enumerate(pairs):
            s = run_processes(sample_events(g, t, seed=i), p).ex_at(t)
            counts[s] = counts.get(s, 0) + 1
        assert len(counts) == 10
        assert stats.chisquare(list(counts.values())).pvalue > 0.001


@pytest.mark.parametrize("g", [cycle_graph(6), hypercube(3)], ids=lambda g: g.name)
def test_thinning_equivalence(g):
    t = 0.7
    trials = 100000
    a = np.bincount(mc_positions(g, [0], [t], trials, 1, "standard")[:, 0, 0], minlength=g.n)
    b = np.bincount(mc_positions(g, [0], [t], trials, 2, "modified")[:, 0, 0], minlength=g.n)
    keep = (a + b) > 0
    _, p, _, _ = stats.chi2_contingency(np.vstack([a[keep], b[keep]]))
    assert p > 0.01


def test_interaction_counts_empty_and_symmetric():
    g = cycle_graph(6)
    empty = _stream(g, [], [], [], "modified")
    assert interaction_counts(empty, [(0, 1), (2, 4)], 5.0) == {(0, 1): 0, (2, 4): 0}
    es = sample_events(g, 6.0, "modified", seed=4)
    ab = interaction_counts(es, [(0, 1), (1, 0), (2, 3), (3, 2)], 6.0)
    assert ab[(0, 1)] == ab[(1, 0)] and ab[(2, 3)] == ab[(3, 2)]
    assert sum(ab.values()) > 0


def test_interaction_counts_both_coins():
    g = cycle_graph(4)
    e = g.edge_index()[(0, 1)]
    es = _stream(g, [1.0, 2.0], [e, e], [0, 1], "modified")
    assert interaction_counts(es, [(0, 1)], 3.0)[(0, 1)] == 2


def test_hat_interactions_zero_time():
    g = hypercube(3)
    es = sample_events(g, 5.0, "modified", seed=3)
    assert hat_interactions(es, 0, 0.0, 5.0) == 0
    with pytest.raises(ValueError):
        hat_interactions(es, 0, 6.0, 5.0)


def test_conditional_poisson_interactions():
    """Interactions given the time spent adjacent are Poisson with mean 2 (time)/d."""
    g = cycle_graph(6)
    trials = 100000
    counts, adj = mc_pair_interactions(g, 0, 1, 3.0, trials, seed=8)
    lam = 2 * adj / g.d
    # mixed Poisson: E[N] = E[lam], Var[N] = E[lam] + Var[lam]
    z = (counts.mean() - lam.mean()) / (counts.std() / math.sqrt(trials))
    assert abs(z) <= 4
    assert counts.var() == pytest.approx(lam.mean() + lam.var(), rel=0.03)
    # within a narrow band of adjacency time the count is close to Poisson
    band = (adj > 1.0) & (adj < 1.1)
    sub = counts[band]
    mu = lam[band].mean()
    assert sub.var() == pytest.approx(mu, rel=0.1)
    assert np.mean(sub == 0) == pytest.approx(math.exp(-mu), abs=4 * math.sqrt(math.exp(-mu) / len(sub)))


@pytest.mark.parametrize("g", [cycle_graph(8), hypercube(3)], ids=lambda g: g.name)
def test_interaction_bound_with_stationary_term(g):
    rep = interaction_bound_check(g, 0.01, 20000, seed=1)
    assert rep["corrected_verdict"] == "pass"
    assert rep["max_mean"] <= rep["corrected_bound"] + 3 * rep["stderr"]


@pytest.mark.xfail(strict=True, reason="the bound without the 1/n stationary term needs t_* much smaller than eps*n; desk graphs are far from that")
@pytest.mark.parametrize("g", [cycle_graph(8), hypercube(3)], ids=lambda g: g.name)
def test_interaction_bound_literal(g):
    rep = interaction_bound_check(g, 0.01, 20000, seed=1)
    assert rep["max_mean"] <= 8 * g.d * 0.01 + 3 * rep["stderr"]

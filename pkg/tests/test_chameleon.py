import math
import warnings

import numpy as np
import pytest
from scipy import stats

from exmix import chameleon as ch
from exmix import spectral as spc
from exmix.graph_core import complete_graph, cycle_graph, hypercube, path_graph

from oracles import marking_law

C6 = cycle_graph(6)


def _params(**kw):
    base = dict(alpha=0.2, t_round=5.0, burn_in=10.0, goodness_trials=2000, seed=1)
    base.update(kw)
    return ch.RoundParams(**base)


@pytest.fixture(scope="module")
def c6_batch():
    # record at 0, just after the first burn-in, and at every later round end
    times = [0.0] + [10.0 + 5.0 * i for i in range(0, 25)]
    return ch.run_chameleon(C6, [0], 3, _params(), 20000, seed=4, record_times=times)


def test_round_params_validation():
    with pytest.raises(ch.ChameleonError):
        ch.RoundParams(alpha=0.3, t_round=2.0)
    with pytest.raises(ch.ChameleonError):
        ch.RoundParams(alpha=0.2, t_round=1.0)
    with pytest.raises(ch.ChameleonError):
        ch.RoundParams(alpha=0.2)
    with pytest.raises(ch.ChameleonError):
        ch.RoundParams(alpha=0.2, t_round=2.0, burn_in=0.0)
    assert ch.RoundParams(alpha=0.2, t_round=2.0).default_max_rounds(6, 2) == 2000


def test_initial_state_partition():
    st = ch.ChameleonState.initial(6, [0, 2], 4)
    assert st.red == {4} and st.white == {1, 3, 5} and not st.pink
    with pytest.raises(ch.ChameleonError):
        ch.ChameleonState.initial(6, [0, 0], 4)
    with pytest.raises(ch.ChameleonError):
        ch.ChameleonState((0,), frozenset({0}), frozenset(), frozenset(range(1, 6))).validate(6)


def test_red_must_exist_off_black():
    with pytest.raises(ch.ChameleonError):
        ch.run_chameleon(C6, [0], 0, _params())
    with pytest.raises(ch.ChameleonError):
        ch.run_chameleon(C6, [0, 0], 3, _params())
    with pytest.raises(ValueError):
        ch.run_chameleon(path_graph(4), [0], 3, _params())


def test_goodness_empty_colour_class():
    st = ch.ChameleonState((), frozenset(range(4)), frozenset(), frozenset())
    gd = ch.estimate_goodness(st, cycle_graph(4), 1.0, 0.2, 100, 0)
    assert gd.h_mean == 0.0 and not gd.good
    with pytest.raises(ch.ChameleonError):
        ch.estimate_goodness(ch.ChameleonState((), frozenset({0}), frozenset({1, 2}), frozenset({3})), cycle_graph(4), 1.0, 0.2, 10, 0)


def test_goodness_k2_pair():
    # one red-white edge ringing at total rate 2: E[H] = 1 - exp(-2)
    g = complete_graph(2)
    exact, _ = marking_law([(0, 1)], 2, {0}, {1}, 0.7, 2.0)
    assert exact == pytest.approx(1 - math.exp(-2), abs=1e-12)
    gd = ch.estimate_goodness(ch.ChameleonState((), frozenset({0}), frozenset(), frozenset({1})), g, 0.7, 0.2, 100000, 5)
    assert abs(gd.h_mean - exact) <= 4 * gd.h_stderr


@pytest.mark.parametrize(
    "z,red,white,frozen",
    [((), {0, 1}, {2, 3}, 1.2541375289655052), ((1,), {0}, {2, 3}, 0.709510358473255)],
    ids=["two-red", "with-black"],
)
def test_goodness_c4_matches_enumeration(z, red, white, frozen):
    g = cycle_graph(4)
    exact, law = marking_law(g.edges.tolist(), 4, red, white, 0.5, 2 * g.rate_per_edge)
    assert exact == pytest.approx(frozen, abs=1e-10)
    st = ch.ChameleonState(z, frozenset(red), frozenset(), frozenset(white))
    gd = ch.estimate_goodness(st, g, 0.5, 0.2, 100000, 3)
    assert abs(gd.h_mean - exact) <= 4 * gd.h_stderr
    need = math.ceil(0.2 * min(len(red), len(white)))
    p_exact = law[need:].sum()
    assert abs(gd.p_hat - p_exact) <= 4 * math.sqrt(p_exact * (1 - p_exact) / 100000)


def test_good_configuration_probability_bound():
    g = hypercube(3)
    st = ch.ChameleonState((0,), frozenset({1, 2, 4}), frozenset(), frozenset({3, 5, 6, 7}))
    gd = ch.estimate_goodness(st, g, 2.0, 0.2, 20000, 2)
    assert gd.good
    assert gd.p_hat >= 4 * 0.2 / 3 - 3 * math.sqrt(gd.p_hat * (1 - gd.p_hat) / 20000)


def test_fill_frequency_small(c6_batch):
    p, se = c6_batch.fill_estimate()
    assert c6_batch.summary()["truncated"] == 0
    assert abs(p - 1 / 5) <= 3 * se


def test_type1_rate(c6_batch):
    t1, se = c6_batch.type1_rate()
    # the nested goodness estimate biases this slightly, so allow 5% on top of 4 standard errors
    assert abs(t1 - 0.1) <= 4 * se + 0.005


def test_ink_is_martingale(c6_batch):
    ink = c6_batch.ink_total
    assert np.all(ink >= 0) and np.all(ink <= c6_batch.big_n)
    m = ink.mean(axis=0)
    se = ink.std(axis=0, ddof=1) / math.sqrt(ink.shape[0])
    assert np.all(np.abs(m - 1.0) <= 4 * np.maximum(se, 1e-12))


def test_fill_independent_of_blacks(c6_batch):
    done = c6_batch.fill >= 0
    # black position at the end of the first round against the fill flag
    blk = c6_batch.black[done, 2, 0]
    table = np.array([np.bincount(blk[c6_batch.fill[done] == f], minlength=6) for f in (0, 1)])
    _, p, _, _ = stats.chi2_contingency(table[:, table.sum(axis=0) > 0])
    assert p > 0.01


def test_black_marginal_is_a_walk(c6_batch):
    sd = spc.eigendecompose(C6)
    for ti in (2, 5):
        t = c6_batch.record_times[ti]
        freq = np.bincount(c6_batch.black[:, ti, 0], minlength=6)
        row = spc.heat_kernel(sd, t)[0]
        assert stats.chisquare(freq, row * freq.sum()).pvalue > 0.001


def test_ink_identity_at_zero():
    rows = ch.verify_ink_identity(path_graph(3), [0], 2, [0.0], ch.RoundParams(t_round=1.5, burn_in=0.25), 200, 1)
    for r in rows:
        expected = 1.0 if (r.c, r.b) == ((0,), 2) else 0.0
        assert r.mc_value == expected and r.exact_value == pytest.approx(expected, abs=1e-14)


def test_ink_identity_c4_moderate():
    rows = ch.verify_ink_identity(cycle_graph(4), [1], 3, [1.0], ch.RoundParams(t_round=1.5, burn_in=0.25, goodness_trials=500), 20000, 7)
    assert len(rows) == 12
    assert max(abs(r.z_score) for r in rows) <= 4


def test_variable_variant():
    g = C6
    p = ch.variable_params(g, 2, alpha=0.2, burn_in=2.0, goodness_trials=500, seed=3)
    assert not p.fixed and np.all(np.diff(p.l_table) >= -1e-12) and np.all(p.l_table > 1)
    b = ch.run_chameleon(g, [0], 3, p, 4000, seed=2)
    f, se = b.fill_estimate()
    assert abs(f - 0.2) <= 3 * se


def test_fixed_params_defaults():
    g = hypercube(3)
    sd = spc.eigendecompose(g)
    p = ch.fixed_params(g, sd)
    expect = 8 * (sd.rel + spc.t_star(sd, 1e-2) + spc.s_star(sd, 1e-2)) + 1
    assert p.t_round == pytest.approx(expect)
    assert p.burn_in == pytest.approx(spc.t_mix_inf(sd, 8.0**-10))


def test_doob_formulae():
    chain = ch.doob_chain(10, 1, 0.2)
    assert chain.delta(3) == 1
    mat = chain.matrix()
    assert mat[3, 4] == pytest.approx(5 / 8 * 0.1)
    assert np.allclose(mat.sum(axis=1), 1.0)
    assert mat[-1, -1] == 1.0
    with pytest.raises(ch.ChameleonError):
        ch.doob_chain(3, 3, 0.2)


@pytest.mark.parametrize("big_n", [2, 3, 5, 9, 17, 40])
@pytest.mark.parametrize("alpha", [0.05, 0.1, 0.2, 0.24])
def test_supermartingale_ratio_below_one(big_n, alpha):
    chain = ch.DoobChain(big_n, alpha)
    c = ch.supermartingale_verify(chain)
    zv = chain.z_value(np.arange(1, big_n + 1))
    direct = max(chain.matrix()[r] @ zv / zv[r] for r in range(big_n - 1))
    assert c == pytest.approx(direct) and c < 1


def test_doob_decay_curve():
    chain = ch.DoobChain(9, 0.2)
    c = ch.supermartingale_verify(chain)
    paths = ch.simulate_y(chain, 30, 20000, seed=3)
    assert np.all(paths[:, 0] == 1)
    miss = 1 - paths / 9
    mean = miss.mean(axis=0)
    se = miss.std(axis=0, ddof=1) / math.sqrt(20000)
    assert np.all(mean <= c ** np.arange(31) * 3 + 3 * se)
    assert np.allclose(mean, ch.missing_ink_from_y(chain, paths))


def test_tail_statistics_and_holding():
    chain = ch.DoobChain(16, 0.2)
    paths = ch.simulate_y(chain, 200, 500, seed=1)
    ts = ch.tail_statistics(chain, paths)
    assert np.all(np.diff(ts.t_up, axis=1) >= 0)
    assert np.all(ts.t_up[:, 0] == 0)
    assert np.all(ts.cross >= 0)
    runs, ts2 = ch.simulate_yhat(chain, np.full(16, 2.0), 1e6, 200, seed=2)
    for times, states in runs:
        assert states[0] == 1 and states[-1] == 16
        assert np.allclose(np.diff(times), 2.0)
    assert np.all(np.isfinite(ts2.holding))


def test_missing_ink_curves(c6_batch):
    c = ch.supermartingale_verify(ch.doob_chain(6, 2, 0.2))
    rep = ch.missing_ink_curves(c6_batch, c)
    assert rep.filled_runs >= 100 and not rep.warning
    assert rep.missing[0] == pytest.approx(1 - 1 / 5)
    assert np.all(rep.dominated)
    ink = c6_batch.ink_total
    # full and empty ink are absorbing, and each is reached only by runs with the matching outcome
    full, empty = ink == 5, ink == 0
    assert np.all(full[:, :-1] <= full[:, 1:]) and np.all(empty[:, :-1] <= empty[:, 1:])
    assert np.all(c6_batch.fill[full.any(axis=1)] == 1)
    assert np.all(c6_batch.fill[empty.any(axis=1)] == 0)


def test_missing_ink_warns_when_few_runs():
    b = ch.run_chameleon(C6, [0], 3, _params(), 20, seed=1, record_times=[0.0, 15.0])
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        rep = ch.missing_ink_curves(b, 0.99)
    assert rep.warning and w

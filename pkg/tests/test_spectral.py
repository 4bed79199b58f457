import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exmix import exact_small as ex
from exmix import spectral as spc
from exmix.graph_core import complete_graph, cycle_graph, hypercube, path_graph, torus

from oracles import generator_spectrum, half_simplex_min, isoperimetric_profile_brute, spectral_profile_brute

SMALL = [complete_graph(4), cycle_graph(5), cycle_graph(6), hypercube(3), torus(3, 2), path_graph(4)]


def _nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(map(tuple, g.edges.tolist()))
    return h


def test_q3_spectrum_matches_oracle():
    sd = spc.eigendecompose(hypercube(3))
    oracle = generator_spectrum(_nx(hypercube(3)))
    assert np.allclose(sd.eigenvalues, oracle, atol=1e-12)
    assert np.allclose(sd.eigenvalues, [0] + [2 / 3] * 3 + [4 / 3] * 3 + [2], atol=1e-12)


def test_k4_gap():
    sd = spc.eigendecompose(complete_graph(4))
    assert sd.gap == pytest.approx(4 / 3, abs=1e-12)
    assert generator_spectrum(nx.complete_graph(4))[1] == pytest.approx(4 / 3, abs=1e-12)


@pytest.mark.parametrize("g", SMALL, ids=lambda g: g.name)
def test_first_eigenpair_constant(g):
    sd = spc.eigendecompose(g)
    assert sd.eigenvalues[0] == 0.0
    assert np.allclose(sd.vectors[:, 0], 1.0)
    assert np.allclose(sd.vectors.T @ sd.vectors / g.n, np.eye(g.n), atol=1e-9)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_hypercube_relaxation_time(d):
    assert abs(spc.eigendecompose(hypercube(d)).rel - d / 2) <= 1e-10


def test_heat_kernel_identity_at_zero():
    sd = spc.eigendecompose(cycle_graph(6))
    assert np.allclose(spc.heat_kernel(sd, 0.0), np.eye(6), atol=1e-12)


def test_heat_kernel_large_time():
    sd = spc.eigendecompose(hypercube(3))
    t = 40.0
    p = spc.heat_kernel(sd, t)
    assert np.max(np.abs(p - 1 / 8)) <= math.exp(-sd.gap * t) * 8


def test_heat_kernel_negative_time():
    with pytest.raises(ValueError):
        spc.heat_kernel(spc.eigendecompose(cycle_graph(5)), -1.0)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(range(len(SMALL))), st.floats(0, 5), st.floats(0, 5))
def test_heat_kernel_semigroup_and_stochastic(i, s, t):
    g = SMALL[i]
    sd = spc.eigendecompose(g)
    ps, pt, pst = spc.heat_kernel(sd, s), spc.heat_kernel(sd, t), spc.heat_kernel(sd, s + t)
    assert np.allclose(ps, ps.T, atol=1e-12)
    assert np.allclose(ps.sum(axis=1), 1.0, atol=1e-10)
    assert ps.min() >= -1e-12
    assert np.allclose(ps @ pt, pst, atol=1e-8)
    # L-infinity distance is attained on the diagonal
    assert np.max(np.abs(g.n * ps - 1)) == pytest.approx(spc.linf_distance(sd, s), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(range(len(SMALL))), st.floats(0.01, 4), st.integers(0, 3))
def test_l2_distance_identity(i, t, x):
    g = SMALL[i]
    sd = spc.eigendecompose(g)
    row = spc.heat_kernel(sd, t)[x]
    direct = float(np.sum((row - 1 / g.n) ** 2 * g.n))
    assert direct == pytest.approx(spc.l2_distance_sq(sd, x, t), abs=1e-10)


@pytest.mark.parametrize("g", [complete_graph(4), cycle_graph(6), hypercube(3)], ids=lambda g: g.name)
def test_mixrel_chain(g):
    sd = spc.eigendecompose(g)
    eps = 1 / 8
    tol = 4 * spc.BISECT_RTOL
    a = sd.rel * abs(math.log(eps))
    b = spc.t_mix_tv(sd, eps / 2)
    c = spc.t_mix_inf(sd, eps)
    d = sd.rel * math.log(g.n / eps)
    assert a <= b * (1 + tol) and b <= c * (1 + tol) and c <= d * (1 + tol)
    # single-walk TV from the exact chain agrees with the heat kernel
    rw = ex.build_exact(g, 1, "rw")
    assert ex.exact_mix_time(rw, eps / 2) == pytest.approx(b, rel=tol)


@pytest.mark.parametrize("g", [complete_graph(4), cycle_graph(6), hypercube(3), torus(4, 2)], ids=lambda g: g.name)
def test_rstar_below_rescaled_linf(g):
    sd = spc.eigendecompose(g)
    for eps in (0.01, 0.1, 0.5):
        rs = spc.r_star(sd, eps)
        assert rs <= spc.t_mix_inf(sd, eps * g.n / math.log(g.n) ** 2) * (1 + 2 * spc.BISECT_RTOL)


def test_functional_thresholds():
    sd = spc.eigendecompose(cycle_graph(8))
    eps = 0.05
    rs, ts = spc.r_star(sd, eps), spc.t_star(sd, eps)
    ss = spc.s_star(sd, eps)
    gap_at = lambda t: spc.diag_heat(sd, t).max() - 1 / 8
    assert gap_at(rs) <= eps / math.log(8) ** 2 + 1e-12
    assert gap_at(rs * (1 - 1e-5)) > eps / math.log(8) ** 2
    assert gap_at(ts) <= eps / math.log(8) + 1e-12
    assert gap_at(ss) <= eps / ts + 1e-12
    assert ts <= rs


def test_mixing_functionals_bad_eps():
    with pytest.raises(ValueError):
        spc.mixing_functionals(spc.eigendecompose(cycle_graph(5)), [1.5], c_ls=False)


@pytest.mark.parametrize("g", [complete_graph(4), cycle_graph(6)], ids=lambda g: g.name)
def test_linf_below_tsp(g):
    sd = spc.eigendecompose(g)
    pt = spc.profiles(g, sd, [0.05, 0.25])
    for eps in (0.05, 0.25):
        assert spc.t_mix_inf(sd, eps) <= pt.t_sp[eps]
        # the grid integral is within 1% of the closed-form step-function value
        assert pt.t_sp[eps] == pytest.approx(spc.t_sp_exact_piecewise(pt, eps), rel=0.02)


def test_k4_isoperimetric_single_vertex():
    g = complete_graph(4)
    pt = spc.profiles(g, spc.eigendecompose(g), 0.25)
    assert pt.phi(0.25) == pytest.approx(1.0, abs=1e-12)
    assert isoperimetric_profile_brute(g.generator(), 0.25) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("g", [cycle_graph(6), hypercube(3), complete_graph(5)], ids=lambda g: g.name)
def test_exact_profiles_match_brute_force(g):
    sd = spc.eigendecompose(g)
    pt = spc.profiles(g, sd, 0.25)
    gen = g.generator()
    for s in range(1, g.n):
        assert pt.lam(s / g.n, "lo") == pytest.approx(spectral_profile_brute(gen, s), abs=1e-9)
        assert pt.phi(s / g.n, "lo") == pytest.approx(isoperimetric_profile_brute(gen, s / g.n), abs=1e-12)
    assert np.all(np.diff(pt.lam_lo[1:]) <= 1e-12)


@pytest.mark.parametrize("g", SMALL[:-1] + [cycle_graph(10), torus(4, 2)], ids=lambda g: g.name)
def test_cheeger_sandwich_and_bracket_containment(g):
    sd = spc.eigendecompose(g)
    exact = spc.profiles(g, sd, 0.25)
    brk = spc.profiles(g, sd, 0.25, force_bracket=True)
    assert all(r["ok"] for r in spc.cheeger_sandwich(exact))
    assert all(r["ok"] for r in spc.cheeger_sandwich(brk))
    assert not brk.exact and brk.provenance.startswith("sweep")
    assert np.all(brk.lam_lo[1:] <= exact.lam_lo[1:] + 1e-9)
    assert np.all(exact.lam_hi[1:] <= brk.lam_hi[1:] + 1e-9)
    assert np.all(exact.lam_lo[1 : g.n] <= 2.0)


def test_lagrange_closed_form():
    assert spc.lagrange_min_distance(0.5, 0.5) == pytest.approx(0.25)
    assert spc.lagrange_min_distance(0.3, 1e-9) < 1e-16
    with pytest.raises(ValueError):
        spc.lagrange_min_distance(1.0, 0.5)


def test_lagrange_quarter():
    closed = spc.lagrange_min_distance(0.25, 0.3)
    num, mu = spc.simplex_min_distance(4, 1, 0.3)
    assert abs(num - closed) <= 1e-6
    assert abs(half_simplex_min(4, 1, 0.3) - closed) <= 1e-9
    assert np.allclose(mu, spc.lagrange_minimizer(4, 1, 0.3), atol=1e-4)


def test_logsobolev_bracket_hypercube():
    for d in (2, 3):
        sd = spc.eigendecompose(hypercube(d))
        lo, hi = spc.log_sobolev_bracket(sd, restarts=16)
        # the standard constant on Q_d is gap/2 = 1/d
        assert lo <= 1 / d <= hi + 1e-9
        assert hi <= sd.gap / 2 + 1e-12


def test_thm14_infeasible_and_distortion():
    sd = spc.eigendecompose(cycle_graph(6))
    lb = spc.thm14_lower_bound(sd, 3, 0.1, 0.05, c_ls_upper=spc.log_sobolev_bracket(sd, restarts=16)[1])
    assert not lb.feasible and lb.t_bound == 0.0
    assert lb.distortion_ok
    with pytest.raises(ValueError):
        spc.thm14_lower_bound(sd, 1, 0.1, 0.05)


def test_thm14_sound_against_exact():
    g = cycle_graph(6)
    sd = spc.eigendecompose(g)
    lb = spc.thm14_lower_bound(sd, 3, 0.2, 0.05)
    exact = ex.exact_mix_time(ex.build_exact(g, 3, "ex"), 1 - 0.05)
    assert lb.t_bound <= exact


def _suite_rows(g):
    sd = spc.eigendecompose(g)
    mf = spc.mixing_functionals(sd, [0.05, 0.25])
    pt = spc.profiles(g, sd, [0.05, 0.25])
    return spc.inequality_suite(sd, pt, mf, seed=1)


@pytest.mark.parametrize("g", [complete_graph(4), cycle_graph(6), hypercube(3)], ids=lambda g: g.name)
def test_inequality_suite_passes(g):
    rows = _suite_rows(g)
    names = {r["name"] for r in rows}
    assert {"profile_vs_logsobolev", "dirichlet_vs_profile", "profile_l2_contraction", "poincare", "linf_le_tsp", "cheeger_sandwich"} <= names
    bad = [r for r in rows if r["verdict"] == "fail"]
    assert not bad
    assert all(r["verdict"] in ("pass", "report-only") for r in rows)


def test_poincare_equality_at_zero():
    rows = [r for r in _suite_rows(cycle_graph(6)) if r["name"] == "poincare" and r["t"] == 0.0]
    assert rows
    for r in rows:
        assert r["lhs"] == pytest.approx(r["rhs"], abs=1e-12)


def test_dirichlet_profile_single_vertex_c6():
    g = cycle_graph(6)
    sd = spc.eigendecompose(g)
    pt = spc.profiles(g, sd, 0.25)
    u = np.eye(6)[0]
    # direct evaluation: E = 1/6, Var = 5/36
    e = 0.5 * sum(g.generator()[x, y] / 6 * (u[x] - u[y]) ** 2 for x in range(6) for y in range(6) if x != y)
    var = 1 / 6 - 1 / 36
    assert e == pytest.approx(1 / 6) and spc.dirichlet_form(sd, u) == pytest.approx(e)
    arg = 4 * (1 / 6) ** 2 / var
    assert e / var >= 0.5 * pt.lam(arg) - 1e-12


def test_l2_contraction_half_k4_point_mass():
    g = complete_graph(4)
    sd = spc.eigendecompose(g)
    pt = spc.profiles(g, sd, 0.25)
    mu = np.eye(4)[2]
    dist0 = 4 * mu @ mu - 1
    t = math.log(2) / pt.lam(4 / (0.5 * dist0), "lo")
    row = spc.heat_kernel(sd, t)[2]
    assert 4 * row @ row - 1 <= 0.5 * dist0 + 1e-12

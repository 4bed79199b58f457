"""Round-analysis diagnostics: Nice sets, neighbour large deviations, white
sets and negative association of the exclusion occupation field.

Each check pairs a measured quantity with the bound it is meant to satisfy.
Deterministic counting statements are asserted exactly; Monte Carlo checks
carry a ``3 sigma`` allowance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph_core import Graph, ModifiedGraph, as_modified, cycle_graph, degree_inflate, hypercube, complete_graph, torus
from .simulate import mc_perm_interactions, mc_positions, occupation_matrix
from .spectral import SpectralData, eigendecompose, heat_kernel, t_star


class CountingError(AssertionError):
    """A deterministic counting bound failed."""


def _graph_parts(g_or_mg: Graph | ModifiedGraph) -> tuple[Graph, ModifiedGraph]:
    mg = as_modified(g_or_mg)
    return mg.base, mg


# ---------------------------------------------------------------- Nice sets


@dataclass
class NiceReport:
    S: np.ndarray
    T: float
    e_T: np.ndarray
    nice: np.ndarray
    threshold: float
    complement_size: int
    counting_bound: float
    hit_probability: float
    pi_nice: float

    @property
    def gap(self) -> float:
        """Slack of the counting bound."""
        return self.counting_bound - self.complement_size

    def hit_margin(self, eps: float) -> float:
        """``Pr_{pi_S}[X_T in Nice] - (pi(Nice) - eps)``; positive means the hit bound holds."""
        return self.hit_probability - (self.pi_nice - eps)


def nice_set(g_or_mg: Graph | ModifiedGraph, S: Sequence[int], T: float, sd: SpectralData | None = None) -> NiceReport:
    """Exact ``e_T(v, S)`` and ``Nice(S)`` with the counting bound asserted.

    For a plain graph the threshold is ``d (1/32 + |S|/n)``; for a modified
    graph ``d_hat`` replaces ``d`` and the bound gains ``d_max_in / d_hat``.
    """
    g, mg = _graph_parts(g_or_mg)
    sd = eigendecompose(g) if sd is None else sd
    n = g.n
    s = np.unique(np.asarray(S, dtype=np.int64))
    frac = 1 / 32 + len(s) / n
    pt = heat_kernel(sd, T)
    p_to_s = pt[:, s].sum(axis=1)
    e_t = mg.out_matrix() @ p_to_s
    thr = mg.d_hat * frac
    nice = e_t < thr
    comp = int((~nice).sum())
    bound = len(s) / frac * mg.d_max_in / mg.d_hat
    if comp > bound:
        raise CountingError(f"|Nice^c| = {comp} exceeds {bound}")
    hit = float(pt[s][:, nice].sum(axis=1).mean()) if len(s) else 1.0
    return NiceReport(s, float(T), e_t, np.flatnonzero(nice), float(thr), comp, float(bound), hit, float(nice.mean()))


def default_nice_matrix() -> list[tuple[Graph | ModifiedGraph, np.ndarray, float]]:
    """Default ``(graph, S, T)`` cases for the counting lemmas (plain and modified)."""
    rng = np.random.default_rng(20240601)
    graphs: list[Graph | ModifiedGraph] = [
        complete_graph(6),
        cycle_graph(8),
        cycle_graph(12),
        hypercube(3),
        hypercube(4),
        torus(4, 2),
        degree_inflate(cycle_graph(6), 4),
        degree_inflate(cycle_graph(8), 4),
        degree_inflate(torus(4, 2), 6),
    ]
    cases = []
    for g in graphs:
        n = as_modified(g).n
        for size in (0, 1, 2, max(1, n // 4), n // 2):
            for T in (0.0, 1.0):
                cases.append((g, np.sort(rng.choice(n, size, replace=False)), T))
        cases.append((g, np.arange(n), 2.0))
    return cases


# ---------------------------------------------------------------- Chernoff exponents


def chernoff_exponent(lam: float, theta: float, d: float, r: int, n: int) -> float:
    """``L(lambda, theta, d, r) = exp(d (-lambda theta + (e^lambda - 1)(1/32 + r/n)))``."""
    return math.exp(d * (-lam * theta + math.expm1(lam) * (1 / 32 + r / n)))


def log_chernoff_per_degree(lam: float, theta: float, r_frac: float) -> float:
    """``(1/d) log L``; independent of ``d``."""
    return -lam * theta + math.expm1(lam) * (1 / 32 + r_frac)


def optimal_lambda(theta: float, r_frac: float) -> float:
    """Minimiser of the exponent over ``lambda >= 0``: ``log(theta / (1/32 + r/n))`` when positive."""
    base = 1 / 32 + r_frac
    return max(0.0, math.log(theta / base))


def exponent_grid(points: int = 10, lam: float = 0.05) -> np.ndarray:
    """``(k/n, |R|/n, (1/d) log L)`` over a grid with ``k <= n/2`` and ``|R|/n <= 1/2 - k/(2n)``.

    Uses ``theta = 9/16 - k/(2n)``.
    """
    rows = []
    for kf in np.linspace(0.0, 0.5, points):
        top = 0.5 - kf / 2
        for rf in np.linspace(0.0, top, points):
            theta = 9 / 16 - kf / 2
            rows.append((kf, rf, log_chernoff_per_degree(lam, theta, rf)))
    return np.array(rows)


def m_exponent(eps: float, n: int, k: int) -> float:
    """``m = max{log(eps n / (e^2 k)), (eps n / 2k)(1/2 - eps n / k)}``."""
    x = eps * n / k
    return max(math.log(x) - 2.0, 0.5 * x * (0.5 - x))


# ---------------------------------------------------------------- MC helpers


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return float(x.mean()) if x.size else math.nan, math.inf
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def _verdict(measured: float, bound: float, se: float) -> str:
    return "pass" if measured <= bound + 3 * se else "fail"


def _ex_occupation(g: Graph, start: Sequence[int], t: float, trials: int, seed: int) -> np.ndarray:
    pos = mc_positions(g, start, [t], trials, seed)[:, 0, :]
    return occupation_matrix(pos, g.n)


@dataclass
class BnReport:
    S: np.ndarray
    theta: float
    lam: float
    chernoff: float
    rows: list = field(default_factory=list)  # per v: hits, frequency, stderr, verdict
    inconclusive: bool = False

    @property
    def worst(self) -> dict | None:
        live = [r for r in self.rows if r["verdict"] != "inconclusive"]
        return max(live, key=lambda r: r["frequency"] - self.chernoff - 3 * r["stderr"]) if live else None

    @property
    def ok(self) -> bool:
        return all(r["verdict"] != "fail" for r in self.rows)


def bn_gn_estimate(
    g_or_mg: Graph | ModifiedGraph,
    S: Sequence[int],
    T: float,
    theta: float,
    trials: int,
    seed: int = 0,
    min_hits: int = 50,
) -> BnReport:
    """Empirical ``Pr[v in BN(S)_theta | v in N(S)]`` against the optimised Chernoff bound."""
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    g, mg = _graph_parts(g_or_mg)
    s = np.unique(np.asarray(S, dtype=np.int64))
    rep = nice_set(mg, s, T)
    n = g.n
    lam = optimal_lambda(theta, len(s) / n)
    bound = chernoff_exponent(lam, theta, mg.d_hat, len(s), n)
    occ = _ex_occupation(g, s, T, trials, seed)
    neigh = occ @ mg.out_matrix().T  # occupied out-neighbours of each vertex
    out = BnReport(s, theta, lam, bound)
    for v in rep.nice:
        hit = occ[:, v] == 1
        h = int(hit.sum())
        if h < min_hits:
            out.rows.append({"v": int(v), "hits": h, "frequency": math.nan, "stderr": math.nan, "verdict": "inconclusive"})
            out.inconclusive = True
            continue
        bad = neigh[hit, v] > theta * mg.d_hat
        f, se = _mean_se(bad)
        out.rows.append({"v": int(v), "hits": h, "frequency": f, "stderr": se, "verdict": _verdict(f, bound, se)})
    return out


# ---------------------------------------------------------------- Q weights


@dataclass
class QReport:
    u: int
    x: int
    v: int
    eps: float
    T: float
    t_star: float
    q: np.ndarray
    q_stderr: np.ndarray
    max_p_tstar: float
    conditioning_hits: int
    verdict: str
    exceedance: float = math.nan
    exceedance_note: str = "report-only: asymptotic n^-13 claim has no desk-scale threshold"
    weighted_mean: float = math.nan
    weighted_stderr: float = math.nan
    weighted_exact: float = math.nan


def q_weights(g: Graph, u: int, x: int, v: int, eps: float, T: float, trials: int, seed: int, sd: SpectralData | None = None, min_hits: int = 200) -> QReport:
    """Estimate ``Q(a) = Pr[I(a) = u, no a-x interactions by t_* | I(x) = v]`` for ``a != x``.

    ``Q(x)`` is excluded: it equals ``1{u = v}`` and plays no role in the weighted sum.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    sd = eigendecompose(g) if sd is None else sd
    ts = t_star(sd, eps)
    if ts > T:
        raise ValueError("need t_*(eps) <= T")
    perm, inter = mc_perm_interactions(g, ts, T, trials, seed)
    cond = perm[:, x] == v
    hits = int(cond.sum())
    pmax = float(heat_kernel(sd, ts).max())
    q = np.zeros(g.n)
    se = np.zeros(g.n)
    if hits >= min_hits:
        ev = (perm[cond] == u) & (inter[cond][:, :, x] == 0)
        q = ev.mean(axis=0).astype(float)
        se = np.sqrt(np.maximum(q * (1 - q), 1.0 / hits) / hits)
        q[x] = 0.0
        se[x] = 0.0
        verdict = "pass" if np.all(q <= pmax + 3 * se) else "fail"
    else:
        verdict = "inconclusive"
    return QReport(int(u), int(x), int(v), float(eps), float(T), float(ts), q, se, pmax, hits, verdict)


def q_weight_checks(
    g: Graph,
    eps: float,
    T: float | None,
    trials: int,
    seed: int = 0,
    k: int = 2,
    s: float | None = None,
    uxv: tuple[int, int, int] | None = None,
    black_trials: int | None = None,
) -> QReport:
    """Max-``Q`` bound plus the weighted black sum ``sum_a 1{a in B_s} Q(a)``.

    ``T`` defaults to ``rel + t_*(eps)``. Blacks start from ``{0, ..., k-2}``;
    ``s`` defaults to ``T``. The exceedance
    frequency of ``k/n + 1/16`` is reported without a verdict, and the MC mean of
    the weighted sum is paired with the exact ``sum_a Pr[a in B_s] Q(a)``.
    """
    sd = eigendecompose(g)
    T = sd.rel + t_star(sd, eps) if T is None else T
    u, x, v = uxv if uxv is not None else (0, 0, g.n // 2)
    rep = q_weights(g, u, x, v, eps, T, trials, seed, sd)
    if rep.verdict == "inconclusive":
        return rep
    s = T if s is None else s
    blacks = list(range(k - 1))
    occ = _ex_occupation(g, blacks, s, black_trials or trials, seed + 1)
    w = occ @ rep.q
    rep.exceedance = float((w > k / g.n + 1 / 16).mean())
    rep.weighted_mean, rep.weighted_stderr = _mean_se(w)
    marg = heat_kernel(sd, s)[blacks].sum(axis=0)
    rep.weighted_exact = float(marg @ rep.q)
    return rep


# ---------------------------------------------------------------- black large deviations


def black_ld_check(
    g_or_mg: Graph | ModifiedGraph,
    k: int,
    eps: float,
    s_grid: Sequence[float],
    trials: int,
    seed: int = 0,
    burn_in: float | None = None,
) -> list[dict]:
    """Empirical ``Pr[#black out-neighbours of v >= (k/n + eps) d_hat]`` against ``exp(-d_hat eps m)``.

    Blacks (``k - 1`` of them) start at ``{0, ..., k-2}``; the worst vertex is reported per time.
    """
    g, mg = _graph_parts(g_or_mg)
    n = g.n
    if not 2 <= k <= n // 2:
        raise ValueError("need 2 <= k <= n/2")
    if burn_in is not None and min(s_grid) < burn_in:
        raise ValueError("every s must be at least the burn-in")
    m = m_exponent(eps, n, k)
    bound = math.exp(-mg.d_hat * eps * m)
    pos = mc_positions(g, list(range(k - 1)), sorted(s_grid), trials, seed)
    out_t = mg.out_matrix().T
    rows = []
    for i, s in enumerate(sorted(s_grid)):
        occ = occupation_matrix(pos[:, i, :], n)
        cnt = occ @ out_t
        freq = (cnt >= (k / n + eps) * mg.d_hat).mean(axis=0)
        j = int(freq.argmax())
        se = math.sqrt(max(freq[j] * (1 - freq[j]), 1.0 / trials) / trials)
        rows.append({"s": float(s), "v": j, "frequency": float(freq[j]), "stderr": se, "m": m, "bound": bound, "verdict": _verdict(freq[j], bound, se)})
    return rows


# ---------------------------------------------------------------- white sets


def white_set_checks(mg: Graph | ModifiedGraph, S: Sequence[int], T: float, eps: float, trials: int = 0, seed: int = 0) -> dict:
    """Size of ``Q(S) = {v : sum_{v -> u} P_T(u, S) < d_hat/16}`` against ``8 eps n d_max_in / d_hat``,
    with an optional MC test of the no-neighbour probability outside ``Q(S)``."""
    g, mm = _graph_parts(mg)
    sd = eigendecompose(g)
    n = g.n
    s = np.unique(np.asarray(S, dtype=np.int64))
    out: dict = {"S": s.tolist(), "T": float(T), "eps": float(eps)}
    p_to_s = heat_kernel(sd, T)[:, s].sum(axis=1)
    mass = mm.out_matrix() @ p_to_s
    qs = np.flatnonzero(mass < mm.d_hat / 16)
    out["Q"] = qs.tolist()
    if len(s) / n < 0.25 or T < sd.rel * abs(math.log(1 / eps)):
        out["size_verdict"] = "skipped"
        out["reason"] = "needs |S|/n >= 1/4 and T >= rel log(1/eps)"
    else:
        bound = 8 * eps * n * mm.d_max_in / mm.d_hat
        out["size_bound"] = bound
        out["size_verdict"] = "pass" if len(qs) <= bound else "fail"
    if trials:
        bound2 = (31 / 32) ** (mm.d_hat / 32)
        occ = _ex_occupation(g, s, T, trials, seed)
        none = (occ @ mm.out_matrix().T) == 0
        rows = []
        for v in np.setdiff1d(np.arange(n), qs):
            f, se = _mean_se(none[:, v])
            rows.append({"v": int(v), "frequency": f, "stderr": se, "verdict": _verdict(f, bound2, se)})
        out["no_neighbour_bound"] = bound2
        out["no_neighbour"] = rows
        out["no_neighbour_verdict"] = "pass" if all(r["verdict"] == "pass" for r in rows) else "fail"
    return out


# ---------------------------------------------------------------- negative association


def covariance_with_se(occ: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pairwise occupation covariances and their delta-method standard errors."""
    x = occ.astype(float)
    c = x - x.mean(axis=0)
    cov = c.T @ c / (x.shape[0] - 1)
    sq = (c**2).T @ (c**2) / x.shape[0]
    se = np.sqrt(np.maximum(sq - cov**2, 0.0) / x.shape[0])
    return cov, se


def na_cna_tests(g: Graph, k: int, t_grid: Sequence[float], trials: int, seed: int = 0, start: Sequence[int] | None = None, pilot: Sequence[int] | None = None) -> dict:
    """Pairwise covariance test of the EX(k) occupation field from a deterministic start.

    The CNA probe conditions on every pilot vertex being occupied and tests the
    covariance of the remaining pairs. Returns per-time rows and an overall verdict.
    """
    start = list(range(k)) if start is None else [int(x) for x in start]
    pilot = [g.n - 1] if pilot is None else [int(x) for x in pilot]
    pos = mc_positions(g, start, sorted(t_grid), trials, seed)
    iu = np.triu_indices(g.n, 1)
    rows = []
    for i, t in enumerate(sorted(t_grid)):
        occ = occupation_matrix(pos[:, i, :], g.n)
        cov, se = covariance_with_se(occ)
        excess = (cov - 3 * se)[iu]
        row = {"t": float(t), "pairs": int(len(excess)), "max_cov": float(cov[iu].max()), "max_excess_over_3se": float(excess.max()), "na": bool(np.all(excess <= 0))}
        cond = np.all(occ[:, pilot] == 1, axis=1)
        rest = np.setdiff1d(np.arange(g.n), pilot)
        if cond.sum() >= 100 and len(rest) >= 2:
            ccov, cse = covariance_with_se(occ[cond][:, rest])
            ju = np.triu_indices(len(rest), 1)
            cex = (ccov - 3 * cse)[ju]
            row.update({"cna_hits": int(cond.sum()), "cna_max_excess_over_3se": float(cex.max()), "cna": bool(np.all(cex <= 0))})
        else:
            row.update({"cna_hits": int(cond.sum()), "cna": None})
        rows.append(row)
    ok = all(r["na"] and r["cna"] is not False for r in rows)
    return {"graph": g.name, "k": k, "start": start, "pilot": pilot, "rows": rows, "verdict": "pass" if ok else "fail"}


def exact_stationary_covariance(g: Graph, k: int) -> np.ndarray:
    """Occupation covariance under the uniform law on ``k``-subsets."""
    from .exact_small import build_exact, occupation_covariance

    ep = build_exact(g, k, "ex")
    return occupation_covariance(ep, ep.stationary)


def interaction_bound_check(g_or_mg: Graph | ModifiedGraph, eps: float, trials: int, seed: int = 0) -> dict:
    """``max_v E[N-hat_{t_*}(v)]`` against ``8 d eps`` and against ``8 d (eps + t_*/n)``.

    On modified graphs ``8 d`` becomes ``4 (d_max_in + d_hat)``.

    The second form keeps the ``1/n`` stationary term of ``P_{s_*}(v, v)``
    that the first drops; the first is only attainable once ``t_* << eps n``.
    """
    from .simulate import mc_hat_interactions
    from .spectral import s_star

    g, mg = _graph_parts(g_or_mg)
    sd = eigendecompose(g)
    ts = t_star(sd, eps)
    T = sd.rel + ts + s_star(sd, eps)
    vals = mc_hat_interactions(mg, ts, T, trials, seed)
    means = vals.mean(axis=0)
    j = int(means.argmax())
    se = float(vals[:, j].std(ddof=1) / math.sqrt(trials))
    # 4 (d_max_in + d_hat) is 8 d on a plain regular graph
    w = 4 * (mg.d_max_in + mg.d_hat)
    literal = w * eps
    kept = w * (eps + ts / g.n)
    return {
        "t_star": ts,
        "T": T,
        "max_mean": float(means[j]),
        "stderr": se,
        "literal_bound": literal,
        "literal_verdict": _verdict(means[j], literal, se),
        "corrected_bound": kept,
        "corrected_verdict": _verdict(means[j], kept, se),
    }

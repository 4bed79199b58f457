"""Experiment configuration, suite orchestration and report emission.

Every check becomes a record ``{name, ref, inputs, measured, bound_or_oracle,
margin, verdict}``. Seeds for individual checks are derived from the master
seed and the check name, so reports depend only on ``(config, seed)``.
"""
from __future__ import annotations

import csv
import datetime as _dt
import json
import math
import platform
import time
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.stats import hypergeom

from . import chameleon as ch
from . import diagnostics as dg
from . import exact_small as ex
from . import spectral as spc
from .graph_core import Graph, GraphSpec, build_graph, degree_inflate, hypercube
from .simulate import mc_positions

VERDICTS = ("pass", "fail", "inconclusive", "report-only")
SUITES = ("spectral", "exact", "chameleon", "diagnostics", "ratios")


def derive_seed(master: int, name: str) -> int:
    """Stable 32-bit seed for a named check."""
    ss = np.random.SeedSequence(int(master), spawn_key=(zlib.crc32(name.encode()),))
    return int(ss.generate_state(1)[0])


# ---------------------------------------------------------------- config


@dataclass
class TrialCounts:
    chameleon: int = 20000
    goodness: int = 2000
    mc: int = 20000
    ink: int = 20000


@dataclass
class ExperimentConfig:
    """All knobs of a run. Every field has a default.

    ``c_round`` and ``c_profile`` scale the round lengths; ``burn_in`` and
    ``t_round`` override the derived values when set (desk-scale runs).
    """

    graph: GraphSpec = field(default_factory=lambda: GraphSpec("hypercube", {"dim": 3}))
    k: int = 2
    alpha: float = 0.2
    eps: float = 1e-2
    c_round: float = 8.0
    c_profile: float = 16.0
    c_hat: float = 0.1
    variant: str = "fixed"
    t_round: float | None = None
    burn_in: float | None = None
    trials: TrialCounts = field(default_factory=TrialCounts)
    seed: int = 0
    suites: list = field(default_factory=lambda: list(SUITES))
    out: str | None = None
    csv_dir: str | None = None

    def validate(self) -> None:
        if self.k < 1:
            raise ValueError("k must be positive")
        if not 0 < self.alpha < 0.25:
            raise ValueError("alpha must lie in (0, 1/4)")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.variant not in ("fixed", "variable"):
            raise ValueError("variant is 'fixed' or 'variable'")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ValueError(f"unknown suites {bad}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["graph"] = self.graph.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if "graph" in d:
            d["graph"] = GraphSpec.from_dict(d["graph"])
        if "trials" in d:
            d["trials"] = TrialCounts(**d["trials"])
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------- reports


def _clean(x):
    """JSON-safe copy: numpy scalars and arrays become Python values, non-finite floats strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else repr(v)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def record(name: str, ref: str, inputs: dict, measured, bound, margin, verdict: str, **extra) -> dict:
    if verdict not in VERDICTS:
        raise ValueError(f"bad verdict {verdict!r}")
    return {"name": name, "ref": ref, "inputs": inputs, "measured": measured, "bound_or_oracle": bound, "margin": margin, "verdict": verdict, **extra}


@dataclass
class ReportDocument:
    master_seed: int
    config: dict
    records: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    environment: dict = field(default_factory=dict)
    generated: str = ""

    def counts(self) -> dict:
        return {v: sum(r["verdict"] == v for r in self.records) for v in VERDICTS}

    def to_dict(self, timestamps: bool = True) -> dict:
        d = {"master_seed": self.master_seed, "config": self.config, "environment": self.environment, "summary": self.counts(), "records": self.records}
        if timestamps:
            d["generated"] = self.generated
            d["timing"] = self.timing
        return _clean(d)

    def to_json(self, timestamps: bool = True) -> str:
        return json.dumps(self.to_dict(timestamps), sort_keys=True, indent=2)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    def write_csv(self, folder: str | Path) -> list[Path]:
        """One CSV per suite with scalar columns only."""
        folder = Path(folder)
        folder.mkdir(parents=True, exist_ok=True)
        by_suite: dict[str, list] = {}
        for r in self.records:
            by_suite.setdefault(r.get("suite", "misc"), []).append(r)
        paths = []
        for suite, rows in by_suite.items():
            p = folder / f"{suite}.csv"
            cols = ["name", "ref", "measured", "bound_or_oracle", "margin", "verdict"]
            with p.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(cols + ["inputs"])
                for r in rows:
                    flat = [r[c] if not isinstance(r[c], (dict, list)) else json.dumps(_clean(r[c]), sort_keys=True) for c in cols]
                    w.writerow(flat + [json.dumps(_clean(r["inputs"]), sort_keys=True)])
            paths.append(p)
        return paths


def _environment() -> dict:
    import numba
    import scipy

    return {"python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__, "numba": numba.__version__}


# ---------------------------------------------------------------- shared helpers


def le_record(name: str, ref: str, inputs: dict, lhs: float, rhs: float, tol: float = 1e-9, report: bool = False) -> dict:
    margin = rhs - lhs
    ok = margin >= -tol * max(1.0, abs(lhs), abs(rhs))
    return record(name, ref, inputs, lhs, rhs, margin, "report-only" if report else ("pass" if ok else "fail"))


def sandwich_checks(g: Graph, eps: float = 1 / 8, k: int = 2) -> list[dict]:
    """Relaxation-time chain and the RW(k) versus RW(1) sandwich, from exact TV computations.

    ``rel |log eps| <= mix(eps/2) <= mix_inf(eps) <= rel log(n/eps)`` and
    ``mix(4 eps/k) / 2 <= mix^RW(k)(eps) <= mix(eps/k)``. Mixing times come
    from bisection with relative tolerance ``1e-6``, so comparisons allow that.
    """
    sd = spc.eigendecompose(g)
    tol = 4 * spc.BISECT_RTOL
    name = g.name
    mix_half = spc.t_mix_tv(sd, eps / 2)
    mix_inf = spc.t_mix_inf(sd, eps)
    chain = [
        ("rel_log_le_mix", sd.rel * abs(math.log(eps)), mix_half),
        ("mix_le_mix_inf", mix_half, mix_inf),
        ("mix_inf_le_rel_log_n", mix_inf, sd.rel * math.log(g.n / eps)),
    ]
    rw1 = ex.build_exact(g, 1, "rw")
    mk = ex.rw_mix_time(g, k, eps)
    chain += [
        ("half_mix_le_mix_rwk", 0.5 * ex.exact_mix_time(rw1, 4 * eps / k), mk),
        ("mix_rwk_le_mix", mk, ex.exact_mix_time(rw1, eps / k)),
    ]
    return [le_record(n_, "single-walk and product-chain mixing sandwiches", {"graph": name, "eps": eps, "k": k}, a, b, tol) for n_, a, b in chain]


def ex_vs_rw1_check(g: Graph, eps: float = 0.25, constant: float = 2.0**-13) -> list[dict]:
    """``mix^EX(k) >= constant * mix^RW(1)`` for every ``k`` in ``1..n-1``."""
    rw = ex.exact_mix_time(ex.build_exact(g, 1, "rw"), eps)
    rows = []
    for k in range(1, g.n):
        m = ex.exact_mix_time(ex.build_exact(g, k, "ex"), eps)
        rows.append(le_record("ex_mix_ge_scaled_rw1", "exclusion is at least a constant times one walk", {"graph": g.name, "k": k}, constant * rw, m))
    return rows


# ---------------------------------------------------------------- theorem-shape ratios


ORACLE_INSTANCES = (("complete", {"n": 4}), ("cycle", {"n": 6}), ("hypercube", {"dim": 3}))


def oliveira_ratios(instances=ORACLE_INSTANCES, k_list: Sequence[int] = (1, 2, 3), eps: float = 0.25) -> list[dict]:
    """Exact ``mix^EX(k) / mix^RW(k)`` for ``k <= n/2``."""
    rows = []
    for fam, params in instances:
        g = build_graph(GraphSpec(fam, params))
        for k in k_list:
            if k > g.n // 2:
                continue
            mex = ex.exact_mix_time(ex.build_exact(g, k, "ex"), eps)
            mrw = ex.rw_mix_time(g, k, eps)
            rows.append({"graph": g.name, "k": k, "mix_ex": mex, "mix_rw": mrw, "ratio": mex / mrw})
    return rows


def projected_hypercube_mix(dim: int, trials: int, seed: int, eps: float = 0.25, grid: int = 300) -> float:
    """Monte Carlo mixing time of EX(2^(d-1)) on ``Q_d`` through one statistic.

    Starts from the half-cube ``{x : x_0 = 0}`` and tracks how many particles
    sit in it; its stationary law is hypergeometric. The TV of a statistic is a
    lower bound on the full TV, so this underestimates the mixing time.
    """
    g = hypercube(dim)
    n = g.n
    k = n // 2
    init = [v for v in range(n) if not v & 1]
    ts = np.linspace(0.0, 3.0 * dim, grid + 1)[1:]
    pos = mc_positions(g, init, ts, trials, seed)
    cnt = ((pos & 1) == 0).sum(axis=2)
    ref = hypergeom(n, n // 2, k).pmf(np.arange(k + 1))
    tv = np.array([0.5 * np.abs(np.bincount(cnt[:, i], minlength=k + 1) / trials - ref).sum() for i in range(len(ts))])
    below = np.flatnonzero(tv <= eps)
    return float(ts[below[0]]) if len(below) else math.inf


def hypercube_shape_ratios(dims: Sequence[int] = (2, 3, 4, 5), exact_max_dim: int = 4, trials: int = 20000, seed: int = 0) -> list[dict]:
    """``mix^EX(k) / (d log(dk))`` with ``k = 2^(d-1)``.

    Exact through symmetry orbits up to ``exact_max_dim``; projected MC beyond.
    """
    rows = []
    for d in dims:
        k = 2 ** (d - 1)
        if d <= exact_max_dim:
            ep = ex.build_exact(hypercube(d), k, "ex")
            reps = ex.orbit_representatives(ep, ex.hypercube_automorphisms(d))
            mix = ex.exact_mix_time_reps(ep, 0.25, reps, d / 2)
            method = "exact"
        else:
            mix = projected_hypercube_mix(d, trials, seed + d)
            method = "projected-mc"
        rows.append({"d": d, "k": k, "mix_ex": mix, "shape": d * math.log(d * k), "ratio": mix / (d * math.log(d * k)), "method": method})
    return rows


def theorem_ratios(cfg: ExperimentConfig | None = None, hypercube_dims: Sequence[int] = (2, 3)) -> list[dict]:
    """Report-only ratios of exact exclusion mixing times against the theorem shapes.

    Rows: general shape ``(rel + r_*) log(4n)``, the EX(k)/RW(k) ratio, the
    high-degree shape ``rel log(n/eps)`` and the hypercube ``d log(dk)`` shape.
    """
    cfg = cfg or ExperimentConfig()
    eps = cfg.eps
    rows = []
    for fam, params in ORACLE_INSTANCES:
        g = build_graph(GraphSpec(fam, params))
        sd = spc.eigendecompose(g)
        rs = spc.r_star(sd, eps)
        for k in range(1, g.n // 2 + 1):
            mex = ex.exact_mix_time(ex.build_exact(g, k, "ex"), 0.25)
            mrw = ex.rw_mix_time(g, k, 0.25)
            rows.append({"graph": g.name, "k": k, "shape": "general", "value": mex / ((sd.rel + rs) * math.log(g.n / 0.25))})
            rows.append({"graph": g.name, "k": k, "shape": "ex_over_rw", "value": mex / mrw})
            rows.append({"graph": g.name, "k": k, "shape": "high_degree", "value": mex / (sd.rel * math.log(g.n / eps))})
    for r in hypercube_shape_ratios(hypercube_dims, exact_max_dim=max(hypercube_dims)):
        rows.append({"graph": f"Q{r['d']}", "k": r["k"], "shape": "hypercube", "value": r["ratio"]})
    return rows


# ---------------------------------------------------------------- suites


def _suite_spectral(cfg: ExperimentConfig, g: Graph) -> list[dict]:
    sd = spc.eigendecompose(g)
    mf = spc.mixing_functionals(sd, [cfg.eps, 0.25])
    pt = spc.profiles(g, sd, [cfg.eps, 0.25])
    out = []
    for row in spc.inequality_suite(sd, pt, mf, seed=derive_seed(cfg.seed, "spectral")):
        row = dict(row)
        name = row.pop("name")
        verdict = row.pop("verdict")
        margin = row.pop("margin", None)
        measured = row.pop("lhs", row.pop("measured", None))
        bound = row.pop("rhs", None)
        out.append(record(name, "spectral inequalities", row, measured, bound, margin, verdict))
    out.append(record("relaxation_time", "inverse spectral gap", {}, sd.rel, None, None, "report-only", functionals=mf.to_dict()))
    if cfg.graph.family == "hypercube":
        d = int(cfg.graph.params["dim"])
        out.append(record("hypercube_rel", "rel = d/2 on Q_d", {"d": d}, sd.rel, d / 2, abs(sd.rel - d / 2), "pass" if abs(sd.rel - d / 2) <= 1e-10 else "fail"))
    return out


def _suite_exact(cfg: ExperimentConfig, g: Graph) -> list[dict]:
    out = []
    ks = sorted({1, min(cfg.k, g.n - 1), min(2, g.n - 1)})
    ald = ex.aldous_check(g, ks)
    out.append(record("gap_equality", "spectral gaps of EX, IP and RW(1) agree", {"k": ks}, ald["max_discrepancy"], 1e-8, 1e-8 - ald["max_discrepancy"], "pass" if ald["max_discrepancy"] <= 1e-8 else "fail"))
    k = max(2, cfg.k)
    if k < g.n:
        ip = ex.build_exact(g, k, "ip")
        sd = spc.eigendecompose(g)
        for t in (0.5 * sd.rel, sd.rel, 2 * sd.rel):
            rc = ex.reduction_chain(ip, t)
            out.append(record("reduction_chain", "exclusion to one-particle reduction chain", {"k": k, "t": t}, rc, None, None, "pass" if rc["chain_ok"] else "fail"))
        for row in ex.conjecture_probe(g, k, [0.5 * sd.rel, sd.rel, 2 * sd.rel]):
            out.append(record("ip_vs_rw_probe", "interchange versus independent walks", {"k": k, "t": row["t"]}, row, None, None, "report-only"))
    out += sandwich_checks(g, 1 / 8, 2)
    out += ex_vs_rw1_check(g)
    return out


def chameleon_params(cfg: ExperimentConfig, g: Graph, sd: spc.SpectralData) -> ch.RoundParams:
    seed = derive_seed(cfg.seed, "goodness")
    extra = {"goodness_trials": cfg.trials.goodness, "seed": seed}
    if cfg.burn_in is not None:
        extra["burn_in"] = cfg.burn_in
    if cfg.variant == "fixed":
        p = ch.fixed_params(g, sd, cfg.alpha, cfg.eps, cfg.c_round, **extra)
        if cfg.t_round is not None:
            p.t_round = cfg.t_round
        return p
    return ch.variable_params(g, cfg.k, sd, cfg.alpha, cfg.c_round, cfg.c_profile, cfg.c_hat, **extra)


def _suite_chameleon(cfg: ExperimentConfig, g: Graph) -> list[dict]:
    out = []
    sd = spc.eigendecompose(g)
    params = chameleon_params(cfg, g, sd)
    k = max(2, cfg.k)
    w, y = list(range(k - 1)), g.n - 1
    inputs = {"k": k, "alpha": cfg.alpha, "variant": cfg.variant, "trials": cfg.trials.chameleon}
    batch = ch.run_chameleon(g, w, y, params, cfg.trials.chameleon, derive_seed(cfg.seed, "chameleon"))
    s = batch.summary()
    p, se = s["fill_probability"], s["fill_stderr"]
    target = s["fill_target"]
    out.append(record("fill_probability", "ink martingale", inputs, p, target, 3 * se - abs(p - target), "pass" if abs(p - target) <= 3 * se else "fail", summary=s))
    t1, t1se = s["type1_per_round"], s["type1_stderr"]
    # the inner goodness estimate adds bias, so this one is reported rather than asserted
    out.append(record("type1_rate", "type-1 depinking probability alpha/2", inputs, t1, cfg.alpha / 2, 3 * t1se - abs(t1 - cfg.alpha / 2), "report-only"))
    if math.perm(g.n, k) <= 2000:
        times = [0.5 * sd.rel, sd.rel, 2 * sd.rel]
        rows = ch.verify_ink_identity(g, w, y, times, params, cfg.trials.ink, derive_seed(cfg.seed, "ink"))
        worst = max(abs(r.z_score) for r in rows if r.t > 0)
        out.append(record("ink_identity", "ink equals the interchange law", {"k": k, "times": times}, worst, 4.0, 4.0 - worst, "pass" if worst <= 4 else "fail"))
    chain = ch.doob_chain(g.n, k, cfg.alpha)
    c = ch.supermartingale_verify(chain)
    paths = ch.simulate_y(chain, 30, cfg.trials.mc, derive_seed(cfg.seed, "doob"))
    miss = 1 - paths / chain.big_n
    mean = miss.mean(axis=0)
    se_m = miss.std(axis=0, ddof=1) / math.sqrt(paths.shape[0])
    bound = c ** np.arange(31) * math.sqrt(chain.big_n)
    ok = bool(np.all(mean <= bound + 3 * se_m))
    out.append(record("doob_decay", "ink supermartingale", {"N": chain.big_n, "alpha": cfg.alpha}, mean, bound, float(np.min(bound + 3 * se_m - mean)), "pass" if ok else "fail", c=c))
    return out


def _suite_diagnostics(cfg: ExperimentConfig, g: Graph) -> list[dict]:
    out = []
    sd = spc.eigendecompose(g)
    mc = cfg.trials.mc
    rng = np.random.default_rng(derive_seed(cfg.seed, "nice-sets"))
    for size in sorted({1, 2, max(1, g.n // 4), g.n // 2}):
        S = np.sort(rng.choice(g.n, size, replace=False))
        for T in (1.0, sd.rel):
            try:
                rep = dg.nice_set(g, S, T, sd)
                out.append(record("nice_counting", "counting bound on non-nice vertices", {"S": S, "T": T}, rep.complement_size, rep.counting_bound, rep.gap, "pass"))
                out.append(record("nice_hit", "uniform start lands in Nice", {"S": S, "T": T, "eps": cfg.eps}, rep.hit_probability, rep.pi_nice - cfg.eps, rep.hit_margin(cfg.eps), "report-only"))
            except dg.CountingError as exc:
                out.append(record("nice_counting", "counting bound on non-nice vertices", {"S": S, "T": T}, str(exc), None, None, "fail"))
    S = list(range(max(1, g.n // 4)))
    bn = dg.bn_gn_estimate(g, S, 1.0, 0.5, mc, derive_seed(cfg.seed, "bn"))
    worst = bn.worst
    verdict = "inconclusive" if worst is None else ("pass" if bn.ok else "fail")
    out.append(record("bn_given_n", "Chernoff bound for crowded nice vertices", {"S": S, "theta": 0.5}, worst and worst["frequency"], bn.chernoff, worst and bn.chernoff + 3 * worst["stderr"] - worst["frequency"], verdict))
    for k in sorted({2, min(3, g.n - 1)}):
        na = dg.na_cna_tests(g, k, [0.5, 1.0, 2.0], mc, derive_seed(cfg.seed, f"na{k}"))
        worst = max(r["max_excess_over_3se"] for r in na["rows"])
        out.append(record("negative_association", "occupation covariances are nonpositive", {"k": k}, worst, 0.0, -worst, na["verdict"], rows=na["rows"]))
    k = max(2, min(cfg.k, g.n // 2))
    if k <= g.n // 2:
        for row in dg.black_ld_check(g, k, 1 / 16, [sd.rel, 2 * sd.rel], mc, derive_seed(cfg.seed, "black")):
            out.append(record("black_large_deviation", "black neighbour large deviation", {"k": k, "eps": 1 / 16, "s": row["s"]}, row["frequency"], row["bound"], row["bound"] + 3 * row["stderr"] - row["frequency"], row["verdict"], m=row["m"]))
    q = dg.q_weight_checks(g, cfg.eps, None, mc, derive_seed(cfg.seed, "q"), k=k)
    out.append(record("q_weight_max", "Q weights below the heat kernel maximum", {"eps": cfg.eps}, float(q.q.max()), q.max_p_tstar, q.max_p_tstar - float(q.q.max()), q.verdict))
    out.append(record("q_weighted_sum_exceedance", "weighted black sum above k/n + 1/16", {"eps": cfg.eps, "k": k}, q.exceedance, None, None, "report-only", note=q.exceedance_note))
    mg = degree_inflate(g, g.d + 2) if g.is_regular and g.n > g.d + 3 else g
    white_S = list(range(max(1, g.n // 2)))
    wt = dg.white_set_checks(mg, white_S, sd.rel * math.log(1 / 0.05), 0.05, mc, derive_seed(cfg.seed, "white"))
    if wt["size_verdict"] != "skipped":
        out.append(record("white_set_size", "few vertices far from white", {"S": white_S, "eps": 0.05}, len(wt["Q"]), wt["size_bound"], wt["size_bound"] - len(wt["Q"]), wt["size_verdict"]))
    out.append(record("white_no_neighbour", "no white neighbour is unlikely", {"S": white_S}, max((r["frequency"] for r in wt["no_neighbour"]), default=0.0), wt["no_neighbour_bound"], None, wt["no_neighbour_verdict"]))
    ib = dg.interaction_bound_check(g, cfg.eps, max(2000, mc // 5), derive_seed(cfg.seed, "interactions"))
    out.append(record("interaction_bound_literal", "expected interactions up to t_*", {"eps": cfg.eps}, ib["max_mean"], ib["literal_bound"], ib["literal_bound"] - ib["max_mean"], ib["literal_verdict"]))
    out.append(record("interaction_bound_with_stationary_term", "expected interactions up to t_*", {"eps": cfg.eps}, ib["max_mean"], ib["corrected_bound"], ib["corrected_bound"] - ib["max_mean"], ib["corrected_verdict"]))
    return out


def _suite_ratios(cfg: ExperimentConfig, g: Graph) -> list[dict]:
    return [record(f"ratio_{r['shape']}", "theorem shape", {"graph": r["graph"], "k": r["k"]}, r["value"], None, None, "report-only") for r in theorem_ratios(cfg)]


SUITE_FUNCS: dict[str, Callable[[ExperimentConfig, Graph], list]] = {
    "spectral": _suite_spectral,
    "exact": _suite_exact,
    "chameleon": _suite_chameleon,
    "diagnostics": _suite_diagnostics,
    "ratios": _suite_ratios,
}


def run_suite(cfg: ExperimentConfig) -> ReportDocument:
    """Run the selected suites; any error becomes a failed record and the run continues."""
    cfg.validate()
    doc = ReportDocument(cfg.seed, cfg.to_dict(), environment=_environment(), generated=_dt.datetime.now(_dt.timezone.utc).isoformat())
    if not cfg.suites:
        return doc
    g = build_graph(cfg.graph)
    for name in cfg.suites:
        t0 = time.perf_counter()
        try:
            rows = SUITE_FUNCS[name](cfg, g)
        except Exception as exc:  # fail-soft: record and continue
            rows = [record(f"{name}_error", "suite execution", {}, f"{type(exc).__name__}: {exc}", None, None, "fail")]
        for r in rows:
            r["suite"] = name
        doc.records.extend(_clean(rows))
        doc.timing[name] = time.perf_counter() - t0
    if cfg.out:
        doc.write(cfg.out)
    if cfg.csv_dir:
        doc.write_csv(cfg.csv_dir)
    return doc

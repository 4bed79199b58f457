"""Command-line entry point ``exmix``: a thin layer over the library."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import chameleon as ch
from . import diagnostics as dg
from . import exact_small as ex
from . import spectral as spc
from .graph_core import GraphSpec, build_graph, read_graph, write_graph
from .harness import ExperimentConfig, _clean, derive_seed, run_suite
from .simulate import mc_positions, occupation_matrix


def _emit(payload: dict, path: str | None) -> None:
    text = json.dumps(_clean(payload), sort_keys=True, indent=2)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def cmd_gen(a: argparse.Namespace) -> int:
    params = {}
    for key in ("n", "d", "dim", "side", "leaves", "p"):
        val = getattr(a, key)
        if val is not None:
            params[key] = val
    g = build_graph(GraphSpec(a.family, params, a.seed))
    write_graph(g, a.out)
    print(f"{g.name}: n={g.n} m={g.m} -> {a.out}")
    return 0


def cmd_spectral(a: argparse.Namespace) -> int:
    g = read_graph(a.graph)
    sd = spc.eigendecompose(g)
    eps = a.eps
    mf = spc.mixing_functionals(sd, eps)
    pt = spc.profiles(g, sd, eps)
    rows = spc.inequality_suite(sd, pt, mf, seed=a.seed)
    _emit({"graph": g.name, "functionals": mf.to_dict(), "profiles": pt.to_dict(), "inequalities": rows}, a.json)
    return 0


def cmd_simulate(a: argparse.Namespace) -> int:
    g = read_graph(a.graph)
    k = a.k if a.process != "rw" else 1
    init = list(range(k))
    pos = mc_positions(g, init, [a.t], a.trials, a.seed, mode=a.mode)[:, 0, :]
    sd = spc.eigendecompose(g)
    pt = spc.heat_kernel(sd, a.t)
    occ = occupation_matrix(pos, g.n).mean(axis=0)
    oracle = pt[init].sum(axis=0)
    out = {"graph": g.name, "process": a.process, "k": k, "t": a.t, "trials": a.trials, "occupation": occ, "oracle": oracle, "max_abs_error": float(np.abs(occ - oracle).max())}
    if a.process == "ip":
        out["particle_marginals"] = [np.bincount(pos[:, j], minlength=g.n) / a.trials for j in range(k)]
    _emit(out, a.json)
    return 0


def cmd_chameleon(a: argparse.Namespace) -> int:
    g = read_graph(a.graph)
    cfg = ExperimentConfig(k=a.k, alpha=a.alpha, variant=a.variant, seed=a.seed, t_round=a.t_round, burn_in=a.burn_in)
    cfg.graph = GraphSpec("file", {"path": a.graph})
    cfg.trials.goodness = a.goodness_trials
    from .harness import chameleon_params

    params = chameleon_params(cfg, g, spc.eigendecompose(g))
    batch = ch.run_chameleon(g, list(range(a.k - 1)), g.n - 1, params, a.trials, derive_seed(a.seed, "chameleon"))
    _emit({"graph": g.name, "k": a.k, "params": {"t_round": params.t_round, "l_table": params.l_table, "burn_in": params.burn_in}, "summary": batch.summary()}, a.json)
    return 0


def cmd_exact(a: argparse.Namespace) -> int:
    g = read_graph(a.graph)
    ep = ex.build_exact(g, a.k, a.process)
    out = {"graph": g.name, "process": a.process, "k": a.k, "states": ep.size, "gap": ex.process_gap(ep), "mix": ex.exact_mix_time(ep, a.eps), "eps": a.eps}
    _emit(out, a.json)
    return 0


def cmd_diag(a: argparse.Namespace) -> int:
    g = read_graph(a.graph)
    sd = spc.eigendecompose(g)
    S = [int(x) for x in a.S.split(",")] if a.S else list(range(max(1, g.n // 4)))
    T = a.T if a.T is not None else sd.rel
    if a.suite == "nice":
        rep = dg.nice_set(g, S, T, sd)
        out = {"S": S, "T": T, "nice": rep.nice, "complement": rep.complement_size, "bound": rep.counting_bound, "margin": rep.gap, "verdict": "pass"}
    elif a.suite == "chernoff":
        rep = dg.bn_gn_estimate(g, S, T, a.theta, a.trials, a.seed)
        out = {"S": S, "T": T, "theta": a.theta, "chernoff": rep.chernoff, "rows": rep.rows, "verdict": "pass" if rep.ok else "fail"}
    elif a.suite == "na":
        out = dg.na_cna_tests(g, a.k, [0.5, 1.0, 2.0], a.trials, a.seed)
    elif a.suite == "white":
        out = dg.white_set_checks(g, S, T, a.eps, a.trials, a.seed)
    else:
        rows = dg.black_ld_check(g, a.k, a.eps, [T, 2 * T], a.trials, a.seed)
        out = {"rows": rows, "verdict": "pass" if all(r["verdict"] == "pass" for r in rows) else "fail"}
    _emit(out, a.json)
    return 0


def cmd_suite(a: argparse.Namespace) -> int:
    cfg = ExperimentConfig.from_json(Path(a.config).read_text()) if a.config else ExperimentConfig()
    cfg.out = a.out
    cfg.csv_dir = a.csv
    doc = run_suite(cfg)
    c = doc.counts()
    print(" ".join(f"{k}={v}" for k, v in c.items()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exmix", description="Exclusion-process mixing experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", help="write a graph file")
    s.add_argument("--family", required=True, choices=["complete", "cycle", "path", "star", "hypercube", "torus", "random_regular", "percolation_giant"])
    for key, typ in (("n", int), ("d", int), ("dim", int), ("side", int), ("leaves", int), ("p", float)):
        s.add_argument(f"--{key}", type=typ)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("spectral", help="mixing functionals, profiles and inequality margins")
    s.add_argument("--graph", required=True)
    s.add_argument("--eps", type=float, nargs="+", default=[0.25])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json")
    s.set_defaults(func=cmd_spectral)

    s = sub.add_parser("simulate", help="Monte Carlo occupation law against the heat kernel")
    s.add_argument("--graph", required=True)
    s.add_argument("--process", choices=["rw", "ex", "ip"], default="ex")
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--trials", type=int, default=100000)
    s.add_argument("--mode", choices=["standard", "modified"], default="standard")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("chameleon", help="run the chameleon process")
    s.add_argument("--graph", required=True)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--alpha", type=float, default=0.2)
    s.add_argument("--variant", choices=["fixed", "variable"], default="fixed")
    s.add_argument("--t-round", type=float)
    s.add_argument("--burn-in", type=float)
    s.add_argument("--goodness-trials", type=int, default=2000)
    s.add_argument("--trials", type=int, default=10000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json")
    s.set_defaults(func=cmd_chameleon)

    s = sub.add_parser("exact", help="exact gap and mixing time of a small process")
    s.add_argument("--graph", required=True)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--process", choices=["ex", "ip", "rw"], default="ex")
    s.add_argument("--eps", type=float, default=0.25)
    s.add_argument("--json")
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("diag", help="round-analysis diagnostics")
    s.add_argument("--suite", choices=["nice", "chernoff", "na", "white", "blackld"], required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--S", help="comma-separated vertex set")
    s.add_argument("--T", type=float)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--eps", type=float, default=1 / 16)
    s.add_argument("--theta", type=float, default=0.5)
    s.add_argument("--trials", type=int, default=20000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json")
    s.set_defaults(func=cmd_diag)

    s = sub.add_parser("suite", help="run an experiment configuration")
    s.add_argument("--config")
    s.add_argument("--out")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_suite)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"exmix: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Graphical constructions and trajectories of RW(1), EX(k), IP(k).

A stream is one merged Poisson process over all edges: exponential
inter-arrival times at the total rate, a uniform edge per event and, in the
modified construction, a fair coin deciding whether the swap is applied.
Every process is a deterministic function of the stream.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .graph_core import Graph, ModifiedGraph, as_modified

CHUNK = 4096


def trial_generator(master_seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for trial ``index`` of ``master_seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(index,))))


def total_rate(g: Graph, mode: str) -> float:
    base = g.m * g.rate_per_edge
    if mode == "standard":
        return base
    if mode == "modified":
        return 2 * base
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True, eq=False)
class EventStream:
    """Time-ordered ring events ``(times[j], edges[j], coins[j])`` on ``[0, horizon]``.

    ``coins`` is ``None`` in the standard construction.
    """

    graph: Graph
    horizon: float
    mode: str
    seed: int
    times: np.ndarray
    edges: np.ndarray
    coins: np.ndarray | None

    def __len__(self) -> int:
        return int(self.times.shape[0])

    def active(self) -> np.ndarray:
        """Boolean mask of events whose swap is applied."""
        if self.coins is None:
            return np.ones(len(self), dtype=bool)
        return self.coins.astype(bool)


def sample_events(g: Graph, horizon: float, mode: str = "standard", seed: int = 0) -> EventStream:
    """Sample a stream; draws come in fixed-size chunks so longer horizons extend shorter ones."""
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    rate = total_rate(g, mode)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    times, edges, coins = [], [], []
    clock = 0.0
    while horizon > 0:
        gaps = rng.exponential(1.0 / rate, size=CHUNK)
        e = rng.integers(g.m, size=CHUNK)
        c = rng.integers(2, size=CHUNK, dtype=np.int8)
        tt = clock + np.cumsum(gaps)
        keep = tt <= horizon
        times.append(tt[keep])
        edges.append(e[keep])
        coins.append(c[keep])
        clock = tt[-1]
        if not keep.all():
            break
    t = np.concatenate(times) if times else np.zeros(0)
    ev = np.concatenate(edges) if edges else np.zeros(0, dtype=np.int64)
    cn = np.concatenate(coins) if coins else np.zeros(0, dtype=np.int8)
    for a in (t, ev, cn):
        a.flags.writeable = False
    return EventStream(g, float(horizon), mode, seed, t, ev, cn if mode == "modified" else None)


def extend(es: EventStream, horizon: float) -> EventStream:
    """Stream on a longer horizon whose prefix equals ``es``."""
    if horizon < es.horizon:
        raise ValueError("can only extend to a longer horizon")
    return sample_events(es.graph, horizon, es.mode, es.seed)


def interval_map(es: EventStream, s: float, t: float) -> np.ndarray:
    """Permutation ``I_[s,t]``: ``perm[x]`` is where the content of ``x`` at ``s`` sits at ``t``."""
    if not 0 <= s <= t <= es.horizon:
        raise ValueError("interval outside the stream horizon")
    n = es.graph.n
    occ = np.arange(n)
    lo = np.searchsorted(es.times, s, side="right")
    hi = np.searchsorted(es.times, t, side="right")
    act = es.active()
    ends = es.graph.edges
    for j in range(lo, hi):
        if act[j]:
            u, v = ends[es.edges[j]]
            occ[u], occ[v] = occ[v], occ[u]
    perm = np.empty(n, dtype=np.int64)
    perm[occ] = np.arange(n)
    return perm


@dataclass
class Trajectories:
    """Interchange positions after each applied event, with the derived projections."""

    times: np.ndarray
    positions: np.ndarray  # (events + 1, k)

    def _row(self, t: float) -> int:
        return int(np.searchsorted(self.times, t, side="right"))

    def ip_at(self, t: float) -> tuple:
        return tuple(int(x) for x in self.positions[self._row(t)])

    def ex_at(self, t: float) -> frozenset:
        return frozenset(self.ip_at(t))

    def rw_at(self, t: float) -> int:
        return int(self.positions[self._row(t), 0])


def run_processes(es: EventStream, init: Sequence[int]) -> Trajectories:
    """Trajectories of IP(k) from ``init``; EX is its unordered set and RW(1) its first particle."""
    init = [int(x) for x in init]
    if len(set(init)) != len(init):
        raise ValueError("initial vertices must be distinct")
    if any(not 0 <= x < es.graph.n for x in init):
        raise ValueError("initial vertex out of range")
    n = es.graph.n
    occ = -np.ones(n, dtype=np.int64)
    pos = np.array(init, dtype=np.int64)
    occ[pos] = np.arange(len(init))
    act = es.active()
    ends = es.graph.edges
    rows = [pos.copy()]
    times = [0.0]
    for j in np.flatnonzero(act):
        u, v = ends[es.edges[j]]
        a, b = occ[u], occ[v]
        occ[u], occ[v] = b, a
        if a >= 0:
            pos[a] = v
        if b >= 0:
            pos[b] = u
        rows.append(pos.copy())
        times.append(es.times[j])
    # row i holds the state after the i-th applied event; the first row is time 0
    return Trajectories(np.array(times[1:]), np.array(rows))


def interaction_counts(es: EventStream, pairs: Iterable[tuple[int, int]], t: float) -> dict:
    """Rings of the edge joining each tracked particle pair during ``[0, t]``.

    Both coin outcomes count. Particles are named by their starting vertex.
    """
    pairs = [(int(a), int(b)) for a, b in pairs]
    n = es.graph.n
    occ = np.arange(n)
    counts = {p: 0 for p in pairs}
    act = es.active()
    ends = es.graph.edges
    hi = np.searchsorted(es.times, t, side="right")
    for j in range(hi):
        u, v = ends[es.edges[j]]
        a, b = occ[u], occ[v]
        for p in pairs:
            if (p[0] == a and p[1] == b) or (p[0] == b and p[1] == a):
                counts[p] += 1
        if act[j]:
            occ[u], occ[v] = b, a
    return counts


def hat_interactions(es: EventStream, v: int, t: float, horizon_map: float, mg: ModifiedGraph | None = None) -> int:
    """``sum over u with I_[0,T](v) -> u`` of interactions between ``v`` and the particle ending at ``u``."""
    if t > horizon_map:
        raise ValueError("need t <= T")
    g = es.graph
    mgr = as_modified(g) if mg is None else mg
    perm = interval_map(es, 0.0, horizon_map)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(g.n)
    partners = [int(inv[u]) for u in mgr.out_neighbors(int(perm[v]))]
    counts = interaction_counts(es, [(v, p) for p in partners if p != v], t)
    return int(sum(counts.values()))


# ---------------------------------------------------------------- bulk Monte Carlo


def mc_positions(g: Graph, init: Sequence[int], times: Sequence[float], trials: int, seed: int, mode: str = "standard") -> np.ndarray:
    """Positions of labelled particles at ``times`` over independent streams; shape ``(trials, T, k)``."""
    init_arr = np.asarray(init, dtype=np.int64)
    if len(set(init_arr.tolist())) != len(init_arr):
        raise ValueError("initial vertices must be distinct")
    t_arr = np.asarray(times, dtype=float)
    if np.any(np.diff(t_arr) < 0):
        raise ValueError("times must be sorted")
    return K.mc_positions(g.edges, g.n, total_rate(g, mode), mode == "modified", init_arr, t_arr, int(trials), int(seed))


def occupation_matrix(positions: np.ndarray, n: int) -> np.ndarray:
    """0/1 occupation of each vertex from ``(trials, k)`` positions."""
    occ = np.zeros((positions.shape[0], n), dtype=np.int8)
    rows = np.repeat(np.arange(positions.shape[0]), positions.shape[1])
    occ[rows, positions.ravel()] = 1
    return occ


def mc_pair_interactions(g: Graph, a: int, b: int, t: float, trials: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Interaction counts and adjacency times of two particles under the modified stream."""
    adj = g.adjacency().astype(np.bool_)
    return K.mc_pair_interactions(g.edges, g.n, adj, total_rate(g, "modified"), int(a), int(b), float(t), int(trials), int(seed))


def mc_perm_interactions(g: Graph, t_int: float, t_map: float, trials: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    return K.mc_perm_interactions(g.edges, g.n, total_rate(g, "modified"), float(t_int), float(t_map), int(trials), int(seed))


def mc_hat_interactions(mg: Graph | ModifiedGraph, t: float, horizon_map: float, trials: int, seed: int) -> np.ndarray:
    """``N-hat_t(v)`` for every ``v`` over independent modified streams; shape ``(trials, n)``."""
    mgr = as_modified(mg)
    g = mgr.base
    perm, inter = mc_perm_interactions(g, t, horizon_map, trials, seed)
    out_mat = mgr.out_matrix()
    inv = np.empty_like(perm)
    np.put_along_axis(inv, perm, np.arange(g.n)[None, :].repeat(trials, 0), axis=1)
    res = np.zeros((trials, g.n))
    for v in range(g.n):
        mask = out_mat[perm[:, v]]  # (trials, n) over end positions u
        partner = inv  # partner[tr, u] is the particle ending at u
        vals = np.take_along_axis(inter[:, v, :], partner, axis=1)
        res[:, v] = (mask * vals).sum(axis=1)
    return res

"""Exact finite-state computations for RW(k), EX(k) and IP(k) on tiny graphs.

States are enumerated explicitly and the symmetric rate matrix is built from
edge transpositions (EX, IP) or independent single-walk moves (RW(k)). The
stationary law is uniform on states in every case.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy import linalg
from scipy.sparse.linalg import expm_multiply

from .graph_core import Graph
from .spectral import bisect_time

STATE_CAP = 200_000
DENSE_STATES = 5000


class StateCapError(ValueError):
    """State space larger than the configured cap."""


@dataclass(eq=False)
class ExactProcess:
    """Enumerated process with a symmetric sparse rate matrix ``Q``."""

    tag: str
    k: int
    states: list
    index: dict
    rates: sp.csr_matrix
    graph: Graph
    _eig: tuple | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def stationary(self) -> np.ndarray:
        return np.full(self.size, 1.0 / self.size)

    def dense(self) -> np.ndarray:
        return self.rates.toarray()

    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Cached eigendecomposition of the symmetric ``-Q`` (dense sizes only)."""
        if self._eig is None:
            if self.size > DENSE_STATES:
                raise StateCapError(f"{self.size} states exceed the dense limit {DENSE_STATES}")
            self._eig = linalg.eigh(-self.dense())
        return self._eig

    def kernel(self, t: float) -> np.ndarray:
        """Full transition matrix ``exp(tQ)`` by scaling and squaring."""
        return linalg.expm(t * self.dense())

    def kernel_spectral(self, t: float) -> np.ndarray:
        lam, u = self.eig()
        return (u * np.exp(-lam * t)) @ u.T

    def init_vector(self, init) -> np.ndarray:
        if isinstance(init, np.ndarray) and init.dtype.kind == "f" and init.shape == (self.size,):
            return init
        i = init if isinstance(init, (int, np.integer)) else self.index[self.key(init)]
        v = np.zeros(self.size)
        v[int(i)] = 1.0
        return v

    def key(self, state):
        if self.tag == "ex":
            return tuple(sorted(state))
        return tuple(state)

    def distribution(self, t: float, init) -> np.ndarray:
        """Law at time ``t`` from a state, a state index, or a probability vector."""
        mu = self.init_vector(init)
        if t == 0:
            return mu.copy()
        if self.size <= DENSE_STATES:
            # Q is symmetric, so mu exp(tQ) = exp(tQ) mu
            return self.kernel(t) @ mu
        return expm_multiply(self.rates * t, mu)


def _check_cap(count: int, tag: str) -> None:
    if count > STATE_CAP:
        raise StateCapError(f"{tag}: {count} states exceed the cap {STATE_CAP}")


def build_exact(g: Graph, k: int, tag: str) -> ExactProcess:
    """Enumerate states and rates of ``tag`` in {``ex``, ``ip``, ``rw``}.

    Every edge rings at ``g.rate_per_edge`` and swaps the contents of its
    endpoints; for ``rw`` the ``k`` walkers move independently.
    """
    n = g.n
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if tag == "ex":
        _check_cap(math.comb(n, k), tag)
        states = list(combinations(range(n), k))
    elif tag == "ip":
        _check_cap(math.perm(n, k), tag)
        states = list(permutations(range(n), k))
    elif tag == "rw":
        _check_cap(n**k, tag)
        states = list(product(range(n), repeat=k))
    else:
        raise ValueError(f"unknown process tag {tag!r}")
    index = {s: i for i, s in enumerate(states)}
    rate = g.rate_per_edge
    rows, cols = [], []
    arr = np.array(states, dtype=np.int64).reshape(len(states), k)
    if tag in ("ex", "ip"):
        for u, v in g.edges:
            swapped = np.where(arr == u, v, np.where(arr == v, u, arr))
            moved = np.any(swapped != arr, axis=1)
            src = np.flatnonzero(moved)
            keys = swapped[src]
            if tag == "ex":
                keys = np.sort(keys, axis=1)
            rows.extend(src.tolist())
            cols.extend(index[tuple(x)] for x in keys.tolist())
    else:
        for j in range(k):
            for u, v in g.edges:
                for a, b in ((u, v), (v, u)):
                    src = np.flatnonzero(arr[:, j] == a)
                    nxt = arr[src].copy()
                    nxt[:, j] = b
                    rows.extend(src.tolist())
                    cols.extend(index[tuple(x)] for x in nxt.tolist())
    size = len(states)
    off = sp.csr_matrix((np.full(len(rows), rate), (rows, cols)), shape=(size, size))
    q = off - sp.diags(np.asarray(off.sum(axis=1)).ravel())
    return ExactProcess(tag, k, states, index, q.tocsr(), g)


# ---------------------------------------------------------------- distances


def tv(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())


def exact_tv(ep: ExactProcess, t: float, init) -> float:
    """TV distance to the uniform law at time ``t``."""
    return tv(ep.distribution(t, init), ep.stationary)


def worst_tv(ep: ExactProcess, t: float) -> float:
    """Worst-start TV distance, exhaustive over all states."""
    p = ep.kernel_spectral(t) if ep.size <= DENSE_STATES else None
    if p is not None:
        return float(0.5 * np.abs(p - 1.0 / ep.size).sum(axis=1).max())
    return max(exact_tv(ep, t, i) for i in range(ep.size))


def exact_mix_time(ep: ExactProcess, eps: float) -> float:
    """``inf{t : max_x TV(t, x) <= eps}`` by bisection."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    lam, _ = ep.eig()
    gap = lam[1] if ep.size > 1 else 1.0
    return bisect_time(lambda t: worst_tv(ep, t), eps, 1.0 / gap).value


def delta_xy(ep_ip: ExactProcess, x, y, t: float) -> float:
    """TV distance between IP laws at time ``t`` started from ``x`` and ``y``."""
    return tv(ep_ip.distribution(t, x), ep_ip.distribution(t, y))


def project_ip_to_ex(ep_ip: ExactProcess, ep_ex: ExactProcess, mu: np.ndarray) -> np.ndarray:
    out = np.zeros(ep_ex.size)
    for i, s in enumerate(ep_ip.states):
        out[ep_ex.index[tuple(sorted(s))]] += mu[i]
    return out


def reduction_chain(ep_ip: ExactProcess, t: float) -> dict:
    """Evaluate the chain of bounds from exclusion TV down to one particle.

    Returns the worst exclusion TV, worst interchange TV, ``max Delta``, the
    ``k``-times last-coordinate maximum and the doubled conditional-law bound.
    """
    g, k = ep_ip.graph, ep_ip.k
    ep_ex = build_exact(g, k, "ex")
    pt = ep_ip.kernel_spectral(t)
    ex_tv = worst_tv(ep_ex, t)
    ip_tv = float(0.5 * np.abs(pt - 1.0 / ep_ip.size).sum(axis=1).max())
    size = ep_ip.size
    pair = 0.5 * np.abs(pt[:, None, :] - pt[None, :, :]).sum(axis=2) if size <= 800 else None
    if pair is not None:
        max_delta = float(pair.max())
    else:
        max_delta = max(tv(pt[i], pt[j]) for i in range(size) for j in range(i + 1, size))
    last = 0.0
    for i, s in enumerate(ep_ip.states):
        for j, s2 in enumerate(ep_ip.states):
            if s[:-1] == s2[:-1] and j > i:
                last = max(last, pair[i, j] if pair is not None else tv(pt[i], pt[j]))
    # law of (w(t), U) with U uniform off w(t): the (k-1)-marginal spread evenly
    n = g.n
    heads = {}
    for i, s in enumerate(ep_ip.states):
        heads.setdefault(s[:-1], []).append(i)
    cond = 0.0
    for row in pt:
        ref = np.zeros(size)
        for idx in heads.values():
            ref[idx] = row[idx].sum() / (n - k + 1)
        cond = max(cond, tv(row, ref))
    return {
        "t": t,
        "ex_tv": ex_tv,
        "ip_tv": ip_tv,
        "max_delta": max_delta,
        "k_last_coordinate": k * last,
        "last_coordinate": last,
        "twice_conditional": 2 * cond,
        "chain_ok": bool(
            ex_tv <= ip_tv + 1e-12
            and ip_tv <= max_delta + 1e-12
            and max_delta <= k * last + 1e-12
            and last <= 2 * cond + 1e-12
        ),
    }


# ---------------------------------------------------------------- spectral comparisons


def process_gap(ep: ExactProcess) -> float:
    lam, _ = ep.eig()
    return float(lam[1])


def aldous_check(g: Graph, k_list: Sequence[int]) -> dict:
    """Spectral gaps of EX(k), IP(k) and RW(1) with the largest discrepancy."""
    rw = process_gap(build_exact(g, 1, "rw"))
    rows = []
    worst = 0.0
    for k in k_list:
        row = {"k": k, "rw1": rw}
        row["ip"] = process_gap(build_exact(g, k, "ip"))
        if k < g.n:
            row["ex"] = process_gap(build_exact(g, k, "ex"))
        for key in ("ip", "ex"):
            if key in row:
                worst = max(worst, abs(row[key] - rw))
        rows.append(row)
    return {"rows": rows, "max_discrepancy": worst}


def conjecture_probe(g: Graph, k: int, t_grid: Sequence[float]) -> list[dict]:
    """Interchange TV against independent walks, both from every common start.

    Reports the worst TV of each process and flags any start where the
    interchange process is farther from equilibrium. Probe only.
    """
    ip = build_exact(g, k, "ip")
    rw = build_exact(g, k, "rw")
    starts = [rw.index[s] for s in ip.states]
    out = []
    for t in t_grid:
        pi_ip = ip.kernel_spectral(t)
        pi_rw = rw.kernel_spectral(t)
        tv_ip = 0.5 * np.abs(pi_ip - 1.0 / ip.size).sum(axis=1)
        tv_rw = 0.5 * np.abs(pi_rw[starts] - 1.0 / rw.size).sum(axis=1)
        out.append(
            {
                "t": float(t),
                "tv_ip": float(tv_ip.max()),
                "tv_rw": float(tv_rw.max()),
                "ip_exceeds_rw": bool(np.any(tv_ip > tv_rw + 1e-12)),
            }
        )
    return out


def occupation_covariance(ep_ex: ExactProcess, mu: np.ndarray) -> np.ndarray:
    """Covariance matrix of vertex occupation indicators under law ``mu``."""
    n = ep_ex.graph.n
    occ = np.zeros((ep_ex.size, n))
    for i, s in enumerate(ep_ex.states):
        occ[i, list(s)] = 1.0
    mean = mu @ occ
    second = occ.T @ (occ * mu[:, None])
    return second - np.outer(mean, mean)


# ---------------------------------------------------------------- symmetry reduction


def hypercube_automorphisms(dim: int) -> np.ndarray:
    """All ``2^d d!`` automorphisms of ``Q_d`` as vertex permutations, shape ``(count, 2^d)``."""
    verts = np.arange(2**dim)
    bits = (verts[:, None] >> np.arange(dim)) & 1
    out = []
    for order in permutations(range(dim)):
        permuted = (bits[:, list(order)] << np.arange(dim)).sum(axis=1)
        for mask in range(2**dim):
            out.append(permuted ^ mask)
    return np.array(out, dtype=np.int64)


def orbit_representatives(ep: ExactProcess, automorphisms: np.ndarray) -> np.ndarray:
    """State indices of one representative per orbit (exclusion states only)."""
    if ep.tag != "ex":
        raise ValueError("orbit reduction is implemented for exclusion states")
    arr = np.array(ep.states, dtype=np.int64)
    masks = (np.int64(1) << arr).sum(axis=1)
    canon = masks.copy()
    for perm in automorphisms:
        canon = np.minimum(canon, (np.int64(1) << perm[arr]).sum(axis=1))
    _, first = np.unique(canon, return_index=True)
    return np.sort(first)


def worst_tv_reps(ep: ExactProcess, t: float, reps: np.ndarray) -> float:
    """Worst TV over the given start states, by Krylov action on all of them at once."""
    starts = np.zeros((ep.size, len(reps)))
    starts[reps, np.arange(len(reps))] = 1.0
    law = expm_multiply(ep.rates * t, starts) if t > 0 else starts
    return float(0.5 * np.abs(law - 1.0 / ep.size).sum(axis=0).max())


def exact_mix_time_reps(ep: ExactProcess, eps: float, reps: np.ndarray, scale: float) -> float:
    """Mixing time from the worst of ``reps``; exact when ``reps`` covers every symmetry class."""
    return bisect_time(lambda t: worst_tv_reps(ep, t, reps), eps, scale).value


# ---------------------------------------------------------------- independent walks


def rw_product_worst_tv(g: Graph, k: int, t: float, sd=None) -> float:
    """Worst-start TV of RW(k) from the product of single-walk kernels.

    The law from ``(x_1..x_k)`` is ``P_t(x_1,.) x ... x P_t(x_k,.)`` and depends
    only on the multiset of starts, so those are enumerated instead of ``n^k`` states.
    """
    from .spectral import eigendecompose, heat_kernel

    sd = eigendecompose(g) if sd is None else sd
    pt = heat_kernel(sd, t)
    n = g.n
    _check_cap(n**k, "rw")
    worst = 0.0
    for starts in combinations_with_replacement(range(n), k):
        law = pt[starts[0]]
        for x in starts[1:]:
            law = np.multiply.outer(law, pt[x]).ravel()
        worst = max(worst, 0.5 * float(np.abs(law - n**-k).sum()))
    return worst


def rw_mix_time(g: Graph, k: int, eps: float) -> float:
    """Mixing time of ``k`` independent walks by bisection on the product TV."""
    from .spectral import eigendecompose

    sd = eigendecompose(g)
    return bisect_time(lambda t: rw_product_worst_tv(g, k, t, sd), eps, sd.rel).value

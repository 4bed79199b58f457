"""Finite graphs for particle dynamics: construction, validation, degree inflation.

Every graph carries one rate per edge. For regular graphs the default rate is
``1/d`` so that each vertex has unit total jump rate. Irregular graphs (paths,
stars, percolation clusters) default to ``1/max_degree``; they are usable for
single-walk and spectral work and are refused by the chameleon unless asked.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, shortest_path


class GraphError(ValueError):
    """Invalid graph parameters or a graph violating its invariants."""


class InflationError(GraphError):
    """Not enough distinct targets to inflate the out-degree."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple connected undirected graph with a constant rate on every edge.

    Parameters
    ----------
    n : int
        Number of vertices, labelled ``0..n-1``.
    edges : ndarray of shape (m, 2)
        Unordered pairs stored as ``u < v`` in lexicographic order.
    rate_per_edge : float
        Ring rate of each edge in the standard graphical construction.
    labels : tuple, optional
        Human-readable vertex names (coordinates for tori, bit tuples for cubes).
    """

    n: int
    edges: np.ndarray
    rate_per_edge: float
    labels: tuple | None = None
    name: str = ""
    _adj: tuple = field(default=(), repr=False)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    @property
    def is_regular(self) -> bool:
        deg = self.degrees
        return bool(np.all(deg == deg[0]))

    @property
    def d(self) -> int:
        """Common degree for regular graphs, maximum degree otherwise."""
        return int(self.degrees.max()) if self.n > 1 else 0

    def neighbors(self, v: int) -> np.ndarray:
        return self._adj[v]

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        a[self.edges[:, 0], self.edges[:, 1]] = 1.0
        a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return a

    def sparse_adjacency(self) -> sp.csr_matrix:
        u, v = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * self.m)
        return sp.csr_matrix((data, (np.r_[u, v], np.r_[v, u])), shape=(self.n, self.n))

    def generator(self) -> np.ndarray:
        """Rate matrix ``L``: ``L(x,y) = rate`` on edges, rows summing to zero."""
        a = self.adjacency() * self.rate_per_edge
        return a - np.diag(a.sum(axis=1))

    def distances(self) -> np.ndarray:
        """All-pairs graph distance (integer matrix)."""
        dist = shortest_path(self.sparse_adjacency(), unweighted=True, directed=False)
        return dist.astype(np.int64)

    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(int(u), int(v)): i for i, (u, v) in enumerate(self.edges)}

    def require_regular(self, what: str = "this operation") -> None:
        if not self.is_regular:
            raise GraphError(f"{what} requires a regular graph; {self.name or 'graph'} is irregular")


def make_graph(
    n: int,
    edges: Iterable[Sequence[int]],
    rate_per_edge: float | None = None,
    labels: Sequence[Any] | None = None,
    name: str = "",
    check_connected: bool = True,
) -> Graph:
    """Validate an edge list and build an immutable :class:`Graph`."""
    e = np.array([tuple(sorted((int(a), int(b)))) for a, b in edges], dtype=np.int64).reshape(-1, 2)
    if n < 1:
        raise GraphError("graph needs at least one vertex")
    if e.size and (e.min() < 0 or e.max() >= n):
        raise GraphError("edge endpoint out of range")
    if np.any(e[:, 0] == e[:, 1]):
        raise GraphError("self-loop")
    e = e[np.lexsort((e[:, 1], e[:, 0]))]
    if len(e) > 1 and np.any(np.all(e[1:] == e[:-1], axis=1)):
        raise GraphError("parallel edge")
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in e:
        adj[u].append(int(v))
        adj[v].append(int(u))
    nbrs = tuple(np.array(sorted(a), dtype=np.int64) for a in adj)
    for a in nbrs:
        a.flags.writeable = False
    e.flags.writeable = False
    if rate_per_edge is None:
        dmax = max((len(a) for a in adj), default=0)
        rate_per_edge = 1.0 / dmax if dmax else 1.0
    if rate_per_edge <= 0:
        raise GraphError("rate must be positive")
    g = Graph(n, e, float(rate_per_edge), tuple(labels) if labels is not None else None, name, nbrs)
    if check_connected and n > 1:
        ncomp, _ = connected_components(g.sparse_adjacency(), directed=False)
        if ncomp != 1:
            raise GraphError(f"{name or 'graph'} is disconnected ({ncomp} components)")
    return g


# ---------------------------------------------------------------- families


def complete_graph(n: int) -> Graph:
    if n < 2:
        raise GraphError("complete graph needs n >= 2")
    return make_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)], name=f"K{n}")


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return make_graph(n, [(i, (i + 1) % n) for i in range(n)], name=f"C{n}")


def path_graph(n: int) -> Graph:
    if n < 2:
        raise GraphError("path needs n >= 2")
    return make_graph(n, [(i, i + 1) for i in range(n - 1)], name=f"P{n}")


def star_graph(leaves: int) -> Graph:
    if leaves < 1:
        raise GraphError("star needs at least one leaf")
    return make_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)], name=f"S{leaves}")


def hypercube(dim: int) -> Graph:
    """Q_dim on bit strings; vertex ``x`` is adjacent to ``x ^ (1 << i)``."""
    if dim < 1:
        raise GraphError("hypercube needs dim >= 1")
    n = 1 << dim
    edges = [(x, x ^ (1 << i)) for x in range(n) for i in range(dim) if x < x ^ (1 << i)]
    labels = [tuple((x >> i) & 1 for i in range(dim)) for x in range(n)]
    return make_graph(n, edges, labels=labels, name=f"Q{dim}")


def torus(side: int, dim: int) -> Graph:
    """Discrete torus (Z/side Z)^dim with nearest-neighbour edges."""
    if side < 3:
        raise GraphError("torus side must be >= 3 to avoid parallel edges")
    if dim < 1:
        raise GraphError("torus needs dim >= 1")
    shape = (side,) * dim
    n = side**dim
    coords = np.array(np.unravel_index(np.arange(n), shape)).T
    edges = []
    for axis in range(dim):
        nxt = coords.copy()
        nxt[:, axis] = (nxt[:, axis] + 1) % side
        edges.extend(zip(range(n), np.ravel_multi_index(nxt.T, shape)))
    return make_graph(n, edges, labels=[tuple(c) for c in coords], name=f"T{side}^{dim}")


def cartesian_product(g1: Graph, g2: Graph) -> Graph:
    """Cartesian product; vertex ``(i, j)`` has index ``i * g2.n + j``.

    Rates are reset to ``1/(d1 + d2)`` (the unit-rate convention of the product).
    """
    n2 = g2.n
    edges = []
    for i in range(g1.n):
        edges.extend((i * n2 + u, i * n2 + v) for u, v in g2.edges)
    for j in range(n2):
        edges.extend((u * n2 + j, v * n2 + j) for u, v in g1.edges)
    l1 = g1.labels or tuple(range(g1.n))
    l2 = g2.labels or tuple(range(g2.n))
    labels = [(a, b) for a in l1 for b in l2]
    return make_graph(g1.n * n2, edges, labels=labels, name=f"{g1.name}x{g2.name}")


def random_regular(n: int, d: int, seed: int, max_tries: int = 100) -> Graph:
    """Uniform-ish random d-regular graph (networkx pairing model), resampled until connected."""
    import networkx as nx

    if d < 1 or d >= n or (n * d) % 2:
        raise GraphError("need 1 <= d < n and n*d even")
    for attempt in range(max_tries):
        h = nx.random_regular_graph(d, n, seed=int(np.random.SeedSequence([seed, attempt]).generate_state(1)[0]))
        if nx.is_connected(h):
            return make_graph(n, h.edges(), name=f"RR({n},{d})")
    raise GraphError("could not sample a connected regular graph")


def percolation_open_edges(side: int, dim: int, p: float, seed: int, attempt: int) -> tuple[Graph, np.ndarray]:
    """Torus and boolean mask of open edges for one percolation sample."""
    base = torus(side, dim)
    rng = np.random.default_rng(np.random.SeedSequence([seed, attempt]))
    return base, rng.random(base.m) < p


def percolation_giant(side: int, dim: int, p: float, seed: int, max_tries: int = 100) -> Graph:
    """Largest open cluster of bond percolation on a torus, relabelled ``0..n'-1``.

    Resampled until the cluster holds at least half the torus vertices.
    """
    if not 0 < p <= 1:
        raise GraphError("p must lie in (0, 1]")
    for attempt in range(max_tries):
        base, open_mask = percolation_open_edges(side, dim, p, seed, attempt)
        e = base.edges[open_mask]
        adj = sp.csr_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(base.n, base.n))
        _, comp = connected_components(adj, directed=False)
        sizes = np.bincount(comp)
        big = int(np.argmax(sizes))
        if sizes[big] * 2 < base.n:
            continue
        keep = np.flatnonzero(comp == big)
        relabel = -np.ones(base.n, dtype=np.int64)
        relabel[keep] = np.arange(len(keep))
        sub = e[(relabel[e[:, 0]] >= 0) & (relabel[e[:, 1]] >= 0)]
        return make_graph(
            len(keep),
            relabel[sub],
            labels=[base.labels[v] for v in keep],
            name=f"perc({side}^{dim},{p})",
        )
    raise GraphError("percolation giant below half the torus after all retries")


# ---------------------------------------------------------------- specs and files


@dataclass(frozen=True)
class GraphSpec:
    """Family tag plus parameters; enough to rebuild a graph deterministically."""

    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def to_dict(self) -> dict:
        params = dict(self.params)
        if "factors" in params:
            params["factors"] = [f.to_dict() if isinstance(f, GraphSpec) else f for f in params["factors"]]
        return {"family": self.family, "params": params, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "GraphSpec":
        params = dict(d.get("params", {}))
        if "factors" in params:
            params["factors"] = [cls.from_dict(f) if isinstance(f, dict) else f for f in params["factors"]]
        return cls(d["family"], params, int(d.get("seed", 0)))


def build_graph(spec: GraphSpec) -> Graph:
    """Build the graph described by ``spec``."""
    p = spec.params
    fam = spec.family
    if fam == "complete":
        return complete_graph(int(p["n"]))
    if fam == "cycle":
        return cycle_graph(int(p["n"]))
    if fam == "path":
        return path_graph(int(p["n"]))
    if fam == "star":
        return star_graph(int(p["leaves"]))
    if fam == "hypercube":
        return hypercube(int(p["dim"]))
    if fam == "torus":
        return torus(int(p["side"]), int(p.get("dim", 2)))
    if fam == "product":
        factors = [build_graph(f) for f in p["factors"]]
        if not factors:
            raise GraphError("product needs at least one factor")
        g = factors[0]
        for h in factors[1:]:
            g = cartesian_product(g, h)
        return g
    if fam == "random_regular":
        return random_regular(int(p["n"]), int(p["d"]), spec.seed)
    if fam == "percolation_giant":
        return percolation_giant(int(p["side"]), int(p.get("dim", 2)), float(p["p"]), spec.seed)
    if fam == "file":
        return read_graph(p["path"])
    raise GraphError(f"unknown family {fam!r}")


def write_graph(g: Graph, path: str | Path) -> None:
    """Write the ``n m`` header followed by one ``u v`` line per edge."""
    lines = [f"{g.n} {g.m}"] + [f"{u} {v}" for u, v in g.edges]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_graph(path: str | Path) -> Graph:
    tokens = Path(path).read_text(encoding="ascii").split("\n")
    rows = [t.split() for t in tokens if t.strip()]
    if not rows or len(rows[0]) != 2:
        raise GraphError("missing 'n m' header")
    n, m = int(rows[0][0]), int(rows[0][1])
    if len(rows) - 1 != m:
        raise GraphError(f"header promises {m} edges, found {len(rows) - 1}")
    return make_graph(n, [(int(a), int(b)) for a, b in rows[1:]], name=Path(path).stem)


# ---------------------------------------------------------------- modified graphs


@dataclass(frozen=True, eq=False)
class ModifiedGraph:
    """A base graph plus zero-rate directed dummy edges.

    ``v -> u`` holds if ``u`` is a real neighbour of ``v`` or a dummy target of ``v``.
    """

    base: Graph
    dummy_out: tuple
    d_hat: int
    d_max_in: int

    @property
    def n(self) -> int:
        return self.base.n

    def out_neighbors(self, v: int) -> np.ndarray:
        return np.concatenate([self.base.neighbors(v), self.dummy_out[v]])

    def out_matrix(self) -> np.ndarray:
        """0/1 matrix ``M[v, u] = 1`` iff ``v -> u``."""
        mat = self.base.adjacency()
        for v, targets in enumerate(self.dummy_out):
            mat[v, targets] = 1.0
        return mat

    def dummy_pairs(self) -> set[tuple[int, int]]:
        return {(v, int(u)) for v, ts in enumerate(self.dummy_out) for u in ts}


def as_modified(g: Graph | ModifiedGraph) -> ModifiedGraph:
    """View a regular graph as a modified graph without dummy edges."""
    if isinstance(g, ModifiedGraph):
        return g
    deg = g.degrees
    empty = tuple(np.zeros(0, dtype=np.int64) for _ in range(g.n))
    return ModifiedGraph(g, empty, int(deg.max()), int(deg.max()))


def degree_inflate(g: Graph, d_hat: int) -> ModifiedGraph:
    """Add dummy out-edges so every vertex has out-degree ``d_hat``.

    Targets are taken in breadth-first order (distance, then vertex index),
    skipping the vertex itself and its real neighbours, up to distance ``d_hat``.
    """
    deg = g.degrees
    if d_hat < deg.max():
        raise InflationError("d_hat must be at least the maximum degree")
    dist = g.distances()
    dummy = []
    for v in range(g.n):
        need = d_hat - int(deg[v])
        order = np.lexsort((np.arange(g.n), dist[v]))
        cand = [int(u) for u in order if 2 <= dist[v, u] <= d_hat]
        if len(cand) < need:
            raise InflationError(f"vertex {v} has only {len(cand)} targets within distance {d_hat}")
        arr = np.array(cand[:need], dtype=np.int64)
        arr.flags.writeable = False
        dummy.append(arr)
    in_deg = deg.copy()
    for ts in dummy:
        np.add.at(in_deg, ts, 1)
    return ModifiedGraph(g, tuple(dummy), int(d_hat), int(in_deg.max()))


def max_ball_size(g: Graph, radius: int, dist: np.ndarray | None = None) -> int:
    dist = g.distances() if dist is None else dist
    return int((dist <= radius).sum(axis=1).max())


def sparse_nice_subset(
    mg: Graph | ModifiedGraph,
    mass: dict[int, float] | np.ndarray,
    separation: int,
    candidates: Iterable[int],
) -> np.ndarray:
    """Greedy well-separated subset of heavy candidates.

    Repeatedly keep the heaviest remaining candidate (ties to the lower index)
    and discard every candidate within ``separation`` of it in the base graph.
    Kept vertices are pairwise more than ``separation`` apart and carry at least
    ``1/max_ball_size(separation)`` of the candidate weight.
    """
    if separation < 1:
        raise GraphError("separation must be >= 1")
    base = mg.base if isinstance(mg, ModifiedGraph) else mg
    cand = sorted({int(c) for c in candidates})
    if not cand:
        return np.zeros(0, dtype=np.int64)
    w = np.array([mass[c] for c in cand], dtype=float)
    if np.any(w < 0):
        raise GraphError("weights must be nonnegative")
    dist = base.distances()
    alive = np.ones(len(cand), dtype=bool)
    cidx = np.array(cand)
    chosen = []
    while alive.any():
        idx = np.flatnonzero(alive)
        pick = idx[np.argmax(w[idx])]
        chosen.append(cand[pick])
        alive &= dist[cand[pick], cidx] > separation
    return np.array(sorted(chosen), dtype=np.int64)


# ---------------------------------------------------------------- growth


@dataclass
class GrowthStats:
    volumes: np.ndarray
    diameter: int
    boundary_samples: list = field(default_factory=list)
    isoperimetry_ok: bool = True


def _inner_boundary(g: Graph, members: np.ndarray) -> int:
    inside = np.zeros(g.n, dtype=bool)
    inside[members] = True
    count = 0
    for v in members:
        if np.any(~inside[g.neighbors(v)]):
            count += 1
    return count


def growth_stats(g: Graph, root: int = 0, vertex_transitive: bool = False) -> GrowthStats:
    """Ball volumes, diameter and internal-boundary isoperimetry samples.

    For vertex-transitive graphs the volume profile is asserted root-independent
    and the bound ``|inner boundary of A| / |A| >= 1 / (2 R(2|A|))`` is checked
    on balls and Fiedler sweep sets with ``|A| <= n/2``.
    """
    dist = g.distances()
    ecc = int(dist[root].max())
    volumes = np.array([(dist[root] <= r).sum() for r in range(ecc + 1)])
    if vertex_transitive:
        for v in range(g.n):
            vv = np.array([(dist[v] <= r).sum() for r in range(ecc + 1)])
            if not np.array_equal(vv, volumes):
                raise GraphError("volume profile depends on the root")
    diameter = int(np.argmax(volumes >= g.n))
    samples = []
    ok = True
    if vertex_transitive and g.n > 1:

        def radius_for(mv: int) -> int:
            return int(np.argmax(volumes >= min(mv, g.n)))

        sets = []
        for r in range(ecc + 1):
            ball = np.flatnonzero(dist[root] <= r)
            if 2 * len(ball) <= g.n:
                sets.append(("ball", ball))
        lap = -g.generator()
        _, vec = np.linalg.eigh(lap)
        order = np.argsort(vec[:, 1], kind="stable")
        for size in range(1, g.n // 2 + 1):
            sets.append(("sweep", order[:size]))
        for kind, a in sets:
            ratio = _inner_boundary(g, a) / len(a)
            bound = 1.0 / (2 * max(radius_for(2 * len(a)), 1))
            samples.append({"kind": kind, "size": int(len(a)), "ratio": ratio, "bound": bound})
            ok &= ratio >= bound - 1e-12
    return GrowthStats(volumes, diameter, samples, bool(ok))

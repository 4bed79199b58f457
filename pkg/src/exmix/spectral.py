"""Dense spectral analysis of the single-walk generator.

Heat kernels, mixing-time functionals, spectral and isoperimetric profiles,
log-Sobolev brackets, and numeric checks of the spectral inequalities.
All quantities use the unit-rate generator ``L = A/d - I`` (or the graph's
own edge rate for irregular graphs) and the uniform stationary law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np
from scipy import linalg, optimize

from .graph_core import Graph

DENSE_CAP = 2000
EXACT_PROFILE_CAP = 20
BISECT_RTOL = 1e-6


class SpectralError(ArithmeticError):
    """Eigensolve failed or violated its invariants."""


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigenpairs of ``-L`` with ``pi``-orthonormal eigenvectors.

    ``vectors[:, i]`` is ``f_i`` with ``mean(f_i * f_j) = delta_ij``; ``f_1 = 1``.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    n: int
    generator: np.ndarray

    @property
    def pi(self) -> np.ndarray:
        return np.full(self.n, 1.0 / self.n)

    @property
    def gap(self) -> float:
        return float(self.eigenvalues[1]) if self.n > 1 else math.inf

    @property
    def rel(self) -> float:
        return 1.0 / self.gap

    @property
    def max_diag(self) -> float:
        return float(np.max(-np.diag(self.generator)))


def eigendecompose(g: Graph, tol: float = 1e-9) -> SpectralData:
    """Diagonalize the symmetric generator of a single walk on ``g``."""
    if g.n > DENSE_CAP:
        raise SpectralError(f"n={g.n} exceeds the dense cap {DENSE_CAP}")
    gen = g.generator()
    try:
        lam, u = linalg.eigh(-gen)
    except linalg.LinAlgError as exc:  # pragma: no cover
        raise SpectralError(f"eigensolve failed: {exc}; cond={np.linalg.cond(gen):.3e}") from exc
    f = u * math.sqrt(g.n)
    f[:, 0] = 1.0
    lam[0] = 0.0 if abs(lam[0]) < tol else lam[0]
    sd = SpectralData(lam, f, g.n, gen)
    _check(sd, tol)
    return sd


def _check(sd: SpectralData, tol: float) -> None:
    lam, f, n = sd.eigenvalues, sd.vectors, sd.n
    if abs(lam[0]) > tol:
        raise SpectralError(f"smallest eigenvalue {lam[0]:.3e} is not zero")
    gram = f.T @ f / n
    if np.max(np.abs(gram - np.eye(n))) > 1e-7:
        raise SpectralError("eigenvectors are not pi-orthonormal")
    recon = -(f * lam) @ f.T / n
    if np.max(np.abs(recon - sd.generator)) > 1e-7:
        raise SpectralError("spectral reconstruction error too large")


def heat_kernel(sd: SpectralData, t: float) -> np.ndarray:
    """``P_t = exp(tL) = sum_i exp(-lambda_i t) f_i f_i^T / n``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    f = sd.vectors
    return (f * np.exp(-sd.eigenvalues * t)) @ f.T / sd.n


def diag_heat(sd: SpectralData, t: float) -> np.ndarray:
    """Diagonal of ``P_t`` without forming the full matrix."""
    return (sd.vectors**2 * np.exp(-sd.eigenvalues * t)).sum(axis=1) / sd.n


def linf_distance(sd: SpectralData, t: float) -> float:
    """``max_x n P_t(x,x) - 1``, equal to ``max_{x,y} |n P_t(x,y) - 1|``."""
    return float(sd.n * diag_heat(sd, t).max() - 1.0)


def l2_distance_sq(sd: SpectralData, x: int, t: float) -> float:
    """``||P_t(x,.) - pi||^2_{2,pi} = n P_{2t}(x,x) - 1``."""
    return float(sd.n * diag_heat(sd, 2 * t)[x] - 1.0)


def tv_worst(sd: SpectralData, t: float) -> float:
    p = heat_kernel(sd, t)
    return float(0.5 * np.abs(p - 1.0 / sd.n).sum(axis=1).max())


# ---------------------------------------------------------------- mixing functionals


@dataclass
class Bisection:
    value: float
    flag: str = ""


def bisect_time(dist: Callable[[float], float], target: float, scale: float, rtol: float = BISECT_RTOL) -> Bisection:
    """Smallest ``t`` with ``dist(t) <= target`` for a non-increasing ``dist``.

    Monotonicity is asserted on the bracket endpoints. Returns ``inf`` with a
    flag if no bracket is found within ``1e6 * scale``.
    """
    if dist(0.0) <= target:
        return Bisection(0.0)
    lo, hi = 0.0, max(scale, 1e-12)
    while dist(hi) > target:
        lo, hi = hi, 2 * hi
        if hi > 1e6 * max(scale, 1.0):
            return Bisection(math.inf, "no bracket")
    if dist(lo) < dist(hi) - 1e-12:
        raise SpectralError("bisected quantity is not monotone on its bracket")
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if dist(mid) <= target:
            hi = mid
        else:
            lo = mid
    return Bisection(hi)


def log_sobolev_bracket(sd: SpectralData, restarts: int = 64, seed: int = 0) -> tuple[float, float]:
    """Bracket ``[lower, upper]`` on the log-Sobolev constant.

    The lower end is the gap-based bound ``gap (1 - 2/n) / log(n - 1)``
    (``gap/2`` when ``n = 2``). The upper end is ``min(gap/2, best ratio found)``
    over multi-start minimization of ``E(h,h) / Ent(h^2)``; ``gap/2`` is the
    value approached by perturbations of constants.
    """
    n = sd.n
    gap = sd.gap
    lower = gap / 2 if n == 2 else gap * (1 - 2.0 / n) / math.log(n - 1)
    upper = gap / 2
    neg_l = -sd.generator

    def ratio_and_grad(x: np.ndarray) -> tuple[float, np.ndarray]:
        x = np.clip(x - x.max(), -300.0, 0.0)
        h = np.exp(x)
        m2 = np.mean(h * h)
        e = h @ neg_l @ h / n
        logs = np.log(h * h / m2)
        ent = np.mean(h * h * logs)
        if ent <= 1e-300:
            return 1e300, np.zeros_like(x)
        de = 2 * (neg_l @ h) / n
        dent = 2 * h * logs / n
        r = e / ent
        grad = (de * ent - e * dent) / ent**2 * h
        return r, grad

    rng = np.random.default_rng(seed)
    for i in range(restarts):
        scale = 10 ** rng.uniform(-1, 1.3)
        x0 = rng.normal(size=n) * scale
        if i % 4 == 0:
            x0 = np.zeros(n)
            x0[rng.integers(n)] = scale * 3
        with np.errstate(all="ignore"):
            res = optimize.minimize(ratio_and_grad, x0, jac=True, method="L-BFGS-B")
        if np.isfinite(res.fun):
            upper = min(upper, float(res.fun))
    return lower, upper


@dataclass
class MixFunctionals:
    """Single-walk mixing functionals keyed by ``eps``."""

    n: int
    rel: float
    t_mix: dict = field(default_factory=dict)
    t_mix_2: dict = field(default_factory=dict)
    t_mix_inf: dict = field(default_factory=dict)
    r_star: dict = field(default_factory=dict)
    t_star: dict = field(default_factory=dict)
    s_star: dict = field(default_factory=dict)
    c_ls: tuple = (math.nan, math.nan)
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def keyed(d: dict) -> dict:
            return {repr(float(k)): v for k, v in d.items()}

        return {
            "n": self.n,
            "rel": self.rel,
            "t_mix": keyed(self.t_mix),
            "t_mix_2": keyed(self.t_mix_2),
            "t_mix_inf": keyed(self.t_mix_inf),
            "r_star": keyed(self.r_star),
            "t_star": keyed(self.t_star),
            "s_star": keyed(self.s_star),
            "c_ls": list(self.c_ls),
            "flags": list(self.flags),
        }


def t_mix_inf(sd: SpectralData, delta: float) -> float:
    return bisect_time(lambda t: linf_distance(sd, t), delta, sd.rel).value


def t_mix_tv(sd: SpectralData, eps: float) -> float:
    return bisect_time(lambda t: tv_worst(sd, t), eps, sd.rel).value


def diag_threshold_time(sd: SpectralData, thresh: float) -> float:
    """``inf{t : max_v P_t(v,v) - 1/n <= thresh}``."""
    return bisect_time(lambda t: float(diag_heat(sd, t).max() - 1.0 / sd.n), thresh, sd.rel).value


def r_star(sd: SpectralData, eps: float) -> float:
    return diag_threshold_time(sd, eps / math.log(sd.n) ** 2)


def t_star(sd: SpectralData, eps: float) -> float:
    return diag_threshold_time(sd, eps / math.log(sd.n))


def s_star(sd: SpectralData, eps: float) -> float:
    ts = t_star(sd, eps)
    if ts == 0.0:
        return 0.0
    return diag_threshold_time(sd, eps / ts)


def mixing_functionals(sd: SpectralData, eps_list: Sequence[float], c_ls: bool = True) -> MixFunctionals:
    """Evaluate every functional by bisection for each ``eps`` in ``(0, 1)``."""
    mf = MixFunctionals(sd.n, sd.rel)
    for eps in eps_list:
        if not 0 < eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        for name, store, fn in (
            ("t_mix", mf.t_mix, lambda: bisect_time(lambda t: tv_worst(sd, t), eps, sd.rel)),
            ("t_mix_2", mf.t_mix_2, lambda: bisect_time(lambda t: math.sqrt(max(linf_distance(sd, 2 * t), 0.0)), eps, sd.rel)),
            ("t_mix_inf", mf.t_mix_inf, lambda: bisect_time(lambda t: linf_distance(sd, t), eps, sd.rel)),
            ("r_star", mf.r_star, lambda: Bisection(r_star(sd, eps))),
            ("t_star", mf.t_star, lambda: Bisection(t_star(sd, eps))),
            ("s_star", mf.s_star, lambda: Bisection(s_star(sd, eps))),
        ):
            b = fn()
            store[eps] = b.value
            if b.flag or math.isinf(b.value):
                mf.flags.append(f"{name}({eps}): {b.flag or 'infinite'}")
    if c_ls:
        mf.c_ls = log_sobolev_bracket(sd)
    return mf


# ---------------------------------------------------------------- profiles


def _dirichlet_rayleigh_batch(neg_l: np.ndarray, supports: np.ndarray, n: int) -> np.ndarray:
    """Minimal ``E(h,h)/Var(h)`` over ``h`` supported in each row of ``supports``.

    On a support of size ``s < n`` the variance form ``(I - J/n)/n`` is positive
    definite and identical for every support, so one whitening serves all.
    """
    s = supports.shape[1]
    b = (np.eye(s) - np.ones((s, s)) / n) / n
    w, v = np.linalg.eigh(b)
    b_inv_half = v @ np.diag(w**-0.5) @ v.T
    a = neg_l[supports[:, :, None], supports[:, None, :]] / n
    c = b_inv_half @ a @ b_inv_half
    return np.linalg.eigvalsh(c)[:, 0]


def exact_profile_tables(g: Graph, sd: SpectralData, chunk: int = 20000) -> tuple[np.ndarray, np.ndarray]:
    """Exact ``Lambda_s`` and ``Phi_s`` for support/set sizes ``s = 1..n``.

    ``Lambda_s`` minimizes over supports of size exactly ``s`` (the maximal ones
    for ``pi(supp) <= s/n``); ``Phi_s`` is the running minimum over set sizes ``<= s``.
    """
    n = g.n
    neg_l = -sd.generator
    lam_s = np.full(n + 1, np.inf)
    lam_s[n] = sd.gap
    for s in range(1, n):
        best = np.inf
        it = combinations(range(n), s)
        while True:
            block = np.array([c for _, c in zip(range(chunk), it)], dtype=np.int64)
            if block.size == 0:
                break
            best = min(best, float(_dirichlet_rayleigh_batch(neg_l, block, n).min()))
        lam_s[s] = best
    # edge boundary by bitmask enumeration
    masks = np.arange(1, 2**n, dtype=np.int64)
    cut = np.zeros(len(masks), dtype=np.int64)
    for u, v in g.edges:
        cut += ((masks >> u) & 1) ^ ((masks >> v) & 1)
    sizes = np.zeros(len(masks), dtype=np.int64)
    for u in range(n):
        sizes += (masks >> u) & 1
    phi_s = np.full(n + 1, np.inf)
    for s in range(1, n + 1):
        sel = sizes == s
        phi_s[s] = cut[sel].min() * g.rate_per_edge / s
    phi_s[1:] = np.minimum.accumulate(phi_s[1:])
    return lam_s, phi_s


def sweep_profile_tables(g: Graph, sd: SpectralData, n_vectors: int = 6) -> tuple[np.ndarray, np.ndarray]:
    """Upper bounds on ``Lambda_s`` and ``Phi_s`` from eigenvector sweep sets."""
    n = g.n
    neg_l = -sd.generator
    lam_up = np.full(n + 1, np.inf)
    phi_up = np.full(n + 1, np.inf)
    lam_up[n] = sd.gap
    adj = g.adjacency()
    for i in range(1, min(n, n_vectors + 1)):
        for sign in (1, -1):
            order = np.argsort(sign * sd.vectors[:, i], kind="stable")
            inside = np.zeros(n, dtype=bool)
            cut = 0.0
            for s in range(1, n):
                v = order[s - 1]
                cut += adj[v, ~inside].sum() - adj[v, inside].sum()
                inside[v] = True
                phi_up[s] = min(phi_up[s], cut * g.rate_per_edge / s)
                supp = order[:s][None, :]
                lam_up[s] = min(lam_up[s], float(_dirichlet_rayleigh_batch(neg_l, supp, n)[0]))
    lam_up[1:] = np.minimum.accumulate(lam_up[1:])
    phi_up[1:] = np.minimum.accumulate(phi_up[1:])
    return lam_up, phi_up


@dataclass
class ProfileTable:
    """Step-function profiles on ``delta`` and the derived integrals.

    ``lam_lo[s]``/``lam_hi[s]`` bracket ``Lambda(delta)`` for ``delta`` in
    ``[s/n, (s+1)/n)``; index ``n`` covers ``delta >= 1``. Same for ``phi``.
    """

    n: int
    gap: float
    max_diag: float
    exact: bool
    lam_lo: np.ndarray
    lam_hi: np.ndarray
    phi_lo: np.ndarray
    phi_hi: np.ndarray
    t_sp: dict = field(default_factory=dict)
    t_ev: dict = field(default_factory=dict)
    provenance: str = "exact"

    def _index(self, delta: float) -> int:
        s = int(math.floor(delta * self.n + 1e-9))
        return min(max(s, 1), self.n)

    def lam(self, delta: float, which: str = "hi") -> float:
        """``Lambda(delta)``; for exact tables ``lo == hi``."""
        if delta >= 1:
            return self.gap
        s = self._index(delta)
        return float(self.lam_hi[s] if which == "hi" else self.lam_lo[s])

    def phi(self, delta: float, which: str = "hi") -> float:
        s = self._index(min(delta, 1.0))
        return float(self.phi_hi[s] if which == "hi" else self.phi_lo[s])

    def grid(self) -> np.ndarray:
        return np.arange(1, self.n + 1) / self.n

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "exact": self.exact,
            "provenance": self.provenance,
            "delta": self.grid().tolist(),
            "lambda_lower": self.lam_lo[1:].tolist(),
            "lambda_upper": self.lam_hi[1:].tolist(),
            "phi_lower": self.phi_lo[1:].tolist(),
            "phi_upper": self.phi_hi[1:].tolist(),
            "t_sp": {repr(float(k)): v for k, v in self.t_sp.items()},
            "t_evolving_sets": {repr(float(k)): v for k, v in self.t_ev.items()},
        }


def log_grid_integral(f: Callable[[float], float], a: float, b: float, ratio: float = 1.1, rtol: float = 0.01) -> float:
    """``int_a^b f(delta) d(log delta)`` by the midpoint rule on a geometric grid.

    The grid ratio starts at ``ratio`` and is square-rooted until two successive
    values differ by less than ``rtol``.
    """
    if b <= a:
        return 0.0
    prev = None
    q = ratio
    for _ in range(30):
        steps = max(1, math.ceil(math.log(b / a) / math.log(q)))
        edges = np.geomspace(a, b, steps + 1)
        mids = np.sqrt(edges[1:] * edges[:-1])
        val = float(sum(f(m) * math.log(hi / lo) for m, lo, hi in zip(mids, edges[:-1], edges[1:])))
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return val
        prev = val
        q = math.sqrt(q)
    return prev


def profiles(g: Graph, sd: SpectralData, eps: Sequence[float] | float, force_bracket: bool = False) -> ProfileTable:
    """Spectral and isoperimetric profiles plus ``t_sp`` and ``t_evolving_sets``."""
    eps_list = [eps] if np.isscalar(eps) else list(eps)
    n = g.n
    exact = n <= EXACT_PROFILE_CAP and not force_bracket
    if exact:
        lam, phi = exact_profile_tables(g, sd)
        pt = ProfileTable(n, sd.gap, sd.max_diag, True, lam.copy(), lam.copy(), phi.copy(), phi.copy())
    else:
        lam_hi, phi_hi = sweep_profile_tables(g, sd)
        deltas = np.arange(n + 1) / n
        # Lambda >= gap always; the Cheeger sandwich turns brackets of one into the other
        lam_lo = np.full(n + 1, sd.gap)
        phi_lo = np.maximum((1 - np.minimum(deltas, 1)) * lam_lo, 0.0)
        lam_lo = np.maximum(lam_lo, phi_lo**2 / (2 * sd.max_diag))
        lam_hi = np.minimum(lam_hi, np.where(deltas < 1, phi_hi / np.maximum(1 - deltas, 1e-300), np.inf))
        lam_hi[n] = sd.gap
        lam_lo[n] = sd.gap
        pt = ProfileTable(n, sd.gap, sd.max_diag, False, lam_lo, lam_hi, phi_lo, phi_hi,
                          provenance="sweep-bracket" if n > EXACT_PROFILE_CAP else "sweep-bracket (forced)")
    for e in eps_list:
        pt.t_sp[e] = t_sp(pt, e)
        pt.t_ev[e] = t_evolving_sets(pt, e)
    return pt


def t_sp(pt: ProfileTable, eps: float, which: str = "lo") -> float:
    """``int_{4/n}^{4/eps} 2 d delta / (delta Lambda(delta))``; the Lambda lower bracket gives an upper value."""
    return log_grid_integral(lambda d: 2.0 / pt.lam(d, "lo" if which == "lo" else "hi"), 4.0 / pt.n, 4.0 / eps)


def t_sp_exact_piecewise(pt: ProfileTable, eps: float) -> float:
    """Closed-form evaluation of ``t_sp`` for step-function profiles."""
    a, b = 4.0 / pt.n, 4.0 / eps
    if b <= a:
        return 0.0
    cuts = [a] + [s / pt.n for s in range(1, pt.n + 1) if a < s / pt.n < b] + [b]
    return float(sum(2.0 / pt.lam(lo, "lo") * math.log(hi / lo) for lo, hi in zip(cuts[:-1], cuts[1:])))


def t_evolving_sets(pt: ProfileTable, eps: float) -> float:
    """``max|L(x,x)| int_{4/n}^{min(4/eps,1/2)} 4 d delta/(delta Phi^2) + rel log(8/eps) 1{eps <= 8}``."""
    upper = min(4.0 / eps, 0.5)
    integral = log_grid_integral(lambda d: 4.0 / pt.phi(d, "lo") ** 2, 4.0 / pt.n, upper)
    tail = (1.0 / pt.gap) * math.log(8.0 / eps) if eps <= 8 else 0.0
    return pt.max_diag * integral + tail


def cheeger_sandwich(pt: ProfileTable) -> list[dict]:
    """Check ``Phi^2/(2 max|L(x,x)|) <= Lambda <= Phi/(1 - delta)`` bracket-wise for ``delta < 1``."""
    rows = []
    for s in range(1, pt.n):
        delta = s / pt.n
        lower = pt.phi_lo[s] ** 2 / (2 * pt.max_diag)
        upper = pt.phi_hi[s] / (1 - delta)
        ok = lower <= pt.lam_hi[s] * (1 + 1e-9) and pt.lam_lo[s] <= upper * (1 + 1e-9)
        rows.append({"delta": delta, "lower": lower, "lambda": [pt.lam_lo[s], pt.lam_hi[s]], "upper": upper, "ok": bool(ok)})
    return rows


# ---------------------------------------------------------------- closed forms and lower bounds


def lagrange_min_distance(pi_a: float, delta: float) -> float:
    """Minimum of ``||mu - pi||^2_{2,pi}`` subject to ``mu(A) >= pi(A) + delta pi(A^c)``."""
    if not (0 < pi_a < 1 and 0 < delta < 1):
        raise ValueError("need 0 < pi_a < 1 and 0 < delta < 1")
    return delta**2 * (1 - pi_a) / pi_a


def lagrange_minimizer(n: int, a_size: int, delta: float) -> np.ndarray:
    """The minimizing law ``delta * pi_A + (1 - delta) * pi`` with ``A = {0..a_size-1}``."""
    mu = np.full(n, (1 - delta) / n)
    mu[:a_size] += delta / a_size
    return mu


def simplex_min_distance(n: int, a_size: int, delta: float) -> tuple[float, np.ndarray]:
    """Numeric minimum of ``n sum mu^2 - 1`` over the constrained simplex (SLSQP)."""
    pi_a = a_size / n
    need = pi_a + delta * (1 - pi_a)
    cons = [
        {"type": "eq", "fun": lambda m: m.sum() - 1.0, "jac": lambda m: np.ones(n)},
        {"type": "ineq", "fun": lambda m: m[:a_size].sum() - need, "jac": lambda m: np.r_[np.ones(a_size), np.zeros(n - a_size)]},
    ]
    x0 = np.full(n, 1.0 / n)
    res = optimize.minimize(
        lambda m: n * (m @ m) - 1.0,
        x0,
        jac=lambda m: 2 * n * m,
        bounds=[(0, 1)] * n,
        constraints=cons,
        method="SLSQP",
        options={"ftol": 1e-15, "maxiter": 1000},
    )
    return float(res.fun), res.x


@dataclass
class LowerBound:
    t_bound: float
    feasible: bool
    ratio_l1_l2: float
    eigenvalue: float
    distortion_ok: bool | None = None
    distortion_margin: float | None = None


def thm14_lower_bound(sd: SpectralData, k: int, delta: float, eps: float, c_ls_upper: float | None = None) -> LowerBound:
    """Eigenfunction lower bound on the exclusion mixing time ``mix(1 - eps)``.

    Uses ``lambda = gap`` and, inside its eigenspace, the basis vector with the
    largest ``||f||_1 / ||f||_2`` (pi-weighted norms). Premises:
    ``||f||_1 >= k^(delta - 1/4) ||f||_2`` and ``4 delta log k >= log(16/eps)``.
    When ``c_ls_upper`` is given, also checks ``log(||f||_2/(2||f||_1)) <= lambda/c_LS``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    lam = sd.gap
    idx = np.flatnonzero(np.abs(sd.eigenvalues - lam) < 1e-9 * max(1.0, lam))
    best = 0.0
    for i in idx:
        f = sd.vectors[:, i]
        best = max(best, float(np.mean(np.abs(f)) / math.sqrt(np.mean(f * f))))
    premise1 = best >= k ** (delta - 0.25)
    gain = 4 * delta * math.log(k) - math.log(16 / eps)
    feasible = bool(premise1 and gain >= 0 and 0 < eps < 0.25 and 0 < delta < 0.25 and 2 * k <= sd.n)
    lb = LowerBound(gain / (2 * lam) if feasible else 0.0, feasible, best, lam)
    if c_ls_upper is not None:
        lhs = math.log(1.0 / (2 * best))
        rhs = lam / c_ls_upper
        lb.distortion_ok = lhs <= rhs + 1e-12
        lb.distortion_margin = rhs - lhs
    return lb


# ---------------------------------------------------------------- inequality suite


def dirichlet_form(sd: SpectralData, h: np.ndarray) -> float:
    return float(h @ (-sd.generator) @ h / sd.n)


def variance(h: np.ndarray) -> float:
    return float(np.mean(h * h) - np.mean(h) ** 2)


def inequality_suite(
    sd: SpectralData,
    pt: ProfileTable,
    mf: MixFunctionals,
    samples: int = 50,
    seed: int = 0,
) -> list[dict]:
    """Numeric checks of the spectral inequalities, each with its margin.

    Rows carry ``verdict`` in {pass, fail, report-only}.
    """
    rng = np.random.default_rng(seed)
    n = sd.n
    c_hi = mf.c_ls[1]
    rows: list[dict] = []

    def add(name: str, lhs: float, rhs: float, kind: str = "le", report: bool = False, **extra) -> None:
        margin = rhs - lhs if kind == "le" else lhs - rhs
        ok = margin >= -1e-9 * max(1.0, abs(lhs), abs(rhs))
        verdict = "report-only" if report else ("pass" if ok else "fail")
        rows.append({"name": name, "lhs": lhs, "rhs": rhs, "margin": margin, "verdict": verdict, **extra})

    # profile versus log-Sobolev
    for eps in np.geomspace(1.0 / n, 0.9, 8):
        add("profile_vs_logsobolev", (1 - eps) * pt.lam(eps, "lo"), c_hi * math.log(1 / eps), kind="ge", eps=float(eps))
    # Dirichlet over variance versus the profile at 4||u||_1^2/Var
    for _ in range(samples):
        size = rng.integers(1, n + 1)
        u = np.zeros(n)
        u[rng.choice(n, size, replace=False)] = rng.exponential(size=size)
        var = variance(u)
        if var <= 1e-14:
            continue
        arg = 4 * np.mean(np.abs(u)) ** 2 / var
        add("dirichlet_vs_profile", dirichlet_form(sd, u) / var, 0.5 * pt.lam(arg, "hi"), kind="ge", arg=float(arg))
    # L2 contraction from the profile (c = 1/2 and random c)
    for _ in range(samples // 5 + 1):
        mu = rng.dirichlet(np.full(n, 0.3))
        if rng.random() < 0.3:
            mu = np.eye(n)[rng.integers(n)]
        c = rng.choice([0.5, rng.uniform(0.05, 0.95)])
        dist0 = n * mu @ mu - 1.0
        if dist0 <= 1e-12:
            continue
        t = math.log(1 / c) / pt.lam(4.0 / (c * dist0), "lo")
        mut = heat_kernel(sd, t) @ mu
        add("profile_l2_contraction", n * mut @ mut - 1.0, c * dist0, c=float(c), t=float(t))
    # Poincare decay
    for _ in range(samples // 5 + 1):
        mu = rng.dirichlet(np.full(n, 0.5))
        t = float(rng.choice([0.0, rng.exponential(sd.rel)]))
        mut = heat_kernel(sd, t) @ mu
        add("poincare", n * mut @ mut - 1.0, (n * mu @ mu - 1.0) * math.exp(-2 * sd.gap * t), t=t)
    # profile bound ordering
    for eps, tsp in pt.t_sp.items():
        tinf = t_mix_inf(sd, eps)
        add("linf_le_tsp", tinf, tsp, eps=eps)
        # the evolving-set tail term is rel*log(8/eps) while the profile tail is up to
        # 2*rel*log(8/eps), so this ordering is not guaranteed at small n
        add("tsp_le_tev", tsp, pt.t_ev[eps], report=True, eps=eps)
    for s in range(1, n):
        add("profile_le_2", pt.lam_lo[s], 2.0, delta=s / n)
    for row in cheeger_sandwich(pt):
        rows.append({"name": "cheeger_sandwich", "margin": 0.0, "verdict": "pass" if row["ok"] else "fail", **row})
    # r_* equals the L-infinity time at the rescaled threshold
    for eps, rs in mf.r_star.items():
        add("rstar_le_linf", rs, t_mix_inf(sd, eps * n / math.log(n) ** 2) * (1 + 2 * BISECT_RTOL), eps=eps)
    # report-only constants
    if n > 2:
        llog = math.log(max(math.log(n), math.e))
        tsp_half = t_sp(pt, 0.5)
        rows.append({"name": "tsp_half_constant", "measured": tsp_half * c_hi / llog, "verdict": "report-only"})
        for eps, rs in mf.r_star.items():
            rows.append({"name": "rstar_constant", "eps": eps, "measured": rs * c_hi * math.log(n) / llog, "verdict": "report-only"})
    return rows

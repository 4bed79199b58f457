"""The chameleon process, its ink accounting, and the reduced ink chains.

A run starts from ``k - 1`` labelled black particles and one red particle,
every other vertex white. Burn-in periods repeat until the configuration is
judged good; each round then relaxes with constant colours, pinkens red-white
pairs for one time unit (up to a cap), and depinks. Ink ``|R| + |K|/2`` is a
martingale absorbed at 0 or ``n - k + 1``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as K
from .exact_small import StateCapError, build_exact
from .graph_core import Graph
from .simulate import total_rate
from .spectral import SpectralData, eigendecompose, profiles, s_star, t_mix_inf, t_star


class ChameleonError(ValueError):
    """Invalid chameleon input."""


@dataclass(frozen=True)
class ChameleonState:
    """Black tuple ``z`` and the red, pink and white sets."""

    z: tuple
    red: frozenset
    pink: frozenset
    white: frozenset
    round_index: int = 0
    phase: str = "burn_in"

    def colours(self, n: int) -> np.ndarray:
        c = np.full(n, K.WHITE, dtype=np.int8)
        c[list(self.red)] = K.RED
        c[list(self.pink)] = K.PINK
        c[list(self.z)] = K.BLACK
        return c

    def validate(self, n: int) -> None:
        parts = [set(self.z), set(self.red), set(self.pink), set(self.white)]
        if len(set(self.z)) != len(self.z):
            raise ChameleonError("black positions must be distinct")
        if sum(len(p) for p in parts) != n or set().union(*parts) != set(range(n)):
            raise ChameleonError("colour classes must partition the vertex set")

    @classmethod
    def initial(cls, n: int, w: Sequence[int], y: int) -> "ChameleonState":
        z = tuple(int(x) for x in w)
        white = frozenset(range(n)) - set(z) - {int(y)}
        st = cls(z, frozenset({int(y)}), frozenset(), white)
        st.validate(n)
        return st


@dataclass
class RoundParams:
    """Round schedule and estimator settings.

    ``t_round`` selects the fixed variant; otherwise ``l_table[i]`` is the round
    length used when ``min(r, w)`` lies in ``(2^(i-1), 2^i]``.
    """

    alpha: float = 0.2
    t_round: float | None = None
    l_table: np.ndarray | None = None
    burn_in: float = 1.0
    goodness_trials: int = 2000
    seed: int = 0
    max_rounds: int | None = None
    max_time: float = math.inf

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 0.25:
            raise ChameleonError("alpha must lie in (0, 1/4)")
        if self.t_round is None and self.l_table is None:
            raise ChameleonError("give t_round (fixed variant) or l_table (variable variant)")
        if self.t_round is not None and self.t_round <= 1:
            raise ChameleonError("t_round must exceed 1")
        if self.l_table is not None and np.any(np.asarray(self.l_table) <= 1):
            raise ChameleonError("every round length must exceed 1")
        if self.burn_in <= 0:
            raise ChameleonError("burn-in duration must be positive")

    @property
    def fixed(self) -> bool:
        return self.t_round is not None

    def default_max_rounds(self, n: int, k: int) -> int:
        """Fifty times the expected number of rounds of the unit-step ink walk, ``(N - 1) / (alpha/2)``."""
        big_n = n - k + 1
        return int(math.ceil(50 * max(big_n - 1, 1) / (self.alpha / 2)))


def fixed_params(
    g: Graph,
    sd: SpectralData | None = None,
    alpha: float = 0.2,
    eps: float = 1e-2,
    c_round: float = 8.0,
    **kw,
) -> RoundParams:
    """Fixed-variant defaults: ``t_round = C_round (rel + t_* + s_*) + 1`` and
    burn-in ``t_mix^(inf)(n^-10)``."""
    sd = eigendecompose(g) if sd is None else sd
    t_round = c_round * (sd.rel + t_star(sd, eps) + s_star(sd, eps)) + 1.0
    burn = t_mix_inf(sd, float(g.n) ** -10)
    if not math.isfinite(burn):
        burn = sd.rel * math.log(g.n * 1e10)
    return RoundParams(alpha=alpha, t_round=t_round, burn_in=kw.pop("burn_in", burn), **kw)


def variable_params(
    g: Graph,
    k: int,
    sd: SpectralData | None = None,
    alpha: float = 0.2,
    c_round: float = 8.0,
    c_profile: float = 16.0,
    c_hat: float = 0.1,
    **kw,
) -> RoundParams:
    """Variable-variant defaults: ``L_i = C_round / Lambda(C_profile 2^i / n) + 1``
    and burn-in ``t_mix^(inf)(c_hat / k)``."""
    sd = eigendecompose(g) if sd is None else sd
    pt = profiles(g, sd, [0.5])
    big_n = g.n - k + 1
    levels = max(1, math.ceil(math.log2(max(big_n, 2)))) + 1
    table = np.array([c_round / pt.lam(c_profile * 2**i / g.n, "lo") + 1.0 for i in range(levels)])
    burn = t_mix_inf(sd, c_hat / k)
    return RoundParams(alpha=alpha, l_table=table, burn_in=kw.pop("burn_in", burn), **kw)


@dataclass
class ChameleonBatch:
    """Outcomes of many runs.

    ``fill`` holds 1 (filled), 0 (emptied) or -1 (truncated). ``stats`` columns:
    rounds, burn-ins, full pinkenings, type-1 depinkings, low-probability flags,
    not-good detections.
    """

    n: int
    k: int
    fill: np.ndarray
    stats: np.ndarray
    record_times: np.ndarray
    ink_total: np.ndarray
    ink_vertex: np.ndarray
    black: np.ndarray
    burn_count: np.ndarray
    params: RoundParams
    cache_size: int = 0

    @property
    def big_n(self) -> int:
        return self.n - self.k + 1

    @property
    def trials(self) -> int:
        return int(self.fill.shape[0])

    def fill_estimate(self) -> tuple[float, float]:
        """Fill frequency among absorbed runs and its standard error."""
        done = self.fill >= 0
        m = int(done.sum())
        p = float((self.fill == 1).sum() / max(m, 1))
        return p, math.sqrt(p * (1 - p) / max(m, 1))

    def type1_rate(self) -> tuple[float, float]:
        """Type-1 depinkings per round over all runs, with a binomial standard error."""
        rounds = int(self.stats[:, 0].sum())
        p = float(self.stats[:, 3].sum() / max(rounds, 1))
        return p, math.sqrt(p * (1 - p) / max(rounds, 1))

    def summary(self) -> dict:
        p, se = self.fill_estimate()
        t1, t1se = self.type1_rate()
        return {
            "trials": self.trials,
            "filled": int((self.fill == 1).sum()),
            "emptied": int((self.fill == 0).sum()),
            "truncated": int((self.fill == -1).sum()),
            "fill_probability": p,
            "fill_stderr": se,
            "fill_target": 1.0 / self.big_n,
            "type1_per_round": t1,
            "type1_stderr": t1se,
            "mean_rounds": float(self.stats[:, 0].mean()),
            "mean_burn_ins": float(self.stats[:, 1].mean()),
            "low_probability_flags": int(self.stats[:, 4].sum()),
            "not_good_detections": int(self.stats[:, 5].sum()),
            "goodness_cache_size": self.cache_size,
        }


_CACHES: dict = {}


def _goodness_cache(g: Graph, params: RoundParams, table: np.ndarray, t_fixed: float, gseed: int):
    """Goodness estimates shared by every run with the same graph and estimator settings.

    Estimates are seeded from the configuration, so sharing changes nothing but speed.
    """
    key = (g.n, g.edges.tobytes(), float(g.rate_per_edge), bool(params.fixed), float(t_fixed), table.tobytes(), float(params.alpha), int(params.goodness_trials), gseed)
    if key not in _CACHES:
        if len(_CACHES) >= 32:
            _CACHES.pop(next(iter(_CACHES)))
        _CACHES[key] = K.new_goodness_cache()
    return _CACHES[key]


def clear_goodness_caches() -> None:
    _CACHES.clear()


def run_chameleon(
    g: Graph,
    w: Sequence[int],
    y: int,
    params: RoundParams,
    trials: int = 1,
    seed: int | None = None,
    record_times: Sequence[float] = (),
    per_vertex: bool = False,
    allow_irregular: bool = False,
) -> ChameleonBatch:
    """Run ``trials`` independent chameleon processes from blacks ``w`` and red ``y``.

    Goodness of a configuration is decided by a nested Monte Carlo estimate
    (``params.goodness_trials`` inner runs) seeded from the configuration, so
    repeated visits reuse the same estimate.
    """
    if not allow_irregular:
        g.require_regular("the chameleon process")
    n = g.n
    z0 = np.array([int(x) for x in w], dtype=np.int64)
    if len(set(z0.tolist())) != len(z0):
        raise ChameleonError("black starting vertices must be distinct")
    if y is None or not 0 <= int(y) < n or int(y) in set(z0.tolist()):
        raise ChameleonError("need exactly one red particle off the black set")
    k = len(z0) + 1
    if n - k < 1:
        raise ChameleonError("need at least one white particle")
    rec = np.sort(np.asarray(record_times, dtype=float))
    max_rounds = params.max_rounds if params.max_rounds is not None else params.default_max_rounds(n, k)
    table = np.asarray(params.l_table if params.l_table is not None else [2.0], dtype=float) - 1.0
    t_fixed = (params.t_round - 1.0) if params.fixed else 0.0
    gseed = int(params.seed) * 7919 + 17
    cache = _goodness_cache(g, params, table, t_fixed, gseed)
    master = params.seed if seed is None else seed
    fill, stats, tot, vert, blk, jj = K.chameleon_batch(
        g.edges,
        n,
        total_rate(g, "modified"),
        z0,
        int(y),
        float(params.alpha),
        bool(params.fixed),
        float(t_fixed),
        table,
        float(params.burn_in),
        int(max_rounds),
        float(params.max_time),
        int(params.goodness_trials),
        gseed,
        cache,
        rec,
        bool(per_vertex),
        int(trials),
        int(master),
    )
    return ChameleonBatch(n, k, fill, stats, rec, tot, vert, blk, jj, params, len(cache))


@dataclass
class Goodness:
    h_mean: float
    h_stderr: float
    p_hat: float
    good: bool


def estimate_goodness(m0: ChameleonState, g: Graph, t: float, alpha: float, trials: int, seed: int) -> Goodness:
    """Monte Carlo estimate of ``E[H_t]`` and ``Pr[H_t >= alpha min(|R|, |W|)]``."""
    if m0.pink:
        raise ChameleonError("goodness is defined for configurations without pink particles")
    if trials < 1:
        raise ChameleonError("need at least one trial")
    m0.validate(g.n)
    mm = min(len(m0.red), len(m0.white))
    if mm == 0:
        return Goodness(0.0, 0.0, 0.0, False)
    s = K.seed_state(int(seed), 0)
    h, se, p = K.goodness_from_colour(m0.colours(g.n), g.edges, total_rate(g, "modified"), float(t), float(alpha), int(trials), s)
    return Goodness(float(h), float(se), float(p), bool(h >= 2 * alpha * mm - 1e-12))


@dataclass
class InkIdentity:
    c: tuple
    b: int
    t: float
    mc_value: float
    exact_value: float
    stderr: float

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if abs(self.mc_value - self.exact_value) < 1e-12 else math.inf
        return (self.mc_value - self.exact_value) / self.stderr


def verify_ink_identity(
    g: Graph,
    w: Sequence[int],
    y: int,
    times: Sequence[float],
    params: RoundParams,
    trials: int,
    seed: int = 0,
) -> list[InkIdentity]:
    """Compare ``E[ink_t(b) 1{z(t) = c}]`` with the exact interchange law of ``(c, b)``.

    Returns one record per time and interchange state ``(c, b)``.
    """
    k = len(w) + 1
    try:
        ip = build_exact(g, k, "ip")
    except StateCapError as exc:
        raise ChameleonError(str(exc)) from exc
    batch = run_chameleon(g, w, y, params, trials=trials, seed=seed, record_times=times, per_vertex=True, allow_irregular=True)
    start = tuple(int(x) for x in w) + (int(y),)
    out = []
    for ti, t in enumerate(batch.record_times):
        exact = ip.distribution(float(t), start)
        ink = batch.ink_vertex[:, ti, :].astype(float)
        blk = batch.black[:, ti, :]
        for idx, state in enumerate(ip.states):
            c, b = state[:-1], state[-1]
            mask = np.all(blk == np.array(c), axis=1)
            x = ink[:, b] * mask
            se = float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0
            out.append(InkIdentity(tuple(c), int(b), float(t), float(x.mean()), float(exact[idx]), se))
    return out


# ---------------------------------------------------------------- ink chains


@dataclass(frozen=True)
class DoobChain:
    """Ink chain conditioned on filling: ``P(r, r +- D) = (r +- D)/(2r) p``, ``P(r, r) = 1 - p``."""

    big_n: int
    alpha: float

    @property
    def p(self) -> float:
        return self.alpha / 2

    def delta(self, r: int) -> int:
        return int(math.ceil(self.alpha * min(r, self.big_n - r) - 1e-12))

    def matrix(self) -> np.ndarray:
        """Transition matrix on states ``1..N`` (index ``r - 1``)."""
        nn = self.big_n
        mat = np.zeros((nn, nn))
        mat[nn - 1, nn - 1] = 1.0
        for r in range(1, nn):
            dl = self.delta(r)
            mat[r - 1, r - 1] = 1 - self.p
            mat[r - 1, r + dl - 1] += (r + dl) / (2 * r) * self.p
            if r - dl >= 1:
                mat[r - 1, r - dl - 1] += (r - dl) / (2 * r) * self.p
        return mat

    def z_value(self, r: np.ndarray | int) -> np.ndarray:
        """``Z = sqrt(min(I, 1 - I)) / I`` with ``I = r / N``."""
        i = np.asarray(r, dtype=float) / self.big_n
        return np.sqrt(np.minimum(i, 1 - i)) / i


def doob_chain(n: int, k: int, alpha: float) -> DoobChain:
    if n - k + 1 < 2:
        raise ChameleonError("need n - k + 1 >= 2")
    return DoobChain(n - k + 1, alpha)


def supermartingale_verify(chain: DoobChain) -> float:
    """Largest ``E[Z(Y_1) | Y_0 = r] / Z(r)`` over ``r < N``; asserted below 1."""
    mat = chain.matrix()
    zv = chain.z_value(np.arange(1, chain.big_n + 1))
    ratios = (mat[:-1] @ zv) / zv[:-1]
    c = float(ratios.max())
    if not c < 1:
        raise ChameleonError(f"ratio {c} is not below 1")
    return c


def simulate_y(chain: DoobChain, steps: int, trials: int, seed: int) -> np.ndarray:
    """Paths ``Y_0 = 1, Y_1, ..., Y_steps``; shape ``(trials, steps + 1)``."""
    rng = np.random.default_rng(seed)
    mat = chain.matrix()
    cum = np.cumsum(mat, axis=1)
    y = np.zeros((trials, steps + 1), dtype=np.int64)
    state = np.zeros(trials, dtype=np.int64)  # index r - 1
    for i in range(1, steps + 1):
        u = rng.random(trials)
        state = np.minimum((u[:, None] > cum[state]).sum(axis=1), chain.big_n - 1)
        y[:, i] = state
    return y + 1


def missing_ink_from_y(chain: DoobChain, paths: np.ndarray) -> np.ndarray:
    return (1 - paths / chain.big_n).mean(axis=0)


@dataclass
class TailStats:
    t_up: np.ndarray  # (trials, levels) first index reaching 2^i ^ m
    t_below: np.ndarray  # first index with Y < m
    s_last: np.ndarray  # last entry into [m, N] minus the time of first reaching the top level
    cross: np.ndarray  # down-crossings of m
    holding: np.ndarray | None = None  # continuous time at which Y-hat settles at or above m


def tail_statistics(chain: DoobChain, paths: np.ndarray) -> TailStats:
    """Hitting and crossing statistics of ink paths relative to ``m = ceil(N/2)``."""
    nn = chain.big_n
    m = math.ceil(nn / 2)
    levels = max(1, math.ceil(math.log2(nn)) - 1)
    trials, steps = paths.shape

    def first(mask: np.ndarray) -> np.ndarray:
        hit = mask.any(axis=1)
        return np.where(hit, mask.argmax(axis=1), steps)

    t_up = np.stack([first(paths >= min(2**i, m)) for i in range(levels + 1)], axis=1)
    t_below = first(paths < m)
    below = paths < m
    last_below = np.where(below.any(axis=1), steps - 1 - below[:, ::-1].argmax(axis=1), -1)
    s_last = (last_below + 1) - t_up[:, levels]
    cross = ((paths[:, 1:] < m) & (paths[:, :-1] >= m)).sum(axis=1)
    return TailStats(t_up, t_below, s_last, cross)


def simulate_yhat(chain: DoobChain, l_of_r: np.ndarray, horizon: float, trials: int, seed: int, max_steps: int = 100000) -> tuple[list, TailStats]:
    """Holding-time version: stay ``l_of_r[r - 1]`` time units at ``r`` before each step.

    Returns per-trial ``(jump_times, states)`` and the tail statistics of the
    embedded paths, with the settling time above ``m`` in continuous time.
    """
    rng = np.random.default_rng(seed)
    mat = chain.matrix()
    cum = np.cumsum(mat, axis=1)
    nn = chain.big_n
    m = math.ceil(nn / 2)
    out = []
    steps_needed = 0
    for _ in range(trials):
        r = 1
        t = 0.0
        times = [0.0]
        states = [1]
        while t < horizon and r < nn and len(states) < max_steps:
            t += l_of_r[r - 1]
            r = int(min(np.searchsorted(cum[r - 1], rng.random(), side="right"), nn - 1)) + 1
            times.append(t)
            states.append(r)
        out.append((np.array(times), np.array(states)))
        steps_needed = max(steps_needed, len(states))
    padded = np.array([np.pad(s, (0, steps_needed - len(s)), mode="edge") for _, s in out])
    ts = tail_statistics(chain, padded)
    settle = np.empty(trials)
    for i, (times, states) in enumerate(out):
        below = np.flatnonzero(states < m)
        settle[i] = times[below[-1] + 1] if len(below) and below[-1] + 1 < len(times) else (0.0 if not len(below) else math.inf)
    ts.holding = settle
    return out, ts


@dataclass
class DecayReport:
    rounds: np.ndarray
    missing: np.ndarray
    stderr: np.ndarray
    bound: np.ndarray
    burn_correction: np.ndarray
    filled_runs: int
    warning: str = ""

    @property
    def dominated(self) -> np.ndarray:
        return self.missing <= self.bound + self.burn_correction + 3 * self.stderr


def missing_ink_curves(batch: ChameleonBatch, c: float) -> DecayReport:
    """Fill-conditioned missing ink at record times ``t(i)`` against ``sqrt(N) c^i``.

    The burn-in correction is the Fill-conditioned frequency of an extra
    burn-in by ``t(i)``. Record times are taken to be round ends in order.
    """
    filled = batch.fill == 1
    nn = batch.big_n
    runs = int(filled.sum())
    warn = ""
    if runs < 100:
        warn = f"only {runs} filled runs; intervals are wide"
        warnings.warn(warn)
    miss = 1 - batch.ink_total[filled] / nn
    extra = (batch.burn_count[filled] >= 2).astype(float)
    i = np.arange(miss.shape[1])
    return DecayReport(
        i,
        miss.mean(axis=0),
        miss.std(axis=0, ddof=1) / math.sqrt(max(runs, 1)),
        math.sqrt(nn) * c**i,
        extra.mean(axis=0),
        runs,
        warn,
    )

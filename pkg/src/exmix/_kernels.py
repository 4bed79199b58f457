"""Compiled Monte Carlo kernels.

All kernels draw from a xoshiro256** generator whose state is derived from
``(master_seed, trial_index)`` with splitmix64, so every trial owns an
independent stream and results do not depend on trial order.
"""
from __future__ import annotations

import numpy as np
from numba import njit, types
from numba.typed import Dict

WHITE = 0
RED = 1
PINK = 2
BLACK = 3

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TWO53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@njit(cache=True)
def splitmix64(x):
    z = x + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def seed_state(master, index):
    """Four-word generator state for stream ``index`` of ``master``."""
    s = np.empty(4, dtype=np.uint64)
    x = splitmix64(np.uint64(master)) ^ splitmix64(np.uint64(index) * _GOLDEN + np.uint64(1))
    for i in range(4):
        x = splitmix64(x + np.uint64(i))
        s[i] = x
    if s[0] == 0 and s[1] == 0 and s[2] == 0 and s[3] == 0:
        s[0] = np.uint64(1)
    return s


@njit(cache=True)
def next_u64(s):
    result = _rotl(s[1] * np.uint64(5), 7) * np.uint64(9)
    t = s[1] << np.uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@njit(cache=True)
def uniform(s):
    return float(next_u64(s) >> np.uint64(11)) * _TWO53


@njit(cache=True)
def exponential(s, rate):
    return -np.log(1.0 - uniform(s)) / rate


@njit(cache=True)
def randint(s, n):
    return int(uniform(s) * n)


@njit(cache=True)
def uniform_block(master, index, size):
    """Vector of uniforms from one stream (used to cross-check the generator)."""
    s = seed_state(master, index)
    out = np.empty(size)
    for i in range(size):
        out[i] = uniform(s)
    return out


# ---------------------------------------------------------------- particle samplers


@njit(cache=True)
def mc_positions(edges, n, rate_total, modified, init, times, trials, master):
    """Positions of ``len(init)`` labelled particles at each time in ``times``.

    Returns an int array of shape ``(trials, len(times), len(init))``.
    """
    k = init.shape[0]
    m = edges.shape[0]
    out = np.empty((trials, times.shape[0], k), dtype=np.int64)
    occ = -np.ones(n, dtype=np.int64)
    pos = np.empty(k, dtype=np.int64)
    for tr in range(trials):
        s = seed_state(master, tr)
        for v in range(n):
            occ[v] = -1
        for j in range(k):
            pos[j] = init[j]
            occ[init[j]] = j
        t = exponential(s, rate_total)
        for ti in range(times.shape[0]):
            horizon = times[ti]
            while t <= horizon:
                e = randint(s, m)
                flip = True
                if modified:
                    flip = uniform(s) < 0.5
                if flip:
                    u = edges[e, 0]
                    v = edges[e, 1]
                    a = occ[u]
                    b = occ[v]
                    occ[u] = b
                    occ[v] = a
                    if a >= 0:
                        pos[a] = v
                    if b >= 0:
                        pos[b] = u
                t += exponential(s, rate_total)
            for j in range(k):
                out[tr, ti, j] = pos[j]
    return out


@njit(cache=True)
def mc_pair_interactions(edges, n, adj, rate_total, a0, b0, t_end, trials, master):
    """Interaction count and adjacency time of two tracked particles (modified stream).

    An interaction is any ring of the edge joining the two particles, whatever the coin.
    """
    m = edges.shape[0]
    counts = np.zeros(trials, dtype=np.int64)
    adj_time = np.zeros(trials)
    for tr in range(trials):
        s = seed_state(master, tr)
        pa = a0
        pb = b0
        t = 0.0
        while True:
            dt = exponential(s, rate_total)
            stop = t + dt > t_end
            if adj[pa, pb]:
                adj_time[tr] += (t_end - t) if stop else dt
            if stop:
                break
            t += dt
            e = randint(s, m)
            coin = uniform(s) < 0.5
            u = edges[e, 0]
            v = edges[e, 1]
            if (u == pa and v == pb) or (u == pb and v == pa):
                counts[tr] += 1
            if coin:
                if pa == u:
                    pa = v
                elif pa == v:
                    pa = u
                if pb == u:
                    pb = v
                elif pb == v:
                    pb = u
    return counts, adj_time


@njit(cache=True)
def mc_perm_interactions(edges, n, rate_total, t_int, t_map, trials, master):
    """Full interchange map at ``t_map`` and pairwise interaction counts on ``[0, t_int]``.

    ``perm[tr, x]`` is the position at ``t_map`` of the particle starting at ``x``;
    ``inter[tr, a, b]`` counts rings of the edge joining particles ``a`` and ``b``.
    """
    m = edges.shape[0]
    perm = np.empty((trials, n), dtype=np.int64)
    inter = np.zeros((trials, n, n), dtype=np.int32)
    occ = np.empty(n, dtype=np.int64)
    pos = np.empty(n, dtype=np.int64)
    horizon = max(t_int, t_map)
    for tr in range(trials):
        s = seed_state(master, tr)
        for v in range(n):
            occ[v] = v
            pos[v] = v
        done_map = False
        t = exponential(s, rate_total)
        while t <= horizon:
            if not done_map and t > t_map:
                for v in range(n):
                    perm[tr, v] = pos[v]
                done_map = True
            e = randint(s, m)
            coin = uniform(s) < 0.5
            u = edges[e, 0]
            v = edges[e, 1]
            a = occ[u]
            b = occ[v]
            if t <= t_int:
                inter[tr, a, b] += 1
                inter[tr, b, a] += 1
            if coin:
                occ[u] = b
                occ[v] = a
                pos[a] = v
                pos[b] = u
            t += exponential(s, rate_total)
        if not done_map:
            for v in range(n):
                perm[tr, v] = pos[v]
    return perm, inter


# ---------------------------------------------------------------- chameleon


def new_goodness_cache():
    return Dict.empty(key_type=types.int64, value_type=types.UniTuple(types.float64, 3))


@njit(cache=True)
def _config_key(colour, n):
    if n > 31:
        return -1
    key = 0
    for v in range(n):
        if colour[v] == BLACK:
            key |= 1 << v
        elif colour[v] == RED:
            key |= 1 << (v + n)
    return key


@njit(cache=True)
def _ceil_alpha(alpha, m):
    return int(np.ceil(alpha * m - 1e-9))


@njit(cache=True)
def goodness_from_colour(colour, edges, rate_total, t_const, alpha, trials, s):
    """Monte Carlo estimate of ``(E[H], stderr, Pr[H >= alpha * min(r, w)])``.

    The configuration evolves ``t_const`` time units, then for one unit every
    ringing red-white pair (both unmarked) is marked. ``H`` counts marked pairs.
    """
    n = colour.shape[0]
    m = edges.shape[0]
    r = 0
    w = 0
    for v in range(n):
        if colour[v] == RED:
            r += 1
        elif colour[v] == WHITE:
            w += 1
    mm = min(r, w)
    if mm == 0:
        return 0.0, 0.0, 0.0
    need = _ceil_alpha(alpha, mm)
    c = np.empty(n, dtype=np.int8)
    tot = 0.0
    tot2 = 0.0
    hits = 0
    for _ in range(trials):
        for v in range(n):
            c[v] = colour[v]
        h = 0
        t = exponential(s, rate_total)
        end = t_const + 1.0
        while t <= end:
            e = randint(s, m)
            coin = uniform(s) < 0.5
            u = edges[e, 0]
            v = edges[e, 1]
            cu = c[u]
            cv = c[v]
            if t > t_const and ((cu == RED and cv == WHITE) or (cu == WHITE and cv == RED)):
                c[u] = PINK
                c[v] = PINK
                h += 1
            elif coin:
                c[u] = cv
                c[v] = cu
            t += exponential(s, rate_total)
        tot += h
        tot2 += h * h
        if h >= need:
            hits += 1
    mean = tot / trials
    var = max(tot2 / trials - mean * mean, 0.0)
    se = np.sqrt(var / max(trials - 1, 1))
    return mean, se, hits / trials


@njit(cache=True)
def _lookup_goodness(colour, edges, rate_total, t_const, alpha, trials, gseed, cache):
    n = colour.shape[0]
    key = _config_key(colour, n)
    if key >= 0 and key in cache:
        return cache[key]
    s = seed_state(gseed, key if key >= 0 else 0)
    res = goodness_from_colour(colour, edges, rate_total, t_const, alpha, trials, s)
    if key >= 0:
        cache[key] = res
    return res


@njit(cache=True)
def _round_duration(fixed, t_const_fixed, t_const_table, r, w):
    if fixed:
        return t_const_fixed
    mm = min(r, w)
    i = 0
    p2 = 1
    while p2 < mm:
        p2 *= 2
        i += 1
    if i >= t_const_table.shape[0]:
        i = t_const_table.shape[0] - 1
    return t_const_table[i]


@njit(cache=True)
def _record(tr, ri, colour, z, r, kp, burns, per_vertex, rec_total, rec_vertex, rec_z, rec_j):
    rec_total[tr, ri] = r + 0.5 * kp
    if per_vertex:
        for v in range(colour.shape[0]):
            if colour[v] == RED:
                rec_vertex[tr, ri, v] = 1.0
            elif colour[v] == PINK:
                rec_vertex[tr, ri, v] = 0.5
            else:
                rec_vertex[tr, ri, v] = 0.0
    for j in range(z.shape[0]):
        rec_z[tr, ri, j] = z[j]
    rec_j[tr, ri] = burns


@njit(cache=True)
def chameleon_batch(
    edges,
    n,
    rate_total,
    z0,
    y0,
    alpha,
    fixed,
    t_const_fixed,
    t_const_table,
    burn_in,
    max_rounds,
    max_time,
    g_trials,
    gseed,
    cache,
    record_times,
    per_vertex,
    trials,
    master,
):
    """Run ``trials`` independent chameleon processes.

    Returns
    -------
    fill : int8 array, 1 filled, 0 emptied, -1 truncated or still running
    stats : int64 array (trials, 6): rounds, burn-ins, full pinkenings,
        type-1 depinkings, low-p flags, not-good detections
    rec_total : (trials, R) ink at each record time
    rec_vertex : (trials, R, n) per-vertex ink (only if ``per_vertex``)
    rec_z : (trials, R, k-1) black positions
    rec_j : (trials, R) burn-in count at each record time
    """
    m = edges.shape[0]
    kb = z0.shape[0]
    nrec = record_times.shape[0]
    fill = -np.ones(trials, dtype=np.int8)
    stats = np.zeros((trials, 6), dtype=np.int64)
    rec_total = np.zeros((trials, nrec))
    rec_vertex = np.zeros((trials, nrec if per_vertex else 0, n), dtype=np.float32)
    rec_z = np.zeros((trials, nrec, kb), dtype=np.int64)
    rec_j = np.zeros((trials, nrec), dtype=np.int64)
    colour = np.empty(n, dtype=np.int8)
    label = np.empty(n, dtype=np.int64)
    z = np.empty(kb, dtype=np.int64)
    pinks = np.empty(n, dtype=np.int64)
    for tr in range(trials):
        s = seed_state(master, tr)
        for v in range(n):
            colour[v] = WHITE
            label[v] = -1
        for j in range(kb):
            z[j] = z0[j]
            colour[z0[j]] = BLACK
            label[z0[j]] = j
        colour[y0] = RED
        r = 1
        w = n - kb - 1
        kp = 0
        burns = 0
        rounds = 0
        ri = 0
        t = 0.0
        nxt = exponential(s, rate_total)
        need_burn = True
        p_coin = 1.0
        while True:
            # one segment per iteration: burn-in, or a full round
            seg_ends = 1 if need_burn else 2
            if need_burn:
                t_end = t + burn_in
                cap = 0
            else:
                cap = 2 * _ceil_alpha(alpha, min(r, w))
                t_end = t + _round_duration(fixed, t_const_fixed, t_const_table, r, w)
            for seg in range(seg_ends):
                pinkening = seg == 1
                if pinkening:
                    t_end = t + 1.0
                while nxt <= t_end:
                    while ri < nrec and record_times[ri] < nxt:
                        _record(tr, ri, colour, z, r, kp, burns, per_vertex, rec_total, rec_vertex, rec_z, rec_j)
                        ri += 1
                    e = randint(s, m)
                    coin = uniform(s) < 0.5
                    u = edges[e, 0]
                    v = edges[e, 1]
                    cu = colour[u]
                    cv = colour[v]
                    if (
                        pinkening
                        and kp < cap
                        and ((cu == RED and cv == WHITE) or (cu == WHITE and cv == RED))
                    ):
                        colour[u] = PINK
                        colour[v] = PINK
                        kp += 2
                        r -= 1
                        w -= 1
                    elif coin:
                        colour[u] = cv
                        colour[v] = cu
                        lu = label[u]
                        lv = label[v]
                        label[u] = lv
                        label[v] = lu
                        if lu >= 0:
                            z[lu] = v
                        if lv >= 0:
                            z[lv] = u
                    nxt += exponential(s, rate_total)
                while ri < nrec and record_times[ri] < t_end - 1e-9:
                    _record(tr, ri, colour, z, r, kp, burns, per_vertex, rec_total, rec_vertex, rec_z, rec_j)
                    ri += 1
                t = t_end
            if need_burn:
                burns += 1
            else:
                # depinking
                rounds += 1
                if kp == cap and cap > 0:
                    stats[tr, 2] += 1
                if kp == cap and cap > 0 and uniform(s) < p_coin:
                    stats[tr, 3] += 1
                    if uniform(s) < 0.5:
                        for vv in range(n):
                            if colour[vv] == PINK:
                                colour[vv] = RED
                        r += kp
                    else:
                        for vv in range(n):
                            if colour[vv] == PINK:
                                colour[vv] = WHITE
                        w += kp
                else:
                    cnt = 0
                    for vv in range(n):
                        if colour[vv] == PINK:
                            pinks[cnt] = vv
                            cnt += 1
                    half = cnt // 2
                    for i in range(cnt):
                        jj = i + randint(s, cnt - i)
                        tmp = pinks[i]
                        pinks[i] = pinks[jj]
                        pinks[jj] = tmp
                        colour[pinks[i]] = RED if i < half else WHITE
                    r += half
                    w += cnt - half
                kp = 0
            if r == 0 or w == 0:
                fill[tr] = 1 if w == 0 else 0
                break
            if rounds >= max_rounds or t >= max_time:
                break
            # decide whether the next segment is a round or another burn-in
            tc = _round_duration(fixed, t_const_fixed, t_const_table, r, w)
            hmean, hse, phat = _lookup_goodness(colour, edges, rate_total, tc, alpha, g_trials, gseed, cache)
            if hmean < 2.0 * alpha * min(r, w) - 1e-12:
                stats[tr, 5] += 1
                need_burn = True
            elif phat < alpha / 2.0:
                stats[tr, 4] += 1
                need_burn = True
            else:
                need_burn = False
                p_coin = (alpha / 2.0) / phat
        # after absorption or truncation the colours keep moving as an interchange process
        if ri < nrec:
            while True:
                while ri < nrec and record_times[ri] < nxt:
                    _record(tr, ri, colour, z, r, kp, burns, per_vertex, rec_total, rec_vertex, rec_z, rec_j)
                    ri += 1
                if ri >= nrec:
                    break
                e = randint(s, m)
                coin = uniform(s) < 0.5
                if coin:
                    u = edges[e, 0]
                    v = edges[e, 1]
                    cu = colour[u]
                    colour[u] = colour[v]
                    colour[v] = cu
                    lu = label[u]
                    lv = label[v]
                    label[u] = lv
                    label[v] = lu
                    if lu >= 0:
                        z[lu] = v
                    if lv >= 0:
                        z[lv] = u
                nxt += exponential(s, rate_total)
        stats[tr, 0] = rounds
        stats[tr, 1] = burns
    return fill, stats, rec_total, rec_vertex, rec_z, rec_j

# The chameleon process on a small cycle: ink, fill probability and the
# round-indexed chain that governs how fast missing ink decays.
#
# Run with:  python demos/03_chameleon.py
import math

import numpy as np

from exmix import chameleon as ch
from exmix.graph_core import cycle_graph

g = cycle_graph(6)

# One black particle at vertex 0, the red particle at vertex 3, white elsewhere.
# Ink starts at 1 and is absorbed at 0 or at N = n - k + 1 = 5.
# Round lengths here are desk-sized; the asymptotic defaults are far longer.
params = ch.RoundParams(alpha=0.2, t_round=5.0, burn_in=10.0, goodness_trials=2000, seed=1)
record = [0.0, 15.0, 30.0, 60.0, 120.0]
batch = ch.run_chameleon(g, [0], 3, params, 20000, seed=7, record_times=record)

p, se = batch.fill_estimate()
print(f"P[Fill] = {p:.4f} +- {se:.4f}   (1/N = {1 / batch.big_n:.4f})")
t1, se1 = batch.type1_rate()
print(f"type-1 depinking rate = {t1:.4f} +- {se1:.4f}   (alpha/2 = {params.alpha / 2})")
print("summary:", batch.summary())

# Ink is a martingale, so its mean stays at 1 at every record time.
ink = batch.ink_total
for t, m, s in zip(record, ink.mean(axis=0), ink.std(axis=0, ddof=1) / math.sqrt(len(ink))):
    print(f"  t={t:6.1f}  E[ink] = {m:.4f} +- {s:.4f}")

# Missing ink on filled runs against the supermartingale decay bound.
chain = ch.doob_chain(g.n, 2, params.alpha)
c = ch.supermartingale_verify(chain)
rep = ch.missing_ink_curves(batch, c)
print(f"\nDoob chain on N = {chain.big_n}: contraction c = {c:.5f}")
print("  missing ink:", np.round(rep.missing, 4))
print("  bound:      ", np.round(rep.bound, 4))

# The chain itself, simulated round by round.
paths = ch.simulate_y(chain, 30, 20000, seed=3)
miss = 1 - paths / chain.big_n
print("  E[1 - I_i] at i = 0, 10, 20, 30:", np.round(miss.mean(axis=0)[[0, 10, 20, 30]], 4))

# The ink identity: E[ink_t(v) | blacks] equals the law of the red particle in
# the interchange process. Checked here on C4 by z-scores.
rows = ch.verify_ink_identity(cycle_graph(4), [1], 3, [0.5, 1.0], ch.RoundParams(t_round=1.5, burn_in=0.25, goodness_trials=500), 20000, 11)
print(f"\nink identity on C4: {len(rows)} cells, max |z| = {max(abs(r.z_score) for r in rows):.2f}")

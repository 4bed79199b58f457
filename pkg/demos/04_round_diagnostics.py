# Diagnostics behind the round analysis: Nice sets, neighbour large deviations,
# white sets, negative association and the expected-interaction bound.
#
# Run with:  python demos/04_round_diagnostics.py
import numpy as np

from exmix import diagnostics as dg
from exmix.graph_core import complete_graph, cycle_graph, degree_inflate, hypercube

# Nice(S): vertices that expect few time-T neighbours started from S.
# The complement is small, and that bound is checked with no tolerance.
g = hypercube(4)
rep = dg.nice_set(g, [0, 3, 5, 6], 1.0)
print(f"{g.name} |S|=4 T=1: |Nice^c| = {rep.complement_size} <= {rep.counting_bound:.2f}")

# Degree inflation adds zero-rate dummy edges so every vertex has out-degree d_hat.
mg = degree_inflate(cycle_graph(8), 4)
rep = dg.nice_set(mg, [0, 1], 0.5)
print(f"modified C8 (d_hat=4): |Nice^c| = {rep.complement_size} <= {rep.counting_bound:.2f}")

cases = dg.default_nice_matrix()
print(f"default matrix: {len(cases)} cases, all within bound:", all(dg.nice_set(*c).gap >= 0 for c in cases))

# The Chernoff exponent per unit degree is negative across the whole grid.
grid = dg.exponent_grid()
print(f"\nChernoff: max (1/d) log L = {grid[:, 2].max():.6f} over {len(grid)} points")
bn = dg.bn_gn_estimate(cycle_graph(8), [0, 3, 5], 0.5, 0.5, 20000, seed=3)
print(f"C8 bad-neighbour frequency vs bound {bn.chernoff:.4f}: ok = {bn.ok}")

# The m exponent can go negative, e.g. at eps = 1/16, n = 256, k = 16.
print("m(1/16, 256, 16) =", dg.m_exponent(1 / 16, 256, 16))

# White sets: few vertices see little white mass after relaxation.
out = dg.white_set_checks(mg, [0, 2, 4, 6], 20.0, 0.1, trials=20000, seed=1)
print(f"\nwhite set on modified C8: |Q| = {len(out['Q'])} (bound {out['size_bound']:.2f}), no-neighbour {out['no_neighbour_verdict']}")

# Negative association of the occupation field from a fixed start.
res = dg.na_cna_tests(hypercube(3), 3, [0.5, 1.0, 2.0], 50000, seed=2)
for row in res["rows"]:
    print(f"  Q3 k=3 t={row['t']}: max cov {row['max_cov']:+.5f}, NA {row['na']}, CNA {row['cna']}")
cov = dg.exact_stationary_covariance(complete_graph(3), 2)
print("K3 stationary covariance off the diagonal:", np.round(cov[0, 1], 12))

# Expected interactions up to t_*: the version keeping the 1/n stationary term
# holds, the version without it does not at this size.
for graph in (cycle_graph(8), hypercube(3)):
    ib = dg.interaction_bound_check(graph, 0.01, 20000, seed=1)
    print(
        f"{graph.name}: max E[N] = {ib['max_mean']:.3f}; without 1/n term {ib['literal_bound']:.3f} ({ib['literal_verdict']}),"
        f" with it {ib['corrected_bound']:.3f} ({ib['corrected_verdict']})"
    )

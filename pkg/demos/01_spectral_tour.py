# A tour of the single-walk quantities that every exclusion bound is built from.
#
# Run with:  python demos/01_spectral_tour.py
import numpy as np

from exmix import spectral as spc
from exmix.graph_core import cycle_graph, hypercube, torus

# Everything starts from the eigendecomposition of -L, where L = A/d - I.
# On the hypercube Q_d the gap is 2/d, so the relaxation time is d/2.
for d in range(2, 7):
    sd = spc.eigendecompose(hypercube(d))
    print(f"Q{d}: gap = {sd.gap:.6f}  rel = {sd.rel:.6f}  (d/2 = {d / 2})")

# The heat kernel is exp(tL) assembled from the eigenpairs. Rows are laws.
sd = spc.eigendecompose(cycle_graph(8))
pt = spc.heat_kernel(sd, 1.5)
print("\nC8 heat kernel row 0 at t = 1.5:")
print(np.round(pt[0], 4), "sum =", pt[0].sum())

# Mixing functionals are defined by thresholds and found by bisection.
# t_mix uses total variation, t_mix_inf the uniform (L-infinity) distance, and
# r_*, t_*, s_* are the thresholds used to size the chameleon rounds.
g = torus(4, 2)
sd = spc.eigendecompose(g)
mf = spc.mixing_functionals(sd, [1e-2, 0.25])
print(f"\n{g.name}: rel = {sd.rel:.3f}")
for eps in (1e-2, 0.25):
    print(
        f"  eps={eps:<5} t_mix={mf.t_mix[eps]:.3f}  t_mix_inf={mf.t_mix_inf[eps]:.3f}"
        f"  r*={mf.r_star[eps]:.3f}  t*={mf.t_star[eps]:.3f}  s*={mf.s_star[eps]:.3f}"
    )

# The log-Sobolev constant is bracketed rather than computed. On Q_d the
# standard constant is gap/2 = 1/d, and the bracket must contain it.
for d in (2, 3, 4):
    lo, hi = spc.log_sobolev_bracket(spc.eigendecompose(hypercube(d)), restarts=16)
    print(f"Q{d}: c_LS in [{lo:.4f}, {hi:.4f}]   1/d = {1 / d:.4f}")

# Spectral and isoperimetric profiles. Small graphs get exact tables by
# enumerating supports; larger ones get a sweep bracket.
g = cycle_graph(10)
sd = spc.eigendecompose(g)
prof = spc.profiles(g, sd, [0.25])
print(f"\n{g.name} profiles (exact = {prof.exact}):")
for delta in (0.1, 0.2, 0.3, 0.5):
    print(f"  delta={delta}: Lambda in [{prof.lam(delta, 'lo'):.4f}, {prof.lam(delta, 'hi'):.4f}]")
print(f"  t_sp(0.25) = {spc.t_sp(prof, 0.25):.3f} vs t_mix_inf(0.25) = {spc.t_mix_inf(sd, 0.25):.3f}")

for row in spc.cheeger_sandwich(prof)[:3]:
    lam_lo, lam_hi = (float(x) for x in row["lambda"])
    print(f"  Cheeger at delta={row['delta']}: {float(row['lower']):.4f} <= [{lam_lo:.4f}, {lam_hi:.4f}] <= {float(row['upper']):.4f}  ok={row['ok']}")

# The closed-form minimum of the L2 distance to pi under a mass constraint.
closed = spc.lagrange_min_distance(0.25, 0.3)
numeric, _ = spc.simplex_min_distance(8, 2, 0.3)
print(f"\nconstrained L2 minimum: closed form {closed:.8f}, SLSQP {numeric:.8f}")

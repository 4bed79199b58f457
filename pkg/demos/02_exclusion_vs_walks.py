# Exact comparisons between exclusion, interchange and independent walks on
# small graphs, where the full state space fits in memory.
#
# Run with:  python demos/02_exclusion_vs_walks.py
from exmix import exact_small as ex
from exmix import harness
from exmix.graph_core import complete_graph, cycle_graph, hypercube

g = cycle_graph(6)
for tag in ("ex", "ip", "rw"):
    ep = ex.build_exact(g, 2, tag)
    print(f"{g.name} {tag.upper()}(2): {ep.size} states, gap = {ex.process_gap(ep):.6f}")

# The spectral gaps of EX(k), IP(k) and a single walk coincide.
for graph, ks in ((complete_graph(4), [1, 2, 3]), (hypercube(3), [2])):
    res = ex.aldous_check(graph, ks)
    for row in res["rows"]:
        print(f"{graph.name} k={row['k']}: rw1 {row['rw1']:.6f}  ip {row['ip']:.6f}  ex {row['ex']:.6f}")
    print(f"  max discrepancy {res['max_discrepancy']:.2e}")

# Projecting IP onto unordered sets gives EX exactly; the distance chain
# TV(EX) <= TV(IP) <= max delta holds along the way.
rc = ex.reduction_chain(ex.build_exact(cycle_graph(5), 2, "ip"), 1.0)
print("\nC5 reduction chain at t=1:", {k: round(v, 5) if isinstance(v, float) else v for k, v in rc.items()})

# Mixing-time ratios EX(k)/RW(k). They stay near one on these instances.
print("\nmix EX(k) / mix RW(k) at eps = 1/4")
for row in harness.oliveira_ratios():
    print(f"  {row['graph']:>3} k={row['k']}: {row['mix_ex']:.4f} / {row['mix_rw']:.4f} = {row['ratio']:.4f}")

# A sanity probe: from a fixed start, is labelled IP ever further from
# equilibrium than the product walk? Only report, no claim.
for row in ex.conjecture_probe(cycle_graph(4), 2, [0.25, 0.5, 1.0, 2.0]):
    print(f"  C4 t={row['t']}: TV(IP) {row['tv_ip']:.4f}  TV(RW) {row['tv_rw']:.4f}")

# Hypercube half-filling: mixing time against d log(dk). Q2 and Q3 are exact.
print("\nhypercube shape ratio mix / (d log(dk))")
for row in harness.hypercube_shape_ratios((2, 3)):
    print(f"  Q{row['d']} k={row['k']}: mix = {row['mix_ex']:.4f}  ratio = {row['ratio']:.4f}  ({row['method']})")

"""
Edge probabilities and expected degrees
=======================================

Each edge appears in a random spanning tree with probability w times its
effective resistance.  Summing degree weights times edge probabilities over
the edges at ``v`` gives the expected degree of ``v`` again.
"""

# %%
import numpy as np

from treedegree import (
    brute_report,
    build_graph,
    edge_probabilities,
    expected_degree,
    expected_degree_via_edges,
)

G = build_graph(5, False, [
    (0, 1, 1.0, 1.0), (0, 2, 2.0, 0.5), (1, 2, 1.0, 2.0),
    (1, 3, 3.0, 1.0), (2, 4, 1.0, -1.0), (3, 4, 0.5, 1.0),
])
p = edge_probabilities(G)
for e, pe in zip(G.edges, p):
    print(f"{e.u}-{e.v}  w={e.w:<4}  P = {pe:.6f}")
print("sum of probabilities:", p.sum(), "(N - 1 = 4)")

# %%
# The two routes to the expected degree agree, and both match enumeration.

rep = brute_report(G)
for v in range(G.n_nodes):
    print(v, expected_degree(G, v), expected_degree_via_edges(G, v), rep.expectation[v])
print("edge probabilities agree with enumeration:", np.allclose(p, rep.edge_probability, rtol=1e-12))

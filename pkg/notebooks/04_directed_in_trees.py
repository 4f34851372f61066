"""
Directed graphs: in-trees towards a root
========================================

For a directed graph the random object is an in-tree: every node except the
root keeps exactly one outgoing edge and all paths lead to the root.  The
Laplacian uses out-degrees, and the root is fixed rather than arbitrary.
"""

# %%
from treedegree import brute_report, build_graph, degree_moments, edge_probabilities, graph_tree_weight

# 0 -> 2, 0 -> 1, 1 -> 2; in-trees at 2 are {0->2, 1->2} and {0->1, 1->2}
G = build_graph(3, True, [(0, 2, 1.0), (0, 1, 1.0), (1, 2, 1.0)])
print("in-trees:", graph_tree_weight(G, 2))
m = degree_moments(G, 1, 2)
print("E[deg 1] =", m.expectation, " Var =", m.variance)
print("edge probabilities:", edge_probabilities(G, 2))

# %%
# A weighted example checked against enumeration.

D = build_graph(4, True, [
    (0, 1, 2.0), (1, 0, 1.0), (1, 3, 1.0), (2, 3, 3.0), (0, 2, 0.5), (2, 1, 1.0), (3, 0, 4.0),
])
rep = brute_report(D, root=3)
for v in range(4):
    m = degree_moments(D, v, 3)
    print(v, round(m.expectation, 12), round(rep.expectation[v], 12), round(m.variance, 12), round(rep.variance[v], 12))

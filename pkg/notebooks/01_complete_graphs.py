"""
Degrees in random spanning trees of complete graphs
===================================================

In a uniformly random spanning tree of K_N every node has expected degree
1 + (N-2)/N and variance (N-2)(N-1)/N^2.  The trace formulas reproduce both
without enumerating a single tree.
"""

# %%
import numpy as np

from treedegree import complete_graph, degree_moments, factorize

print(f"{'N':>3} {'E[deg]':>12} {'1+(N-2)/N':>12} {'Var[deg]':>12} {'closed form':>12}")
for n in range(3, 13):
    G = complete_graph(n)
    m = degree_moments(G, 0, system=factorize(G))
    print(f"{n:>3} {m.expectation:12.9f} {1 + (n - 2) / n:12.9f} "
          f"{m.variance:12.9f} {(n - 2) * (n - 1) / n ** 2:12.9f}")

# %%
# The expectation tends to 2 and the variance to 1: for large N the degree
# minus one is roughly Poisson(1).  A single factorization serves all nodes.

G = complete_graph(40)
system = factorize(G)
means = [degree_moments(G, v, system=system).expectation for v in range(5)]
print(np.round(means, 12), "sparse" if system.kind == "splu" else "dense")

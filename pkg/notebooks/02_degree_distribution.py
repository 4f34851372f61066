"""
Full degree distributions from determinants
===========================================

With integer degree weights, the total tree weight of the graph whose edges at
``v`` are scaled by ``alpha ** omega`` is a polynomial in ``alpha``; its
coefficients are the tree weights split by the degree of ``v``.
"""

# %%
from scipy.stats import binom

from treedegree import build_graph, complete_graph, degree_distribution, degree_polynomial

G = complete_graph(6)
poly = degree_polynomial(G, 0, mode="exact")
print("tree counts by degree of node 0:", {k: int(c) for k, c in poly.coefficients.items()})
print("total:", int(poly.total), "= 6**4")

# %%
# On K_N the degree of a node is 1 + Binomial(N-2, 1/N).

d = degree_distribution(G, 0, mode="fourier")
for k, p in d.probabilities.items():
    print(k, f"{p:.12f}", f"{binom.pmf(k - 1, 4, 1 / 6):.12f}")

# %%
# Degree weights need not be one.  Here node 0 has a heavy edge (omega = 3).

H = build_graph(4, False, [(0, 1, 1.0, 3), (0, 2, 2.0, 1), (0, 3, 1.0, 1), (1, 2, 1.0), (2, 3, 0.5)])
for mode in ("exact", "fourier", "vandermonde"):
    dist = degree_distribution(H, 0, mode=mode)
    print(mode, {k: round(p, 12) for k, p in dist.probabilities.items()})

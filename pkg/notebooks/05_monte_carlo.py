"""
Checking the formulas with Wilson's algorithm
=============================================

Wilson's loop-erased random walks draw spanning trees exactly from the
weighted distribution.  With a fixed seed the draws are reproducible and do
not depend on the number of worker processes.
"""

# %%
import math

from scipy.stats import chisquare

from treedegree import SamplerConfig, build_graph, degree_moments, enumerate_spanning_trees, monte_carlo_moments
from treedegree.sampler import tree_counts

G = build_graph(3, False, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)])
cfg = SamplerConfig(count=100_000, seed=2024)
est = monte_carlo_moments(G, [0, 1, 2], cfg)
for i, v in enumerate((0, 1, 2)):
    m = degree_moments(G, v)
    z = (est.mean[i] - m.expectation) / est.stderr[i]
    print(f"node {v}: sampled {est.mean[i]:.4f} +- {est.stderr[i]:.4f}, exact {m.expectation:.4f}, z = {z:+.2f}")

# %%
# Tree frequencies against the exact tree probabilities.

trees = enumerate_spanning_trees(G)
total = math.fsum(t.weight for t in trees)
counts = tree_counts(G, cfg)
observed = [counts[t.edges] for t in trees]
expected = [cfg.count * t.weight / total for t in trees]
print("observed", observed)
print("expected", [round(x) for x in expected])
print("chi-square p-value:", chisquare(observed, expected).pvalue)

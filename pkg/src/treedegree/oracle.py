"""Brute-force spanning-tree enumeration: the ground truth for small graphs.

Undirected trees come from a deterministic include/exclude recursion over
the edge list (include = contract, pruned when it would close a cycle;
exclude = delete, pruned when the remaining edges could no longer connect
the graph).  Directed in-trees pick one outgoing edge per non-root node,
pruning as soon as the chosen parent pointers form a cycle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapExceeded, Disconnected
from .graph import Graph, is_connected, reaches_root

__all__ = [
    "DEFAULT_CAP",
    "TreeSample",
    "ExhaustiveReport",
    "enumerate_spanning_trees",
    "brute_report",
    "tree_degrees",
    "is_spanning_tree",
]

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class TreeSample:
    """A spanning tree (or in-tree) as a sorted tuple of edge indices."""

    edges: tuple[int, ...]
    weight: float | Fraction


@dataclass
class ExhaustiveReport:
    tree_count: int
    total_weight: float | Fraction
    expectation: np.ndarray
    variance: np.ndarray
    covariance: np.ndarray
    distribution: list[dict[float, float]]
    edge_probability: np.ndarray
    decomposable_expectation: float
    decomposable_variance: float
    root: int | None = None


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x


def _tree_weight(G: Graph, edges: Sequence[int], exact: bool):
    if exact:
        out = Fraction(1)
        for i in edges:
            out *= Fraction(G.edges[i].w)
        return out
    return math.prod(G.edges[i].w for i in edges)


def _undirected_trees(G: Graph, cap: int):
    n, m = G.n_nodes, G.n_edges
    chosen: list[int] = []
    out: list[tuple[int, ...]] = []

    def connectable(dsu_parent, start):
        # can chosen edges plus edges[start:] still span the graph?
        dsu = _DSU(n)
        dsu.parent = list(dsu_parent)
        comps = len({dsu.find(x) for x in range(n)})
        for e in G.edges[start:]:
            a, b = dsu.find(e.u), dsu.find(e.v)
            if a != b:
                dsu.parent[a] = b
                comps -= 1
                if comps == 1:
                    return True
        return comps == 1

    def recurse(i, parent):
        if len(chosen) == n - 1:
            out.append(tuple(chosen))
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} spanning trees")
            return
        if i == m or m - i < n - 1 - len(chosen):
            return
        e = G.edges[i]
        dsu = _DSU(n)
        dsu.parent = parent
        a, b = dsu.find(e.u), dsu.find(e.v)
        if a != b:
            merged = list(dsu.parent)
            merged[a] = b
            chosen.append(i)
            recurse(i + 1, merged)
            chosen.pop()
        if connectable(dsu.parent, i + 1):
            recurse(i + 1, list(dsu.parent))

    if n == 1:
        return [()]
    recurse(0, list(range(n)))
    return out


def _in_trees(G: Graph, root: int, cap: int):
    n = G.n_nodes
    out_edges: list[list[int]] = [[] for _ in range(n)]
    for i, e in enumerate(G.edges):
        if e.u != root:
            out_edges[e.u].append(i)
    order = [x for x in range(n) if x != root]
    parent = [-1] * n
    chosen: list[int] = []
    out: list[tuple[int, ...]] = []

    def closes_cycle(x):
        # parent pointers were acyclic before x got one, so this walk ends
        y = parent[x]
        while True:
            if y == x:
                return True
            if y == root or parent[y] == -1:
                return False
            y = parent[y]

    def recurse(k):
        if k == len(order):
            out.append(tuple(sorted(chosen)))
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} in-trees")
            return
        x = order[k]
        for i in out_edges[x]:
            parent[x] = G.edges[i].v
            if not closes_cycle(x):
                chosen.append(i)
                recurse(k + 1)
                chosen.pop()
        parent[x] = -1

    recurse(0)
    return sorted(out)


def enumerate_spanning_trees(
    G: Graph, root: int | None = None, cap: int = DEFAULT_CAP, exact: bool = False
) -> list[TreeSample]:
    """All spanning trees of ``G`` (in-trees rooted at ``root`` if directed).

    Raises :class:`CapExceeded` rather than truncating.  With ``exact=True``
    tree weights are :class:`~fractions.Fraction` (floats convert exactly).
    """
    if G.directed:
        if root is None:
            raise ValueError("directed enumeration needs a root")
        G.check_node(root)
        if not reaches_root(G, root):
            raise Disconnected(f"some node cannot reach root {root}")
        trees = _in_trees(G, root, cap)
    else:
        if not is_connected(G):
            raise Disconnected("graph is disconnected")
        trees = _undirected_trees(G, cap)
    return [TreeSample(t, _tree_weight(G, t, exact)) for t in trees]


def is_spanning_tree(G: Graph, edges: Sequence[int], root: int | None = None) -> bool:
    """Check the tree invariants for an edge subset."""
    n = G.n_nodes
    if len(edges) != n - 1 or len(set(edges)) != len(edges):
        return False
    if G.directed:
        out_deg = [0] * n
        parent = [-1] * n
        for i in edges:
            e = G.edges[i]
            out_deg[e.u] += 1
            parent[e.u] = e.v
        if out_deg[root] != 0 or any(out_deg[x] != 1 for x in range(n) if x != root):
            return False
        for x in range(n):
            y, steps = x, 0
            while y != root:
                y = parent[y]
                steps += 1
                if steps > n:
                    return False
        return True
    dsu = _DSU(n)
    for i in edges:
        e = G.edges[i]
        a, b = dsu.find(e.u), dsu.find(e.v)
        if a == b:
            return False
        dsu.parent[a] = b
    return True


def tree_degrees(G: Graph, edges: Sequence[int]) -> np.ndarray:
    """Weighted degree of every node in the tree given by ``edges``."""
    deg = np.zeros(G.n_nodes)
    for i in edges:
        e = G.edges[i]
        deg[e.u] += e.omega
        deg[e.v] += e.omega
    return deg


def brute_report(G: Graph, root: int | None = None, cap: int = DEFAULT_CAP) -> ExhaustiveReport:
    """Gibbs-weighted moments by direct summation over every tree."""
    trees = enumerate_spanning_trees(G, root, cap)
    weights = [t.weight for t in trees]
    total = math.fsum(weights)
    p = np.array(weights) / total
    degs = np.array([tree_degrees(G, t.edges) for t in trees])
    n = G.n_nodes
    mean = np.array([math.fsum(p * degs[:, v]) for v in range(n)])
    centered = degs - mean
    cov = np.array([[math.fsum(p * centered[:, a] * centered[:, b]) for b in range(n)] for a in range(n)])
    dist = []
    for v in range(n):
        acc: dict[float, list[float]] = {}
        for k, pk in zip(degs[:, v], p):
            acc.setdefault(float(k), []).append(pk)
        dist.append({k: math.fsum(ps) for k, ps in sorted(acc.items())})
    present = np.zeros((len(trees), G.n_edges))
    for j, t in enumerate(trees):
        present[j, list(t.edges)] = 1.0
    edge_p = np.array([math.fsum(p * present[:, i]) for i in range(G.n_edges)])
    omegas = np.array([e.omega for e in G.edges])
    values = present @ omegas
    dmean = math.fsum(p * values)
    dvar = math.fsum(p * (values - dmean) ** 2)
    return ExhaustiveReport(
        tree_count=len(trees),
        total_weight=total,
        expectation=mean,
        variance=np.diag(cov).copy(),
        covariance=cov,
        distribution=dist,
        edge_probability=edge_p,
        decomposable_expectation=dmean,
        decomposable_variance=dvar,
        root=root,
    )

"""Exact sampling of weighted spanning trees with Wilson's algorithm.

Random numbers come from numpy's Philox generator (counter-based).  The
``count`` samples are split into fixed blocks of ``BLOCK`` draws; block ``b``
uses the substream ``SeedSequence(seed, spawn_key=(b,))``.  The block layout
does not depend on the number of workers, so results are identical for any
``workers`` value.
"""
from __future__ import annotations

import bisect
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import Disconnected
from .graph import Graph, is_connected, reaches_root
from .oracle import TreeSample

__all__ = [
    "BLOCK",
    "SamplerConfig",
    "EmpiricalMoments",
    "wilson_sample",
    "sample_trees",
    "sample_edge_arrays",
    "tree_counts",
    "edge_frequencies",
    "monte_carlo_moments",
]

BLOCK = 4096


@dataclass(frozen=True)
class SamplerConfig:
    count: int = 1
    seed: int = 0
    root: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("sample count must be at least 1")


@dataclass(frozen=True)
class EmpiricalMoments:
    nodes: tuple[int, ...]
    mean: np.ndarray
    variance: np.ndarray
    stderr: np.ndarray
    count: int


def _walk_tables(G: Graph):
    """Per node: cumulative transition weights, successor nodes, edge ids."""
    succ = [[] for _ in range(G.n_nodes)]
    for i, e in enumerate(G.edges):
        succ[e.u].append((e.v, i, e.w))
        if not G.directed:
            succ[e.v].append((e.u, i, e.w))
    tables = []
    for options in succ:
        cum, total = [], 0.0
        for _, _, w in options:
            total += w
            cum.append(total)
        tables.append((cum, [o[0] for o in options], [o[1] for o in options], total))
    return tables


def _root(G: Graph, cfg: SamplerConfig) -> int:
    if G.directed:
        if cfg.root is None:
            raise ValueError("directed sampling needs the in-tree root")
        G.check_node(cfg.root)
        if not reaches_root(G, cfg.root):
            raise Disconnected(f"some node cannot reach root {cfg.root}")
        return cfg.root
    root = 0 if cfg.root is None else cfg.root
    G.check_node(root)
    if not is_connected(G):
        raise Disconnected("graph is disconnected")
    return root


def _block(G: Graph, root: int, seed: int, index: int, size: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))
    tables = _walk_tables(G)
    n = G.n_nodes
    out = np.empty((size, n - 1), dtype=np.intp)
    buf = rng.random(BLOCK)
    k = 0
    nxt = [0] * n
    via = [0] * n
    for s in range(size):
        in_tree = [False] * n
        in_tree[root] = True
        for start in range(n):
            u = start
            while not in_tree[u]:
                if k == BLOCK:
                    buf = rng.random(BLOCK)
                    k = 0
                cum, nodes, ids, total = tables[u]
                j = bisect.bisect_right(cum, buf[k] * total)
                k += 1
                if j == len(cum):
                    j -= 1
                nxt[u] = nodes[j]
                via[u] = ids[j]
                u = nodes[j]
            # retrace the loop-erased path
            u = start
            while not in_tree[u]:
                in_tree[u] = True
                u = nxt[u]
        row = sorted(via[x] for x in range(n) if x != root)
        out[s] = row
    return out


def sample_edge_arrays(G: Graph, cfg: SamplerConfig) -> np.ndarray:
    """``count x (n-1)`` array of sampled trees as sorted edge indices."""
    root = _root(G, cfg)
    if G.n_nodes == 1:
        return np.zeros((cfg.count, 0), dtype=np.intp)
    sizes = [min(BLOCK, cfg.count - b * BLOCK) for b in range((cfg.count + BLOCK - 1) // BLOCK)]
    args = [(G, root, cfg.seed, b, size) for b, size in enumerate(sizes)]
    if cfg.workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(_block, *zip(*args)))
    else:
        parts = [_block(*a) for a in args]
    return np.concatenate(parts, axis=0)


def sample_trees(G: Graph, cfg: SamplerConfig) -> list[TreeSample]:
    arr = sample_edge_arrays(G, cfg)
    w = np.array([e.w for e in G.edges])
    return [TreeSample(tuple(int(i) for i in row), float(np.prod(w[row]))) for row in arr]


def wilson_sample(G: Graph, cfg: SamplerConfig | None = None) -> TreeSample:
    """One tree drawn with probability proportional to the product of its weights."""
    cfg = SamplerConfig() if cfg is None else cfg
    return sample_trees(G, SamplerConfig(1, cfg.seed, cfg.root, 1))[0]


def tree_counts(G: Graph, cfg: SamplerConfig) -> Counter:
    """How often each tree (as an edge-index tuple) was drawn."""
    return Counter(tuple(int(i) for i in row) for row in sample_edge_arrays(G, cfg))


def edge_frequencies(G: Graph, cfg: SamplerConfig) -> np.ndarray:
    arr = sample_edge_arrays(G, cfg)
    return np.bincount(arr.ravel(), minlength=G.n_edges) / cfg.count


def monte_carlo_moments(G: Graph, nodes, cfg: SamplerConfig) -> EmpiricalMoments:
    """Sample mean, variance and standard error of weighted degrees."""
    nodes = tuple(int(v) for v in nodes)
    for v in nodes:
        G.check_node(v)
    arr = sample_edge_arrays(G, cfg)
    heads = np.array([e.u for e in G.edges], dtype=np.intp)
    tails = np.array([e.v for e in G.edges], dtype=np.intp)
    omega = np.array([e.omega for e in G.edges])
    deg = np.zeros((cfg.count, G.n_nodes))
    rows = np.repeat(np.arange(cfg.count), arr.shape[1])
    np.add.at(deg, (rows, heads[arr].ravel()), omega[arr].ravel())
    np.add.at(deg, (rows, tails[arr].ravel()), omega[arr].ravel())
    sel = deg[:, list(nodes)]
    mean = sel.mean(axis=0)
    var = sel.var(axis=0, ddof=1) if cfg.count > 1 else np.zeros(len(nodes))
    return EmpiricalMoments(nodes, mean, var, np.sqrt(var / cfg.count), cfg.count)

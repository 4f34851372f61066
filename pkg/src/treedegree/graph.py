"""Dual-weighted graphs, node scaling and neighbourhood decompositions.

Every edge carries two weights: ``w`` (probability weight, strictly positive
for user graphs) decides how likely a spanning tree is, ``omega`` (degree
weight, any real) decides what a node's weighted degree is.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    DuplicateEdge,
    EdgeNotFound,
    NodeOutOfRange,
    NonPositiveProbabilityWeight,
    SelfLoop,
)

__all__ = [
    "Edge",
    "Graph",
    "ScaleMode",
    "ScaleSpec",
    "build_graph",
    "scale_at_node",
    "omega_power_graph",
    "neighborhood_subgraph",
    "complement_subgraph",
    "weighted_degree",
    "is_connected",
    "reaches_root",
    "complete_graph",
    "path_graph",
    "cycle_graph",
    "star_graph",
    "wheel_graph",
]


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    w: float
    omega: float = 1.0

    def other(self, node: int) -> int:
        return self.v if node == self.u else self.u

    def touches(self, node: int) -> bool:
        return node == self.u or node == self.v


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on nodes ``0 .. n_nodes-1``.

    Use :func:`build_graph` to construct one from raw tuples; it validates
    and canonicalizes.  ``adjacency[v]`` lists the indices of the edges
    incident to ``v`` (in- and out-edges for directed graphs).
    """

    n_nodes: int
    directed: bool
    edges: tuple[Edge, ...]
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _lookup: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        adj: list[list[int]] = [[] for _ in range(self.n_nodes)]
        lookup = {}
        for i, e in enumerate(self.edges):
            adj[e.u].append(i)
            adj[e.v].append(i)
            lookup[(e.u, e.v)] = i
        object.__setattr__(self, "adjacency", tuple(tuple(a) for a in adj))
        object.__setattr__(self, "_lookup", lookup)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_index(self, u: int, v: int) -> int:
        """Index of edge ``(u, v)``; orientation matters only when directed."""
        key = (u, v) if self.directed else (min(u, v), max(u, v))
        try:
            return self._lookup[key]
        except KeyError:
            raise EdgeNotFound(f"edge {u}-{v} not in graph") from None

    def has_edge(self, u: int, v: int) -> bool:
        key = (u, v) if self.directed else (min(u, v), max(u, v))
        return key in self._lookup

    def incident_edges(self, v: int) -> tuple[Edge, ...]:
        self.check_node(v)
        return tuple(self.edges[i] for i in self.adjacency[v])

    def neighbors(self, v: int) -> list[int]:
        self.check_node(v)
        return sorted({self.edges[i].other(v) for i in self.adjacency[v]})

    def check_node(self, v: int) -> None:
        if not (0 <= v < self.n_nodes):
            raise NodeOutOfRange(f"node {v} outside [0, {self.n_nodes})")

    def with_weights(self, w: Sequence[float], omega: Sequence[float] | None = None) -> "Graph":
        """Same topology, replaced weights.  Zero probability weights drop the edge."""
        if omega is None:
            omega = [e.omega for e in self.edges]
        edges = [
            Edge(e.u, e.v, float(wi), float(oi))
            for e, wi, oi in zip(self.edges, w, omega)
            if wi != 0
        ]
        return Graph(self.n_nodes, self.directed, tuple(edges))


def build_graph(
    n_nodes: int,
    directed: bool,
    edges: Iterable[Sequence[float]],
) -> Graph:
    """Validate and canonicalize ``(u, v, w[, omega])`` tuples into a Graph.

    Undirected pairs are stored with ``u < v``.  Parallel edges are rejected,
    not merged: there is no sensible degree weight for a merged edge.
    """
    if n_nodes < 1:
        raise NodeOutOfRange("a graph needs at least one node")
    seen: set[tuple[int, int]] = set()
    out = []
    for raw in edges:
        if len(raw) == 3:
            u, v, w = raw
            omega = 1.0
        else:
            u, v, w, omega = raw
        if int(u) != u or int(v) != v:
            raise NodeOutOfRange(f"node ids must be integers, got {u!r}, {v!r}")
        u, v = int(u), int(v)
        for x in (u, v):
            if not 0 <= x < n_nodes:
                raise NodeOutOfRange(f"node {x} outside [0, {n_nodes})")
        if u == v:
            raise SelfLoop(f"self-loop at node {u}")
        w = float(w)
        if not w > 0:
            raise NonPositiveProbabilityWeight(f"edge {u}-{v} has w={w}; must be > 0")
        if not directed and u > v:
            u, v = v, u
        if (u, v) in seen:
            raise DuplicateEdge(f"edge {u}-{v} given more than once")
        seen.add((u, v))
        out.append(Edge(u, v, w, float(omega)))
    return Graph(int(n_nodes), bool(directed), tuple(out))


class ScaleMode(enum.Enum):
    POWER_ALPHA = "power_alpha"
    OMEGA_POWER = "omega_power"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ScaleSpec:
    """Per-edge multiplier applied to the probability weights at one node.

    ``POWER_ALPHA`` multiplies by ``alpha ** omega(e)``, ``OMEGA_POWER`` by
    ``omega(e) ** power`` and ``CUSTOM`` by ``factor(e)``, where ``factor`` is
    either a callable on :class:`Edge` or a mapping keyed by ``(u, v)``.
    """

    node: int
    mode: ScaleMode
    alpha: float | complex | None = None
    power: int | None = None
    factor: Callable[[Edge], float] | Mapping[tuple[int, int], float] | None = None

    @classmethod
    def power_alpha(cls, node: int, alpha: float | complex) -> "ScaleSpec":
        if not isinstance(alpha, complex) and not alpha > 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        return cls(node, ScaleMode.POWER_ALPHA, alpha=alpha)

    @classmethod
    def omega_power(cls, node: int, power: int) -> "ScaleSpec":
        if int(power) != power or power < 0:
            raise ValueError(f"power must be a nonnegative integer, got {power}")
        return cls(node, ScaleMode.OMEGA_POWER, power=int(power))

    @classmethod
    def custom(cls, node: int, factor) -> "ScaleSpec":
        return cls(node, ScaleMode.CUSTOM, factor=factor)

    def factor_for(self, e: Edge):
        if self.mode is ScaleMode.POWER_ALPHA:
            return self.alpha ** e.omega
        if self.mode is ScaleMode.OMEGA_POWER:
            return e.omega ** self.power
        if callable(self.factor):
            return self.factor(e)
        if (e.u, e.v) in self.factor:
            return self.factor[(e.u, e.v)]
        return self.factor.get((e.v, e.u), 1.0)


def scale_at_node(G: Graph, spec: ScaleSpec) -> Graph:
    """Multiply the probability weight of every edge incident to ``spec.node``.

    The result may carry signed (or complex) weights, e.g. ``omega(e) ** 1``
    with negative degree weights; such graphs are formal objects whose
    Laplacians enter trace formulas, not tree distributions.  Edges whose
    weight becomes exactly zero are dropped.
    """
    G.check_node(spec.node)
    edges = []
    for e in G.edges:
        w = e.w * spec.factor_for(e) if e.touches(spec.node) else e.w
        if w != 0:
            edges.append(Edge(e.u, e.v, w, e.omega))
    return Graph(G.n_nodes, G.directed, tuple(edges))


def omega_power_graph(G: Graph, v: int, p: int) -> Graph:
    """Neighbourhood of ``v`` with each edge weight scaled by ``omega(e) ** p``.

    All edges not incident to ``v`` have weight zero and are absent.
    """
    return scale_at_node(neighborhood_subgraph(G, v), ScaleSpec.omega_power(v, p))


def neighborhood_subgraph(G: Graph, v: int) -> Graph:
    G.check_node(v)
    return Graph(G.n_nodes, G.directed, tuple(G.edges[i] for i in G.adjacency[v]))


def complement_subgraph(G: Graph, v: int) -> Graph:
    G.check_node(v)
    return Graph(G.n_nodes, G.directed, tuple(e for e in G.edges if not e.touches(v)))


def weighted_degree(G: Graph, v: int) -> float:
    """Sum of degree weights over edges touching ``v`` (in and out, if directed)."""
    G.check_node(v)
    return float(sum(G.edges[i].omega for i in G.adjacency[v]))


def is_connected(G: Graph) -> bool:
    """Connectivity of the underlying undirected graph."""
    if G.n_nodes <= 1:
        return True
    seen = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for i in G.adjacency[x]:
            y = G.edges[i].other(x)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == G.n_nodes


def reaches_root(G: Graph, root: int) -> bool:
    """True when every node has a directed path to ``root``."""
    G.check_node(root)
    incoming: list[list[int]] = [[] for _ in range(G.n_nodes)]
    for e in G.edges:
        incoming[e.v].append(e.u)
        if not G.directed:
            incoming[e.u].append(e.v)
    seen = {root}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in incoming[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == G.n_nodes


# -- standard families --------------------------------------------------------

def complete_graph(n: int, w: float = 1.0, omega: float = 1.0) -> Graph:
    return build_graph(n, False, [(i, j, w, omega) for i in range(n) for j in range(i + 1, n)])


def path_graph(n: int, w: float = 1.0, omega: float = 1.0) -> Graph:
    return build_graph(n, False, [(i, i + 1, w, omega) for i in range(n - 1)])


def cycle_graph(n: int, w: float = 1.0, omega: float = 1.0) -> Graph:
    return build_graph(n, False, [(i, (i + 1) % n, w, omega) for i in range(n)])


def star_graph(n: int, w: float = 1.0, omega: float = 1.0) -> Graph:
    """Node 0 joined to nodes 1..n-1."""
    return build_graph(n, False, [(0, i, w, omega) for i in range(1, n)])


def wheel_graph(n: int, w: float = 1.0, omega: float = 1.0) -> Graph:
    """Hub 0 joined to a cycle on nodes 1..n-1."""
    rim = n - 1
    spokes = [(0, i, w, omega) for i in range(1, n)]
    ring = [(1 + i, 1 + (i + 1) % rim, w, omega) for i in range(rim)]
    return build_graph(n, False, spokes + ring)

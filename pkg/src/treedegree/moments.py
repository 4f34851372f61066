"""Degree moments under the spanning-tree Gibbs distribution.

All moments are traces against ``X = (L^[r])^{-1}``.  The Laplacian of the
neighbourhood of ``v`` scaled by ``omega`` is nonzero only on ``v`` and its
neighbours, so only a ``deg(v) x deg(v)`` block of ``X`` is ever formed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import NumericalFailure, PreconditionViolated, SameNode
from .graph import Graph
from .laplacian import (
    ReducedLaplacianSystem,
    build_laplacian,
    factorize,
    selected_inverse_entries,
    trace_product,
)

__all__ = [
    "DegreeMoments",
    "EdgeProbability",
    "VARIANCE_TOL",
    "expected_degree",
    "degree_variance",
    "degree_moments",
    "degree_covariance",
    "covariance_matrix",
    "edge_probability",
    "edge_probabilities",
    "expected_degree_via_edges",
    "decomposable_expectation",
    "decomposable_variance",
    "spectral_full_neighbor_moments",
]

VARIANCE_TOL = 1e-9


@dataclass(frozen=True)
class DegreeMoments:
    node: int
    expectation: float
    variance: float


@dataclass(frozen=True)
class EdgeProbability:
    edge: tuple[int, int]
    probability: float


def _system(G: Graph, r: int | None, system: ReducedLaplacianSystem | None) -> ReducedLaplacianSystem:
    if system is not None:
        if r is not None and r != system.root:
            raise ValueError(f"system is reduced at {system.root}, not {r}")
        return system
    return factorize(G, r)


def _scaled_block(G: Graph, edge_ids: Iterable[int], weights, nodes: list[int], root: int) -> np.ndarray:
    """Reduced Laplacian of the given edges (with ``weights``), on ``nodes``.

    ``nodes`` never contains the root, so entries in the root's row and
    column are simply not written.
    """
    pos = {v: i for i, v in enumerate(nodes)}
    out = np.zeros((len(nodes), len(nodes)))
    for i, x in zip(edge_ids, weights):
        e = G.edges[i]
        a, b = pos.get(e.u), pos.get(e.v)
        if a is not None:
            out[a, a] += x
        if G.directed:
            if a is not None and b is not None:
                out[b, a] -= x
        else:
            if b is not None:
                out[b, b] += x
            if a is not None and b is not None:
                out[a, b] -= x
                out[b, a] -= x
    return out


def _local_nodes(G: Graph, vs: Iterable[int], root: int) -> list[int]:
    nodes: set[int] = set()
    for v in vs:
        nodes.add(v)
        nodes.update(G.edges[i].other(v) for i in G.adjacency[v])
    nodes.discard(root)
    return sorted(nodes)


def _omega_block(G: Graph, v: int, p: int, nodes: list[int], root: int) -> np.ndarray:
    ids = G.adjacency[v]
    return _scaled_block(G, ids, [G.edges[i].w * G.edges[i].omega ** p for i in ids], nodes, root)


def _check_variance(value: float, scale: float, what: str) -> float:
    tol = VARIANCE_TOL * max(scale, 1.0)
    if value < -tol:
        raise NumericalFailure(f"{what} came out negative ({value:.3e}) beyond tolerance {tol:.1e}")
    return max(value, 0.0)


def expected_degree(
    G: Graph, v: int, r: int | None = None, system: ReducedLaplacianSystem | None = None
) -> float:
    """Expected weighted degree of ``v`` in a random spanning tree.

    For a directed graph ``r`` is the in-tree root and is required.
    """
    G.check_node(v)
    system = _system(G, r, system)
    nodes = _local_nodes(G, [v], system.root)
    A = _omega_block(G, v, 1, nodes, system.root)
    X = selected_inverse_entries(system, nodes).block
    return float(np.sum(A * X.T))


def degree_moments(
    G: Graph, v: int, r: int | None = None, system: ReducedLaplacianSystem | None = None
) -> DegreeMoments:
    G.check_node(v)
    system = _system(G, r, system)
    nodes = _local_nodes(G, [v], system.root)
    A1 = _omega_block(G, v, 1, nodes, system.root)
    A2 = _omega_block(G, v, 2, nodes, system.root)
    X = selected_inverse_entries(system, nodes).block
    mean = float(np.sum(A1 * X.T))
    first = float(np.sum(A2 * X.T))
    AX = A1 @ X
    var = first - float(np.sum(AX * AX.T))
    return DegreeMoments(v, mean, _check_variance(var, abs(first), f"variance of node {v}"))


def degree_variance(
    G: Graph, v: int, r: int | None = None, system: ReducedLaplacianSystem | None = None
) -> float:
    """Variance of the weighted degree of ``v``; see :func:`degree_moments`."""
    return degree_moments(G, v, r, system).variance


def degree_covariance(
    G: Graph,
    v: int,
    u: int,
    r: int | None = None,
    system: ReducedLaplacianSystem | None = None,
) -> float:
    """Covariance of the weighted degrees of two distinct nodes.

    The cross term only involves the edge ``(u, v)`` itself, scaled by
    ``omega ** 2``; when the nodes are not adjacent it vanishes.
    """
    G.check_node(v)
    G.check_node(u)
    if u == v:
        raise SameNode("covariance needs two distinct nodes; use degree_variance")
    system = _system(G, r, system)
    nodes = _local_nodes(G, [v, u], system.root)
    Av = _omega_block(G, v, 1, nodes, system.root)
    Au = _omega_block(G, u, 1, nodes, system.root)
    shared = [i for i in G.adjacency[v] if G.edges[i].touches(u)]
    B = _scaled_block(G, shared, [G.edges[i].w * G.edges[i].omega ** 2 for i in shared], nodes, system.root)
    X = selected_inverse_entries(system, nodes).block
    return float(np.sum(B * X.T) - np.sum((Av @ X) * (Au @ X).T))


def covariance_matrix(
    G: Graph, nodes: Iterable[int] | None = None, r: int | None = None,
    system: ReducedLaplacianSystem | None = None,
) -> np.ndarray:
    """Covariance matrix of weighted degrees over ``nodes`` (all nodes by default)."""
    system = _system(G, r, system)
    nodes = list(range(G.n_nodes)) if nodes is None else list(nodes)
    C = np.zeros((len(nodes), len(nodes)))
    for i, a in enumerate(nodes):
        C[i, i] = degree_variance(G, a, system=system)
        for j in range(i + 1, len(nodes)):
            C[i, j] = C[j, i] = degree_covariance(G, a, nodes[j], system=system)
    return C


def _edge_prob_from_inverse(G: Graph, idx: int, root: int, X) -> float:
    e = G.edges[idx]
    u, v = e.u, e.v
    if G.directed:
        # u -> v; the root has no outgoing tree edge
        if u == root:
            return 0.0
        if v == root:
            return e.w * X[u, u]
        return e.w * (X[u, u] - X[u, v])
    if root == v:
        return e.w * X[u, u]
    if root == u:
        return e.w * X[v, v]
    return e.w * (X[u, u] + X[v, v] - 2.0 * X[u, v])


def edge_probability(
    G: Graph,
    e: tuple[int, int],
    r: int | None = None,
    system: ReducedLaplacianSystem | None = None,
) -> float:
    """Probability that edge ``e = (u, v)`` belongs to a random spanning tree.

    Undirected: ``w (X_uu + X_vv - 2 X_uv)``, collapsing to a single diagonal
    entry when ``u`` or ``v`` is the removed node.
    """
    idx = G.edge_index(*e)
    system = _system(G, r, system)
    ends = [x for x in (G.edges[idx].u, G.edges[idx].v) if x != system.root]
    X = selected_inverse_entries(system, ends)
    return float(_edge_prob_from_inverse(G, idx, system.root, X))


def edge_probabilities(
    G: Graph, r: int | None = None, system: ReducedLaplacianSystem | None = None
) -> np.ndarray:
    """Presence probability of every edge, in ``G.edges`` order."""
    system = _system(G, r, system)
    nodes = [x for x in range(G.n_nodes) if x != system.root]
    X = selected_inverse_entries(system, nodes)
    return np.array([_edge_prob_from_inverse(G, i, system.root, X) for i in range(G.n_edges)])


def expected_degree_via_edges(
    G: Graph, v: int, r: int | None = None, system: ReducedLaplacianSystem | None = None
) -> float:
    """``sum omega(e) P(e in T)`` over the edges at ``v``."""
    G.check_node(v)
    system = _system(G, r, system)
    ends = _local_nodes(G, [v], system.root)
    X = selected_inverse_entries(system, ends)
    return float(sum(
        G.edges[i].omega * _edge_prob_from_inverse(G, i, system.root, X) for i in G.adjacency[v]
    ))


def _weighted_reduced(G: Graph, system: ReducedLaplacianSystem, power: int):
    weights = np.array([e.w * e.omega ** power for e in G.edges]) if G.edges else np.zeros(0)
    return system.restrict(build_laplacian(G, weights, sparse=system.kind == "splu").matrix)


def decomposable_expectation(
    G: Graph, r: int | None = None, system: ReducedLaplacianSystem | None = None
) -> float:
    """Expectation of ``sum_{e in T} omega(e)``."""
    system = _system(G, r, system)
    return trace_product(system, _weighted_reduced(G, system, 1))


def decomposable_variance(
    G: Graph, r: int | None = None, system: ReducedLaplacianSystem | None = None
) -> float:
    """Variance of ``sum_{e in T} omega(e)``."""
    system = _system(G, r, system)
    M1 = _weighted_reduced(G, system, 1)
    M2 = _weighted_reduced(G, system, 2)
    first = trace_product(system, M2)
    Z = system.solve(M1.toarray() if hasattr(M1, "toarray") else M1)
    var = first - float(np.sum(Z * Z.T))
    return _check_variance(var, abs(first), "decomposable variance")


def spectral_full_neighbor_moments(
    G: Graph, v: int, kappa1: float | None = None, kappa2: float | None = None
) -> tuple[float, float]:
    """Degree moments of a node joined to every other node with equal weights.

    With ``w = kappa1`` and ``omega = kappa2`` on every edge at ``v``, the
    moments reduce to sums over the eigenvalues ``lam`` of the Laplacian of
    ``G`` with ``v`` deleted::

        E   = sum kappa1 kappa2 / (lam + kappa1)
        Var = sum kappa1 kappa2**2 lam / (lam + kappa1)**2

    This is an independent check on the trace formulas, not the production
    path.
    """
    G.check_node(v)
    if G.directed:
        raise PreconditionViolated("spectral special case is for undirected graphs")
    incident = G.incident_edges(v)
    if len(incident) != G.n_nodes - 1:
        raise PreconditionViolated(f"node {v} is not adjacent to every other node")
    ws = {e.w for e in incident}
    omegas = {e.omega for e in incident}
    if len(ws) != 1 or len(omegas) != 1:
        raise PreconditionViolated(f"weights at node {v} are not constant")
    k1, k2 = ws.pop(), omegas.pop()
    if kappa1 is not None and kappa1 != k1 or kappa2 is not None and kappa2 != k2:
        raise PreconditionViolated(f"edges at {v} have w={k1}, omega={k2}")
    rest = [e for e in G.edges if not e.touches(v)]
    keep = [x for x in range(G.n_nodes) if x != v]
    pos = {x: i for i, x in enumerate(keep)}
    Lbar = np.zeros((len(keep), len(keep)))
    for e in rest:
        a, b = pos[e.u], pos[e.v]
        Lbar[a, a] += e.w
        Lbar[b, b] += e.w
        Lbar[a, b] -= e.w
        Lbar[b, a] -= e.w
    lam = np.linalg.eigvalsh(Lbar)
    lam = np.clip(lam, 0.0, None)
    mean = float(np.sum(k1 * k2 / (lam + k1)))
    var = float(np.sum(k1 * k2 ** 2 * lam / (lam + k1) ** 2))
    return mean, var

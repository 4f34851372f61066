import pytest

from treedegree import (
    ScaleSpec,
    build_graph,
    complete_graph,
    cycle_graph,
    path_graph,
    scale_at_node,
    star_graph,
    wheel_graph,
)
from treedegree.errors import (
    DuplicateEdge,
    EdgeNotFound,
    NodeOutOfRange,
    NonPositiveProbabilityWeight,
    SelfLoop,
)
from treedegree.graph import (
    complement_subgraph,
    is_connected,
    neighborhood_subgraph,
    omega_power_graph,
    reaches_root,
    weighted_degree,
)


def test_undirected_edges_are_canonical():
    G = build_graph(3, False, [(2, 0, 1.5), (1, 2, 1.0, 3.0)])
    assert [(e.u, e.v) for e in G.edges] == [(0, 2), (1, 2)]
    assert G.edges[1].omega == 3.0
    assert G.edge_index(2, 1) == 1
    assert G.has_edge(0, 2) and not G.has_edge(0, 1)


def test_directed_orientation_matters():
    G = build_graph(2, True, [(1, 0, 1.0)])
    assert G.has_edge(1, 0)
    with pytest.raises(EdgeNotFound):
        G.edge_index(0, 1)


@pytest.mark.parametrize("edges, exc", [
    ([(0, 0, 1.0)], SelfLoop),
    ([(0, 1, 1.0), (1, 0, 2.0)], DuplicateEdge),
    ([(0, 1, 0.0)], NonPositiveProbabilityWeight),
    ([(0, 1, -1.0)], NonPositiveProbabilityWeight),
    ([(0, 5, 1.0)], NodeOutOfRange),
])
def test_invalid_edges_rejected(edges, exc):
    with pytest.raises(exc):
        build_graph(3, False, edges)


def test_antiparallel_directed_edges_allowed():
    G = build_graph(2, True, [(0, 1, 1.0), (1, 0, 2.0)])
    assert G.n_edges == 2


def test_adjacency_and_degree(triangle):
    assert triangle.neighbors(0) == [1, 2]
    assert weighted_degree(triangle, 0) == 2.0  # sum of omega, not w
    assert len(triangle.incident_edges(2)) == 2
    with pytest.raises(NodeOutOfRange):
        triangle.neighbors(3)


def test_families():
    assert complete_graph(5).n_edges == 10
    assert path_graph(4).n_edges == 3
    assert cycle_graph(4).n_edges == 4
    assert star_graph(5).neighbors(0) == [1, 2, 3, 4]
    W = wheel_graph(6)
    assert W.n_edges == 10 and W.neighbors(0) == [1, 2, 3, 4, 5]


def test_connectivity():
    assert is_connected(path_graph(4))
    assert not is_connected(build_graph(4, False, [(0, 1, 1.0), (2, 3, 1.0)]))
    D = build_graph(3, True, [(0, 1, 1.0), (1, 2, 1.0)])
    assert reaches_root(D, 2) and not reaches_root(D, 0)


def test_scale_power_alpha(triangle):
    S = scale_at_node(triangle, ScaleSpec.power_alpha(0, 2.0))
    assert [e.w for e in S.edges] == [2.0, 2.0, 6.0]


def test_scale_omega_power_may_drop_or_sign():
    G = build_graph(3, False, [(0, 1, 2.0, 0.0), (0, 2, 1.0, -3.0), (1, 2, 1.0, 5.0)])
    S = omega_power_graph(G, 0, 1)
    # neighbourhood only; the omega = 0 edge vanishes
    assert [(e.u, e.v, e.w) for e in S.edges] == [(0, 2, -3.0)]
    with pytest.raises(ValueError):
        ScaleSpec.omega_power(0, -1)
    with pytest.raises(ValueError):
        ScaleSpec.power_alpha(0, 0.0)


def test_scale_custom_mapping(triangle):
    S = scale_at_node(triangle, ScaleSpec.custom(1, {(1, 0): 10.0, (1, 2): 10.0}))
    assert [e.w for e in S.edges] == [10.0, 20.0, 3.0]


def test_neighbourhood_split(triangle):
    N = neighborhood_subgraph(triangle, 0)
    C = complement_subgraph(triangle, 0)
    assert N.n_edges + C.n_edges == triangle.n_edges
    assert all(e.touches(0) for e in N.edges)
    assert not any(e.touches(0) for e in C.edges)


def test_with_weights_drops_zero(triangle):
    H = triangle.with_weights([1.0, 0.0, 2.0])
    assert H.n_edges == 2

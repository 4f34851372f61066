"""Invariants checked on hypothesis-generated graphs."""
import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from treedegree import (
    build_graph,
    covariance_matrix,
    degree_distribution,
    degree_moments,
    edge_probabilities,
    expected_degree,
    expected_degree_via_edges,
    factorize,
    graph_tree_weight,
)
from treedegree.distribution import evaluate_tree_polynomial
from treedegree.laplacian import selected_inverse_entries

SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def connected_graphs(draw, min_nodes=2, max_nodes=7, integer_omega=False):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = set()
    for k in range(1, n):
        j = draw(st.integers(0, k - 1))
        pairs.add((j, k))
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n * 2))
    pairs.update((min(a, b), max(a, b)) for a, b in extra if a != b)
    weight = st.floats(0.1, 10.0)
    omega = st.integers(0, 3).map(float) if integer_omega else st.floats(-2.0, 2.0)
    edges = [(a, b, draw(weight), draw(omega)) for a, b in sorted(pairs)]
    return build_graph(n, False, edges)


@SETTINGS
@given(connected_graphs(), st.floats(0.1, 10.0))
def test_scaling_w_leaves_law_unchanged(G, c):
    H = G.with_weights([c * e.w for e in G.edges])
    assert np.allclose(edge_probabilities(H), edge_probabilities(G), rtol=1e-9, atol=1e-12)
    assert math.isclose(graph_tree_weight(H), c ** (G.n_nodes - 1) * graph_tree_weight(G), rel_tol=1e-9)


@SETTINGS
@given(connected_graphs(), st.floats(-5.0, 5.0))
def test_scaling_omega(G, c):
    H = G.with_weights([e.w for e in G.edges], [c * e.omega for e in G.edges])
    a, b = degree_moments(G, 0), degree_moments(H, 0)
    scale = 1 + abs(a.expectation) + a.variance
    assert math.isclose(b.expectation, c * a.expectation, rel_tol=1e-9, abs_tol=1e-11 * scale * (1 + abs(c)))
    assert math.isclose(b.variance, c * c * a.variance, rel_tol=1e-8, abs_tol=1e-10 * scale * (1 + c * c))


@SETTINGS
@given(connected_graphs(), st.data())
def test_alpha_one_identity(G, data):
    v = data.draw(st.integers(0, G.n_nodes - 1))
    assert math.isclose(evaluate_tree_polynomial(G, v, 1.0), graph_tree_weight(G), rel_tol=1e-12)


@SETTINGS
@given(connected_graphs())
def test_edge_probabilities_partition(G):
    p = edge_probabilities(G)
    assert math.isclose(p.sum(), G.n_nodes - 1, rel_tol=1e-10)
    assert np.all(p > -1e-12) and np.all(p < 1 + 1e-12)


@SETTINGS
@given(connected_graphs(min_nodes=3))
def test_cofactors_equal(G):
    dets = [factorize(G, r).log_abs_det for r in range(G.n_nodes)]
    assert np.allclose(dets, dets[0], rtol=1e-9, atol=1e-9)


@SETTINGS
@given(connected_graphs(min_nodes=3))
def test_inverse_symmetric(G):
    X = selected_inverse_entries(factorize(G, 0), range(1, G.n_nodes)).block
    assert np.allclose(X, X.T, rtol=1e-10, atol=1e-14)


@SETTINGS
@given(connected_graphs(min_nodes=3))
def test_covariance_psd(G):
    C = covariance_matrix(G)
    scale = max(1.0, np.abs(C).max())
    assert np.linalg.eigvalsh(C).min() >= -1e-8 * scale


@SETTINGS
@given(connected_graphs())
def test_duality(G):
    system = factorize(G)
    for v in range(G.n_nodes):
        a = expected_degree(G, v, system=system)
        b = expected_degree_via_edges(G, v, system=system)
        assert math.isclose(a, b, rel_tol=1e-10, abs_tol=1e-12)


@SETTINGS
@given(connected_graphs(max_nodes=6, integer_omega=True), st.data())
def test_distribution_normalized_and_supported(G, data):
    v = data.draw(st.integers(0, G.n_nodes - 1))
    d = degree_distribution(G, v, mode="fourier")
    assert math.isclose(sum(d.probabilities.values()), 1.0, abs_tol=1e-9)
    top = sum(int(e.omega) for e in G.incident_edges(v))
    assert all(0 <= k <= top for k in d.probabilities)
    assert all(p >= -1e-12 for p in d.probabilities.values())

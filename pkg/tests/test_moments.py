import math

import numpy as np
import pytest

from treedegree import (
    brute_report,
    complete_graph,
    covariance_matrix,
    decomposable_expectation,
    decomposable_variance,
    degree_covariance,
    degree_moments,
    edge_probabilities,
    edge_probability,
    expected_degree,
    expected_degree_via_edges,
    factorize,
    spectral_full_neighbor_moments,
    star_graph,
    wheel_graph,
)
from treedegree.errors import NumericalFailure, PreconditionViolated, SameNode
from treedegree.moments import _check_variance

from graphgen import naive_moments, random_connected, random_directed


def test_weighted_triangle(triangle):
    # trees {01,12}: w=2, {01,02}: w=3, {12,02}: w=6; total 11
    assert math.isclose(expected_degree(triangle, 0), 14 / 11, rel_tol=1e-13)
    assert math.isclose(edge_probability(triangle, (0, 1)), 5 / 11, rel_tol=1e-13)
    m = degree_moments(triangle, 0)
    # deg0 = 1 w.p. 8/11, 2 w.p. 3/11
    mean = 8 / 11 + 6 / 11
    var = 8 / 11 + 12 / 11 - mean ** 2
    assert math.isclose(m.variance, var, rel_tol=1e-12)


def test_k3():
    G = complete_graph(3)
    m = degree_moments(G, 0)
    assert math.isclose(m.expectation, 4 / 3, rel_tol=1e-14)
    assert math.isclose(m.variance, 2 / 9, rel_tol=1e-13)
    assert math.isclose(degree_covariance(G, 0, 1), -1 / 9, rel_tol=1e-12)


def test_star_is_deterministic():
    G = star_graph(6)
    m = degree_moments(G, 0)
    assert math.isclose(m.expectation, 5.0, rel_tol=1e-14)
    assert abs(m.variance) < 1e-12


def test_moments_match_subset_enumeration(rng):
    for _ in range(15):
        G = random_connected(rng, int(rng.integers(3, 7)))
        _, mean, cov = naive_moments(G)
        for v in range(G.n_nodes):
            m = degree_moments(G, v)
            assert math.isclose(m.expectation, mean[v], rel_tol=1e-9, abs_tol=1e-12)
            assert math.isclose(m.variance, cov[v, v], rel_tol=1e-9, abs_tol=1e-12)
        C = covariance_matrix(G)
        assert np.allclose(C, cov, rtol=1e-9, atol=1e-12)


def test_directed_moments_match_subset_enumeration(rng):
    for _ in range(15):
        n = int(rng.integers(2, 6))
        root = int(rng.integers(n))
        G = random_directed(rng, n, root)
        _, mean, cov = naive_moments(G, root)
        for v in range(n):
            m = degree_moments(G, v, root)
            assert math.isclose(m.expectation, mean[v], rel_tol=1e-9, abs_tol=1e-12)
            assert math.isclose(m.variance, cov[v, v], rel_tol=1e-9, abs_tol=1e-12)


def test_directed_hand_example(small_digraph):
    # in-trees at 2: {0->2, 1->2} and {0->1, 1->2}
    assert math.isclose(expected_degree(small_digraph, 1, 2), 1.5, rel_tol=1e-14)
    assert math.isclose(degree_moments(small_digraph, 1, 2).variance, 0.25, rel_tol=1e-13)
    p = edge_probabilities(small_digraph, 2)
    assert np.allclose(p, [0.5, 0.5, 1.0])


def test_directed_requires_root(small_digraph):
    with pytest.raises(ValueError):
        expected_degree(small_digraph, 0)


def test_edge_probabilities_sum(rng):
    G = random_connected(rng, 7)
    p = edge_probabilities(G)
    assert math.isclose(p.sum(), 6.0, rel_tol=1e-12)
    assert np.all((p > 0) & (p <= 1 + 1e-12))
    for i, e in enumerate(G.edges):
        assert math.isclose(edge_probability(G, (e.v, e.u)), p[i], rel_tol=1e-12)


def test_edge_probability_same_for_every_root(rng):
    G = random_connected(rng, 6)
    ref = edge_probabilities(G, 0)
    for r in range(1, 6):
        assert np.allclose(edge_probabilities(G, r), ref, rtol=1e-10)


def test_duality(rng):
    G = random_connected(rng, 6)
    system = factorize(G)
    for v in range(6):
        assert math.isclose(expected_degree(G, v, system=system),
                            expected_degree_via_edges(G, v, system=system), rel_tol=1e-10, abs_tol=1e-13)


def test_decomposable(rng):
    for _ in range(10):
        G = random_connected(rng, int(rng.integers(3, 7)))
        rep = brute_report(G)
        assert math.isclose(decomposable_expectation(G), rep.decomposable_expectation, rel_tol=1e-9, abs_tol=1e-12)
        assert math.isclose(decomposable_variance(G), rep.decomposable_variance, rel_tol=1e-9, abs_tol=1e-12)


def test_decomposable_unit_omega_is_constant():
    G = complete_graph(5)
    assert math.isclose(decomposable_expectation(G), 4.0, rel_tol=1e-13)
    assert decomposable_variance(G) < 1e-12


def test_covariance_same_node(triangle):
    with pytest.raises(SameNode):
        degree_covariance(triangle, 1, 1)


def test_system_root_mismatch(triangle):
    system = factorize(triangle, 0)
    with pytest.raises(ValueError):
        expected_degree(triangle, 1, r=2, system=system)


@pytest.mark.parametrize("G", [complete_graph(7), wheel_graph(8), complete_graph(5, w=2.0, omega=0.5)])
def test_spectral_matches_trace(G):
    e, v = spectral_full_neighbor_moments(G, 0)
    m = degree_moments(G, 0)
    assert math.isclose(e, m.expectation, rel_tol=1e-10)
    assert math.isclose(v, m.variance, rel_tol=1e-10)


def test_spectral_preconditions(triangle, small_digraph):
    with pytest.raises(PreconditionViolated):
        spectral_full_neighbor_moments(triangle, 0)
    with pytest.raises(PreconditionViolated):
        spectral_full_neighbor_moments(wheel_graph(6), 1)
    with pytest.raises(PreconditionViolated):
        spectral_full_neighbor_moments(small_digraph, 0)


def test_negative_variance_guard():
    assert _check_variance(-1e-12, 1.0, "x") == 0.0
    with pytest.raises(NumericalFailure):
        _check_variance(-1e-3, 1.0, "x")

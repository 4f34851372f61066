"""Exact degree statistics of nodes in random spanning trees.

Trees are drawn with probability proportional to the product of their edge
probability weights ``w``; a node's weighted degree sums the degree weights
``omega`` of its tree edges.  Moments come from traces against the inverse
of a reduced Laplacian; full distributions from interpolating determinants
of node-scaled Laplacians.
"""
from .distribution import (
    DegreeDistribution,
    DegreePolynomial,
    JointDegreeDistribution,
    degree_distribution,
    degree_polynomial,
    evaluate_tree_polynomial,
    joint_degree_distribution,
    moments_from_polynomial,
)
from .errors import (
    CapExceeded,
    Disconnected,
    DuplicateEdge,
    EdgeNotFound,
    IllConditionedInterpolation,
    NodeOutOfRange,
    NonIntegerDegreeWeights,
    NonPositiveProbabilityWeight,
    NumericalFailure,
    PreconditionViolated,
    SameNode,
    SelfLoop,
    SingularMatrix,
    TreeDegreeError,
)
from .graph import (
    Edge,
    Graph,
    ScaleMode,
    ScaleSpec,
    build_graph,
    complement_subgraph,
    complete_graph,
    cycle_graph,
    neighborhood_subgraph,
    omega_power_graph,
    path_graph,
    scale_at_node,
    star_graph,
    weighted_degree,
    wheel_graph,
)
from .laplacian import (
    build_laplacian,
    factorize,
    graph_tree_weight,
    reduce,
    selected_inverse_entries,
    trace_product,
    tree_total_weight,
)
from .moments import (
    DegreeMoments,
    covariance_matrix,
    decomposable_expectation,
    decomposable_variance,
    degree_covariance,
    degree_moments,
    degree_variance,
    edge_probabilities,
    edge_probability,
    expected_degree,
    expected_degree_via_edges,
    spectral_full_neighbor_moments,
)
from .oracle import ExhaustiveReport, TreeSample, brute_report, enumerate_spanning_trees
from .sampler import EmpiricalMoments, SamplerConfig, monte_carlo_moments, wilson_sample

__version__ = "0.1.0"

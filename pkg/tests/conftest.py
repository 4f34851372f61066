import numpy as np
import pytest

from treedegree import build_graph, complete_graph


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def triangle():
    # probability weights 1, 2, 3 on the three sides
    return build_graph(3, False, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)])


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def small_digraph():
    # 0->2, 0->1, 1->2 with root 2
    return build_graph(3, True, [(0, 2, 1.0), (0, 1, 1.0), (1, 2, 1.0)])

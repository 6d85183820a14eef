import numpy as np
import pytest

from metric_embed import binary_tree, dyadic_interval, generate, grid_subset, path, random_lp_subset


def test_path_three():
    assert path(3).dist.tolist() == [[0, 1, 2], [1, 0, 1], [2, 1, 0]]


def test_binary_tree_two():
    T = binary_tree(2)
    assert T.n == 7
    assert T.dist[0, 6] == 2
    # siblings meet at their parent
    assert T.dist[3, 4] == 2
    assert T.dist[3, 6] == 4


@pytest.mark.parametrize("depth", range(6))
def test_binary_tree_size(depth):
    assert binary_tree(depth).n == 2 ** (depth + 1) - 1


def test_dyadic_interval():
    K = dyadic_interval(4)
    assert K.n == 17
    assert K.diam == 1.0
    assert K.min_distance == 1 / 16
    assert K.base == 0


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_grid_subset_is_integer_l1(dim):
    G = grid_subset(dim, 40, seed=3)
    assert G.n == 40
    assert np.array_equal(G.dist, np.round(G.dist))
    assert G.min_distance == 1


def test_seeded_generators_are_reproducible():
    a = random_lp_subset(3.0, 2, 30, seed=9)
    b = random_lp_subset(3.0, 2, 30, seed=9)
    c = random_lp_subset(3.0, 2, 30, seed=10)
    assert np.array_equal(a.dist, b.dist)
    assert not np.array_equal(a.dist, c.dist)


def test_generate_dispatch():
    assert generate("path", n=4).n == 4
    assert generate("binary_tree", depth=1).n == 3
    with pytest.raises(ValueError):
        generate("torus", n=3)

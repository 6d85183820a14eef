import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metric_embed import greedy_net, path, retract
from metric_embed.errors import EmptySkeleton
from metric_embed.nets import Skeleton, is_maximal, measure_skeleton

from conftest import metric_spaces


def brute_greedy(dist, eps, order):
    members = []
    for x in order:
        if all(dist[x, m] >= eps for m in members):
            members.append(x)
    return sorted(members)


def test_path_eleven():
    S = greedy_net(path(11), 2)
    assert S.members == (0, 2, 4, 6, 8, 10)
    assert S.precision == 1
    assert S.separation == 2


def test_radius_above_diameter_gives_base():
    assert greedy_net(path(6), 10).members == (0,)
    assert greedy_net(path(6).with_base(4), 10).members == (4,)


@given(metric_spaces())
def test_half_min_distance_keeps_everything(M):
    assert greedy_net(M, M.min_distance / 2).members == tuple(range(M.n))


@given(metric_spaces(), st.floats(0.01, 1.5))
def test_net_matches_brute_force_and_is_maximal(M, frac):
    eps = frac * M.diam
    S = greedy_net(M, eps)
    order = [M.base] + [x for x in range(M.n) if x != M.base]
    assert list(S.members) == brute_greedy(M.dist, eps, order)
    assert is_maximal(S, eps)
    assert S.separation >= eps
    assert S.precision < eps
    for x in set(range(M.n)) - set(S.members):
        # adding any non-member breaks separation
        assert min(M.dist[x, m] for m in S.members) < eps


def test_retract_identity():
    M = path(5)
    c = retract(M, measure_skeleton(M, range(5)))
    assert c.mapping.tolist() == list(range(5))
    assert c.max_additive_error == 0


def test_retract_path_ties_go_low():
    M = path(11)
    c = retract(M, greedy_net(M, 2))
    assert c[3] == 2
    assert c[9] == 8
    assert c.max_additive_error <= 2
    assert c.certified


def test_retract_singleton():
    M = path(7)
    S = measure_skeleton(M, [3])
    c = retract(M, S)
    assert set(c.mapping.tolist()) == {3}
    assert S.precision == 3
    assert c.max_additive_error == 6 <= c.bound


@given(metric_spaces(), st.floats(0.01, 1.0))
def test_retraction_certificate(M, frac):
    S = greedy_net(M, frac * M.diam)
    c = retract(M, S)
    worst = max(abs(M.dist[c[x], c[y]] - M.dist[x, y]) for x, y in itertools.product(range(M.n), repeat=2))
    assert worst == c.max_additive_error
    assert worst <= 2 * S.precision


@given(metric_spaces(), st.floats(0.05, 1.0))
def test_deterministic(M, frac):
    a, b = greedy_net(M, frac * M.diam), greedy_net(M, frac * M.diam)
    assert a.members == b.members
    assert np.array_equal(retract(M, a).mapping, retract(M, b).mapping)


def test_empty_skeleton():
    with pytest.raises(EmptySkeleton):
        measure_skeleton(path(3), [])
    with pytest.raises(EmptySkeleton):
        retract(path(3), Skeleton(path(3), (), float("inf"), float("inf")))


def test_nonpositive_radius():
    with pytest.raises(ValueError):
        greedy_net(path(3), 0)

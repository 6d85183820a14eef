import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metric_embed import SequenceFamily, double_limit, lp_additivity_check, snowflake_invariance_probe
from metric_embed.errors import HypothesisViolated, NonConvergent
from metric_embed.stability import c0_witness, orthonormal_witness, shifted_witness, witness


def test_orthonormal_family():
    r = double_limit(*orthonormal_witness(32))
    assert r.delta == 0
    assert abs(r.L_inner_first - math.sqrt(2)) <= 1e-9
    assert r.converged


@pytest.mark.parametrize("N", [4, 5, 16, 128])
def test_c0_witness_exact(N):
    r = double_limit(*c0_witness(N), W=1)
    assert (r.L_inner_first, r.L_outer_first) == (1.0, 2.0)
    assert r.delta == 1.0


def test_c0_witness_closed_form():
    X, Y = c0_witness(10)
    D = np.abs(X.elements[:, None, :] - Y.elements[None, :, :]).max(axis=2)
    n, m = np.indices(D.shape)
    assert np.array_equal(D, np.where(n <= m, 2.0, 1.0))


@pytest.mark.parametrize("N, W", [(16, 1), (64, 8)])
def test_swapping_families_swaps_limits(N, W):
    X, Y = c0_witness(N)
    a, b = double_limit(X, Y, W=W), double_limit(Y, X, W=W)
    assert (a.L_inner_first, a.L_outer_first) == (b.L_outer_first, b.L_inner_first)


@pytest.mark.parametrize("x, y", [([1.0], [0.0, 1.0]), ([0.5, -2.0], [3.0]), ([0.0], [0.0])])
def test_hilbert_shifted_family(x, y):
    X, Y = shifted_witness(x, y, 32)
    r = double_limit(X, Y)
    xv, yv = np.zeros(2), np.zeros(2)
    xv[: len(x)], yv[: len(y)] = x, y
    a, b = xv @ xv + 1, yv @ yv + 1
    expected = math.sqrt(a + b - 2 * xv @ yv)
    assert r.delta <= 1e-12
    assert r.L_inner_first == pytest.approx(expected, abs=1e-12)


def test_lp_witness():
    r = double_limit(*witness("lp", 32, p=3.0))
    assert r.delta <= 1e-12
    assert r.L_inner_first == pytest.approx((2 + 2) ** (1 / 3), abs=1e-12)


def test_unknown_witness():
    with pytest.raises(ValueError):
        witness("l1")


def test_snowflake_probe():
    assert snowflake_invariance_probe(*orthonormal_witness(32), 0.5) == (0.0, 0.0)
    d, ds = snowflake_invariance_probe(*c0_witness(16), 0.5, W=1)
    assert d == 1.0
    assert ds == pytest.approx(math.sqrt(2) - 1, abs=1e-15)
    with pytest.raises(ValueError):
        snowflake_invariance_probe(*c0_witness(16), 1.0, W=1)


@given(st.integers(0, 2**31 - 1), st.floats(0.1, 0.9))
def test_finite_point_set_families_are_stable(seed, s):
    # sequences in a 10-point set; each settles on one point, as a subsequence always can
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(10, 3))
    N, W = 40, 4
    xi = np.concatenate([rng.integers(10, size=N - 2 * W), np.full(2 * W, rng.integers(10))])
    yi = np.concatenate([rng.integers(10, size=N - 2 * W), np.full(2 * W, rng.integers(10))])
    X, Y = SequenceFamily(pts[xi]), SequenceFamily(pts[yi])
    assert double_limit(X, Y, W=W).delta == 0
    assert snowflake_invariance_probe(X, Y, s, W=W) == (0.0, 0.0)


def test_nonconvergent_reported():
    rng = np.random.default_rng(0)
    X = SequenceFamily(rng.normal(size=(32, 3)))
    Y = SequenceFamily(rng.normal(size=(32, 3)))
    with pytest.raises(NonConvergent):
        double_limit(X, Y)
    r = double_limit(X, Y, strict=False)
    assert not r.converged


def test_window_too_large():
    with pytest.raises(ValueError):
        double_limit(*c0_witness(8), W=5)


def test_mismatched_ambients():
    with pytest.raises(ValueError):
        double_limit(c0_witness(8)[0], orthonormal_witness(8)[0], W=1)


def test_additivity_disjoint_supports():
    N = 50
    tail = SequenceFamily.from_vectors([np.eye(N + 2)[n + 1] for n in range(1, N + 1)])
    assert lp_additivity_check([1.0], tail, 2.0) == 0


def perturbed_residual(N):
    tail = SequenceFamily.from_vectors([np.eye(N + 2)[0] / n + np.eye(N + 2)[n + 1] for n in range(1, N + 1)])
    return lp_additivity_check([1.0], tail, 2.0, eta=0.05)


def test_additivity_perturbed_decays():
    assert perturbed_residual(100) < 0.03
    assert perturbed_residual(400) < perturbed_residual(100)
    # closed form: (1 + 1/n)^2 + 1 - (1 + 1/n^2 + 1) = 2/n, averaged over the last W terms
    assert perturbed_residual(100) == pytest.approx(np.mean([2 / n for n in range(93, 101)]), abs=1e-12)


def test_additivity_needs_decay():
    tail = SequenceFamily.from_vectors([np.eye(4)[0] for _ in range(20)])
    with pytest.raises(HypothesisViolated):
        lp_additivity_check([0.0, 1.0], tail, 2.0)


def test_additivity_rejects_sup_norm():
    with pytest.raises(ValueError):
        lp_additivity_check([1.0], SequenceFamily(np.eye(10)), math.inf)

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metric_embed import (
    DecayModulus,
    EmbeddingTable,
    EnvelopeSpec,
    ModulusProfile,
    coarse_lipschitz_fit,
    compact_embedding,
    compression_exponent_estimate,
    distortion,
    dyadic_interval,
    envelope_check,
    frechet,
    greedy_net,
    moduli,
    path,
    retract,
    snowflake,
    validate_metric,
)
from metric_embed.analysis import coarse_fit_violation, envelope_from_json, linear, log_ratio, power
from metric_embed.compact import PI_OVER_SQRT6
from metric_embed.errors import CollapsedPair, InadmissibleEnvelope, InsufficientRange

from conftest import metric_spaces


def constant_map(M):
    return EmbeddingTable(M, np.ones((M.n, 2)), (2,), 2.0)


def test_identity_moduli():
    P = path(10)
    prof = moduli(P, frechet(P))
    for t in range(1, 10):
        assert prof.rho_hat(t) == t
        assert prof.omega_hat(t) == t


def test_constant_moduli():
    prof = moduli(path(10), constant_map(path(10)))
    assert np.all(prof.rho == 0)
    assert np.all(prof.omega == 0)


@given(metric_spaces(max_n=10), st.integers(0, 2**31 - 1))
def test_moduli_match_brute_force(M, seed):
    f = EmbeddingTable(M, np.random.default_rng(seed).normal(size=(M.n, 3)), (3,), 2.0)
    img = f.image_distances()
    prof = moduli(M, f)
    pairs = [(M.dist[i, j], img[i, j]) for i in range(M.n) for j in range(i + 1, M.n)]
    for t in prof.grid:
        assert prof.rho_hat(t) == min(v for d, v in pairs if d >= t)
        assert prof.omega_hat(t) == max(v for d, v in pairs if d <= t)


def test_isometry_distortion():
    P = path(8)
    assert distortion(P, frechet(P)) == (1.0, 1.0)


def test_snowflake_distortion_on_three_points():
    M = validate_metric([[0, 1, 3], [1, 0, 2], [3, 2, 0]])
    f = frechet(snowflake(M, 0.5)).with_domain(M)
    D, s = distortion(M, f)
    # pair ratios d^0.5 / d are 1, 1/sqrt(2), 1/sqrt(3)
    assert D == pytest.approx(math.sqrt(3), abs=1e-12)
    assert s == pytest.approx(1 / math.sqrt(3), abs=1e-12)


def test_constant_map_collapses():
    with pytest.raises(CollapsedPair):
        distortion(path(4), constant_map(path(4)))


@given(metric_spaces(max_n=10), st.floats(0.1, 50))
def test_distortion_scale_invariance(M, gamma):
    f = frechet(M)
    D, s = distortion(M, f)
    D2, s2 = distortion(M, f.scaled(gamma))
    assert D2 == pytest.approx(D, rel=1e-12)
    assert s2 == pytest.approx(gamma * s, rel=1e-12)


def test_coarse_fit_isometry():
    P = path(12)
    assert tuple(coarse_lipschitz_fit(P, frechet(P))) == (1.0, 0.0)


def test_coarse_fit_homothety():
    P = path(12)
    A, B = coarse_lipschitz_fit(P, frechet(P).scaled(3.0))
    assert A == pytest.approx(3.0, abs=1e-9)
    assert B == pytest.approx(0.0, abs=1e-9)


def test_coarse_fit_retraction():
    P = path(11)
    c = retract(P, greedy_net(P, 2))
    A, B = coarse_lipschitz_fit(P, frechet(P).compose(c.mapping))
    assert A == 1.0
    assert B <= 2 * c.precision


@given(metric_spaces(max_n=10), st.integers(0, 2**31 - 1))
def test_coarse_fit_certificate(M, seed):
    f = EmbeddingTable(M, np.random.default_rng(seed).normal(size=(M.n, 3)) * M.diam, (3,), 2.0)
    A, B = coarse_lipschitz_fit(M, f)
    assert coarse_fit_violation(M, f, A, B) <= 1e-9
    assert coarse_fit_violation(M, f, 0.95 * A, B) > 0


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75, 1.0])
def test_exponent_on_exact_power(alpha):
    t = np.arange(1.0, 101.0)
    prof = ModulusProfile.from_samples(t, t**alpha)
    assert abs(compression_exponent_estimate(prof) - alpha) <= 1e-6


def test_exponent_of_isometry_and_constant():
    P = path(40)
    assert compression_exponent_estimate(moduli(P, frechet(P))) == pytest.approx(1.0, abs=1e-12)
    t = np.arange(1.0, 41.0)
    assert compression_exponent_estimate(ModulusProfile.from_samples(t, np.full_like(t, 2.0))) == 0.0


def test_exponent_of_snowflaked_path():
    P = path(256)
    f = frechet(snowflake(P, 0.5)).with_domain(P)
    assert abs(compression_exponent_estimate(moduli(P, f), 1.0) - 0.5) <= 0.05


@pytest.mark.parametrize("t", [np.arange(1.0, 6.0), np.linspace(10, 30, 50)])
def test_exponent_needs_range(t):
    with pytest.raises(InsufficientRange):
        compression_exponent_estimate(ModulusProfile.from_samples(t, t))


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9])
def test_kalton_envelope_on_isometry(alpha):
    P = path(30)
    assert envelope_check(P, frechet(P), EnvelopeSpec.kalton(alpha)).ok


def test_kalton_envelope_catches_expansion():
    P = path(30)
    verdict = envelope_check(P, frechet(P).scaled(2.0), EnvelopeSpec.kalton(0.5))
    assert not verdict.ok
    assert verdict.violations[0]["image"] > verdict.violations[0]["omega"]


def test_compact_embedding_meets_corrected_envelope():
    K = dyadic_interval(4)
    table, _ = compact_embedding(K, DecayModulus.log2(1.0), depth=5)
    spec = EnvelopeSpec(lambda t: 0.5 * t / np.maximum(1.0, np.ceil(np.log2(1.0 / t) - 1e-9)),
                        linear(PI_OVER_SQRT6))
    assert envelope_check(K, table, spec).ok


def test_literal_compact_envelope_crosses_its_upper_bound():
    # t / (2 log2(1/t)) > (pi/sqrt6) t once log2(1/t) < 0.39, so the sandwich is empty there
    spec = EnvelopeSpec(log_ratio(0.5, 1.0), linear(PI_OVER_SQRT6))
    K = dyadic_interval(4)
    table, _ = compact_embedding(K, DecayModulus.log2(1.0))
    with pytest.raises(InadmissibleEnvelope):
        envelope_check(K, table, spec)


def test_nearly_isometric_rejects_identity_rho():
    omega = lambda t: np.where(np.asarray(t) < 1, np.sqrt(np.asarray(t)), np.asarray(t))
    with pytest.raises(InadmissibleEnvelope) as info:
        envelope_check(path(4), frechet(path(4)), EnvelopeSpec(linear(1.0), omega, "nearly_isometric"))
    assert info.value.condition == 4


def test_nearly_isometric_accepts_valid_pair():
    omega = lambda t: np.where(np.asarray(t) < 1, np.sqrt(np.asarray(t)), np.asarray(t))
    rho = lambda t: np.where(np.asarray(t) < 1, np.asarray(t), np.sqrt(np.asarray(t)))
    P = path(5)
    verdict = envelope_check(P, frechet(snowflake(P, 0.5)).with_domain(P),
                             EnvelopeSpec(rho, omega, "nearly_isometric"))
    assert verdict.ok


@pytest.mark.parametrize("obj", [
    {"kind": "kalton", "alpha": 0.5},
    {"kind": "gap", "rho": {"type": "power", "exponent": 0.5}, "omega": {"type": "linear", "a": 2, "b": 1}},
    {"kind": "coarse", "rho": {"type": "min", "of": [{"type": "power", "exponent": 0.5}, {"type": "linear"}]},
     "omega": {"type": "linear", "a": 1, "b": 1}},
    {"rho": {"type": "table", "t": [0, 100], "v": [0, 10]}, "omega": {"type": "max", "of": [{"type": "linear"}]}},
])
def test_envelope_json(obj):
    spec = envelope_from_json(obj)
    P = path(20)
    assert envelope_check(P, frechet(P), spec).ok


def test_coarse_kind_needs_unbounded_rho():
    spec = EnvelopeSpec(lambda t: np.minimum(np.asarray(t), 1.0), linear(1.0), "coarse")
    with pytest.raises(InadmissibleEnvelope):
        envelope_check(path(3), frechet(path(3)), spec)


def test_power_builder():
    assert power(0.5, 2.0)(4.0) == 4.0

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metric_embed import (
    EmbeddingTable,
    annulus_index,
    augment_with_radius,
    frechet_family,
    glue,
    grid_subset,
    path,
    validate_metric,
)
from metric_embed.errors import (
    BasePointHasNoAnnulus,
    LocalContractViolation,
    MissingLocalMap,
    NonpositiveScale,
)
from metric_embed.gluing import (
    LocalEmbeddingFamily,
    ball,
    certify_glue,
    cross_annulus_pairs,
    glue_point,
    required_levels,
)


@pytest.mark.parametrize("r, n", [(1, 0), (6, 2), (0.3, -2), (2, 1), (7.999, 2), (8, 3)])
def test_annulus_index(r, n):
    M = validate_metric([[0, r], [r, 0]], base=0)
    assert annulus_index(M, 1) == n


def test_base_has_no_annulus():
    with pytest.raises(BasePointHasNoAnnulus):
        annulus_index(path(3), 0)


def common_family(space, coords):
    # every level restricted from one global map
    maps = {n: EmbeddingTable(space.subspace(ball(space, n)), coords[ball(space, n)], (coords.shape[1],), math.inf)
            for n in required_levels(space)}
    return LocalEmbeddingFamily(space, 0.0, maps)


def test_common_map_reproduced():
    M = path(20)
    coords = M.dist - M.dist[:, [0]].T
    f = glue(common_family(M, coords))
    assert np.array_equal(f.coords, coords)


def test_boundary_levels_agree():
    M = path(20)
    fam = frechet_family(M)
    # d(x, t0) = 8 = 2^3 is the outer edge of annulus 2 and the inner edge of annulus 3
    assert np.array_equal(glue_point(fam, 8, 2), glue_point(fam, 8, 3))
    assert np.array_equal(glue_point(fam, 8, 2), fam.local_image(3, 8))
    assert np.array_equal(glue_point(fam, 4, 2), fam.local_image(2, 4))


def test_sixty_point_grid():
    G = grid_subset(2, 60, seed=11)
    fam = frechet_family(G)
    cert = certify_glue(fam, glue(fam))
    assert cert.lipschitz <= 9
    assert cert.ok


@given(st.integers(1, 3), st.integers(10, 80), st.integers(0, 10**6), st.sampled_from([0.0, 0.25, 0.5]))
def test_lipschitz_bound(dim, n, seed, eps0):
    G = grid_subset(dim, n, seed)
    fam = frechet_family(G, eps0, seed=seed)
    f = glue(fam)
    i, j = G.pairs()
    assert np.all(f.image_distances()[i, j] <= 9 * (1 + eps0) * G.dist[i, j] + 1e-9)


@given(st.integers(1, 3), st.integers(10, 80), st.integers(0, 10**6))
def test_cross_annulus_radius_gap(dim, n, seed):
    G = grid_subset(dim, n, seed)
    r = G.radii()
    a, b = cross_annulus_pairs(G)
    assert np.all(G.dist[a, b] <= 4 * np.abs(r[a] - r[b]))
    f = augment_with_radius(glue(frechet_family(G)), 0.1)
    assert np.all(f.image_distances()[a, b] >= 0.025 * G.dist[a, b])


def test_radius_block_examples():
    M = path(6)
    zero = EmbeddingTable(M, np.zeros((6, 1)), (1,), 2.0)
    f = augment_with_radius(zero, 1.0)
    assert f.image_distances()[5, 2] >= 3
    i, j = M.pairs()
    assert (f.image_distances()[i, j] / M.dist[i, j]).max() == 1


def test_nonpositive_scale():
    with pytest.raises(NonpositiveScale):
        augment_with_radius(glue(frechet_family(path(5))), 0)


def test_missing_level():
    M = path(10)
    fam = frechet_family(M)
    maps = dict(fam.maps)
    maps.pop(max(maps))
    with pytest.raises(MissingLocalMap):
        glue(LocalEmbeddingFamily(M, 0.0, maps))


def test_contract_violations():
    M = path(10)
    fam = frechet_family(M)
    n = min(fam.maps)
    shrunk = dict(fam.maps)
    shrunk[n] = fam.maps[n].scaled(0.5)
    with pytest.raises(LocalContractViolation, match="contracts"):
        glue(LocalEmbeddingFamily(M, 0.0, shrunk))
    stretched = dict(fam.maps)
    stretched[n] = fam.maps[n].scaled(2.0)
    with pytest.raises(LocalContractViolation, match="expands"):
        glue(LocalEmbeddingFamily(M, 0.5, stretched))


def test_perturbed_family_needs_seed():
    with pytest.raises(ValueError):
        frechet_family(path(5), 0.5)

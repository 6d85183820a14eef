"""Gluing local embeddings of dyadic balls into one global map.

Around a base point t0, ``B_n = {x : d(x, t0) <= 2^(n+1)}``.  Given maps
``f_n`` on ``B_n`` with ``f_n(t0) = 0`` and
``d(x, y) <= ||f_n(x) - f_n(y)|| <= (1 + eps0) d(x, y)``, a point ``x`` in the
annulus ``2^n <= d(x, t0) < 2^(n+1)`` is sent to
``lam f_n(x) + (1 - lam) f_{n+1}(x)`` with ``lam = (2^(n+1) - d(x, t0)) / 2^n``.
The glued map is ``9 (1 + eps0)``-Lipschitz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TOL, EmbeddingTable, FiniteMetricSpace, pair_samples
from .errors import BasePointHasNoAnnulus, LocalContractViolation, MissingLocalMap, NonpositiveScale


def annulus_index(space: FiniteMetricSpace, x: int, base: int | None = None) -> int:
    """The n with ``2^n <= d(x, t0) < 2^(n+1)``."""
    r = float(space.radii(base)[x])
    if r <= 0:
        raise BasePointHasNoAnnulus(f"point {x} is the base point")
    return annulus_of_radius(r)


def annulus_of_radius(r: float) -> int:
    # frexp: r = m 2^e with 0.5 <= m < 1, exact for floats
    _, e = math.frexp(r)
    return e - 1


def ball(space: FiniteMetricSpace, n: int, base: int | None = None) -> np.ndarray:
    """Indices of ``B_n``, in increasing order."""
    return np.flatnonzero(space.radii(base) <= 2.0 ** (n + 1))


def required_levels(space: FiniteMetricSpace, base: int | None = None) -> range:
    """Levels n for which a local map must be supplied."""
    r = space.radii(base)
    occupied = [annulus_of_radius(float(v)) for v in r if v > 0]
    if not occupied:
        return range(0)
    return range(min(occupied), max(occupied) + 2)


@dataclass(frozen=True, eq=False)
class LocalEmbeddingFamily:
    """Local maps ``f_n`` keyed by level.

    ``maps[n]`` is an :class:`EmbeddingTable` whose domain is the subspace
    ``domain.subspace(ball(domain, n))``; row ``i`` is the image of the ``i``-th
    point of ``B_n`` in increasing parent index order.  All maps share one
    block layout.
    """

    domain: FiniteMetricSpace
    eps0: float
    maps: dict

    @property
    def base(self) -> int:
        return self.domain.base

    def local_image(self, n: int, x: int) -> np.ndarray:
        if n not in self.maps:
            raise MissingLocalMap(n)
        members = ball(self.domain, n)
        pos = np.searchsorted(members, x)
        if pos >= members.size or members[pos] != x:
            raise ValueError(f"point {x} is not in B_{n}")
        return self.maps[n].coords[pos]

    def validate(self, tol: float = TOL) -> None:
        """Check every required map is present, well-shaped and meets its contract."""
        layout = None
        for n in required_levels(self.domain):
            if n not in self.maps:
                raise MissingLocalMap(n)
        for n, table in sorted(self.maps.items()):
            members = ball(self.domain, n)
            if table.domain.n != members.size:
                raise LocalContractViolation(n, -1, -1, f"defined on {table.domain.n} points, B_{n} has {members.size}")
            shape = (table.block_sizes, table.outer_exponent)
            if layout is None:
                layout = shape
            elif shape != layout:
                raise LocalContractViolation(n, -1, -1, "block layout differs from the other local maps")
            b = int(np.searchsorted(members, self.base))
            if np.abs(table.coords[b]).max(initial=0.0) > tol:
                raise LocalContractViolation(n, self.base, self.base, "base point is not sent to 0")
            img = table.image_distances()
            d = self.domain.dist[np.ix_(members, members)]
            low = np.argwhere(img < d - tol)
            if low.size:
                a, c = low[0]
                raise LocalContractViolation(n, int(members[a]), int(members[c]), "contracts a distance")
            high = np.argwhere(img > (1 + self.eps0) * d + tol)
            if high.size:
                a, c = high[0]
                raise LocalContractViolation(n, int(members[a]), int(members[c]),
                                             f"expands a distance by more than 1+eps0={1 + self.eps0}")

    def layout(self):
        t = next(iter(self.maps.values()))
        return t.block_sizes, t.outer_exponent


def glue_point(fam: LocalEmbeddingFamily, x: int, n: int | None = None) -> np.ndarray:
    """Image of ``x`` under the glued map, optionally through a chosen level.

    Any ``n`` with ``2^n <= d(x, t0) <= 2^(n+1)`` gives the same vector; at the
    boundary ``d = 2^(n+1)`` level n has ``lam = 0`` and level n+1 has ``lam = 1``.
    """
    r = float(fam.domain.radii()[x])
    if r == 0:
        sizes, _ = fam.layout()
        return np.zeros(sum(sizes))
    if n is None:
        n = annulus_of_radius(r)
    elif not 2.0**n <= r <= 2.0 ** (n + 1):
        raise ValueError(f"point {x} at radius {r} is not in annulus {n}")
    lam = (2.0 ** (n + 1) - r) / 2.0**n
    if lam == 0:
        return np.array(fam.local_image(n + 1, x))
    if lam == 1:
        return np.array(fam.local_image(n, x))
    return lam * fam.local_image(n, x) + (1 - lam) * fam.local_image(n + 1, x)


def glue(fam: LocalEmbeddingFamily, validate: bool = True) -> EmbeddingTable:
    """Glue the local maps; see the module docstring."""
    if validate:
        fam.validate()
    sizes, p = fam.layout()
    coords = np.vstack([glue_point(fam, x) for x in range(fam.domain.n)])
    return EmbeddingTable(fam.domain, coords, sizes, p, {"construction": "glue", "eps0": fam.eps0})


@dataclass
class GlueCertificate:
    lipschitz: float
    bound: float
    worst_pair: tuple

    @property
    def ok(self) -> bool:
        return self.lipschitz <= self.bound + TOL

    def to_json(self) -> dict:
        return {"ok": self.ok, "lipschitz": self.lipschitz, "bound": self.bound,
                "worst_pair": list(self.worst_pair)}


def certify_glue(fam: LocalEmbeddingFamily, table: EmbeddingTable, extra: float = 0.0) -> GlueCertificate:
    """Measured Lipschitz constant against ``9 (1 + eps0) + extra``."""
    i, j, d, v = pair_samples(fam.domain, table)
    if d.size == 0:
        return GlueCertificate(0.0, 9 * (1 + fam.eps0) + extra, ())
    ratios = v / d
    w = int(np.argmax(ratios))
    return GlueCertificate(float(ratios[w]), 9 * (1 + fam.eps0) + extra, (int(i[w]), int(j[w])))


def augment_with_radius(table: EmbeddingTable, c: float, base: int | None = None) -> EmbeddingTable:
    """Append one block holding ``c d(x, t0)``.

    Then ``||f(x) - f(y)|| >= c |d(x, t0) - d(y, t0)|`` and the Lipschitz
    constant grows by at most ``c``.
    """
    if not c > 0:
        raise NonpositiveScale(f"radius scale must be positive, got {c}")
    out = table.append_block(c * table.domain.radii(base))
    out.meta.update(table.meta)
    out.meta["radius_scale"] = c
    return out


def cross_annulus_pairs(space: FiniteMetricSpace, gap: int = 2, base: int | None = None):
    """Pairs ``(i, j)`` whose annulus indices differ by at least ``gap``.

    The base point has no annulus and is paired with nothing.
    """
    r = space.radii(base)
    idx = np.flatnonzero(r > 0)
    ann = np.array([annulus_of_radius(float(v)) for v in r[idx]])
    a, b = np.triu_indices(idx.size, 1)
    keep = np.abs(ann[a] - ann[b]) >= gap
    return idx[a[keep]], idx[b[keep]]


def frechet_family(space: FiniteMetricSpace, eps0: float = 0.0, seed: int | None = None,
                   levels=None) -> LocalEmbeddingFamily:
    """Full-anchor Fréchet maps on every required ball.

    Each ``f_n`` has one coordinate per point of the whole space (zero for
    anchors outside ``B_n``) so all maps share a layout.  With ``eps0 > 0`` every
    coordinate of every ``f_n`` is multiplied by an independent weight drawn from
    ``[1, 1 + eps0]``; the result still meets the local contract, since the
    coordinate at ``s = y`` gives the lower bound and each weight is at most
    ``1 + eps0``.
    """
    if eps0 < 0:
        raise ValueError("eps0 must be non-negative")
    if eps0 > 0 and seed is None:
        raise ValueError("perturbed local maps need an explicit seed")
    rng = np.random.default_rng(seed)
    t0 = space.base
    levels = required_levels(space) if levels is None else levels
    maps = {}
    for n in levels:
        members = ball(space, n)
        coords = np.zeros((members.size, space.n))
        coords[:, members] = space.dist[np.ix_(members, members)] - space.dist[members, t0][None, :]
        if eps0 > 0:
            coords *= rng.uniform(1.0, 1.0 + eps0, size=space.n)[None, :]
        maps[n] = EmbeddingTable(space.subspace(members), coords, (space.n,), math.inf)
    return LocalEmbeddingFamily(space, float(eps0), maps)

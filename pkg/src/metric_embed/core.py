"""Finite metric spaces, block-sum vectors and embedding tables.

The target spaces used throughout are outer l_p sums of finite l_inf blocks,
``(sum_k l_inf^{n_k})_p``.  A single point of such a space is a
:class:`BlockVector`; a map from a finite metric space is stored densely as an
:class:`EmbeddingTable` (one row of concatenated block coordinates per point).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import (
    AsymmetricMatrix,
    IncompatibleBlocks,
    InvalidExponent,
    NegativeOrZeroOffDiagonal,
    NonSquareMatrix,
    NonzeroDiagonal,
    SizeOverflow,
    TriangleViolation,
)

TOL = 1e-9
DEFAULT_CAP = 2000


def point_cap() -> int:
    """Maximum number of points any space may have (``METRIC_EMBED_CAP`` overrides)."""
    raw = os.environ.get("METRIC_EMBED_CAP")
    return int(raw) if raw else DEFAULT_CAP


def check_size(n: int, what: str = "space") -> None:
    cap = point_cap()
    if n > cap:
        raise SizeOverflow(f"{what} has {n} points, cap is {cap} (set METRIC_EMBED_CAP to raise it)")


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A labelled finite point set with an explicit distance matrix.

    Instances are normally produced by :func:`validate_metric`; the constructor
    itself does not re-check the axioms.
    """

    labels: tuple
    dist: np.ndarray
    base_index: int | None = None

    def __post_init__(self):
        d = np.array(self.dist, dtype=np.float64)
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self):
        return self.n

    @property
    def base(self) -> int:
        """The base point t0; point 0 when none was set."""
        return 0 if self.base_index is None else self.base_index

    @property
    def diam(self) -> float:
        return float(self.dist.max()) if self.n else 0.0

    @property
    def min_distance(self) -> float:
        """Smallest positive distance (inf for a singleton)."""
        if self.n < 2:
            return math.inf
        iu = np.triu_indices(self.n, 1)
        return float(self.dist[iu].min())

    def radii(self, base: int | None = None) -> np.ndarray:
        """Distances d(x, t0) of every point to the base point."""
        return self.dist[self.base if base is None else base]

    def with_base(self, base: int) -> "FiniteMetricSpace":
        if not 0 <= base < self.n:
            raise IndexError(f"base index {base} out of range for {self.n} points")
        return FiniteMetricSpace(self.labels, self.dist, base)

    def subspace(self, indices: Sequence[int]) -> "FiniteMetricSpace":
        idx = np.asarray(indices, dtype=int)
        base = None
        if self.base_index is not None:
            hits = np.flatnonzero(idx == self.base_index)
            base = int(hits[0]) if hits.size else None
        return FiniteMetricSpace([self.labels[i] for i in idx], self.dist[np.ix_(idx, idx)], base)

    def pairs(self):
        """Index arrays ``(i, j)`` of all unordered pairs ``i < j``."""
        return np.triu_indices(self.n, 1)

    def relabel(self, permutation: Sequence[int]) -> "FiniteMetricSpace":
        """Reorder points so that new point ``a`` is old point ``permutation[a]``."""
        perm = np.asarray(permutation, dtype=int)
        base = None
        if self.base_index is not None:
            base = int(np.flatnonzero(perm == self.base_index)[0])
        return FiniteMetricSpace([self.labels[i] for i in perm], self.dist[np.ix_(perm, perm)], base)


def validate_metric(matrix, labels=None, base=None, tol: float = TOL) -> FiniteMetricSpace:
    """Check the metric axioms and return a :class:`FiniteMetricSpace`.

    Raises the error for the first violated axiom in the order: shape, zero
    diagonal, symmetry, positivity off the diagonal, triangle inequality. The
    triangle check is exhaustive over all triples.
    """
    d = np.asarray(matrix, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise NonSquareMatrix(d.shape)
    n = d.shape[0]
    check_size(n)
    if labels is None:
        labels = list(range(n))
    if len(labels) != n:
        raise ValueError(f"{len(labels)} labels for {n} points")
    if base is not None and not 0 <= base < n:
        raise IndexError(f"base index {base} out of range for {n} points")
    if not np.all(np.isfinite(d)):
        i, j = np.argwhere(~np.isfinite(d))[0]
        raise NegativeOrZeroOffDiagonal(int(i), int(j), float(d[i, j]))

    diag = np.diag(d)
    bad = np.flatnonzero(np.abs(diag) > tol)
    if bad.size:
        raise NonzeroDiagonal(int(bad[0]), float(diag[bad[0]]))

    asym = np.argwhere(np.abs(d - d.T) > tol)
    if asym.size:
        i, j = asym[0]
        raise AsymmetricMatrix(int(i), int(j), float(d[i, j]), float(d[j, i]))

    off = ~np.eye(n, dtype=bool)
    nonpos = np.argwhere(off & (d <= 0))
    if nonpos.size:
        i, j = nonpos[0]
        raise NegativeOrZeroOffDiagonal(int(i), int(j), float(d[i, j]))

    # shortest two-hop detour through any k; a violation exists iff d beats it
    detour = np.full_like(d, np.inf)
    for k in range(n):
        np.minimum(detour, d[:, k, None] + d[None, k, :], out=detour)
    viol = np.argwhere(np.triu(d - detour > tol, 1))
    if viol.size:
        i, j = (int(v) for v in viol[0])
        k = int(np.flatnonzero(d[i, j] - (d[i, :] + d[:, j]) > tol)[0])
        raise TriangleViolation(i, j, k, float(d[i, j] - d[i, k] - d[k, j]))

    sym = (d + d.T) / 2
    np.fill_diagonal(sym, 0.0)
    return FiniteMetricSpace(labels, sym, base)


def snowflake(space: FiniteMetricSpace, s: float) -> FiniteMetricSpace:
    """The s-snowflake ``(M, d^s)`` for ``0 < s < 1``."""
    if not 0 < s < 1:
        raise InvalidExponent(f"snowflake exponent must lie in (0, 1), got {s}")
    return validate_metric(np.power(space.dist, s), space.labels, space.base_index)


def _lp_combine(values: np.ndarray, p: float, axis: int = -1) -> np.ndarray:
    if math.isinf(p):
        return values.max(axis=axis) if values.shape[axis] else np.zeros(values.shape[:axis] or ())
    if p == 1:
        return values.sum(axis=axis)
    return np.power(np.power(values, p).sum(axis=axis), 1.0 / p)


def _check_exponent(p: float) -> float:
    p = float(p)
    if not p >= 1:
        raise InvalidExponent(f"outer exponent must lie in [1, inf], got {p}")
    return p


@dataclass(frozen=True, eq=False)
class BlockVector:
    """An element of ``(sum_k l_inf^{n_k})_p``."""

    outer_exponent: float
    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "outer_exponent", _check_exponent(self.outer_exponent))
        object.__setattr__(
            self, "blocks", tuple(np.asarray(b, dtype=np.float64).reshape(-1) for b in self.blocks)
        )

    @property
    def shape(self) -> tuple:
        return tuple(b.size for b in self.blocks)

    def _check(self, other: "BlockVector"):
        if self.shape != other.shape or self.outer_exponent != other.outer_exponent:
            raise IncompatibleBlocks(
                f"block shapes {self.shape}/p={self.outer_exponent} and "
                f"{other.shape}/p={other.outer_exponent} differ"
            )

    def __add__(self, other):
        self._check(other)
        return BlockVector(self.outer_exponent, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return BlockVector(self.outer_exponent, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, scalar):
        return BlockVector(self.outer_exponent, [scalar * b for b in self.blocks])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def norm(self) -> float:
        return block_norm(self)

    def flat(self) -> np.ndarray:
        return np.concatenate(self.blocks) if self.blocks else np.zeros(0)


def block_norm(v: BlockVector) -> float:
    """l_p combination over blocks of each block's l_inf norm."""
    maxima = np.array([np.abs(b).max() if b.size else 0.0 for b in v.blocks])
    return float(_lp_combine(maxima, v.outer_exponent)) if maxima.size else 0.0


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """Images of every point of ``domain`` in a common block-sum space.

    ``coords`` has one row per domain point; its columns are the blocks laid
    out consecutively with sizes ``block_sizes``.
    """

    domain: FiniteMetricSpace
    coords: np.ndarray
    block_sizes: tuple
    outer_exponent: float = 2.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.array(self.coords, dtype=np.float64)
        if c.ndim == 1:
            c = c.reshape(-1, 1)
        sizes = tuple(int(s) for s in self.block_sizes)
        if c.shape[0] != self.domain.n:
            raise ValueError(f"{c.shape[0]} images for {self.domain.n} points")
        if sum(sizes) != c.shape[1]:
            raise IncompatibleBlocks(f"block sizes {sizes} do not cover {c.shape[1]} columns")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "outer_exponent", _check_exponent(self.outer_exponent))

    @classmethod
    def from_vectors(cls, domain: FiniteMetricSpace, images: Sequence[BlockVector]) -> "EmbeddingTable":
        if len(images) != domain.n:
            raise ValueError(f"{len(images)} images for {domain.n} points")
        first = images[0]
        for v in images[1:]:
            first._check(v)
        return cls(domain, np.vstack([v.flat() for v in images]), first.shape, first.outer_exponent)

    @property
    def images(self) -> list:
        return [self.image(i) for i in range(self.domain.n)]

    def image(self, i: int) -> BlockVector:
        return BlockVector(self.outer_exponent, np.split(self.coords[i], np.cumsum(self.block_sizes)[:-1]))

    def block_slices(self):
        edges = np.concatenate([[0], np.cumsum(self.block_sizes)])
        return [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]

    def with_domain(self, domain: FiniteMetricSpace) -> "EmbeddingTable":
        """The same images viewed as a map out of another space on the same points."""
        return EmbeddingTable(domain, self.coords, self.block_sizes, self.outer_exponent, dict(self.meta))

    def scaled(self, gamma: float) -> "EmbeddingTable":
        return EmbeddingTable(self.domain, gamma * self.coords, self.block_sizes, self.outer_exponent)

    def compose(self, mapping: Sequence[int]) -> "EmbeddingTable":
        """``x -> f(mapping[x])``; e.g. a retraction followed by this map."""
        return EmbeddingTable(self.domain, self.coords[np.asarray(mapping)], self.block_sizes,
                              self.outer_exponent)

    def append_block(self, column) -> "EmbeddingTable":
        col = np.asarray(column, dtype=np.float64).reshape(self.domain.n, -1)
        return EmbeddingTable(self.domain, np.hstack([self.coords, col]),
                              self.block_sizes + (col.shape[1],), self.outer_exponent)

    def image_distances(self) -> np.ndarray:
        """n x n matrix of ``||f(x) - f(y)||``."""
        n = self.domain.n
        per_block = np.empty((len(self.block_sizes), n, n))
        for b, sl in enumerate(self.block_slices()):
            block = self.coords[:, sl]
            per_block[b] = cdist(block, block, "chebyshev") if block.shape[1] else 0.0
        return _lp_combine(per_block, self.outer_exponent, axis=0)


def pair_samples(space: FiniteMetricSpace, table: EmbeddingTable):
    """Return ``(i, j, d(x_i, x_j), ||f(x_i) - f(x_j)||)`` over all pairs ``i < j``."""
    i, j = space.pairs()
    img = table.image_distances()
    return i, j, space.dist[i, j], img[i, j]


def lipschitz_constant(space: FiniteMetricSpace, table: EmbeddingTable) -> float:
    _, _, d, v = pair_samples(space, table)
    return float((v / d).max()) if d.size else 0.0

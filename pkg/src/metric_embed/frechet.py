"""Fréchet (Kuratowski) coordinate embeddings into l_inf."""

from __future__ import annotations

import math

import numpy as np

from .core import EmbeddingTable, FiniteMetricSpace
from .errors import EmptyAnchors


def frechet(space: FiniteMetricSpace, anchors="all", base: int | None = None,
            shift: bool = True) -> EmbeddingTable:
    """Coordinates ``(d(t, s) - d(s, t0))`` over the anchors ``s``, in one l_inf block.

    The map is 1-Lipschitz for any anchor set and an isometry when every point
    is an anchor.  With ``shift=False`` the plain Kuratowski coordinates
    ``d(t, s)`` are returned instead; the base point then no longer maps to 0.
    """
    if isinstance(anchors, str):
        if anchors != "all":
            raise ValueError(f"anchors must be 'all' or a list of indices, got {anchors!r}")
        idx = np.arange(space.n)
    else:
        idx = np.unique(np.asarray(list(anchors), dtype=int))
    if idx.size == 0:
        raise EmptyAnchors("Fréchet embedding needs at least one anchor")
    t0 = space.base if base is None else base
    coords = space.dist[:, idx]
    if shift:
        coords = coords - space.dist[idx, t0][None, :]
    return EmbeddingTable(space, coords, (idx.size,), math.inf, {"anchors": idx.tolist(), "base": t0})

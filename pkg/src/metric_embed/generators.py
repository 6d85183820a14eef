"""Deterministic generators for test and demo spaces."""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.spatial.distance import cdist

from .core import FiniteMetricSpace, check_size, validate_metric


def path(n: int) -> FiniteMetricSpace:
    """{0, ..., n-1} with |i - j|."""
    if n < 1:
        raise ValueError("path needs n >= 1")
    check_size(n)
    pts = np.arange(n, dtype=float)
    return validate_metric(np.abs(pts[:, None] - pts[None, :]), list(range(n)))


def binary_tree(depth: int) -> FiniteMetricSpace:
    """Complete binary tree of the given depth with its shortest-path metric.

    Nodes are heap-indexed: node ``i`` has children ``2i+1`` and ``2i+2``;
    the root (node 0) is the base point.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    n = 2 ** (depth + 1) - 1
    check_size(n)
    child = np.arange(1, n)
    parent = (child - 1) // 2
    adj = csr_matrix((np.ones(n - 1), (parent, child)), shape=(n, n))
    dist = shortest_path(adj, method="D", directed=False, unweighted=True)
    return validate_metric(dist, list(range(n)), base=0)


def grid_subset(dim: int, n: int, seed: int) -> FiniteMetricSpace:
    """``n`` distinct random points of the integer grid with the grid (l_1) metric.

    The grid side is chosen so that roughly half the grid is occupied.
    """
    if dim < 1 or n < 1:
        raise ValueError("grid_subset needs dim >= 1 and n >= 1")
    check_size(n)
    side = max(2, math.ceil((2 * n) ** (1.0 / dim)))
    while side**dim < n:
        side += 1
    rng = np.random.default_rng(seed)
    flat = np.sort(rng.choice(side**dim, size=n, replace=False))
    pts = np.stack(np.unravel_index(flat, (side,) * dim), axis=1)
    labels = [",".join(str(int(c)) for c in p) for p in pts]
    return validate_metric(cdist(pts, pts, "cityblock"), labels)


def random_lp_subset(p: float, dim: int, n: int, seed: int) -> FiniteMetricSpace:
    """``n`` uniform points of ``[0, 1]^dim`` under the l_p metric (``p`` may be inf)."""
    if not p >= 1:
        raise ValueError(f"l_p metric needs p >= 1, got {p}")
    if dim < 1 or n < 1:
        raise ValueError("random_lp_subset needs dim >= 1 and n >= 1")
    check_size(n)
    rng = np.random.default_rng(seed)
    pts = rng.random((n, dim))
    if math.isinf(p):
        dist = cdist(pts, pts, "chebyshev")
    else:
        dist = cdist(pts, pts, "minkowski", p=p)
    return validate_metric(dist, list(range(n)))


def dyadic_interval(levels: int = 4) -> FiniteMetricSpace:
    """{i / 2^levels : 0 <= i <= 2^levels} with |s - t|, based at 0."""
    m = 2**levels
    pts = np.arange(m + 1) / m
    return validate_metric(np.abs(pts[:, None] - pts[None, :]), [f"{i}/{m}" for i in range(m + 1)], base=0)


def generate(kind: str, **params) -> FiniteMetricSpace:
    """Dispatch by name: ``path``, ``binary_tree``, ``grid_subset``, ``random_lp_subset``, ``dyadic``."""
    table = {
        "path": lambda: path(int(params["n"])),
        "binary_tree": lambda: binary_tree(int(params["depth"])),
        "grid_subset": lambda: grid_subset(int(params["dim"]), int(params["n"]), int(params["seed"])),
        "random_lp_subset": lambda: random_lp_subset(
            float(params["p"]), int(params["dim"]), int(params["n"]), int(params["seed"])
        ),
        "dyadic": lambda: dyadic_interval(int(params.get("levels", 4))),
    }
    if kind not in table:
        raise ValueError(f"unknown generator {kind!r}; choose from {sorted(table)}")
    return table[kind]()

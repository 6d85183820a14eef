"""Interlacing graphs on k-subsets and a finite probe of the Q-property.

Two distinct increasing k-tuples interlace when their entries alternate
(non-strictly), starting with either one.  The graph on all k-subsets of
{1..n} with interlacing as adjacency carries its path metric ``d_I``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.spatial.distance import cdist

from .core import BlockVector, _lp_combine, point_cap
from .errors import EqualSets, LengthMismatch, NotSorted, SizeOverflow


def _chain(first, second) -> bool:
    # first_1 <= second_1 <= first_2 <= second_2 <= ... <= first_k <= second_k
    merged = [v for pair in zip(first, second) for v in pair]
    return all(a <= b for a, b in zip(merged, merged[1:]))


def interlace(sigma, tau) -> bool:
    sigma, tau = tuple(sigma), tuple(tau)
    if len(sigma) != len(tau):
        raise LengthMismatch(f"subsets of sizes {len(sigma)} and {len(tau)}")
    for s in (sigma, tau):
        if any(a >= b for a, b in zip(s, s[1:])):
            raise NotSorted(f"{s} is not strictly increasing")
    if sigma == tau:
        raise EqualSets(f"{sigma} interlaces only with distinct subsets")
    return _chain(tau, sigma) or _chain(sigma, tau)


def colex_subsets(n: int, k: int) -> list:
    """All k-subsets of {1..n} in colexicographic order."""
    return sorted(itertools.combinations(range(1, n + 1), k), key=lambda s: s[::-1])


@dataclass(frozen=True, eq=False)
class InterlacingGraph:
    n: int
    k: int
    vertices: tuple
    adjacency: np.ndarray
    dist: np.ndarray

    @property
    def reachable(self) -> np.ndarray:
        return np.isfinite(self.dist)

    @property
    def connected(self) -> bool:
        return bool(self.reachable.all())

    @property
    def diameter(self) -> float:
        return float(self.dist.max()) if self.vertices else 0.0

    def index(self, subset) -> int:
        return self.vertices.index(tuple(subset))

    def d(self, sigma, tau) -> float:
        return float(self.dist[self.index(sigma), self.index(tau)])

    def inside(self, ground) -> np.ndarray:
        """Indices of vertices that are subsets of ``ground``."""
        g = set(ground)
        return np.array([i for i, v in enumerate(self.vertices) if g.issuperset(v)], dtype=int)

    def induced_dist(self, ground) -> np.ndarray:
        """Path metric of the subgraph induced on the subsets of ``ground``."""
        idx = self.inside(ground)
        sub = csr_matrix(self.adjacency[np.ix_(idx, idx)].astype(float))
        return shortest_path(sub, directed=False, unweighted=True)

    def to_json(self) -> dict:
        edges = np.argwhere(np.triu(self.adjacency, 1))
        dist = [[None if math.isinf(x) else int(x) for x in row] for row in self.dist]
        return {
            "n": self.n,
            "k": self.k,
            "vertices": [list(v) for v in self.vertices],
            "edges": edges.tolist(),
            "dist": dist,
            "connected": self.connected,
        }


def build_graph(n: int, k: int, cap: int | None = None) -> InterlacingGraph:
    """Interlacing graph on k-subsets of {1..n}, with BFS all-pairs distances.

    Unreachable pairs get distance inf.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    count = math.comb(n, k)
    cap = point_cap() if cap is None else cap
    if count > cap:
        raise SizeOverflow(f"C({n},{k}) = {count} vertices exceeds cap {cap}")
    verts = colex_subsets(n, k)
    arr = np.array(verts)
    m = len(verts)
    adj = np.zeros((m, m), dtype=bool)
    for a in range(m):
        for b in range(a + 1, m):
            if _chain(arr[a], arr[b]) or _chain(arr[b], arr[a]):
                adj[a, b] = adj[b, a] = True
    dist = shortest_path(csr_matrix(adj.astype(float)), directed=False, unweighted=True)
    return InterlacingGraph(n, k, tuple(verts), adj, dist)


@dataclass
class QSearchResult:
    c_hat: float
    subset: tuple
    lipschitz: float
    degenerate: bool
    method: str

    def to_json(self) -> dict:
        return {"c_hat": self.c_hat, "subset": list(self.subset), "lipschitz": self.lipschitz,
                "degenerate": self.degenerate, "method": self.method}


def _image_distances(images) -> np.ndarray:
    if isinstance(images, np.ndarray):
        return cdist(images, images, "chebyshev")
    first = images[0]
    coords = np.vstack([v.flat() for v in images])
    edges = np.concatenate([[0], np.cumsum(first.shape)])
    per_block = np.stack([cdist(coords[:, a:b], coords[:, a:b], "chebyshev")
                          for a, b in zip(edges[:-1], edges[1:])])
    return _lp_combine(per_block, first.outer_exponent, axis=0)


def q_constant_search(graph: InterlacingGraph, images, m: int, seed: int = 0, restarts: int = 64,
                      exhaustive_limit: int = 100_000, method: str = "auto") -> QSearchResult:
    """Smallest image diameter over ground sets of size m, in units of Lip(f).

    ``images`` is a sequence of :class:`BlockVector` (one per vertex, in vertex
    order) or an array of l_inf coordinates.  ``Lip(f)`` is taken against
    ``d_I`` on the whole graph, i.e. the largest image distance across an edge.
    For each ground set ``S`` the value is ``max ||f(s) - f(t)|| / Lip(f)`` over
    vertices ``s, t`` inside ``S``.  ``method`` is ``exhaustive``, ``greedy`` or
    ``auto`` (exhaustive when ``C(n, m) <= exhaustive_limit``).  Greedy descent
    swaps one ground element at a time, accepting strict improvements, from
    ``restarts`` seeded random starts.  A constant map returns ``c_hat = 0``
    with ``degenerate=True``.
    """
    if len(images) != len(graph.vertices):
        raise ValueError(f"{len(images)} images for {len(graph.vertices)} vertices")
    if not graph.k <= m <= graph.n:
        raise ValueError(f"need k <= m <= n, got m={m}")
    pd = _image_distances(images)
    lip = float(pd[graph.adjacency].max()) if graph.adjacency.any() else 0.0
    if method == "auto":
        method = "exhaustive" if math.comb(graph.n, m) <= exhaustive_limit else "greedy"
    if lip == 0:
        return QSearchResult(0.0, tuple(range(1, m + 1)), 0.0, True, method)

    members = np.array([[e in v for e in range(1, graph.n + 1)] for v in graph.vertices])

    def value(ground) -> float:
        mask = np.ones(len(graph.vertices), dtype=bool)
        outside = [e - 1 for e in range(1, graph.n + 1) if e not in ground]
        if outside:
            mask &= ~members[:, outside].any(axis=1)
        idx = np.flatnonzero(mask)
        return float(pd[np.ix_(idx, idx)].max()) / lip if idx.size > 1 else 0.0

    if method == "exhaustive":
        best = min(((value(set(S)), S) for S in itertools.combinations(range(1, graph.n + 1), m)))
        return QSearchResult(best[0], best[1], lip, False, method)
    if method != "greedy":
        raise ValueError(f"unknown method {method!r}")

    rng = np.random.default_rng(seed)
    ground_all = list(range(1, graph.n + 1))
    best = None
    for _ in range(restarts):
        current = tuple(sorted(int(e) for e in rng.choice(ground_all, size=m, replace=False)))
        cur_val = value(set(current))
        while True:
            move = None
            for out in current:
                for inn in ground_all:
                    if inn in current:
                        continue
                    cand = tuple(sorted((set(current) - {out}) | {inn}))
                    val = value(set(cand))
                    if val < cur_val and (move is None or (val, cand) < move):
                        move = (val, cand)
            if move is None:
                break
            cur_val, current = move
        if best is None or (cur_val, current) < best:
            best = (cur_val, current)
    return QSearchResult(best[0], best[1], lip, False, method)


def frechet_images(graph: InterlacingGraph) -> np.ndarray:
    """Isometric l_inf copy of ``d_I`` (anchors = all vertices, base = vertex 0)."""
    if not graph.connected:
        raise ValueError("Fréchet coordinates need a connected graph")
    return graph.dist - graph.dist[0][None, :]


def as_block_vectors(coords: np.ndarray) -> list:
    return [BlockVector(math.inf, [row]) for row in coords]

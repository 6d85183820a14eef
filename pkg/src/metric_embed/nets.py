"""Maximal separated nets (skeletons) and the nearest-member retraction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TOL, FiniteMetricSpace
from .errors import EmptySkeleton


@dataclass(frozen=True, eq=False)
class Skeleton:
    """A subset of ``parent`` with measured separation and precision.

    ``separation`` is the smallest distance between distinct members (inf for a
    single member) and ``precision`` the largest distance from a parent point
    to its nearest member.  ``eps`` is the radius the net was built with.
    """

    parent: FiniteMetricSpace
    members: tuple
    separation: float
    precision: float
    eps: float | None = None

    def __len__(self):
        return len(self.members)

    def to_json(self) -> dict:
        return {
            "members": list(self.members),
            "eps": self.eps,
            "separation": None if math.isinf(self.separation) else self.separation,
            "precision": self.precision,
        }


def measure_skeleton(space: FiniteMetricSpace, members, eps=None) -> Skeleton:
    members = tuple(int(m) for m in members)
    if not members:
        raise EmptySkeleton("a skeleton needs at least one member")
    idx = np.asarray(members)
    sub = space.dist[np.ix_(idx, idx)]
    sep = float(sub[np.triu_indices(len(idx), 1)].min()) if len(idx) > 1 else math.inf
    prec = float(space.dist[:, idx].min(axis=1).max())
    return Skeleton(space, members, sep, prec, eps)


def greedy_net(space: FiniteMetricSpace, eps: float) -> Skeleton:
    """Maximal eps-separated subset found by a greedy scan.

    Points are scanned in index order, except that an explicitly set base
    point is scanned first. A point joins when it is at distance >= eps from
    every member chosen so far, so every excluded point lies within eps of a
    member.
    """
    if not eps > 0:
        raise ValueError(f"net radius must be positive, got {eps}")
    order = list(range(space.n))
    if space.base_index is not None:
        order.remove(space.base_index)
        order.insert(0, space.base_index)
    members = []
    # running distance to the nearest chosen member
    nearest = np.full(space.n, np.inf)
    for x in order:
        if nearest[x] >= eps:
            members.append(x)
            np.minimum(nearest, space.dist[x], out=nearest)
    return measure_skeleton(space, sorted(members), eps)


def is_maximal(skeleton: Skeleton, eps: float) -> bool:
    """True when no non-member could be added without breaking eps-separation."""
    d = skeleton.parent.dist
    idx = np.asarray(skeleton.members)
    outside = np.setdiff1d(np.arange(skeleton.parent.n), idx)
    return bool(np.all(d[np.ix_(outside, idx)].min(axis=1) < eps)) if outside.size else True


@dataclass(frozen=True, eq=False)
class Retraction:
    mapping: np.ndarray
    precision: float
    max_additive_error: float

    @property
    def bound(self) -> float:
        return 2 * self.precision

    @property
    def certified(self) -> bool:
        return self.max_additive_error <= self.bound + TOL

    def __getitem__(self, x):
        return int(self.mapping[x])


def retract(space: FiniteMetricSpace, skeleton: Skeleton) -> Retraction:
    """Send every point to its nearest member (lowest member index on ties).

    The result carries the certificate ``max |d(c(x), c(y)) - d(x, y)|``, which
    is at most twice the skeleton's precision.
    """
    if not skeleton.members:
        raise EmptySkeleton("cannot retract onto an empty skeleton")
    idx = np.asarray(sorted(skeleton.members))
    # argmin returns the first minimiser, i.e. the lowest member index
    mapping = idx[np.argmin(space.dist[:, idx], axis=1)]
    moved = space.dist[np.ix_(mapping, mapping)]
    err = float(np.abs(moved - space.dist).max()) if space.n else 0.0
    precision = float(space.dist[np.arange(space.n), mapping].max())
    return Retraction(mapping, precision, err)

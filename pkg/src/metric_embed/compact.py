"""Embedding of a bounded space into an l_2 sum of l_inf blocks.

Level ``k`` uses a maximal ``sigma(k)/16``-net ``R_k`` as anchors for the
shifted Fréchet map ``phi_k`` and scales it by ``1/k``; the levels are stacked
as blocks of an outer l_2 sum.  Each ``phi_k`` is 1-Lipschitz, so the whole map
is ``sqrt(sum_k 1/k^2)``-Lipschitz, below ``pi/sqrt(6)``.  For a pair at
distance ``d`` with ``sigma(l+1) <= d < sigma(l)`` the block ``l+1`` alone gives
``||f(x) - f(y)|| >= (d - 2 r_{l+1}) / (l+1)`` where ``r`` is the net's precision.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import TOL, EmbeddingTable, FiniteMetricSpace
from .errors import ModulusDiameterMismatch, ModulusRangeError, NonDecreasingModulus
from .frechet import frechet
from .nets import greedy_net

PI_OVER_SQRT6 = math.pi / math.sqrt(6)


@dataclass(frozen=True, eq=False)
class DecayModulus:
    """A decreasing ``mu: (0, D] -> [0, inf)`` with ``mu(D) = 0`` and its inverse ``sigma``.

    Build one with :meth:`log2` or :meth:`from_table`.
    """

    diam: float
    mu: Callable[[float], float]
    sigma: Callable[[float], float]
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    @classmethod
    def log2(cls, diam: float) -> "DecayModulus":
        """``mu(t) = log2(D / t)``, ``sigma(k) = D 2^-k``."""
        if not diam > 0:
            raise ValueError("diameter must be positive")
        return cls(
            float(diam),
            lambda t: math.log2(diam / t),
            lambda k: diam * 2.0 ** (-k),
            "log2",
            {"diam": float(diam)},
        )

    @classmethod
    def from_table(cls, t, mu) -> "DecayModulus":
        """Piecewise-linear ``mu`` through samples ``(t_i, mu_i)``.

        ``t`` must be strictly increasing with ``mu`` strictly decreasing and
        ending at 0; ``t[-1]`` is the diameter.  ``mu`` is only defined on
        ``[t[0], t[-1]]``, and ``sigma`` only on ``[0, mu[0]]``.
        """
        t = np.asarray(t, dtype=float)
        m = np.asarray(mu, dtype=float)
        if t.ndim != 1 or t.shape != m.shape or t.size < 2:
            raise NonDecreasingModulus("modulus table needs matching 1-d t and mu with >= 2 samples")
        if np.any(np.diff(t) <= 0):
            raise NonDecreasingModulus("modulus table t values must be strictly increasing")
        if np.any(np.diff(m) >= 0):
            raise NonDecreasingModulus("modulus table mu values must be strictly decreasing")
        if abs(m[-1]) > TOL:
            raise NonDecreasingModulus(f"mu(diam) must be 0, table ends at {m[-1]}")
        if t[0] <= 0:
            raise NonDecreasingModulus("modulus table must live on (0, diam]")

        def mu_fn(x):
            if not t[0] - TOL <= x <= t[-1] + TOL:
                raise ModulusRangeError(f"mu evaluated at {x} outside table range [{t[0]}, {t[-1]}]")
            return float(np.interp(x, t, m))

        def sigma_fn(k):
            if not -TOL <= k <= m[0] + TOL:
                raise ModulusRangeError(f"sigma({k}) outside table range [0, {m[0]}]")
            return float(np.interp(k, m[::-1], t[::-1]))

        return cls(float(t[-1]), mu_fn, sigma_fn, "table", {"t": t.tolist(), "mu": m.tolist()})

    def sigma_table(self, depth: int) -> np.ndarray:
        """``[sigma(0), ..., sigma(depth)]`` with ``sigma(0) := D``."""
        vals = np.array([self.diam] + [self.sigma(k) for k in range(1, depth + 1)])
        if np.any(np.diff(vals) >= 0):
            raise NonDecreasingModulus("sigma must be strictly decreasing in k")
        return vals


def truncation_depth(space: FiniteMetricSpace, mu: DecayModulus) -> int:
    """Smallest K with ``sigma(K)/16`` below the minimum positive distance.

    From level K on every net is the whole space, so deeper levels add only
    rescaled copies of an isometry.
    """
    if space.n < 2:
        raise ValueError("truncation depth needs at least two points")
    dmin = space.min_distance
    k = 1
    while not mu.sigma(k) / 16 < dmin:
        k += 1
        if k > 10_000:
            raise ModulusRangeError("sigma does not decay below the minimum distance")
    return k


def level_of(d: float, sigmas: np.ndarray) -> int:
    """The l >= 0 with ``sigma(l+1) <= d < sigma(l)`` (``sigma(0) = D``).

    ``d = D`` is assigned ``l = 0``; distances below ``sigma[-1]`` return
    ``len(sigmas) - 1`` (that is, deeper than the table).
    """
    # sigmas is strictly decreasing; search the negated, increasing copy
    neg = [-s for s in sigmas]
    above = bisect.bisect_left(neg, -d)  # number of sigma(k) > d
    return max(above - 1, 0)


def mu_ceiling(mu: DecayModulus, d: float) -> float:
    return max(1.0, math.ceil(mu.mu(d) - TOL))


def literal_lower(mu: DecayModulus, d: float) -> float:
    """``d / (2 mu(d))``, with ``d / 2`` where ``mu(d) = 0`` (pairs at the diameter)."""
    m = mu.mu(d)
    return 0.5 * d / m if m > TOL else 0.5 * d


@dataclass
class CompactCertificate:
    depth: int
    upper_constant: float
    min_ratio: float
    max_ratio: float
    upper_ok: bool
    lower_ok: bool
    net_sizes: list
    net_precisions: list
    worst_upper: dict
    worst_lower: dict
    literal_violations: list

    @property
    def ok(self) -> bool:
        return self.upper_ok and self.lower_ok

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "depth": self.depth,
            "upper_constant": self.upper_constant,
            "pi_over_sqrt6": PI_OVER_SQRT6,
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "upper_ok": self.upper_ok,
            "lower_ok": self.lower_ok,
            "net_sizes": self.net_sizes,
            "net_precisions": self.net_precisions,
            "worst_upper_pair": self.worst_upper,
            "worst_lower_pair": self.worst_lower,
            "literal_envelope_violations": self.literal_violations,
        }


def compact_embedding(space: FiniteMetricSpace, mu: DecayModulus, depth: int | None = None):
    """Build the multi-scale embedding and certify it over all pairs.

    Returns ``(table, certificate)``.  The certificate checks, for every pair,
    the upper bound ``||f(x)-f(y)|| <= sqrt(sum_{k<=K} 1/k^2) d <= (pi/sqrt6) d``
    and the lower bound ``||f(x)-f(y)|| >= d / (2 (l+1))`` obtained from the
    block ``l+1`` (or block K when ``l+1 > K``, where the net is the whole
    space).  It also lists pairs where the ``d / (2 mu(d))`` envelope is not
    met; these are reported, not treated as failures, because for ``mu(d) < 1``
    that envelope exceeds the Lipschitz bound.
    """
    if space.n < 1:
        raise ValueError("empty space")
    if abs(space.diam - mu.diam) > 1e-6:
        raise ModulusDiameterMismatch(f"space diameter {space.diam} but modulus diameter {mu.diam}")
    t0 = space.base
    if space.n == 1:
        table = EmbeddingTable(space, np.zeros((1, 1)), (1,), 2.0)
        return table, CompactCertificate(1, 1.0, math.nan, math.nan, True, True, [1], [0.0], {}, {}, [])

    K = truncation_depth(space, mu) if depth is None else int(depth)
    sigmas = mu.sigma_table(K)
    # levels of small pairs can lie beyond K; extend sigma until it reaches them
    L = K
    while mu.sigma(L) > space.min_distance:
        L += 1
    level_sigmas = mu.sigma_table(L)
    blocks, sizes, nets = [], [], []
    for k in range(1, K + 1):
        net = greedy_net(space, sigmas[k] / 16)
        phi = frechet(space, net.members, base=t0)
        blocks.append(phi.coords / k)
        sizes.append(len(net.members))
        nets.append(net)
    table = EmbeddingTable(space, np.hstack(blocks), sizes, 2.0,
                           {"construction": "compact", "depth": K, "modulus": mu.kind, **mu.params})

    c_upper = math.sqrt(sum(1.0 / k**2 for k in range(1, K + 1)))
    img = table.image_distances()
    ii, jj = space.pairs()
    d = space.dist[ii, jj]
    v = img[ii, jj]
    ratios = v / d

    upper_slack = v - c_upper * d
    upper_ok = bool(np.all(upper_slack <= TOL)) and c_upper <= PI_OVER_SQRT6 + TOL

    lower_ok = True
    worst_lower, worst_margin = {}, math.inf
    literal = []
    for a, b, dd, vv in zip(ii, jj, d, v):
        l = level_of(dd, level_sigmas)
        j = min(l + 1, K)
        r = nets[j - 1].precision
        block_bound = (dd - 2 * r) / j
        bound = 0.5 * dd / (l + 1)
        if not (vv >= bound - TOL and block_bound >= bound - TOL):
            lower_ok = False
        margin = vv - bound
        if margin < worst_margin:
            worst_margin = margin
            worst_lower = {"pair": [int(a), int(b)], "d": float(dd), "level": l + 1,
                           "block": j, "image": float(vv), "bound": float(bound)}
        lit = literal_lower(mu, dd)
        if vv < lit - TOL:
            literal.append({"pair": [int(a), int(b)], "d": float(dd), "image": float(vv), "envelope": lit})

    w = int(np.argmax(ratios))
    cert = CompactCertificate(
        depth=K,
        upper_constant=c_upper,
        min_ratio=float(ratios.min()),
        max_ratio=float(ratios.max()),
        upper_ok=upper_ok,
        lower_ok=lower_ok,
        net_sizes=sizes,
        net_precisions=[n.precision for n in nets],
        worst_upper={"pair": [int(ii[w]), int(jj[w])], "d": float(d[w]), "ratio": float(ratios[w])},
        worst_lower=worst_lower,
        literal_violations=literal,
    )
    return table, cert

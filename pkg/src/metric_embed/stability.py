"""Finite-truncation probes of the iterated-limit (stability) condition.

Ultrafilter limits are replaced by a tail surrogate: a limit along a sequence
is the mean of its last ``W`` terms, accepted only when those terms spread by
less than ``eta``.  For an iterated limit the inner index must run past the
outer one, so with ``N`` terms the inner window is the last ``W`` indices and
the outer index ranges over the first ``N - W``, with its own window being the
last ``W`` of those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolated, NonConvergent

DEFAULT_W = 8
DEFAULT_ETA = 1e-6
DEFAULT_N = 128


@dataclass(frozen=True, eq=False)
class SequenceFamily:
    """Sequence of vectors ``x_1..x_N`` (rows of ``elements``) in l_p or l_inf.

    ``p = inf`` is the sup norm (the c_0 / l_inf ambient).
    """

    elements: np.ndarray
    p: float = 2.0

    @classmethod
    def from_vectors(cls, vectors, p: float = 2.0) -> "SequenceFamily":
        vecs = [np.asarray(v, dtype=float).reshape(-1) for v in vectors]
        width = max((v.size for v in vecs), default=0)
        out = np.zeros((len(vecs), width))
        for r, v in enumerate(vecs):
            out[r, : v.size] = v
        return cls(out, p)

    def __post_init__(self):
        e = np.array(self.elements, dtype=float)
        if e.ndim != 2:
            raise ValueError("elements must be a 2-d array, one row per term")
        if not np.all(np.isfinite(e)):
            raise ValueError("sequence terms must be finite (bounded)")
        object.__setattr__(self, "elements", e)
        object.__setattr__(self, "p", float(self.p))

    def __len__(self):
        return self.elements.shape[0]

    def padded(self, width: int) -> np.ndarray:
        e = self.elements
        if e.shape[1] >= width:
            return e
        return np.hstack([e, np.zeros((e.shape[0], width - e.shape[1]))])

    def norms(self) -> np.ndarray:
        return _norm(self.elements, self.p)

    @property
    def bound(self) -> float:
        return float(self.norms().max()) if len(self) else 0.0


def _norm(arr: np.ndarray, p: float, axis: int = -1) -> np.ndarray:
    a = np.abs(arr)
    if math.isinf(p):
        return a.max(axis=axis, initial=0.0)
    return np.power(np.power(a, p).sum(axis=axis), 1.0 / p)


def _power_sum(arr: np.ndarray, p: float) -> np.ndarray:
    return np.power(np.abs(arr), p).sum(axis=-1)


def cross_distances(X: SequenceFamily, Y: SequenceFamily) -> np.ndarray:
    """``D[i, j] = ||x_i - y_j||``."""
    if X.p != Y.p:
        raise ValueError(f"families live in different ambients (p={X.p} vs p={Y.p})")
    width = max(X.elements.shape[1], Y.elements.shape[1])
    x, y = X.padded(width), Y.padded(width)
    return _norm(x[:, None, :] - y[None, :, :], X.p)


@dataclass
class DoubleLimitReport:
    """Both iterated limits of ``D[i, j] = d(x_i, y_j)``.

    ``L_inner_first = lim_j lim_i D[i, j]`` takes the X-index limit first;
    ``L_outer_first = lim_i lim_j D[i, j]`` takes the Y-index limit first.
    Swapping X and Y swaps the two.
    """

    L_inner_first: float
    L_outer_first: float
    converged: bool
    windows: dict = field(default_factory=dict)

    @property
    def delta(self) -> float:
        return abs(self.L_inner_first - self.L_outer_first)

    def to_json(self) -> dict:
        return {
            "L_inner_first": self.L_inner_first,
            "L_outer_first": self.L_outer_first,
            "delta": self.delta,
            "converged": self.converged,
            "windows": self.windows,
        }


def _iterated(D: np.ndarray, W: int, eta: float, order: str, strict: bool):
    """lim over rows of (lim over columns of D) -- inner index is the column."""
    N_out, N_in = D.shape
    inner_idx = np.arange(N_in - W, N_in)
    outer_idx = np.arange(N_out - 2 * W, N_out - W)
    inner_vals, inner_spreads = [], []
    ok = True
    for r in outer_idx:
        tail = D[r, inner_idx]
        spread = float(tail.max() - tail.min())
        if not spread < eta:
            if strict:
                raise NonConvergent(f"{order} (inner)", int(r), spread, eta)
            ok = False
        inner_vals.append(float(tail.mean()))
        inner_spreads.append(spread)
    inner_vals = np.array(inner_vals)
    outer_spread = float(inner_vals.max() - inner_vals.min())
    if not outer_spread < eta:
        if strict:
            raise NonConvergent(f"{order} (outer)", int(outer_idx[-1]), outer_spread, eta)
        ok = False
    window = {
        "inner_window": [int(inner_idx[0]), int(inner_idx[-1])],
        "outer_window": [int(outer_idx[0]), int(outer_idx[-1])],
        "inner_residual": max(inner_spreads),
        "outer_residual": outer_spread,
    }
    return float(inner_vals.mean()), ok, window


def double_limit_matrix(D: np.ndarray, eta: float = DEFAULT_ETA, W: int = DEFAULT_W,
                        strict: bool = True) -> DoubleLimitReport:
    D = np.asarray(D, dtype=float)
    N = min(D.shape)
    if W < 1 or N < 2 * W:
        raise ValueError(f"need N >= 2W with W >= 1, got N={N}, W={W}")
    D = D[:N, :N]
    # inner over i (rows of D) first: iterate columns as the outer index
    l_in, ok_in, w_in = _iterated(D.T, W, eta, "inner_first", strict)
    l_out, ok_out, w_out = _iterated(D, W, eta, "outer_first", strict)
    return DoubleLimitReport(l_in, l_out, ok_in and ok_out, {"inner_first": w_in, "outer_first": w_out})


def double_limit(X: SequenceFamily, Y: SequenceFamily, eta: float = DEFAULT_ETA, W: int = DEFAULT_W,
                 strict: bool = True) -> DoubleLimitReport:
    """Iterated limits of ``||x_i - y_j||`` in both orders.

    With ``strict`` a window whose spread reaches ``eta`` raises
    :class:`NonConvergent`; otherwise the report is returned with
    ``converged=False``.
    """
    return double_limit_matrix(cross_distances(X, Y), eta, W, strict)


def snowflake_invariance_probe(X: SequenceFamily, Y: SequenceFamily, s: float, eta: float = DEFAULT_ETA,
                               W: int = DEFAULT_W, strict: bool = True):
    """``(delta, delta_s)`` for the distances ``d`` and their powers ``d^s``."""
    if not 0 < s < 1:
        raise ValueError(f"snowflake exponent must lie in (0, 1), got {s}")
    D = cross_distances(X, Y)
    return (double_limit_matrix(D, eta, W, strict).delta,
            double_limit_matrix(np.power(D, s), eta, W, strict).delta)


def lp_additivity_check(x, tail: SequenceFamily, p: float = 2.0, eta: float = DEFAULT_ETA,
                        W: int = DEFAULT_W) -> float:
    """``|lim ||x + x_n||_p^p - (||x||_p^p + lim ||x_n||_p^p)|`` with tail-mean limits.

    The coordinatewise-null hypothesis is probed on the last ``W`` terms: every
    coordinate in the support of ``x`` or among the first ``N // 2`` must be
    below ``eta`` in absolute value there, else :class:`HypothesisViolated`.
    """
    if math.isinf(p) or p < 1:
        raise ValueError(f"additivity needs 1 <= p < inf, got {p}")
    x = np.asarray(x, dtype=float).reshape(-1)
    N = len(tail)
    if N < W:
        raise ValueError(f"need at least W={W} terms, got {N}")
    width = max(x.size, tail.elements.shape[1])
    xs = np.zeros(width)
    xs[: x.size] = x
    seq = tail.padded(width)
    window = seq[N - W:]
    fixed = np.zeros(width, dtype=bool)
    fixed[: N // 2] = True
    fixed |= xs != 0
    late = np.abs(window[:, fixed]).max(initial=0.0)
    if not late < eta:
        raise HypothesisViolated(
            f"terms do not tend to 0 coordinatewise: a fixed coordinate is still {late:.3g} in the last {W} terms"
        )
    lhs = _power_sum(xs[None, :] + window, p).mean()
    rhs = _power_sum(xs, p) + _power_sum(window, p).mean()
    return float(abs(lhs - rhs))


# -- witness families --------------------------------------------------------


def _basis(N: int, width: int, positions) -> np.ndarray:
    out = np.zeros((N, width))
    out[np.arange(N), positions] = 1.0
    return out


def c0_witness(N: int = DEFAULT_N):
    """``x_n = e_n`` and ``y_m = -(e_1 + ... + e_m)`` in the sup norm.

    ``||x_n - y_m|| = 2`` when ``n <= m`` and 1 otherwise, so the X-first
    iterated limit is 1 and the Y-first one is 2.
    """
    X = _basis(N, N, np.arange(N))
    Y = -np.tril(np.ones((N, N)))
    return SequenceFamily(X, math.inf), SequenceFamily(Y, math.inf)


def orthonormal_witness(N: int = DEFAULT_N, p: float = 2.0):
    """``x_n = e_{2n}``, ``y_m = e_{2m+1}``; every cross distance is ``2^(1/p)``."""
    width = 2 * N + 2
    return (SequenceFamily(_basis(N, width, 2 * np.arange(1, N + 1) - 1), p),
            SequenceFamily(_basis(N, width, 2 * np.arange(1, N + 1)), p))


def shifted_witness(x, y, N: int = DEFAULT_N, p: float = 2.0):
    """``x_n = x + e_{K+2n}``, ``y_m = y + e_{K+2m+1}`` with K past both supports.

    Both iterated limits equal ``(||x - y||_p^p + 2)^(1/p)``; for p = 2 this is
    ``sqrt(a + b - 2 <x, y>)`` with ``a = ||x||^2 + 1``, ``b = ||y||^2 + 1``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    K = max(x.size, y.size)
    width = K + 2 * N + 2
    X = _basis(N, width, K + 2 * np.arange(N))
    Y = _basis(N, width, K + 2 * np.arange(N) + 1)
    X[:, : x.size] += x
    Y[:, : y.size] += y
    return SequenceFamily(X, p), SequenceFamily(Y, p)


def witness(name: str, N: int = DEFAULT_N, p: float = 3.0):
    """Named witness pair: ``c0``, ``hilbert`` or ``lp`` (with exponent ``p``)."""
    if name == "c0":
        return c0_witness(N)
    if name == "hilbert":
        return orthonormal_witness(N, 2.0)
    if name == "lp":
        return shifted_witness([1.0], [0.0, 1.0], N, p)
    raise ValueError(f"unknown witness {name!r}; choose c0, hilbert or lp")

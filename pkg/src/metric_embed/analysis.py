"""Distortion, moduli and envelope checks for a single map.

All quantities are exact over the finite pair set: the compression modulus
``rho(t) = min{||f(x)-f(y)|| : d(x,y) >= t}`` and the expansion modulus
``omega(t) = max{||f(x)-f(y)|| : d(x,y) <= t}`` are step functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import TOL, EmbeddingTable, FiniteMetricSpace, pair_samples
from .errors import CollapsedPair, InadmissibleEnvelope, InsufficientRange


@dataclass(frozen=True, eq=False)
class ModulusProfile:
    """Pair samples ``(t, v)`` with the exact moduli on the sorted distinct ``t``."""

    t: np.ndarray
    v: np.ndarray
    grid: np.ndarray
    rho: np.ndarray
    omega: np.ndarray

    @classmethod
    def from_samples(cls, t, v) -> "ModulusProfile":
        t = np.asarray(t, dtype=float).reshape(-1)
        v = np.asarray(v, dtype=float).reshape(-1)
        if t.shape != v.shape:
            raise ValueError("t and v must have the same length")
        order = np.argsort(t, kind="stable")
        ts, vs = t[order], v[order]
        grid, start = np.unique(ts, return_index=True)
        # per distinct t: min and max image distance among its samples
        vmin = np.minimum.reduceat(vs, start) if ts.size else vs
        vmax = np.maximum.reduceat(vs, start) if ts.size else vs
        rho = np.minimum.accumulate(vmin[::-1])[::-1]
        omega = np.maximum.accumulate(vmax)
        return cls(t, v, grid, rho, omega)

    def __len__(self):
        return self.t.size

    def rho_hat(self, t: float) -> float:
        """Smallest image distance over pairs at distance >= t (inf if none)."""
        k = np.searchsorted(self.grid, t, side="left")
        return float(self.rho[k]) if k < self.grid.size else math.inf

    def omega_hat(self, t: float) -> float:
        """Largest image distance over pairs at distance <= t (0 if none)."""
        k = np.searchsorted(self.grid, t, side="right") - 1
        return float(self.omega[k]) if k >= 0 else 0.0

    def rows(self):
        return zip(self.grid.tolist(), self.rho.tolist(), self.omega.tolist())


def moduli(space: FiniteMetricSpace, f: EmbeddingTable) -> ModulusProfile:
    _, _, d, v = pair_samples(space, f)
    return ModulusProfile.from_samples(d, v)


def distortion(space: FiniteMetricSpace, f: EmbeddingTable):
    """``(D, s)`` with ``s d <= ||f(x)-f(y)|| <= D s d`` tight on all pairs."""
    i, j, d, v = pair_samples(space, f)
    if d.size == 0:
        raise ValueError("distortion needs at least two points")
    collapsed = np.flatnonzero(v <= 0)
    if collapsed.size:
        k = collapsed[0]
        raise CollapsedPair(int(i[k]), int(j[k]))
    ratios = v / d
    s = float(ratios.min())
    return float(ratios.max()) / s, s


def _violation(A: float, d: np.ndarray, v: np.ndarray) -> float:
    """Smallest B >= 0 with ``d/A - B <= v <= A d + B`` on all samples."""
    if d.size == 0:
        return 0.0
    return float(max(0.0, (v - A * d).max(), (d / A - v).max()))


@dataclass(frozen=True)
class CoarseFit:
    A: float
    B: float

    def __iter__(self):
        return iter((self.A, self.B))


def coarse_lipschitz_fit(space: FiniteMetricSpace, f: EmbeddingTable, iterations: int = 200) -> CoarseFit:
    """Constants ``(A, B)`` for ``d/A - B <= ||f(x)-f(y)|| <= A d + B``.

    For fixed A the least admissible B is the largest violation ``B(A)``,
    which is convex and non-increasing in A.  Minimising A alone or B alone is
    degenerate (A = 1 always admits some B; B only vanishes as A grows), so the
    fit minimises ``A + B(A)`` by ternary search over ``A >= 1``, taking the
    smallest minimiser.
    """
    _, _, d, v = pair_samples(space, f)
    if d.size == 0:
        return CoarseFit(1.0, 0.0)
    pos = v > 0
    hi = max(1.0, float((v / d).max()), float((d[pos] / v[pos]).max()) if pos.any() else 1.0,
             math.sqrt(float(d.max())))
    lo, hi = 1.0, 2 * hi + 1

    def cost(A):
        return A + _violation(A, d, v)

    for _ in range(iterations):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if cost(m1) <= cost(m2):
            hi = m2
        else:
            lo = m1
    A = lo if cost(lo) <= cost(hi) else hi
    if cost(1.0) <= cost(A) + 1e-12:
        A = 1.0
    return CoarseFit(A, _violation(A, d, v))


def coarse_fit_violation(space: FiniteMetricSpace, f: EmbeddingTable, A: float, B: float) -> float:
    """Largest amount by which any pair breaks either coarse inequality."""
    _, _, d, v = pair_samples(space, f)
    return _violation(A, d, v) - B


def compression_exponent_estimate(profile: ModulusProfile, tau: float = 0.0) -> float:
    """Log-log slope of the compression modulus over distances ``t >= tau``, clamped to [0, 1].

    Needs at least 10 samples at ``t >= tau`` whose distances span two dyadic
    scales (``t_max >= 4 t_min``).  A vanishing modulus anywhere in range means
    no power lower bound is possible, and 0 is returned.
    """
    samples = profile.t[profile.t >= tau]
    keep = profile.grid >= tau
    grid, rho = profile.grid[keep], profile.rho[keep]
    if samples.size < 10 or grid.size < 2 or grid[-1] < 4 * grid[0]:
        raise InsufficientRange(
            f"need >= 10 samples spanning two dyadic scales above tau={tau}; "
            f"have {samples.size} samples over [{grid[0] if grid.size else 'n/a'}, "
            f"{grid[-1] if grid.size else 'n/a'}]"
        )
    if np.any(rho <= 0):
        return 0.0
    slope = np.polyfit(np.log(grid), np.log(rho), 1)[0]
    return float(min(1.0, max(0.0, slope)))


# -- envelopes ---------------------------------------------------------------


def power(alpha: float, scale: float = 1.0) -> Callable:
    return lambda t: scale * np.power(np.asarray(t, dtype=float), alpha)


def linear(a: float, b: float = 0.0) -> Callable:
    return lambda t: a * np.asarray(t, dtype=float) + b


def log_ratio(scale: float, diam: float) -> Callable:
    """``scale t / log2(diam / t)``; reduces to ``scale t`` where the log vanishes."""

    def fn(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            mu = np.log2(diam / np.where(t > 0, t, 1.0))
        safe = np.where(mu > TOL, mu, 1.0)
        return np.where(mu > TOL, scale * t / safe, scale * t)

    return fn


def table(t, v) -> Callable:
    """Piecewise-linear through the samples, constant beyond them."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    return lambda x: np.interp(np.asarray(x, dtype=float), t, v)


def env_min(*fns) -> Callable:
    return lambda t: np.minimum.reduce([np.asarray(g(t), dtype=float) for g in fns])


def env_max(*fns) -> Callable:
    return lambda t: np.maximum.reduce([np.asarray(g(t), dtype=float) for g in fns])


KINDS = ("gap", "coarse", "uniform", "strong", "kalton", "nearly_isometric")


@dataclass(frozen=True, eq=False)
class EnvelopeSpec:
    """A pair of envelopes ``rho <= ||f(x)-f(y)|| <= omega`` with an admissibility kind.

    ``gap`` imposes nothing beyond the sandwich. ``kalton`` uses
    ``min(t, t^alpha)`` and ``max(t, t^alpha)``; build it with :meth:`kalton`.
    """

    rho: Callable
    omega: Callable
    kind: str = "gap"
    alpha: float | None = None
    description: dict = field(default_factory=dict)

    @classmethod
    def kalton(cls, alpha: float) -> "EnvelopeSpec":
        if not 0 < alpha < 1:
            raise InadmissibleEnvelope("kalton", 0, f"alpha must lie in (0, 1), got {alpha}")
        return cls(env_min(power(1.0), power(alpha)), env_max(power(1.0), power(alpha)), "kalton", alpha,
                   {"kind": "kalton", "alpha": alpha})


# probe grids for the limit conditions; these are numerical checks, not proofs
_SMALL = np.logspace(-12, -3, 10)
_UNIT = np.linspace(0.0, 1.0, 101)
_LARGE = np.logspace(0, 12, 25)


def _strictly_increasing(vals) -> bool:
    return bool(np.all(np.diff(vals) > 0))


def check_admissible(spec: EnvelopeSpec) -> None:
    """Raise :class:`InadmissibleEnvelope` if ``spec`` breaks the rules of its kind.

    For ``nearly_isometric`` the conditions are numbered as follows:
    (1) omega(0) = 0, omega(t) >= t on [0, 1], omega(t)/t -> inf as t -> 0;
    (2) omega(t) = t for t >= 1; (3) rho(t) = t on [0, 1];
    (4) rho(t) <= t for t >= 1 and rho(t)/t -> 0 as t -> inf.
    Limits are probed on logarithmic grids.
    """
    kind = spec.kind
    if kind not in KINDS:
        raise InadmissibleEnvelope(kind, 0, f"unknown kind; choose from {KINDS}")
    rho, omega = spec.rho, spec.omega
    grid = np.concatenate([_UNIT[1:], _LARGE])

    if np.any(np.asarray(rho(grid)) > np.asarray(omega(grid)) + TOL):
        raise InadmissibleEnvelope(kind, 0, "rho exceeds omega somewhere")

    if kind == "kalton":
        if spec.alpha is None or not 0 < spec.alpha < 1:
            raise InadmissibleEnvelope(kind, 0, "alpha must lie in (0, 1)")
        return

    if kind == "nearly_isometric":
        w0 = float(np.asarray(omega(np.array([0.0])))[0])
        if abs(w0) > TOL or np.any(omega(_UNIT) < _UNIT - TOL):
            raise InadmissibleEnvelope(kind, 1, "need omega(0) = 0 and omega(t) >= t on [0, 1]")
        ratio = omega(_SMALL[::-1]) / _SMALL[::-1]
        if not (_strictly_increasing(ratio) and ratio[-1] > 2):
            raise InadmissibleEnvelope(kind, 1, "omega(t)/t does not blow up as t -> 0")
        if np.any(np.abs(omega(_LARGE) - _LARGE) > TOL * np.maximum(1, _LARGE)):
            raise InadmissibleEnvelope(kind, 2, "need omega(t) = t for t >= 1")
        if np.any(np.abs(rho(_UNIT) - _UNIT) > TOL):
            raise InadmissibleEnvelope(kind, 3, "need rho(t) = t on [0, 1]")
        ratio = rho(_LARGE[1:]) / _LARGE[1:]
        if np.any(ratio > 1 + TOL) or not (_strictly_increasing(-ratio) and ratio[-1] < 0.5):
            raise InadmissibleEnvelope(kind, 4, "need rho(t) <= t for t >= 1 and rho(t)/t -> 0")
        return

    if kind in ("coarse", "strong"):
        vals = rho(_LARGE)
        if not (np.all(np.diff(vals) >= -TOL) and vals[-1] > 10 * max(vals[0], 1.0)):
            raise InadmissibleEnvelope(kind, 1, "rho must be non-decreasing and unbounded")
        if not np.all(np.isfinite(omega(grid))):
            raise InadmissibleEnvelope(kind, 2, "omega must be finite")
    if kind in ("uniform", "strong"):
        small = omega(_SMALL)
        if not (np.all(np.diff(small) >= -TOL) and small[0] < 1e-3):
            raise InadmissibleEnvelope(kind, 3, "omega(t) must tend to 0 as t -> 0")
        if np.any(rho(np.concatenate([_SMALL, grid])) <= 0):
            raise InadmissibleEnvelope(kind, 4, "rho must be positive for t > 0")


@dataclass
class EnvelopeVerdict:
    ok: bool
    checked: int
    violations: list

    def to_json(self) -> dict:
        return {"ok": self.ok, "checked": self.checked, "violations": self.violations}


def envelope_check(space: FiniteMetricSpace, f: EmbeddingTable, spec: EnvelopeSpec,
                   max_report: int = 20) -> EnvelopeVerdict:
    """Test ``rho(d) <= ||f(x)-f(y)|| <= omega(d)`` on every pair."""
    check_admissible(spec)
    i, j, d, v = pair_samples(space, f)
    lo = np.asarray(spec.rho(d), dtype=float)
    hi = np.asarray(spec.omega(d), dtype=float)
    bad = np.flatnonzero((v < lo - TOL) | (v > hi + TOL))
    report = [
        {"pair": [int(i[k]), int(j[k])], "d": float(d[k]), "image": float(v[k]),
         "rho": float(lo[k]), "omega": float(hi[k])}
        for k in bad[:max_report]
    ]
    return EnvelopeVerdict(bad.size == 0, int(d.size), report)


def envelope_from_json(obj: dict) -> EnvelopeSpec:
    """Build an :class:`EnvelopeSpec` from its JSON description.

    ``{"kind": "kalton", "alpha": 0.5}`` or
    ``{"kind": ..., "rho": <fn>, "omega": <fn>}`` where a function is one of
    ``{"type": "power", "exponent": a, "scale": c}``,
    ``{"type": "linear", "a": a, "b": b}``,
    ``{"type": "log", "scale": c, "diam": D}``,
    ``{"type": "table", "t": [...], "v": [...]}``, or
    ``{"type": "min" | "max", "of": [<fn>, ...]}``.
    """
    kind = obj.get("kind", "gap")
    if kind == "kalton":
        return EnvelopeSpec.kalton(float(obj["alpha"]))
    return EnvelopeSpec(_fn_from_json(obj["rho"]), _fn_from_json(obj["omega"]), kind,
                        obj.get("alpha"), dict(obj))


def _fn_from_json(obj: dict) -> Callable:
    kind = obj["type"]
    if kind == "power":
        return power(float(obj.get("exponent", 1.0)), float(obj.get("scale", 1.0)))
    if kind == "linear":
        return linear(float(obj.get("a", 1.0)), float(obj.get("b", 0.0)))
    if kind == "log":
        return log_ratio(float(obj.get("scale", 1.0)), float(obj["diam"]))
    if kind == "table":
        return table(obj["t"], obj["v"])
    if kind == "min":
        return env_min(*[_fn_from_json(o) for o in obj["of"]])
    if kind == "max":
        return env_max(*[_fn_from_json(o) for o in obj["of"]])
    raise ValueError(f"unknown envelope function type {kind!r}")

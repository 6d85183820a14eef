"""The acceptance criteria as runnable checks.

Each ``criterion_*`` function returns a :class:`CriterionResult`; the CLI's
``certify-all`` and ``tests/test_acceptance.py`` both go through
:func:`run_all`.  Tolerances and runtime limits are fixed here.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analysis, compact, core, generators, gluing, interlacing, nets, stability
from .frechet import frechet

UPPER_PROP = 1.28255
EXACT = 1e-12


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name} ({self.elapsed:.2f}s): {self.detail}"


def random_corpus(seed: int, count: int = 20) -> list:
    """Seeded mix of generated spaces with at most 200 points."""
    rng = np.random.default_rng(seed)
    spaces = []
    for k in range(count):
        sub = int(rng.integers(2**31))
        n = int(rng.integers(20, 201))
        kind = k % 5
        if kind == 0:
            p = [1.0, 2.0, 3.0, math.inf][int(rng.integers(4))]
            M = generators.random_lp_subset(p, int(rng.integers(1, 6)), n, sub)
        elif kind == 1:
            M = generators.grid_subset(int(rng.integers(1, 4)), n, sub)
        elif kind == 2:
            M = generators.binary_tree(int(rng.integers(3, 7)))
        elif kind == 3:
            M = generators.path(n)
        else:
            base = generators.random_lp_subset(2.0, int(rng.integers(1, 4)), n, sub)
            M = core.snowflake(base, float(rng.uniform(0.2, 0.9)))
        spaces.append(M)
    return spaces


def grid_corpus(seed: int, count: int = 10) -> list:
    """Seeded grid subsets (dimension 1-3, 50-150 points) based at their first point."""
    rng = np.random.default_rng(seed + 1)
    return [
        generators.grid_subset(int(rng.integers(1, 4)), int(rng.integers(50, 151)), int(rng.integers(2**31)))
        for _ in range(count)
    ]


def _timed(number, name, limit, fn):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed >= limit:
        ok = False
        detail += f"; runtime {elapsed:.2f}s exceeds {limit}s"
    return CriterionResult(number, name, bool(ok), detail, elapsed)


def criterion_1(seed: int) -> CriterionResult:
    def run():
        worst = 0.0
        corpus = random_corpus(seed)
        for M in corpus:
            f = frechet(M, "all")
            worst = max(worst, float(np.abs(f.image_distances() - M.dist).max()))
        return worst <= EXACT, f"{len(corpus)} spaces, max |phi-distance - d| = {worst:.2e} (tol {EXACT})"

    return _timed(1, "Frechet isometry", 2.0, run)


def criterion_2(seed: int) -> CriterionResult:
    def run():
        worst_slack = -math.inf
        checked = 0
        for M in random_corpus(seed):
            for eps in (M.diam / 4, M.diam / 16):
                S = nets.greedy_net(M, eps)
                c = nets.retract(M, S)
                worst_slack = max(worst_slack, c.max_additive_error - 2 * S.precision)
                checked += 1
        return worst_slack <= EXACT, f"{checked} retractions, max(error - 2 precision) = {worst_slack:.2e}"

    return _timed(2, "Skeleton retraction additive error", None, run)


def criterion_3(seed: int) -> CriterionResult:
    def run():
        K = generators.dyadic_interval(4)
        mu = compact.DecayModulus.log2(1.0)
        table, cert = compact.compact_embedding(K, mu)
        i, j, d, v = core.pair_samples(K, table)
        lower = np.array([compact.literal_lower(mu, x) for x in d])
        low_bad = int(np.sum(v < lower - core.TOL))
        up_bad = int(np.sum(v > UPPER_PROP * d + core.TOL))
        detail = (f"{d.size} pairs; upper violations {up_bad}, d/(2 mu(d)) violations {low_bad}"
                  f"; max ratio {cert.max_ratio:.5f}; provable bound d/(2(l+1)) holds: {cert.lower_ok}")
        return d.size == 136 and low_bad == 0 and up_bad == 0, detail

    return _timed(3, "Compact embedding envelope on 17-point dyadic space", 1.0, run)


def criterion_4(seed: int) -> CriterionResult:
    def run():
        worst = {0.0: 0.0, 0.5: 0.0}
        ok = True
        for k, M in enumerate(grid_corpus(seed)):
            for eps0 in (0.0, 0.5):
                fam = gluing.frechet_family(M, eps0, seed=seed + k)
                f = gluing.glue(fam)
                cert = gluing.certify_glue(fam, f)
                worst[eps0] = max(worst[eps0], cert.lipschitz)
                ok &= cert.lipschitz <= 9 * (1 + eps0) + core.TOL
        return ok, f"max Lip: eps0=0 -> {worst[0.0]:.4f} (<= 9), eps0=0.5 -> {worst[0.5]:.4f} (<= 13.5)"

    return _timed(4, "Gluing Lipschitz bound", 5.0, run)


def criterion_5(seed: int) -> CriterionResult:
    def run():
        c = 0.1
        ok, pairs, worst = True, 0, math.inf
        for M in grid_corpus(seed):
            f = gluing.augment_with_radius(gluing.glue(gluing.frechet_family(M)), c)
            img = f.image_distances()
            a, b = gluing.cross_annulus_pairs(M, 2)
            pairs += a.size
            if a.size:
                slack = img[a, b] - (c / 4) * M.dist[a, b]
                worst = min(worst, float(slack.min()))
                ok &= bool(np.all(slack >= 0))
        return ok and pairs > 0, f"{pairs} cross-annulus pairs, min(image - (c/4) d) = {worst:.4g}"

    return _timed(5, "Radius augmentation lower bound", None, run)


def criterion_6(seed: int) -> CriterionResult:
    def run():
        t = np.arange(1.0, 257.0)
        errs = {}
        for alpha in (0.25, 0.5, 1.0):
            prof = analysis.ModulusProfile.from_samples(t, t**alpha)
            errs[alpha] = abs(analysis.compression_exponent_estimate(prof, 1.0) - alpha)
        P = generators.path(256)
        f = frechet(core.snowflake(P, 0.5), "all").with_domain(P)
        est = analysis.compression_exponent_estimate(analysis.moduli(P, f), 1.0)
        ok = all(e <= 1e-6 for e in errs.values()) and abs(est - 0.5) <= 0.05
        detail = ", ".join(f"alpha={a}: err {e:.1e}" for a, e in errs.items())
        return ok, f"{detail}; snowflaked path(256) estimate {est:.6f}"

    return _timed(6, "Compression exponent estimation", 2.0, run)


def floyd_warshall(adjacency: np.ndarray) -> np.ndarray:
    m = adjacency.shape[0]
    d = np.where(adjacency, 1.0, math.inf)
    np.fill_diagonal(d, 0.0)
    for k in range(m):
        for i in range(m):
            for j in range(m):
                if d[i, k] + d[k, j] < d[i, j]:
                    d[i, j] = d[i, k] + d[k, j]
    return d


def criterion_7(seed: int) -> CriterionResult:
    def run():
        g = interlacing.build_graph(4, 2)
        brute_adj = np.array([[a != b and _brute_interlace(a, b) for b in g.vertices] for a in g.vertices])
        bfs_ok = bool(np.array_equal(brute_adj, g.adjacency)) and bool(
            np.array_equal(floyd_warshall(brute_adj), g.dist))
        d1234 = g.d((1, 2), (3, 4))
        complete = all(
            interlacing.build_graph(n, 1).adjacency.sum() == n * (n - 1) for n in range(2, 9))
        g8 = interlacing.build_graph(8, 2)
        agree = 0
        for s in range(5):
            imgs = np.random.default_rng(seed + s).normal(size=(len(g8.vertices), 3))
            ex = interlacing.q_constant_search(g8, imgs, 4, method="exhaustive")
            gr = interlacing.q_constant_search(g8, imgs, 4, method="greedy", seed=seed + s)
            agree += abs(ex.c_hat - gr.c_hat) <= EXACT
        ok = bfs_ok and d1234 == 2 and complete and agree == 5
        return ok, (f"BFS matches brute force: {bfs_ok}; d({{1,2}},{{3,4}}) = {d1234:g}; "
                    f"k=1 complete: {complete}; exhaustive/greedy agree {agree}/5")

    return _timed(7, "Interlacing graphs and Q-search", None, run)


def _brute_interlace(a, b) -> bool:
    # try both alternations by merging element by element
    k = len(a)
    one = all(b[i] <= a[i] for i in range(k)) and all(a[i] <= b[i + 1] for i in range(k - 1))
    two = all(a[i] <= b[i] for i in range(k)) and all(b[i] <= a[i + 1] for i in range(k - 1))
    return one or two


def criterion_8(seed: int) -> CriterionResult:
    def run():
        c0 = [stability.double_limit(*stability.c0_witness(N), W=1) for N in (4, 8, 64)]
        c0_ok = all(r.L_inner_first == 1.0 and r.L_outer_first == 2.0 for r in c0)
        h = stability.double_limit(*stability.orthonormal_witness(64))
        h_ok = h.delta == 0 and all(abs(v - math.sqrt(2)) <= 1e-9 for v in (h.L_inner_first, h.L_outer_first))
        N = 100
        disjoint = stability.lp_additivity_check(
            [1.0], stability.SequenceFamily.from_vectors([np.eye(N + 2)[n + 1] for n in range(1, N + 1)]), 2.0)
        perturbed = stability.lp_additivity_check(
            [1.0],
            stability.SequenceFamily.from_vectors(
                [np.eye(N + 2)[0] / n + np.eye(N + 2)[n + 1] for n in range(1, N + 1)]),
            2.0, eta=0.05)
        ok = c0_ok and h_ok and disjoint == 0 and perturbed < 0.03
        return ok, (f"c0 limits {[(r.L_inner_first, r.L_outer_first) for r in c0]}; hilbert "
                    f"({h.L_inner_first:.12f}, {h.L_outer_first:.12f}); additivity residuals "
                    f"{disjoint:g} and {perturbed:.4f}")

    return _timed(8, "Stability witnesses", None, run)


def criterion_9(seed: int) -> CriterionResult:
    def run():
        P = generators.path(64)
        S = nets.greedy_net(P, 2.0)
        c = nets.retract(P, S)
        f = frechet(P, "all").compose(c.mapping)
        fit = analysis.coarse_lipschitz_fit(P, f)
        ok = S.precision == 1.0 and fit.A <= 1 + 1e-6 and fit.B <= 2 + 1e-9
        return ok, f"precision {S.precision:g}; fit A = {fit.A:.9f}, B = {fit.B:.9f}"

    return _timed(9, "Coarse fit of retraction", None, run)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


def run_all(seed: int = 7, jobs: int = 1) -> list:
    if jobs <= 1:
        return [c(seed) for c in CRITERIA]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda c: c(seed), CRITERIA))



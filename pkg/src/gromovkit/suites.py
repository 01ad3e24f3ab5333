"""Randomized verification suites.

Each suite runs ``trials`` independent trials, each with its own generator
split from one seed, so a failing trial can be replayed alone with
:func:`run_trial`.  The same functions back ``gromovkit verify`` and the
test suite.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constructions import glue
from .generators import random_metric, random_rough_isometry
from .gh import gh_exact, gh_lower_diam, gh_upper_greedy, gh_upper_same_labels
from .metric import FiniteMetricSpace, validate
from .pointed import (
    PointedSpace,
    check_admissible,
    glue_from_rough_isometry,
    lemma41_threshold,
    product_rough_isometry,
    projection_rough_isometry,
)
from .spider import SpiderParams, build_spider, fingerprint, leg_bounds, lipschitz_gap, tau

__all__ = ["SuiteReport", "SUITES", "run_suite", "run_trial"]


@dataclass
class SuiteReport:
    name: str
    seed: int
    trials: int
    failures: list[dict] = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.ok else f"FAIL ({len(self.failures)} failing trials)"
        return f"{self.name}: {status} trials={self.trials} seed={self.seed} time={self.elapsed:.2f}s"

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "seed": self.seed,
            "trials": self.trials,
            "ok": self.ok,
            "failures": self.failures,
            "stats": self.stats,
            "elapsed": self.elapsed,
        }


# Every trial returns (problems, stats): a list of failure strings and a
# dict of numbers, min-reduced over trials for "min_" keys, else max-reduced.


def _lipschitz(rng, N: int = 8, grid: int = 32):
    a = SpiderParams.random(N, rng)
    if rng.random() < 0.5:
        b = SpiderParams.random(N, rng)
    else:
        # small moves, clipped back into the cube
        lo, hi = leg_bounds(N)
        step = rng.uniform(-1, 1, N) * lo * 10.0 ** rng.uniform(-9, -1)
        b = SpiderParams(tuple(np.clip(np.asarray(a.a) + step, lo, hi)))
    lhs, rhs = lipschitz_gap(a, b, grid)
    problems = [] if lhs <= rhs + 1e-12 else [f"D={lhs!r} > 2tau={rhs!r}"]
    return problems, {"max_excess": lhs - rhs}


def _fingerprint(rng, N_max: int = 10):
    N = int(rng.integers(0, N_max + 1))
    grid = int(rng.integers(2, 9))
    K = float(rng.uniform(0.5, 4.0))
    a = SpiderParams.random(N, rng)
    X = build_spider(a, grid, K).space
    perm = rng.permutation(len(X))
    K2, a2 = fingerprint(X.subspace(perm))
    problems = []
    rel = abs(K2 - K) / K
    if N:
        rel = max(rel, float(np.max(np.abs(np.subtract(a2, a.a)) / np.asarray(a.a))))
    if len(a2) != N or rel > 1e-9:
        problems.append(f"round trip: K={K!r} a={a.a} -> K={K2!r} a={a2} (rel {rel:.3g})")
    sep = math.inf
    if N:
        # a neighbour at sup distance in [1e-6, 1e-3]
        lo, hi = leg_bounds(N)
        b = np.asarray(a.a, dtype=float).copy()
        # intervals past a_9 are narrower than 1e-6
        i = int(rng.integers(min(N, 9)))
        up = hi[i] - b[i] >= b[i] - lo[i]
        room = min(1e-3, max(hi[i] - b[i], b[i] - lo[i]))
        t = 10.0 ** rng.uniform(-6, np.log10(room))
        b[i] = b[i] + t if up else b[i] - t
        b = SpiderParams(tuple(b))
        if tau(a, b) >= 1e-6:
            _, b2 = fingerprint(build_spider(b, grid, K).space)
            sep = float(np.max(np.abs(np.subtract(a2, b2))))
            if sep < 1e-7:
                problems.append(f"separation {sep!r} < 1e-7 at tau={tau(a, b)!r}")
    return problems, {"max_rel_error": rel, "min_separation": sep}


def _gh_axioms(rng, max_size: int = 5):
    def space():
        return random_metric(int(rng.integers(1, max_size + 1)), rng)

    X, Y, Z = space(), space(), space()
    problems = []
    xy = gh_exact(X, Y).value
    if xy != gh_exact(Y, X).value:
        problems.append("gh_exact not symmetric")
    lo, (up, _) = gh_lower_diam(X, Y), gh_upper_greedy(X, Y)
    if not lo <= xy <= up:
        problems.append(f"bounds out of order: {lo!r} <= {xy!r} <= {up!r}")
    yz, xz = gh_exact(Y, Z).value, gh_exact(X, Z).value
    tri = xz - xy - yz
    if tri > 1e-12:
        problems.append(f"triangle inequality off by {tri!r}")
    pt = gh_exact(FiniteMetricSpace.point(), X).value
    if abs(pt - X.dist.max() / 2) > 1e-12:
        problems.append(f"gh(point, X)={pt!r} vs diam/2={float(X.dist.max()) / 2!r}")
    return problems, {"max_triangle_excess": tri}


def _perturbation(rng, max_size: int = 5):
    n = int(rng.integers(1, max_size + 1))
    X = random_metric(n, rng)
    if rng.random() < 0.5:
        Y = random_metric(n, rng)
    else:
        pts = rng.random((n, 2))
        Y = FiniteMetricSpace.from_points(pts + 0.05 * rng.standard_normal(pts.shape))
        X = FiniteMetricSpace.from_points(pts)
    Y = Y.relabel(X.labels)
    g, bound = gh_exact(X, Y).value, gh_upper_same_labels(X, Y)
    problems = [] if g <= bound else [f"gh={g!r} > {bound!r}"]
    return problems, {"max_ratio": g / bound if bound else 0.0}


def _lemma41(rng, max_points: int = 20):
    cert, X, Y = random_rough_isometry(rng, max_points)
    h = glue_from_rough_isometry(cert, X, Y)
    base = lemma41_threshold(cert.R, cert.eps)
    problems = []
    for t in (base + 1e-9, base * rng.uniform(1.0, 3.0) + 1e-9):
        r = check_admissible(h, X, Y, t)
        if not r.ok:
            problems.append(f"t={t!r} (R={cert.R!r}, eps={cert.eps!r}) failed {list(r.failed)}")
    return problems, {"max_threshold": min(base, 0.5)}


def _rough_factor(rng):
    cert, X, Y = random_rough_isometry(rng, max_points=4, R=math.inf)
    return list(cert.image), X, Y, cert.eps


def _case1(rng):
    k = int(rng.integers(1, 4))
    maps, src, tgt, eps = [], [], [], 0.0
    for _ in range(k):
        f, X, Y, e = _rough_factor(rng)
        maps.append(f)
        src.append(X)
        tgt.append(Y)
        eps = max(eps, e)
    cert, Ps, Pt = product_rough_isometry(maps, src, tgt, eps)
    dom, img = np.asarray(cert.domain), np.asarray(cert.image)
    excess = np.abs(Ps.dist[np.ix_(dom, dom)] - Pt.dist[np.ix_(img, img)]).max() - math.sqrt(k) * eps
    problems = []
    if not cert.verdict:
        problems.append(f"product of {k} factors failed at sqrt({k})*eps: {cert.violations[0]}")
    return problems, {"max_excess": float(excess)}


def _case2(rng):
    n = int(rng.integers(1, 4))
    i = int(rng.integers(n + 1))
    eps = float(rng.uniform(0.01, 0.5))
    factors = []
    for j in range(n + 1):
        X = random_metric(int(rng.integers(1, 5)), rng, prefix=f"f{j}_")
        base = int(rng.integers(len(X)))
        if j != i:
            keep = np.flatnonzero(X.dist[base] <= eps)
            X, base = X.subspace(keep), int(np.flatnonzero(keep == base)[0])
        factors.append(PointedSpace(X, base))
    R = math.inf if rng.random() < 0.3 else float(rng.uniform(2.5, 10.0)) * math.sqrt(n) * eps
    cert, P = projection_rough_isometry(factors, i, R, eps)
    idx = np.unravel_index(np.arange(len(P)), [len(F) for F in factors])[i]
    di = factors[i].dist
    excess = np.abs(P.dist - di[np.ix_(idx, idx)]).max() - 2 * math.sqrt(n) * eps
    problems = []
    if not cert.verdict:
        problems.append(f"projection {i} of {n + 1} factors failed: {cert.violations[0]}")
    if excess > 1e-12:
        problems.append(f"pointwise bound exceeded by {excess!r}")
    return problems, {"max_excess": float(excess)}


def _glue_restrict(rng, max_size: int = 8):
    X = random_metric(int(rng.integers(1, max_size + 1)), rng, prefix="x")
    Y = random_metric(int(rng.integers(1, max_size + 1)), rng, prefix="y")
    px, py = X.labels[rng.integers(len(X))], Y.labels[rng.integers(len(Y))]
    W = glue(X, Y, px, py)
    problems = []
    nx = len(X)
    if not np.array_equal(W.dist[:nx, :nx], X.dist):
        problems.append("restriction to X changed")
    ky = [W.index(px if lab == py else lab) for lab in Y.labels]
    if not np.array_equal(W.dist[np.ix_(ky, ky)], Y.dist):
        problems.append("restriction to Y changed")
    rep = validate(W, require_metric=True, tol=1e-12)
    if not rep:
        problems.append(f"glued space is not a metric: {rep.violations[0]}")
    return problems, {"max_size": float(len(W))}


SUITES = {
    "lipschitz": _lipschitz,
    "fingerprint": _fingerprint,
    "gh-axioms": _gh_axioms,
    "perturbation": _perturbation,
    "lemma41": _lemma41,
    "case1": _case1,
    "case2": _case2,
    "glue-restrict": _glue_restrict,
}


def _trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def run_trial(name: str, seed: int, index: int, **kwargs):
    """Run trial `index` of a suite; equal to that trial inside :func:`run_suite`."""
    return SUITES[name](_trial_rng(seed, index), **kwargs)


def _run_one(args):
    name, seed, index, kwargs = args
    try:
        return index, *run_trial(name, seed, index, **kwargs)
    except Exception as exc:  # a crash is a failure with a replayable seed
        return index, [f"{type(exc).__name__}: {exc}"], {}


def run_suite(name: str, trials: int, seed: int = 0, jobs: int = 1, **kwargs) -> SuiteReport:
    """Run a named suite.

    Parameters
    ----------
    name : str
        One of :data:`SUITES`.
    trials : int
        Number of independent trials.
    seed : int
        Root seed; trial ``i`` uses ``SeedSequence(seed, spawn_key=(i,))``.
    jobs : int
        Worker processes.  Results are reported in trial order either way.
    **kwargs
        Passed through to the trial function (e.g. ``max_size``).
    """
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    t0 = time.perf_counter()
    work = [(name, seed, i, kwargs) for i in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_run_one, work, chunksize=max(1, trials // (4 * jobs))))
    else:
        results = [_run_one(w) for w in work]
    results.sort(key=lambda r: r[0])
    report = SuiteReport(name, seed, trials)
    for index, problems, stats in results:
        for p in problems:
            report.failures.append({"trial": index, "detail": p})
        for key, val in stats.items():
            pick = min if key.startswith("min_") else max
            report.stats[key] = pick(report.stats.get(key, float(val)), float(val))
    report.elapsed = time.perf_counter() - t0
    return report

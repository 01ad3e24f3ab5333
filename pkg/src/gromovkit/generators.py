"""Random finite metric spaces for property checks and the verify suites."""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .metric import FiniteMetricSpace, PseudoMetricMatrix
from .pointed import PointedSpace, RoughIsometryCert, check_rough_isometry

__all__ = [
    "trial_rngs",
    "random_points_space",
    "random_graph_metric",
    "random_metric",
    "random_pseudometric",
    "random_pointed",
    "minimal_eps",
    "random_rough_isometry",
]


def trial_rngs(seed: int, trials: int) -> list[np.random.Generator]:
    """One independent generator per trial, split from a single seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def _labels(n: int, prefix: str) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(n))


def random_points_space(n: int, rng: np.random.Generator, dim: int | None = None, prefix: str = "x") -> FiniteMetricSpace:
    dim = int(rng.integers(1, 4)) if dim is None else dim
    pts = rng.random((n, dim)) * rng.uniform(0.5, 3.0)
    return FiniteMetricSpace.from_points(pts, _labels(n, prefix))


def random_graph_metric(n: int, rng: np.random.Generator, prefix: str = "x") -> FiniteMetricSpace:
    """Shortest-path metric of a complete graph with random positive weights.

    Weights are drawn from a few levels, so ties and degenerate triangles
    are common.
    """
    w = rng.choice([0.5, 1.0, 1.5, 2.0, 3.0], size=(n, n)) * rng.uniform(0.5, 2.0)
    w = np.triu(w, 1)
    d = shortest_path(w + w.T, method="FW", directed=False)
    return FiniteMetricSpace(_labels(n, prefix), d)


def random_metric(n: int, rng: np.random.Generator, prefix: str = "x") -> FiniteMetricSpace:
    if rng.random() < 0.5:
        return random_points_space(n, rng, prefix=prefix)
    return random_graph_metric(n, rng, prefix=prefix)


def random_pseudometric(n: int, rng: np.random.Generator, prefix: str = "x") -> PseudoMetricMatrix:
    """Pull back a random metric along a random surjection, so some points coincide."""
    k = int(rng.integers(1, n + 1))
    base = random_metric(k, rng)
    cls = np.concatenate([np.arange(k), rng.integers(0, k, n - k)])
    rng.shuffle(cls)
    return PseudoMetricMatrix(_labels(n, prefix), base.dist[np.ix_(cls, cls)])


def random_pointed(n: int, rng: np.random.Generator, prefix: str = "x") -> PointedSpace:
    return PointedSpace(random_metric(n, rng, prefix), int(rng.integers(n)))


def minimal_eps(f, X: PointedSpace, Y: PointedSpace, R: float, floor: float = 1e-9) -> float:
    """Smallest slack (up to a relative 1e-9 margin) for which `f` certifies.

    Conditions 1 and 3 give a lower bound directly.  Condition 2 is strict
    and its ball shrinks as the slack grows, so the bound is raised until
    no point of ``B(b, R - eps)`` is left uncovered.
    """
    f = np.asarray(f)
    dom = X.ball(R)
    img = np.unique(f[dom])
    d, e = X.dist, Y.dist
    eps = max(floor, float(e[f[X.base], Y.base]))
    if dom.size:
        eps = max(eps, float(np.abs(d[np.ix_(dom, dom)] - e[np.ix_(f[dom], f[dom])]).max()))
    cover = e[:, img].min(axis=1)
    while True:
        inside = e[Y.base] <= R - eps
        bad = inside & (cover >= eps)
        if not bad.any():
            return eps
        eps = float(cover[bad].max()) * (1 + 1e-9) + 1e-15


def random_rough_isometry(
    rng: np.random.Generator, max_points: int = 20, R: float | None = None
) -> tuple[RoughIsometryCert, PointedSpace, PointedSpace]:
    """A certified rough isometry between a point cloud and a noisy resample of it.

    Y keeps a random subset of X's points, moved by Gaussian noise, plus a
    few extra noisy copies; ``f`` sends each point of X to its nearest
    point of Y and the slack is :func:`minimal_eps`.  ``R`` is infinite
    with probability 1/3 unless given.
    """
    dim = int(rng.integers(1, 4))
    nx = int(rng.integers(2, max_points + 1))
    pts = rng.random((nx, dim)) * rng.uniform(0.5, 3.0)
    noise = rng.uniform(0.0, 0.2)
    keep = rng.permutation(nx)[: int(rng.integers(1, nx + 1))]
    extra = int(rng.integers(0, max_points - keep.size + 1))
    src = np.concatenate([keep, rng.integers(0, nx, extra)])
    qts = pts[src] + noise * rng.standard_normal((src.size, dim))
    X = PointedSpace(FiniteMetricSpace.from_points(pts, _labels(nx, "x")), int(rng.integers(nx)))
    Yspace = FiniteMetricSpace.from_points(qts, _labels(src.size, "y"))
    f = np.argmin(np.linalg.norm(pts[:, None, :] - qts[None, :, :], axis=2), axis=1)
    base = int(f[X.base]) if rng.random() < 0.5 else int(rng.integers(src.size))
    Y = PointedSpace(Yspace, base)
    diam = float(X.dist.max()) or 1.0
    if R is None:
        R = math.inf if rng.random() < 1 / 3 else float(rng.uniform(0.3, 2.0) * diam)
    eps = minimal_eps(f, X, Y, R)
    if not R > eps:
        R = math.inf
        eps = minimal_eps(f, X, Y, R)
    cert = check_rough_isometry(f.tolist(), X, Y, R, eps)
    if not cert.verdict:
        raise AssertionError(f"generator produced an uncertified map: {cert.violations}")
    return cert, X, Y

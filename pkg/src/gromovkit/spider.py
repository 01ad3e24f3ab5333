"""Discretized spider trees: a center with legs of lengths 1, a_1, a_2, ...

Leg ``i`` is the segment ``(0, 1]`` scaled by ``a_i`` (``a_0 = 1``).  Two
points on the same leg are ``a_i |s - t|`` apart; points on different legs
are joined through the center, ``a_i s + a_j t``.  The parameter vector
lives in the cube ``prod_i [4**-i, 2 * 4**-i]``, measured with the sup
metric :func:`tau`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .metric import FiniteMetricSpace, uniform_distance

__all__ = [
    "SpiderParams",
    "SpiderSpace",
    "FingerprintError",
    "leg_bounds",
    "tau",
    "spider_layout",
    "spider_matrix",
    "build_spider",
    "fingerprint",
    "lipschitz_gap",
]


def leg_bounds(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper ends of the intervals for a_1..a_N."""
    i = np.arange(1, N + 1, dtype=float)
    lo = 2.0 ** (-2 * i)
    return lo, 2.0 * lo


@dataclass(frozen=True)
class SpiderParams:
    """Truncated point of the parameter cube: ``a = (a_1, ..., a_N)``."""

    a: tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        lo, hi = leg_bounds(len(a))
        arr = np.asarray(a)
        bad = np.flatnonzero((arr < lo) | (arr > hi))
        if bad.size:
            i = int(bad[0])
            raise ValueError(f"a_{i + 1}={a[i]!r} outside [{float(lo[i])!r}, {float(hi[i])!r}]")
        object.__setattr__(self, "a", a)

    @property
    def N(self) -> int:
        return len(self.a)

    def full(self) -> np.ndarray:
        """``(a_0, a_1, ..., a_N)`` with ``a_0 = 1``."""
        return np.concatenate([[1.0], np.asarray(self.a)])

    @classmethod
    def lower(cls, N: int) -> "SpiderParams":
        return cls(tuple(leg_bounds(N)[0]))

    @classmethod
    def upper(cls, N: int) -> "SpiderParams":
        return cls(tuple(leg_bounds(N)[1]))

    @classmethod
    def from_unit(cls, u: Sequence[float]) -> "SpiderParams":
        """Affine map from ``[0, 1]^N``: ``a_i = 4**-i * (1 + u_i)``."""
        lo, _ = leg_bounds(len(u))
        return cls(tuple(lo * (1.0 + np.asarray(u, dtype=float))))

    @classmethod
    def random(cls, N: int, rng: np.random.Generator) -> "SpiderParams":
        return cls.from_unit(rng.random(N))

    def to_dict(self) -> dict:
        return {"a": list(self.a), "N": self.N}

    @classmethod
    def from_dict(cls, obj: dict) -> "SpiderParams":
        p = cls(tuple(obj["a"]))
        if "N" in obj and int(obj["N"]) != p.N:
            raise ValueError(f"N={obj['N']} but {p.N} coordinates given")
        return p


def tau(a: SpiderParams, b: SpiderParams) -> float:
    if a.N != b.N:
        raise ValueError(f"truncation depths differ: {a.N} vs {b.N}")
    if a.N == 0:
        return 0.0
    return float(np.max(np.abs(np.subtract(a.a, b.a))))


def spider_layout(N: int, grid: int) -> tuple[np.ndarray, np.ndarray]:
    """Leg index and arc parameter of every sample point, center first.

    Each leg ``0..N`` is sampled at ``s = 1/grid, 2/grid, ..., 1``.
    """
    if grid < 1:
        raise ValueError("need at least one sample per leg")
    legs = np.repeat(np.arange(N + 1), grid)
    s = np.tile(np.arange(1, grid + 1) / grid, N + 1)
    return np.concatenate([[0], legs]), np.concatenate([[0.0], s])


def spider_matrix(a_full: np.ndarray, legs: np.ndarray, s: np.ndarray, K: float = 1.0) -> np.ndarray:
    """``K * R[a]`` evaluated on the layout coordinates."""
    r = a_full[legs] * s
    same = legs[:, None] == legs[None, :]
    d = np.where(same, a_full[legs][:, None] * np.abs(s[:, None] - s[None, :]), r[:, None] + r[None, :])
    return K * d


@dataclass(frozen=True, eq=False)
class SpiderSpace:
    """A sampled spider plus the white-box layout that generated it."""

    space: FiniteMetricSpace
    legs: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    params: SpiderParams
    K: float
    grid: int

    def layout(self) -> list[tuple[int, float]]:
        return list(zip(self.legs.tolist(), self.s.tolist()))

    def tip(self, i: int) -> int:
        """Index of the point ``1_i``."""
        return 1 + i * self.grid + self.grid - 1

    def to_dict(self) -> dict:
        return {
            "labels": list(self.space.labels),
            "dist": self.space.dist.tolist(),
            "layout": [[int(i), float(t)] for i, t in self.layout()],
            "params": self.params.to_dict(),
            "K": self.K,
            "grid": self.grid,
        }


def _labels(legs: np.ndarray, s: np.ndarray, grid: int) -> tuple[str, ...]:
    out = ["center"]
    for i, t in zip(legs[1:], s[1:]):
        out.append(f"{i}:{int(round(t * grid))}/{grid}")
    return tuple(out)


def build_spider(a: SpiderParams, grid: int = 16, K: float = 1.0) -> SpiderSpace:
    """Sample ``(N + 1) * grid + 1`` points of the spider tree scaled by K."""
    if not K > 0:
        raise ValueError("scale K must be positive")
    legs, s = spider_layout(a.N, grid)
    d = spider_matrix(a.full(), legs, s, K)
    return SpiderSpace(FiniteMetricSpace(_labels(legs, s, grid), d), legs, s, a, float(K), grid)


class FingerprintError(ValueError):
    """Parameter recovery failed; ``stage`` says where."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def _find_center(d: np.ndarray, tol: float) -> int | None:
    """Index of the branch point, or None for a single evenly sampled leg."""
    n = d.shape[0]
    u, v = np.unravel_index(np.argmax(d), d.shape)
    duv = d[u, v]
    # distance of each point from the u-v geodesic
    off = 0.5 * (d[u] + d[v] - duv)
    w = int(np.argmax(off))
    if off[w] > tol:
        # branch point of the tripod u, v, w
        target = 0.5 * (d[u, w] + duv - d[v, w])
        cand = np.flatnonzero((off <= tol) & (np.abs(d[u] - target) <= tol))
        if cand.size != 1:
            raise FingerprintError("center", f"{cand.size} candidate branch points for the tripod ({u},{v},{w})")
        return int(cand[0])
    # all points on one segment: one leg, or two legs with equal sample count
    order = np.argsort(d[u], kind="stable")
    gaps = np.diff(d[u, order])
    if np.all(np.abs(gaps - gaps[0]) <= tol):
        return None
    if n % 2 == 0:
        raise FingerprintError("center", f"path-shaped space with an even number of points ({n})")
    c = int(order[n // 2])
    if n >= 3 and not (d[u, order[n // 2 - 1]] < d[u, c] < d[u, order[n // 2 + 1]]):
        raise FingerprintError("center", "median of the path is not unique")
    return c


def fingerprint(X, tol: float = 1e-9) -> tuple[float, tuple[float, ...]]:
    """Recover ``(K, a)`` from the distance matrix of a sampled spider.

    The center is the branch point of the tripod spanned by the diameter
    pair and the point farthest from the diameter geodesic (for a space
    with at most two legs, the middle point of the path).  Tips are then
    peeled off in order of decreasing distance from the center, each
    taking its whole leg with it: the points ``x`` with
    ``d(c, x) + d(x, tip) = d(c, tip)``.  With ``a_0 = 1`` the first tip
    distance is K and the rest are ``K * a_i``.

    Parameters
    ----------
    X : PseudoMetricMatrix or array-like
        Distance matrix; point order does not matter.
    tol : float
        Relative tolerance (times the diameter) for the collinearity tests.

    Raises
    ------
    FingerprintError
        Center ambiguous, or legs not tree-like / of unequal size.
    """
    d = X.dist if hasattr(X, "dist") else np.asarray(X, dtype=float)
    n = d.shape[0]
    if n < 2:
        raise FingerprintError("center", "need at least two points")
    atol = tol * float(d.max())
    c = _find_center(d, atol)
    if c is None:
        return float(d.max()), ()

    remaining = np.ones(n, dtype=bool)
    remaining[c] = False
    tips: list[float] = []
    leg_size = None
    while remaining.any():
        cand = np.flatnonzero(remaining)
        tip = int(cand[np.argmax(d[c, cand])])
        on_leg = remaining & (np.abs(d[c] + d[:, tip] - d[c, tip]) <= atol)
        members = np.flatnonzero(on_leg)
        if leg_size is None:
            leg_size = members.size
        elif members.size != leg_size:
            raise FingerprintError("legs", f"leg {len(tips)} has {members.size} points, expected {leg_size}")
        radial = d[c, members]
        inner = np.abs(d[np.ix_(members, members)] - np.abs(radial[:, None] - radial[None, :]))
        if inner.max() > atol:
            raise FingerprintError("legs", f"leg {len(tips)} is not a segment")
        tips.append(float(d[c, tip]))
        remaining &= ~on_leg

    K = tips[0]
    return K, tuple(t / K for t in tips[1:])


def lipschitz_gap(
    a: SpiderParams, b: SpiderParams, grid: int = 16, legs: Sequence[int] | None = None
) -> tuple[float, float]:
    """Both sides of ``D(R[a], R[b]) <= 2 tau(a, b)`` on a sampled spider.

    ``legs`` optionally restricts the comparison to points on those legs
    (the center is always kept).
    """
    if a.N != b.N:
        raise ValueError(f"layouts differ: N={a.N} vs N={b.N}")
    lg, s = spider_layout(a.N, grid)
    if legs is not None:
        keep = (np.isin(lg, list(legs))) | (s == 0)
        lg, s = lg[keep], s[keep]
    lhs = uniform_distance(spider_matrix(a.full(), lg, s), spider_matrix(b.full(), lg, s))
    return lhs, 2.0 * tau(a, b)

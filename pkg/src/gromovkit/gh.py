"""Hausdorff and Gromov-Hausdorff distances between finite metric spaces.

GH is computed through correspondences: half the smallest distortion of
a relation that covers both point sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .metric import PseudoMetricMatrix, diameter, eccentricity, uniform_distance

__all__ = [
    "Correspondence",
    "CoverageError",
    "GHExact",
    "hausdorff",
    "distortion",
    "gh_exact",
    "gh_lower_diam",
    "gh_upper_same_labels",
    "gh_upper_greedy",
    "gh_bounds",
]

EXACT_CAP = 6


def _mat(X) -> np.ndarray:
    return X.dist if isinstance(X, PseudoMetricMatrix) else np.asarray(X, dtype=float)


class CoverageError(ValueError):
    pass


@dataclass(frozen=True)
class Correspondence:
    """Relation between ``range(n_x)`` and ``range(n_y)`` covering both."""

    pairs: tuple[tuple[int, int], ...]
    n_x: int
    n_y: int

    def __post_init__(self):
        pairs = tuple(sorted({(int(i), int(j)) for i, j in self.pairs}))
        object.__setattr__(self, "pairs", pairs)
        for i, j in pairs:
            if not (0 <= i < self.n_x and 0 <= j < self.n_y):
                raise CoverageError(f"pair {(i, j)} out of range")
        missing_x = set(range(self.n_x)) - {i for i, _ in pairs}
        missing_y = set(range(self.n_y)) - {j for _, j in pairs}
        if missing_x or missing_y:
            raise CoverageError(
                f"uncovered points: X {sorted(missing_x)[:5]}, Y {sorted(missing_y)[:5]}"
            )

    @classmethod
    def from_maps(cls, f: Sequence[int], g: Iterable[tuple[int, int]] = (), n_y: int | None = None):
        """Graph of ``f: X -> Y`` plus extra pairs ``g``."""
        pairs = [(i, j) for i, j in enumerate(f)] + list(g)
        if n_y is None:
            n_y = max(j for _, j in pairs) + 1
        return cls(tuple(pairs), len(f), n_y)

    @property
    def coverage(self) -> tuple[bool, bool]:
        return True, True

    def transpose(self) -> "Correspondence":
        return Correspondence(tuple((j, i) for i, j in self.pairs), self.n_y, self.n_x)

    def to_list(self) -> list[list[int]]:
        return [[i, j] for i, j in self.pairs]


class GHExact(NamedTuple):
    value: float
    witness: Correspondence


def hausdorff(A: Iterable[int], B: Iterable[int], Z) -> float:
    """Hausdorff distance between index sets A and B inside Z."""
    a = np.asarray(sorted(set(int(i) for i in A)), dtype=int)
    b = np.asarray(sorted(set(int(i) for i in B)), dtype=int)
    if a.size == 0 or b.size == 0:
        raise ValueError("Hausdorff distance needs non-empty subsets")
    sub = _mat(Z)[np.ix_(a, b)]
    return float(max(sub.min(axis=1).max(), sub.min(axis=0).max()))


def distortion(c: Correspondence, X, Y) -> float:
    dx, dy = _mat(X), _mat(Y)
    if c.n_x != dx.shape[0] or c.n_y != dy.shape[0]:
        raise CoverageError(
            f"correspondence is {c.n_x}x{c.n_y}, spaces are {dx.shape[0]}x{dy.shape[0]}"
        )
    i = np.fromiter((p[0] for p in c.pairs), dtype=int)
    j = np.fromiter((p[1] for p in c.pairs), dtype=int)
    return float(np.max(np.abs(dx[np.ix_(i, i)] - dy[np.ix_(j, j)])))


def gh_lower_diam(X, Y) -> float:
    return 0.5 * abs(diameter(_mat(X)) - diameter(_mat(Y)))


def gh_upper_same_labels(d, e) -> float:
    """Half the uniform distance: the identity correspondence's bound."""
    return 0.5 * uniform_distance(d, e)


def gh_exact(X, Y, cap: int = EXACT_CAP) -> GHExact:
    """Exact GH distance by branch and bound over correspondences.

    Every correspondence contains one of the form ``graph(f) + extras``
    where ``f: X -> Y`` is a map and each point of Y missed by f gets one
    partner in X.  Adding pairs never lowers distortion, so searching
    these suffices.  Points of X are assigned in order of decreasing
    eccentricity; a branch is cut once its running distortion reaches the
    incumbent, which starts at the greedy bound.  A pair ``(x, y)`` costs
    at least ``|ecc(x) - ecc(y)|``, which prunes candidates up front.

    Raises
    ------
    ValueError
        Either space has more than `cap` points.
    """
    dx, dy = _mat(X), _mat(Y)
    nx, ny = dx.shape[0], dy.shape[0]
    if max(nx, ny) > cap:
        raise ValueError(
            f"exact GH is limited to {cap} points per space (got {nx}, {ny}); use gh_bounds instead"
        )
    ex, ey = eccentricity(dx), eccentricity(dy)
    pair_lb = np.abs(ex[:, None] - ey[None, :])

    best_bound, best_c = gh_upper_greedy(dx, dy)
    best = [2.0 * best_bound, best_c.pairs]
    lower = abs(dx.max() - dy.max())
    if best[0] <= lower:
        return GHExact(0.5 * best[0], best_c)

    x_order = [int(i) for i in np.argsort(-ex, kind="stable")]
    pairs: list[tuple[int, int]] = []

    def cost_with(i: int, j: int, cur: float) -> float:
        worst = cur
        for (a, b) in pairs:
            v = abs(dx[i, a] - dy[j, b])
            if v > worst:
                worst = v
        return worst

    def extend_y(k: int, missing: list[int], cur: float) -> None:
        if cur >= best[0]:
            return
        if k == len(missing):
            best[0] = cur
            best[1] = tuple(pairs)
            return
        j = missing[k]
        cands = sorted(range(nx), key=lambda i: pair_lb[i, j])
        for i in cands:
            if pair_lb[i, j] >= best[0]:
                break
            c = cost_with(i, j, max(cur, pair_lb[i, j]))
            if c < best[0]:
                pairs.append((i, j))
                extend_y(k + 1, missing, c)
                pairs.pop()

    def extend_x(k: int, used: list[int], cur: float) -> None:
        if cur >= best[0]:
            return
        if k == nx:
            missing = [j for j in range(ny) if used[j] == 0]
            extend_y(0, missing, cur)
            return
        i = x_order[k]
        cands = sorted(range(ny), key=lambda j: pair_lb[i, j])
        for j in cands:
            if pair_lb[i, j] >= best[0]:
                break
            c = cost_with(i, j, max(cur, pair_lb[i, j]))
            if c < best[0]:
                pairs.append((i, j))
                used[j] += 1
                extend_x(k + 1, used, c)
                used[j] -= 1
                pairs.pop()

    extend_x(0, [0] * ny, 0.0)
    return GHExact(0.5 * best[0], Correspondence(best[1], nx, ny))


def _greedy_map(dx: np.ndarray, dy: np.ndarray, seed_x: int, seed_y: int) -> np.ndarray:
    """Farthest-point order on X; each point takes the Y partner that adds least distortion."""
    nx = dx.shape[0]
    f = np.full(nx, -1, dtype=int)
    f[seed_x] = seed_y
    placed = [seed_x]
    gap = dx[seed_x].copy()
    gap[seed_x] = -1.0
    for _ in range(nx - 1):
        x = int(np.argmax(gap))
        px = np.asarray(placed)
        cost = np.abs(dx[x, px][None, :] - dy[:, f[px]]).max(axis=1)
        f[x] = int(np.argmin(cost))
        placed.append(x)
        gap = np.minimum(gap, dx[x])
        gap[placed] = -1.0
    return f


def _complete(dx: np.ndarray, dy: np.ndarray, f: np.ndarray) -> list[tuple[int, int]]:
    """Give every Y point missed by f its cheapest X partner."""
    pairs = [(i, int(j)) for i, j in enumerate(f)]
    covered = np.zeros(dy.shape[0], dtype=bool)
    covered[f] = True
    for j in np.flatnonzero(~covered):
        I = np.fromiter((p[0] for p in pairs), dtype=int)
        J = np.fromiter((p[1] for p in pairs), dtype=int)
        cost = np.abs(dx[:, I] - dy[j, J][None, :]).max(axis=1)
        pairs.append((int(np.argmin(cost)), int(j)))
    return pairs


def _dis(dx: np.ndarray, dy: np.ndarray, pairs: list[tuple[int, int]]) -> float:
    I = np.fromiter((p[0] for p in pairs), dtype=int)
    J = np.fromiter((p[1] for p in pairs), dtype=int)
    return float(np.max(np.abs(dx[np.ix_(I, I)] - dy[np.ix_(J, J)])))


def _improve(dx: np.ndarray, dy: np.ndarray, pairs: list[tuple[int, int]], max_iter: int = 200):
    """Re-point one end of a worst pair while that lowers the distortion."""
    I = np.fromiter((p[0] for p in pairs), dtype=int)
    J = np.fromiter((p[1] for p in pairs), dtype=int)
    M = np.abs(dx[np.ix_(I, I)] - dy[np.ix_(J, J)])
    cur = float(M.max())
    n = len(I)
    if n < 2:
        return pairs, cur
    for _ in range(max_iter):
        k1, k2 = np.unravel_index(np.argmax(M), M.shape)
        improved = False
        for k in dict.fromkeys((int(k1), int(k2))):
            keep = np.ones(n, dtype=bool)
            keep[k] = False
            rest = float(M[np.ix_(keep, keep)].max())
            if rest >= cur:
                continue
            Ik, Jk = I[keep], J[keep]
            # move the Y end (X end fixed), then the X end; coverage must survive
            opts = []
            ys = np.arange(dy.shape[0]) if np.any(Jk == J[k]) else np.array([J[k]])
            cost = np.abs(dx[I[k], Ik][None, :] - dy[np.ix_(ys, Jk)]).max(axis=1)
            c = int(np.argmin(cost))
            opts.append((max(rest, float(cost[c])), I[k], int(ys[c])))
            xs = np.arange(dx.shape[0]) if np.any(Ik == I[k]) else np.array([I[k]])
            cost = np.abs(dx[np.ix_(xs, Ik)] - dy[J[k], Jk][None, :]).max(axis=1)
            c = int(np.argmin(cost))
            opts.append((max(rest, float(cost[c])), int(xs[c]), J[k]))
            new, i_new, j_new = min(opts, key=lambda o: o[0])
            if new < cur:
                I[k], J[k] = i_new, j_new
                M[k, :] = M[:, k] = np.abs(dx[i_new, I] - dy[j_new, J])
                cur = float(M.max())
                improved = True
                break
        if not improved:
            break
    return [(int(i), int(j)) for i, j in zip(I, J)], cur


def gh_upper_greedy(X, Y, seeds: int = 8) -> tuple[float, Correspondence]:
    """Upper bound on GH from a heuristic correspondence.

    Seeds the map at the most eccentric point of X paired with each of
    the `seeds` most eccentric points of Y, grows it in farthest-point
    order, covers the rest of Y, then re-points single pairs.  Both
    directions are tried and the smaller distortion wins, so the bound is
    always witnessed by a valid correspondence.
    """
    dx, dy = _mat(X), _mat(Y)
    nx, ny = dx.shape[0], dy.shape[0]
    best_val, best_pairs = np.inf, None
    for flip in (False, True):
        a, b = (dy, dx) if flip else (dx, dy)
        ea, eb = eccentricity(a), eccentricity(b)
        sx = int(np.argmax(ea))
        for sy in np.argsort(-eb, kind="stable")[:seeds]:
            f = _greedy_map(a, b, sx, int(sy))
            pairs = _complete(a, b, f)
            pairs, val = _improve(a, b, pairs)
            if val < best_val:
                best_val = val
                best_pairs = [(j, i) for i, j in pairs] if flip else pairs
    return 0.5 * best_val, Correspondence(tuple(best_pairs), nx, ny)


def gh_bounds(X, Y, cap: int = EXACT_CAP) -> dict:
    """``{"lower", "upper", "exact"?, "witness"}`` as used by the CLI."""
    lower = gh_lower_diam(X, Y)
    upper, witness = gh_upper_greedy(X, Y)
    out = {"lower": lower, "upper": upper}
    if max(len(_mat(X)), len(_mat(Y))) <= cap:
        ex = gh_exact(X, Y, cap)
        out["exact"] = ex.value
        witness = ex.witness
    out["witness"] = witness.to_list()
    return out

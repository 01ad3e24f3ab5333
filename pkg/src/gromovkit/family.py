"""A continuous family of metric spaces through prescribed anchor spaces.

For a parameter point ``s`` in the unit square and a branch ``k``, the
space ``Z = P u spider`` carries the pseudo-metric ``D[s, k]``:

* on the product ``P = X_1 x ... x X_{n+1}``, the l2 product with factor
  ``i`` scaled by ``zeta_i(s)``;
* on the spider, ``xi(s)`` times the tree metric with leg parameters
  ``rho(s, k)``;
* across, distances pass through the wedge point ``p`` (glued to ``1_0``).

At anchor ``v_i`` everything except ``X_i`` collapses, so the quotient is
``X_i`` itself.  Elsewhere ``D[s, k]`` is a genuine metric and the spider
block carries enough information to read ``(s, k)`` back.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .constructions import glue_matrices, product_labels, product_matrix
from .gh import EXACT_CAP, gh_exact, gh_lower_diam, gh_upper_greedy, gh_upper_same_labels
from .metric import (
    TRIANGLE_TOL,
    ZERO_SNAP,
    FiniteMetricSpace,
    PseudoMetricMatrix,
    diameter,
    from_dict,
    quotient,
    to_dict,
    validate,
)
from .spider import SpiderParams, fingerprint, spider_layout, spider_matrix

__all__ = [
    "FamilyConfig",
    "ConfigError",
    "BranchSelectionError",
    "default_config",
    "grid_points",
    "anchor_index",
    "zeta",
    "xi",
    "rho",
    "build_E",
    "build_D",
    "build_F",
    "spider_block",
    "collision_table",
    "select_branch",
    "InjectivityReport",
    "injectivity_sweep",
    "continuity_constant",
    "continuity_sweep",
    "SweepResult",
    "sweep",
    "sine_curve",
]


class ConfigError(ValueError):
    pass


class BranchSelectionError(RuntimeError):
    def __init__(self, table: np.ndarray):
        super().__init__(f"every branch collides with some anchor; collision table:\n{table.astype(int)}")
        self.table = table


@dataclass(frozen=True, eq=False)
class FamilyConfig:
    """Anchors, where they sit in the unit square, and discretization.

    ``wedge[i]`` is the point of anchor ``i`` used for the wedge point
    ``p`` (and as base point for the pointed constructions).  ``m``
    defaults to ``n + 2`` branches.
    """

    anchors: tuple[FiniteMetricSpace, ...]
    anchor_points: tuple[tuple[float, float], ...]
    grid: int = 16
    m: int | None = None
    N: int = 8
    m_g: int = 16
    wedge: tuple[int, ...] | None = None
    max_product: int = 125

    def __post_init__(self):
        anchors = tuple(self.anchors)
        pts = tuple((float(a), float(b)) for a, b in self.anchor_points)
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "anchor_points", pts)
        if len(anchors) < 2 or len(anchors) != len(pts):
            raise ConfigError("need n + 1 >= 2 anchors, one parameter point each")
        if len(set(pts)) != len(pts):
            raise ConfigError(f"anchor parameter points must be distinct: {pts}")
        if any(not (0.0 <= c <= 1.0) for p in pts for c in p):
            raise ConfigError("anchor parameter points must lie in the unit square")
        if self.m is None:
            object.__setattr__(self, "m", len(anchors) + 1)
        if self.m < 2:
            raise ConfigError("need at least two branches")
        if self.N < 3:
            raise ConfigError("the spider needs N >= 3 legs to encode (s1, s2, branch)")
        if self.grid < 2:
            raise ConfigError("grid needs at least 2 points per side")
        wedge = self.wedge if self.wedge is not None else (0,) * len(anchors)
        if len(wedge) != len(anchors) or any(not 0 <= w < len(X) for w, X in zip(wedge, anchors)):
            raise ConfigError(f"bad wedge indices {wedge}")
        object.__setattr__(self, "wedge", tuple(int(w) for w in wedge))
        if self.product_size > self.max_product:
            raise ConfigError(f"product has {self.product_size} points, cap is {self.max_product}")

    @property
    def n_anchors(self) -> int:
        return len(self.anchors)

    @property
    def product_size(self) -> int:
        return int(np.prod([len(X) for X in self.anchors]))

    @property
    def wedge_index(self) -> int:
        return int(np.ravel_multi_index(self.wedge, [len(X) for X in self.anchors]))

    def with_grid(self, grid: int) -> "FamilyConfig":
        return FamilyConfig(self.anchors, self.anchor_points, grid, self.m, self.N, self.m_g, self.wedge, self.max_product)

    def to_dict(self) -> dict:
        return {
            "anchors": [to_dict(X) for X in self.anchors],
            "anchor_points": [list(p) for p in self.anchor_points],
            "grid": self.grid,
            "m": self.m,
            "N": self.N,
            "m_g": self.m_g,
            "wedge": list(self.wedge),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "FamilyConfig":
        try:
            anchors = tuple(from_dict(a) for a in obj["anchors"])
            pts = tuple(tuple(p) for p in obj["anchor_points"])
        except KeyError as exc:
            raise ConfigError(f"config is missing {exc}") from None
        kw = {k: obj[k] for k in ("grid", "m", "N", "m_g") if obj.get(k) is not None}
        if obj.get("wedge") is not None:
            kw["wedge"] = tuple(obj["wedge"])
        return cls(anchors, pts, **kw)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1))

    @classmethod
    def load(cls, path) -> "FamilyConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def default_config(grid: int = 16) -> FamilyConfig:
    """Three collinear points vs. the corners of a unit square, at opposite corners of H."""
    path = FiniteMetricSpace.from_points(np.array([[0.0], [1.0], [2.0]]), ["a0", "a1", "a2"])
    square = FiniteMetricSpace.from_points(
        np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]), ["b0", "b1", "b2", "b3"]
    )
    return FamilyConfig((path, square), ((0.0, 0.0), (1.0, 1.0)), grid=grid)


def grid_points(grid: int) -> np.ndarray:
    """``grid x grid`` vertices of the unit square, first coordinate slowest."""
    t = np.arange(grid) / (grid - 1)
    s1, s2 = np.meshgrid(t, t, indexing="ij")
    return np.column_stack([s1.ravel(), s2.ravel()])


def _anchor_dists(s, cfg: FamilyConfig) -> np.ndarray:
    v = np.asarray(cfg.anchor_points)
    return np.hypot(v[:, 0] - s[0], v[:, 1] - s[1])


def anchor_index(s, cfg: FamilyConfig, tol: float = 1e-12) -> int | None:
    r = _anchor_dists(s, cfg)
    i = int(np.argmin(r))
    return i if r[i] <= tol else None


def zeta(i: int, s, cfg: FamilyConfig) -> float:
    """Weight of factor i: ``g / (g + |s - v_i|)`` with g the distance to the other anchors.

    Equals 1 exactly at ``v_i`` and 0 exactly at the other anchors.
    """
    r = _anchor_dists(s, cfg)
    g = float(np.min(np.delete(r, i)))
    return g / (g + float(r[i]))


def xi(s, cfg: FamilyConfig) -> float:
    """Spider scale ``min(1, distance to the nearest anchor)``."""
    return min(1.0, float(np.min(_anchor_dists(s, cfg))))


def rho(s, k: int, cfg: FamilyConfig) -> SpiderParams:
    """Leg parameters for ``(s, k)``; branches merge where ``xi = 0``.

    ``a_1``, ``a_2`` encode ``s``, ``a_3`` encodes ``xi(s) * (k - 1) / (m - 1)``,
    and the remaining legs sit at the lower ends of their intervals.
    """
    if not 1 <= k <= cfg.m:
        raise ValueError(f"branch {k} not in 1..{cfg.m}")
    u = np.zeros(cfg.N)
    u[0], u[1] = s[0], s[1]
    u[2] = xi(s, cfg) * (k - 1) / (cfg.m - 1)
    return SpiderParams.from_unit(u)


def build_E(s, cfg: FamilyConfig) -> PseudoMetricMatrix:
    """Weighted l2 product of the anchors on ``P``."""
    if cfg.product_size > cfg.max_product:
        raise ConfigError(f"product has {cfg.product_size} points, cap is {cfg.max_product}")
    w = [zeta(i, s, cfg) for i in range(cfg.n_anchors)]
    d = product_matrix([X.dist for X in cfg.anchors], w)
    return PseudoMetricMatrix(product_labels([X.labels for X in cfg.anchors]), d)


def _spider_labels(cfg: FamilyConfig) -> list[str]:
    legs, s = spider_layout(cfg.N, cfg.m_g)
    out = []
    for t, (i, x) in enumerate(zip(legs, s)):
        if t == 0:
            out.append("Y:center")
        elif t != cfg.m_g:
            out.append(f"Y:{i}:{int(round(x * cfg.m_g))}/{cfg.m_g}")
    return out


def build_D(s, k: int, cfg: FamilyConfig) -> PseudoMetricMatrix:
    """The glued pseudo-metric on ``Z``: product block first, then spider points."""
    E = build_E(s, cfg)
    legs, t = spider_layout(cfg.N, cfg.m_g)
    R = xi(s, cfg) * spider_matrix(rho(s, k, cfg).full(), legs, t)
    # 1_0 sits at layout index m_g
    h = glue_matrices(E.dist, R, cfg.wedge_index, cfg.m_g)
    return PseudoMetricMatrix(E.labels + tuple(_spider_labels(cfg)), h)


def spider_block(cfg: FamilyConfig) -> np.ndarray:
    """Indices into Z of the spider points, in spider layout order."""
    nP = cfg.product_size
    n_sp = (cfg.N + 1) * cfg.m_g + 1
    idx = np.empty(n_sp, dtype=int)
    for t in range(n_sp):
        idx[t] = cfg.wedge_index if t == cfg.m_g else nP + t - (t > cfg.m_g)
    return idx


def build_F(s, k: int, cfg: FamilyConfig) -> FiniteMetricSpace:
    i = anchor_index(s, cfg)
    if i is not None:
        return cfg.anchors[i]
    return quotient(build_D(s, k, cfg))[0]


def _anchor_gh(cfg: FamilyConfig) -> np.ndarray:
    n = cfg.n_anchors
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            X, Y = cfg.anchors[i], cfg.anchors[j]
            if max(len(X), len(Y)) <= EXACT_CAP:
                v = gh_exact(X, Y).value
            else:
                v = gh_lower_diam(X, Y)
            out[i, j] = out[j, i] = v
    return out


def _isometric(F: PseudoMetricMatrix, X: PseudoMetricMatrix, tol: float = 1e-9) -> bool:
    if len(F) != len(X):
        return False
    if len(F) <= EXACT_CAP:
        return gh_exact(F, X).value <= tol
    if gh_lower_diam(F, X) > tol:
        return False
    return gh_upper_greedy(F, X)[0] <= tol


def _threshold_matcher(threshold: float) -> Callable:
    def match(F, X) -> bool:
        if gh_lower_diam(F, X) >= threshold:
            return False
        return gh_upper_greedy(F, X, seeds=2)[0] < threshold

    return match


def collision_table(cfg: FamilyConfig, grid: int | None = None, matcher: Callable | None = None) -> np.ndarray:
    """``table[i, j]`` is True when some non-anchor grid point s has ``F(s, j+1)`` matching anchor i."""
    grid = grid or cfg.grid
    match = matcher or _isometric
    sizes = {len(X) for X in cfg.anchors}
    table = np.zeros((cfg.n_anchors, cfg.m), dtype=bool)
    for s in grid_points(grid):
        if anchor_index(s, cfg) is not None:
            continue
        for j in range(cfg.m):
            if table[:, j].all():
                continue
            if matcher is None:
                # isometry needs equal cardinality; count classes before quotienting
                D = build_D(s, j + 1, cfg)
                n_cls = connected_components(D.dist < ZERO_SNAP, directed=False)[0]
                if n_cls not in sizes:
                    continue
            F = build_F(s, j + 1, cfg)
            for i, X in enumerate(cfg.anchors):
                if not table[i, j] and match(F, X):
                    table[i, j] = True
    return table


def select_branch(
    cfg: FamilyConfig,
    grid: int | None = None,
    matcher: Callable | None = None,
    threshold: float | None = None,
) -> int:
    """Smallest branch whose column of the collision table is empty.

    By default a grid space "matches" an anchor only when it is isometric
    to it (same size, GH zero).  Passing ``threshold`` switches to the
    looser test ``GH upper bound < threshold``; ``threshold="auto"`` uses
    half the smallest pairwise GH distance between anchors.

    Raises
    ------
    BranchSelectionError
        Every column has a collision.
    """
    if matcher is None and threshold is not None:
        if threshold == "auto":
            gh = _anchor_gh(cfg)
            threshold = 0.5 * float(gh[~np.eye(cfg.n_anchors, dtype=bool)].min())
        matcher = _threshold_matcher(float(threshold))
    table = collision_table(cfg, grid, matcher)
    free = np.flatnonzero(~table.any(axis=0))
    if free.size == 0:
        raise BranchSelectionError(table)
    return int(free[0]) + 1


@dataclass
class InjectivityReport:
    points: np.ndarray
    branches: tuple[int, ...]
    fingerprints: np.ndarray = field(repr=False)
    nearest: np.ndarray = field(repr=False)
    anchors_skipped: int = 0

    @property
    def min_separation(self) -> float:
        return float(self.nearest.min()) if self.nearest.size else math.inf

    @property
    def ok(self) -> bool:
        return self.min_separation > 0


def injectivity_sweep(cfg: FamilyConfig, grid: int | None = None, k: int | Sequence[int] = 1) -> InjectivityReport:
    """Fingerprint the spider block of ``D[s, k]`` for every non-anchor grid point.

    Rows of ``fingerprints`` are ``(K, a_1, ..., a_N)``, one per
    ``(point, branch)`` with branches varying fastest.  ``nearest`` holds
    each row's sup-norm distance to the closest other row.
    """
    grid = grid or cfg.grid
    branches = (k,) if isinstance(k, (int, np.integer)) else tuple(k)
    block = spider_block(cfg)
    pts, rows = [], []
    skipped = 0
    for s in grid_points(grid):
        if anchor_index(s, cfg) is not None:
            skipped += 1
            continue
        pts.append(s)
        for b in branches:
            D = build_D(s, b, cfg)
            K, a = fingerprint(D.dist[np.ix_(block, block)])
            rows.append((K,) + a)
    fp = np.asarray(rows)
    if len(fp) > 1:
        sep = np.abs(fp[:, None, :] - fp[None, :, :]).max(axis=-1)
        np.fill_diagonal(sep, np.inf)
        nearest = sep.min(axis=1)
    else:
        nearest = np.full(len(fp), np.inf)
    return InjectivityReport(np.asarray(pts), branches, fp, nearest, skipped)


def continuity_constant(cfg: FamilyConfig) -> float:
    """C with ``gh_upper_same_labels(D[s,k], D[t,k]) <= C |s - t|``.

    Each ``zeta_i`` is ``1/delta_i``-Lipschitz (``delta_i`` the distance
    from ``v_i`` to the nearest other anchor) and ``xi`` is 1-Lipschitz.
    The spider has diameter at most 3/2 and its parameters move by at
    most ``|s - t| / 4`` in tau, so its block moves by ``2 |s - t|`` at most.
    """
    v = np.asarray(cfg.anchor_points)
    r = np.hypot(v[:, None, 0] - v[None, :, 0], v[:, None, 1] - v[None, :, 1])
    np.fill_diagonal(r, np.inf)
    delta = r.min(axis=1)
    lip_E = math.sqrt(sum((diameter(X) / dl) ** 2 for X, dl in zip(cfg.anchors, delta)))
    return 0.5 * (lip_E + 2.0)


def continuity_sweep(cfg: FamilyConfig, grid: int | None = None, k: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Identity-correspondence GH bound across every horizontal and vertical grid edge.

    Returns
    -------
    edges : ndarray, shape (n_edges, 4)
        Rows ``(index_s, index_t, bound, |s - t|)`` with indices into
        :func:`grid_points`.
    per_point : ndarray, shape (grid * grid,)
        Largest bound over the edges touching each point.
    """
    grid = grid or cfg.grid
    pts = grid_points(grid)
    edges = []
    prev = None
    for i in range(grid):
        row = [build_D(pts[i * grid + j], k, cfg) for j in range(grid)]
        for j in range(grid):
            a = i * grid + j
            if j + 1 < grid:
                edges.append((a, a + 1, gh_upper_same_labels(row[j], row[j + 1]), 1.0 / (grid - 1)))
            if prev is not None:
                edges.append((a - grid, a, gh_upper_same_labels(prev[j], row[j]), 1.0 / (grid - 1)))
        prev = row
    edges = np.asarray(edges)
    per_point = np.zeros(len(pts))
    for a, b, val, _ in edges:
        per_point[int(a)] = max(per_point[int(a)], val)
        per_point[int(b)] = max(per_point[int(b)], val)
    return edges, per_point


@dataclass
class SweepResult:
    k: int
    rows: list[dict]
    injectivity: InjectivityReport = field(repr=False)

    COLUMNS = ("s1", "s2", "k", "min_fingerprint_sep", "continuity_bound", "is_metric")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=self.COLUMNS)
            w.writeheader()
            for r in self.rows:
                w.writerow(r)


def sweep(cfg: FamilyConfig, grid: int | None = None, k: int | None = None) -> SweepResult:
    """Select a branch, then tabulate the grid: one row per non-anchor point."""
    grid = grid or cfg.grid
    if k is None:
        k = select_branch(cfg, grid)
    inj = injectivity_sweep(cfg, grid, k)
    _, per_point = continuity_sweep(cfg, grid, k)
    rows = []
    r = 0
    for idx, s in enumerate(grid_points(grid)):
        if anchor_index(s, cfg) is not None:
            continue
        D = build_D(s, k, cfg)
        rows.append(
            {
                "s1": float(s[0]),
                "s2": float(s[1]),
                "k": k,
                "min_fingerprint_sep": float(inj.nearest[r]),
                "continuity_bound": float(per_point[idx]),
                "is_metric": bool(validate(D, require_metric=True, tol=TRIANGLE_TOL)),
            }
        )
        r += 1
    return SweepResult(k, rows, inj)


def sine_curve(n: int, samples: int = 128, pool: int = 50_000) -> FiniteMetricSpace:
    """Samples of ``{(x, sin(1/x)) : 2**-n <= x <= 1}`` with plane distances.

    A dense pool (uniform in x and uniform in 1/x) is thinned to
    `samples` points by farthest-point sampling from ``(1, sin 1)``, which
    keeps the covering radius near the best possible for the budget.
    """
    if n == 0:
        return FiniteMetricSpace.from_points(np.array([[1.0, math.sin(1.0)]]), ["x0"])
    lo = 2.0 ** (-n)
    x = np.unique(np.concatenate([np.linspace(lo, 1.0, pool), 1.0 / np.linspace(1.0, 1.0 / lo, pool)]))
    x = x[(x >= lo) & (x <= 1.0)]
    cloud = np.column_stack([x, np.sin(1.0 / x)])
    picked = [len(cloud) - 1]
    gap = np.hypot(*(cloud - cloud[-1]).T)
    for _ in range(min(samples, len(cloud)) - 1):
        i = int(np.argmax(gap))
        picked.append(i)
        gap = np.minimum(gap, np.hypot(*(cloud - cloud[i]).T))
    pts = cloud[np.sort(picked)]
    return FiniteMetricSpace.from_points(pts, [f"x{i}" for i in range(len(pts))])

"""Building new finite metric spaces from old ones."""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .metric import FiniteMetricSpace, MetricStructureError, PseudoMetricMatrix

__all__ = [
    "glue",
    "glue_matrices",
    "l2_product",
    "product_labels",
    "product_matrix",
    "scale",
    "ball_restrict",
    "ball_indices",
    "path_space",
]


def glue_matrices(d: np.ndarray, e: np.ndarray, px: int, py: int) -> np.ndarray:
    """Wedge two distance matrices at ``px`` ~ ``py``.

    The result lists X's points first, then Y's points with ``py`` removed.
    Cross distances go through the wedge point: ``d(x, px) + e(py, y)``.
    """
    keep = np.array([j for j in range(e.shape[0]) if j != py], dtype=int)
    nx, ny = d.shape[0], len(keep)
    h = np.empty((nx + ny, nx + ny))
    h[:nx, :nx] = d
    h[nx:, nx:] = e[np.ix_(keep, keep)]
    cross = d[:, px][:, None] + e[py, keep][None, :]
    h[:nx, nx:] = cross
    h[nx:, :nx] = cross.T
    return h


def glue(X: PseudoMetricMatrix, Y: PseudoMetricMatrix, p_x: str, p_y: str) -> FiniteMetricSpace:
    """Amalgamate X and Y along a single point.

    ``p_x`` and ``p_y`` are identified and the merged point keeps ``p_x``'s
    label.  The restrictions to X and to Y are the original matrices,
    entry for entry.

    Raises
    ------
    KeyError
        A wedge label is missing.
    MetricStructureError
        X and Y share a label other than the wedge point.
    """
    px, py = X.index(p_x), Y.index(p_y)
    y_rest = [lab for j, lab in enumerate(Y.labels) if j != py]
    clash = set(X.labels) & set(y_rest)
    if clash:
        raise MetricStructureError(f"labels {sorted(clash)} occur in both spaces; relabel one first")
    h = glue_matrices(X.dist, Y.dist, px, py)
    return FiniteMetricSpace(X.labels + tuple(y_rest), h)


def product_labels(label_lists: Sequence[Sequence[str]]) -> tuple[str, ...]:
    return tuple("(" + ",".join(combo) + ")" for combo in itertools.product(*label_lists))


def product_matrix(mats: Sequence[np.ndarray], weights: Sequence[float] | None = None) -> np.ndarray:
    """Weighted l2 product of distance matrices, first factor slowest."""
    sizes = [m.shape[0] for m in mats]
    total = np.zeros(sizes + sizes)
    nf = len(mats)
    for f, m in enumerate(mats):
        w = 1.0 if weights is None else float(weights[f])
        shape = [1] * (2 * nf)
        shape[f] = sizes[f]
        shape[nf + f] = sizes[f]
        wm = w * m
        total = total + (wm * wm).reshape(shape)
    n = int(np.prod(sizes))
    return np.sqrt(total.reshape(n, n))


def l2_product(X: PseudoMetricMatrix, Y: PseudoMetricMatrix) -> FiniteMetricSpace:
    """Cartesian product with ``sqrt(d(x,u)^2 + e(y,v)^2)``; labels ``"(x,y)"``."""
    dx, dy = X.dist, Y.dist
    nx, ny = len(X), len(Y)
    h = np.hypot(dx[:, None, :, None], dy[None, :, None, :]).reshape(nx * ny, nx * ny)
    return FiniteMetricSpace(product_labels([X.labels, Y.labels]), h)


def scale(L: float, X: PseudoMetricMatrix) -> PseudoMetricMatrix:
    if not (L > 0 and math.isfinite(L)):
        raise ValueError(f"scale factor must be a positive real, got {L!r}")
    return type(X)(X.labels, L * X.dist)


def ball_indices(X: PseudoMetricMatrix, center: int, r: float) -> np.ndarray:
    return np.flatnonzero(X.dist[center] <= r)


def ball_restrict(X: PseudoMetricMatrix, center: str, r: float) -> PseudoMetricMatrix:
    """Closed ball ``{y : d(center, y) <= r}``; ``r = inf`` keeps everything."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    c = X.index(center)
    return X.subspace(ball_indices(X, c, r))


def path_space(n: int, step: float = 1.0, prefix: str = "") -> FiniteMetricSpace:
    """``n`` equally spaced points on a line."""
    x = step * np.arange(n, dtype=float)
    return FiniteMetricSpace(tuple(f"{prefix}{i}" for i in range(n)), np.abs(x[:, None] - x[None, :]))

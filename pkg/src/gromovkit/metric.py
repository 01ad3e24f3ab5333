"""Finite (pseudo-)metric spaces stored as labelled distance matrices.

Everything else in the package passes these values around.  They are
immutable: the distance array is copied on construction and marked
read-only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

__all__ = [
    "TRIANGLE_TOL",
    "ZERO_SNAP",
    "MetricStructureError",
    "MetricAxiomError",
    "PseudoMetricMatrix",
    "FiniteMetricSpace",
    "Violation",
    "ValidationReport",
    "validate",
    "uniform_distance",
    "quotient",
    "diameter",
    "eccentricity",
    "to_dict",
    "from_dict",
    "save_space",
    "load_space",
]

# Triangle slack allowed for matrices produced by floating-point arithmetic.
TRIANGLE_TOL = 1e-9
# Off-diagonal entries below this are treated as exact zeros by `quotient`.
ZERO_SNAP = 1e-12


class MetricStructureError(ValueError):
    """Malformed input: not square, non-finite, or mismatched labels."""


class MetricAxiomError(ValueError):
    """A matrix failed one of the (pseudo-)metric axioms."""

    def __init__(self, message: str, report: "ValidationReport | None" = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True, eq=False)
class PseudoMetricMatrix:
    """Labelled square distance matrix; zero off-diagonal entries allowed.

    Construction only checks structure (shape, finiteness, labels).  Use
    :func:`validate` to check the axioms.
    """

    labels: tuple[str, ...]
    dist: np.ndarray = field(repr=False)

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        dist = np.array(self.dist, dtype=float, copy=True)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise MetricStructureError(f"distance matrix must be square, got shape {dist.shape}")
        if dist.shape[0] != len(labels):
            raise MetricStructureError(
                f"{len(labels)} labels for a {dist.shape[0]}x{dist.shape[0]} matrix"
            )
        if len(set(labels)) != len(labels):
            raise MetricStructureError("labels must be unique")
        if not np.all(np.isfinite(dist)):
            raise MetricStructureError("distance matrix has non-finite entries")
        dist.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", dist)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise KeyError(f"label {label!r} not in space") from None

    def subspace(self, indices: Iterable[int]):
        """Induced sub-matrix on `indices`, in the given order."""
        idx = np.asarray(list(indices), dtype=int)
        return type(self)(tuple(self.labels[i] for i in idx), self.dist[np.ix_(idx, idx)])

    def relabel(self, labels: Sequence[str]):
        return type(self)(tuple(labels), self.dist)

    def with_prefix(self, prefix: str):
        return self.relabel([f"{prefix}{x}" for x in self.labels])

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, labels={list(self.labels[:6])}{'...' if self.n > 6 else ''})"


class FiniteMetricSpace(PseudoMetricMatrix):
    """A `PseudoMetricMatrix` intended to be a genuine metric.

    The subclass is nominal; axioms are checked by :func:`validate` with
    ``require_metric=True``.
    """

    @classmethod
    def from_points(cls, points: np.ndarray, labels: Sequence[str] | None = None) -> "FiniteMetricSpace":
        """Euclidean distances between the rows of `points`."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[0] == 1 and np.ndim(points) == 1:
            pts = pts.T
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        if labels is None:
            labels = [str(i) for i in range(len(pts))]
        return cls(tuple(labels), dist)

    @classmethod
    def point(cls, label: str = "0") -> "FiniteMetricSpace":
        return cls((label,), np.zeros((1, 1)))


@dataclass(frozen=True)
class Violation:
    axiom: str
    indices: tuple[int, ...]
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def axioms(self) -> set[str]:
        return {v.axiom for v in self.violations}


def _as_matrix(m) -> np.ndarray:
    if isinstance(m, PseudoMetricMatrix):
        return m.dist
    d = np.asarray(m, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise MetricStructureError(f"distance matrix must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise MetricStructureError("distance matrix has non-finite entries")
    return d


def validate(m, require_metric: bool = False, tol: float = 0.0) -> ValidationReport:
    """Check the pseudo-metric axioms, listing every violation with witnesses.

    Parameters
    ----------
    m : PseudoMetricMatrix or array-like
        Square distance matrix.
    require_metric : bool
        Also flag zero distances between distinct points.
    tol : float
        Absolute slack for the triangle inequality.  Use 0 for hand-entered
        matrices and ``TRIANGLE_TOL`` for computed ones.

    Returns
    -------
    ValidationReport
        Empty (truthy) when every axiom holds.  Triangle violations name the
        pair ``(i, j)`` and the worst intermediate point ``k``.

    Raises
    ------
    MetricStructureError
        Non-square or non-finite input.
    """
    d = _as_matrix(m)
    n = d.shape[0]
    out: list[Violation] = []

    for i in np.flatnonzero(np.diag(d) != 0):
        out.append(Violation("zero-diagonal", (int(i), int(i)), f"d={d[i, i]:.17g}"))
    for i, j in zip(*np.nonzero(d < 0)):
        out.append(Violation("nonnegativity", (int(i), int(j)), f"d={d[i, j]:.17g}"))
    for i, j in zip(*np.nonzero(np.triu(d != d.T, 1))):
        out.append(Violation("symmetry", (int(i), int(j)), f"{d[i, j]:.17g} != {d[j, i]:.17g}"))

    if n:
        # worst detour d(i,k) + d(k,j) over k, tracked one k at a time
        best = np.full((n, n), np.inf)
        arg = np.zeros((n, n), dtype=int)
        for k in range(n):
            via = d[:, k, None] + d[None, k, :]
            better = via < best
            best[better] = via[better]
            arg[better] = k
        bad = np.triu(d > best + tol, 1) | np.tril(d > best + tol, -1)
        for i, j in zip(*np.nonzero(bad)):
            k = int(arg[i, j])
            out.append(
                Violation(
                    "triangle",
                    (int(i), int(j), k),
                    f"d[{i},{j}]={d[i, j]:.17g} > d[{i},{k}]+d[{k},{j}]={best[i, j]:.17g}",
                )
            )

    if require_metric:
        for i, j in zip(*np.nonzero(np.triu(d == 0, 1))):
            out.append(Violation("identity-of-indiscernibles", (int(i), int(j)), "d=0"))

    return ValidationReport(tuple(out))


def uniform_distance(d, e) -> float:
    """Largest entrywise difference between two pseudo-metrics on one label set."""
    if isinstance(d, PseudoMetricMatrix) and isinstance(e, PseudoMetricMatrix):
        if d.labels != e.labels:
            raise MetricStructureError("pseudo-metrics live on different label sets")
    a, b = _as_matrix(d), _as_matrix(e)
    if a.shape != b.shape:
        raise MetricStructureError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def quotient(m: PseudoMetricMatrix, tol: float = TRIANGLE_TOL) -> tuple[FiniteMetricSpace, dict[str, str]]:
    """Merge zero-distance classes of a pseudo-metric.

    Entries below ``ZERO_SNAP`` count as zero.  Each class is represented
    by its lexicographically least label, classes are ordered by their
    first member, and the distance between classes is read off the
    representatives' row.

    Returns
    -------
    space : FiniteMetricSpace
    class_map : dict
        Input label -> representative label.
    """
    report = validate(m, tol=tol)
    if not report:
        raise MetricAxiomError(f"not a pseudo-metric: {report.violations[0]}", report)
    d = m.dist
    zero = d < ZERO_SNAP
    _, comp = connected_components(zero, directed=False)

    reps: dict[int, int] = {}
    for i, c in enumerate(comp):
        j = reps.get(c)
        if j is None or m.labels[i] < m.labels[j]:
            reps[c] = i
    order = []
    seen = set()
    for c in comp:
        if c not in seen:
            seen.add(c)
            order.append(reps[c])
    idx = np.asarray(order, dtype=int)
    sub = d[np.ix_(idx, idx)].copy()
    np.fill_diagonal(sub, 0.0)
    space = FiniteMetricSpace(tuple(m.labels[i] for i in idx), sub)
    class_map = {lab: m.labels[reps[comp[i]]] for i, lab in enumerate(m.labels)}
    return space, class_map


def diameter(m) -> float:
    d = _as_matrix(m)
    return float(d.max()) if d.size else 0.0


def eccentricity(m) -> np.ndarray:
    d = _as_matrix(m)
    return d.max(axis=1)


def to_dict(m: PseudoMetricMatrix) -> dict:
    return {"labels": list(m.labels), "dist": m.dist.tolist()}


def from_dict(obj: dict, cls=FiniteMetricSpace) -> PseudoMetricMatrix:
    try:
        return cls(tuple(obj["labels"]), np.asarray(obj["dist"], dtype=float))
    except KeyError as exc:
        raise MetricStructureError(f"space JSON is missing {exc}") from None


def save_space(m: PseudoMetricMatrix, path, **extra) -> None:
    """Write ``{"labels": [...], "dist": [[...]]}`` plus any extra keys.

    Python's float repr is shortest round-trip, so values reload bit-exactly.
    """
    obj = to_dict(m)
    obj.update(extra)
    Path(path).write_text(json.dumps(obj))


def load_space(path, cls=FiniteMetricSpace) -> PseudoMetricMatrix:
    return from_dict(json.loads(Path(path).read_text()), cls)

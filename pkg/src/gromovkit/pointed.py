"""Pointed spaces, rough isometries, and admissible gluings.

An ``(R, eps)``-rough isometry ``f`` from ``(X, d, a)`` to ``(Y, e, b)`` is
defined on the ball ``B(a, R)`` and satisfies

1. ``e(f(a), b) <= eps``;
2. every ``y`` with ``e(b, y) <= R - eps`` is within ``< eps`` of the image;
3. ``|d(x, y) - e(f(x), f(y))| <= eps`` on the ball.

Such an ``f`` yields a ``(t; a, b)``-admissible metric on ``X + Y`` for
every ``t > max(2 eps, 1 / (R - eps))``, which bounds the pointed GH
distance.  ``R = inf`` is allowed throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse import csr_array
from scipy.sparse.csgraph import shortest_path

from .constructions import ball_indices, product_labels, product_matrix
from .metric import TRIANGLE_TOL, FiniteMetricSpace, MetricAxiomError, from_dict, to_dict, validate

__all__ = [
    "PointedSpace",
    "RoughIsometryCert",
    "RoughIsometryError",
    "AdmissibilityReport",
    "check_rough_isometry",
    "check_admissible",
    "glue_from_rough_isometry",
    "pgh_upper",
    "lemma41_threshold",
    "pointed_product",
    "product_rough_isometry",
    "projection_rough_isometry",
    "sigma",
    "ball_product",
]


@dataclass(frozen=True, eq=False)
class PointedSpace:
    space: FiniteMetricSpace
    base: int = 0

    def __post_init__(self):
        if not 0 <= self.base < len(self.space):
            raise IndexError(f"base point {self.base} out of range for {len(self.space)} points")

    @property
    def dist(self) -> np.ndarray:
        return self.space.dist

    def __len__(self) -> int:
        return len(self.space)

    def ball(self, r: float) -> np.ndarray:
        return ball_indices(self.space, self.base, r)

    def to_dict(self) -> dict:
        return {**to_dict(self.space), "base": self.base}

    @classmethod
    def from_dict(cls, obj: dict) -> "PointedSpace":
        return cls(from_dict(obj), int(obj.get("base", 0)))


class RoughIsometryError(ValueError):
    """The map is not defined where it has to be."""


def _radius_to_json(r: float):
    return "inf" if math.isinf(r) else r


def _radius_from_json(r) -> float:
    return math.inf if r in ("inf", "Infinity", None) else float(r)


@dataclass(frozen=True)
class RoughIsometryCert:
    """Outcome of checking a candidate rough isometry.

    ``domain[k]`` maps to ``image[k]``; ``violations`` holds at most one
    witness per failed condition as ``(condition, indices, detail)``.
    """

    domain: tuple[int, ...]
    image: tuple[int, ...]
    R: float
    eps: float
    violations: tuple[tuple[int, tuple[int, ...], str], ...] = ()

    @property
    def verdict(self) -> bool:
        return not self.violations

    @property
    def mapping(self) -> dict[int, int]:
        return dict(zip(self.domain, self.image))

    def to_dict(self) -> dict:
        return {
            "domain": list(self.domain),
            "image": list(self.image),
            "R": _radius_to_json(self.R),
            "eps": self.eps,
            "verdict": self.verdict,
            "violations": [[c, list(w), msg] for c, w, msg in self.violations],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RoughIsometryCert":
        return cls(
            tuple(obj["domain"]),
            tuple(obj["image"]),
            _radius_from_json(obj["R"]),
            float(obj["eps"]),
            tuple((int(c), tuple(w), str(m)) for c, w, m in obj.get("violations", [])),
        )

    def dumps(self, X: PointedSpace | None = None, Y: PointedSpace | None = None) -> str:
        obj = self.to_dict()
        if X is not None:
            obj["X"] = X.to_dict()
        if Y is not None:
            obj["Y"] = Y.to_dict()
        return json.dumps(obj)


def check_rough_isometry(
    f: Mapping[int, int] | Sequence[int],
    X: PointedSpace,
    Y: PointedSpace,
    R: float,
    eps: float,
    tol: float = 0.0,
) -> RoughIsometryCert:
    """Check the three rough-isometry conditions on every point.

    Parameters
    ----------
    f : mapping or sequence
        Point index of X -> point index of Y.  A sequence is read as
        ``f[x]`` for every x; only the ball ``B(a, R)`` is used.
    R : float
        Radius, possibly ``math.inf``.
    eps : float
        Slack; must satisfy ``0 < eps < R``.
    tol : float
        Extra slack on conditions 1 and 3 for floating-point roundoff.

    Raises
    ------
    RoughIsometryError
        ``f`` misses a point of the ball or points outside Y.
    """
    if not (eps > 0 and R > eps):
        raise ValueError(f"need R > eps > 0, got R={R}, eps={eps}")
    fmap = dict(f) if isinstance(f, Mapping) else dict(enumerate(f))
    dom = X.ball(R)
    missing = [int(x) for x in dom if int(x) not in fmap]
    if missing:
        raise RoughIsometryError(f"map undefined on ball points {missing[:5]}")
    img = np.array([fmap[int(x)] for x in dom], dtype=int)
    if img.size and (img.min() < 0 or img.max() >= len(Y)):
        raise RoughIsometryError("map points outside Y")
    d, e = X.dist, Y.dist
    out = []

    base_gap = e[fmap[X.base], Y.base]
    if base_gap > eps + tol:
        out.append((1, (X.base, Y.base), f"e(f(a), b) = {float(base_gap)!r} > {eps!r}"))

    target = Y.ball(R - eps)
    near = e[np.ix_(target, np.unique(img))].min(axis=1)
    far = np.flatnonzero(near >= eps)
    if far.size:
        y = int(target[far[0]])
        out.append((2, (y,), f"y={y} is {float(near[far[0]])!r} from the image, needs < {eps!r}"))

    gap = np.abs(d[np.ix_(dom, dom)] - e[np.ix_(img, img)])
    if gap.size and gap.max() > eps + tol:
        i, j = np.unravel_index(np.argmax(gap), gap.shape)
        out.append((3, (int(dom[i]), int(dom[j])), f"distortion {float(gap[i, j])!r} > {eps!r}"))

    return RoughIsometryCert(tuple(int(x) for x in dom), tuple(int(y) for y in img), float(R), float(eps), tuple(out))


@dataclass(frozen=True)
class AdmissibilityReport:
    t: float
    failed: tuple[str, ...] = ()
    details: dict = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return not self.failed

    def __bool__(self) -> bool:
        return self.ok


CLAUSES = ("h|X2=d", "h|Y2=e", "h(a,b)<t", "B_h(a,1/t) in N_h(Y,t)", "B_h(b,1/t) in N_h(X,t)")


def check_admissible(h: np.ndarray, X: PointedSpace, Y: PointedSpace, t: float, tol: float = 0.0) -> AdmissibilityReport:
    """Check whether `h` (X's points first, then Y's) is ``(t; a, b)``-admissible.

    ``N_h(A, t)`` is the open t-neighbourhood, ``B_h(x, r)`` the closed ball.

    Raises
    ------
    MetricAxiomError
        `h` is not a metric on the disjoint union.
    """
    h = np.asarray(h, dtype=float)
    nx, ny = len(X), len(Y)
    if h.shape != (nx + ny, nx + ny):
        raise ValueError(f"h has shape {h.shape}, expected {(nx + ny, nx + ny)}")
    report = validate(h, require_metric=True, tol=TRIANGLE_TOL)
    if not report:
        raise MetricAxiomError(f"h is not a metric: {report.violations[0]}", report)
    if not t > 0:
        raise ValueError("t must be positive")
    failed, details = [], {}
    a, b = X.base, nx + Y.base
    xs, ys = np.arange(nx), np.arange(nx, nx + ny)

    dev = np.abs(h[:nx, :nx] - X.dist).max()
    if dev > tol:
        failed.append(CLAUSES[0])
        details[CLAUSES[0]] = float(dev)
    dev = np.abs(h[nx:, nx:] - Y.dist).max()
    if dev > tol:
        failed.append(CLAUSES[1])
        details[CLAUSES[1]] = float(dev)
    if not h[a, b] < t:
        failed.append(CLAUSES[2])
        details[CLAUSES[2]] = float(h[a, b])
    for clause, c, other in ((CLAUSES[3], a, ys), (CLAUSES[4], b, xs)):
        ball = np.flatnonzero(h[c] <= 1.0 / t)
        reach = h[np.ix_(ball, other)].min(axis=1)
        bad = ball[reach >= t]
        if bad.size:
            failed.append(clause)
            details[clause] = int(bad[0])
    return AdmissibilityReport(float(t), tuple(failed), details)


def glue_from_rough_isometry(cert: RoughIsometryCert, X: PointedSpace, Y: PointedSpace, tol: float = TRIANGLE_TOL) -> np.ndarray:
    """Metric on ``X + Y`` (X first) built from a certified rough isometry.

    Cross distances are ``min_z d(x, z) + eps + e(f(z), y)`` over the
    domain, followed by an all-pairs shortest-path pass.  Both blocks are
    then written back verbatim so the restrictions hold exactly.

    Raises
    ------
    ValueError
        The certificate failed, or the shortest-path pass moved a block
        entry by more than `tol`.
    """
    if not cert.verdict:
        raise ValueError(f"certificate failed: {cert.violations[0]}")
    d, e = X.dist, Y.dist
    nx = len(X)
    dom = np.asarray(cert.domain, dtype=int)
    img = np.asarray(cert.image, dtype=int)
    cross = (d[:, dom][:, :, None] + e[img, :][None, :, :]).min(axis=1) + cert.eps
    h = np.block([[d, cross], [cross.T, e]])
    # explicit sparse input: the dense path treats near-zero weights as missing edges
    repaired = shortest_path(csr_array(h), method="FW", directed=False)
    moved = max(np.abs(repaired[:nx, :nx] - d).max(), np.abs(repaired[nx:, nx:] - e).max())
    if moved > tol:
        raise ValueError(f"metric repair changed a restriction by {float(moved)!r}")
    repaired[:nx, :nx] = d
    repaired[nx:, nx:] = e
    return repaired


def lemma41_threshold(R: float, eps: float) -> float:
    """``max(2 eps, 1 / (R - eps))``; the second term vanishes for ``R = inf``."""
    return max(2.0 * eps, 0.0 if math.isinf(R) else 1.0 / (R - eps))


def pgh_upper(cert: RoughIsometryCert, X: PointedSpace | None = None, Y: PointedSpace | None = None) -> float:
    """Pointed GH upper bound from a certified rough isometry, clamped at 1/2.

    When X and Y are given the certificate is re-checked against them.
    """
    if X is not None and Y is not None:
        cert = check_rough_isometry(cert.mapping, X, Y, cert.R, cert.eps)
    if not cert.verdict:
        raise ValueError(f"certificate failed: {cert.violations[0]}")
    return min(lemma41_threshold(cert.R, cert.eps), 0.5)


def pointed_product(factors: Sequence[PointedSpace]) -> PointedSpace:
    """Unweighted l2 product, based at the tuple of base points."""
    d = product_matrix([F.dist for F in factors])
    labels = product_labels([F.space.labels for F in factors])
    base = int(np.ravel_multi_index([F.base for F in factors], [len(F) for F in factors]))
    return PointedSpace(FiniteMetricSpace(labels, d), base)


def product_rough_isometry(
    maps: Sequence[Sequence[int]],
    sources: Sequence[PointedSpace],
    targets: Sequence[PointedSpace],
    eps: float,
    tol: float = 1e-12,
) -> tuple[RoughIsometryCert, PointedSpace, PointedSpace]:
    """Coordinatewise product of ``(inf, eps)``-rough isometries.

    Returns the certificate for ``g = (f_1, ..., f_{n+1})`` at slack
    ``sqrt(n + 1) * eps`` together with the two product spaces.

    Raises
    ------
    ValueError
        Some factor map is not an ``(inf, eps)``-rough isometry.
    """
    if not (len(maps) == len(sources) == len(targets)) or not maps:
        raise ValueError("need one map per factor")
    for i, (f, S, T) in enumerate(zip(maps, sources, targets)):
        c = check_rough_isometry(f, S, T, math.inf, eps, tol=tol)
        if not c.verdict:
            raise ValueError(f"factor {i} is not an (inf, eps)-rough isometry: {c.violations[0]}")
    P_s, P_t = pointed_product(sources), pointed_product(targets)
    grids = np.meshgrid(*[np.asarray(f) for f in maps], indexing="ij")
    sizes_t = [len(T) for T in targets]
    g = np.ravel_multi_index([G.ravel() for G in grids], sizes_t)
    slack = math.sqrt(len(maps)) * eps
    return check_rough_isometry(g, P_s, P_t, math.inf, slack, tol=tol), P_s, P_t


def projection_rough_isometry(
    factors: Sequence[PointedSpace],
    i: int,
    R: float,
    eps: float,
    target: PointedSpace | None = None,
    tol: float = 1e-12,
) -> tuple[RoughIsometryCert, PointedSpace]:
    """Certify the projection onto factor `i` at slack ``2 sqrt(n) eps``.

    `factors` are balls around the base points; the projection is a good
    rough isometry when every other factor has radius at most `eps`.  A
    violated premise shows up as a failed certificate, not an exception.
    """
    P = pointed_product(factors)
    tgt = target if target is not None else factors[i]
    n = len(factors) - 1
    idx = np.unravel_index(np.arange(len(P)), [len(F) for F in factors])
    proj = idx[i]
    if target is not None:
        # factor i is a ball of `target`, labels identify its points
        lookup = {lab: k for k, lab in enumerate(target.space.labels)}
        proj = np.array([lookup[factors[i].space.labels[j]] for j in proj])
    slack = 2.0 * math.sqrt(n) * eps
    return check_rough_isometry(proj, P, tgt, R, slack, tol=tol), P


def sigma(i: int, s, cfg) -> float:
    """Ball radius for factor i: ``zeta_i / (1 - zeta_i)``; inf at ``v_i``, 0 at other anchors."""
    from .family import zeta

    z = zeta(i, s, cfg)
    return math.inf if z == 1.0 else z / (1.0 - z)


def ball_product(s, cfg) -> PointedSpace:
    """``prod_i B(w_i, sigma_i(s))`` with the unweighted l2 metric, based at the wedge tuple."""
    factors = []
    for i, (X, w) in enumerate(zip(cfg.anchors, cfg.wedge)):
        keep = ball_indices(X, w, sigma(i, s, cfg))
        factors.append(PointedSpace(X.subspace(keep), int(np.flatnonzero(keep == w)[0])))
    return pointed_product(factors)

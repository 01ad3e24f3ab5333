import json

import numpy as np
import pytest
from conftest import pseudo_metrics
from hypothesis import given
from hypothesis import strategies as st

from gromovkit.metric import (
    FiniteMetricSpace,
    MetricAxiomError,
    MetricStructureError,
    PseudoMetricMatrix,
    load_space,
    quotient,
    save_space,
    uniform_distance,
    validate,
)


def labels(n):
    return tuple(str(i) for i in range(n))


def test_two_point_metric_is_valid():
    assert validate([[0, 1], [1, 0]], require_metric=True)


def test_triangle_violation_reports_witness():
    rep = validate([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert not rep
    tri = [v for v in rep.violations if v.axiom == "triangle"]
    assert {v.indices for v in tri} == {(0, 2, 1), (2, 0, 1)}


def test_zero_pair_fails_only_with_require_metric():
    d = [[0, 0], [0, 0]]
    assert validate(d)
    rep = validate(d, require_metric=True)
    assert rep.axioms() == {"identity-of-indiscernibles"}
    assert rep.violations[0].indices == (0, 1)


@pytest.mark.parametrize(
    "d, axiom",
    [
        ([[1, 1], [1, 0]], "zero-diagonal"),
        ([[0, -1], [-1, 0]], "nonnegativity"),
        ([[0, 1], [1.5, 0]], "symmetry"),
    ],
)
def test_each_axiom_detected(d, axiom):
    assert axiom in validate(d).axioms()


def test_triangle_tolerance():
    d = np.array([[0, 1, 2 + 1e-10], [1, 0, 1], [2 + 1e-10, 1, 0]])
    assert not validate(d)
    assert validate(d, tol=1e-9)


def test_structural_errors():
    with pytest.raises(MetricStructureError):
        PseudoMetricMatrix(labels(2), np.zeros((2, 3)))
    with pytest.raises(MetricStructureError):
        PseudoMetricMatrix(("a", "a"), np.zeros((2, 2)))
    with pytest.raises(MetricStructureError):
        PseudoMetricMatrix(labels(2), [[0, np.nan], [np.nan, 0]])
    with pytest.raises(MetricStructureError):
        PseudoMetricMatrix(labels(3), np.zeros((2, 2)))


def test_matrix_is_read_only_copy():
    src = np.array([[0.0, 1.0], [1.0, 0.0]])
    m = PseudoMetricMatrix(labels(2), src)
    src[0, 1] = 5
    assert m.dist[0, 1] == 1
    with pytest.raises(ValueError):
        m.dist[0, 1] = 2


def test_uniform_distance_examples():
    d = np.array([[0, 1], [1, 0.0]])
    assert uniform_distance(d, d) == 0
    assert uniform_distance(d, [[0, 3], [3, 0]]) == 2
    rng = np.random.default_rng(3)
    pts = rng.random((6, 2))
    D = np.hypot(*(pts[:, None] - pts[None]).transpose(2, 0, 1))
    assert uniform_distance(D, 2 * D) == D.max()


def test_uniform_distance_label_mismatch():
    a = PseudoMetricMatrix(("a", "b"), [[0, 1], [1, 0]])
    b = PseudoMetricMatrix(("a", "c"), [[0, 1], [1, 0]])
    with pytest.raises(MetricStructureError):
        uniform_distance(a, b)
    with pytest.raises(MetricStructureError):
        uniform_distance(np.zeros((2, 2)), np.zeros((3, 3)))


@given(st.integers(0, 2**32 - 1))
def test_uniform_distance_is_a_metric(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    a, b, c = (rng.random((n, n)) for _ in range(3))
    assert uniform_distance(a, b) == uniform_distance(b, a)
    assert uniform_distance(a, c) <= uniform_distance(a, b) + uniform_distance(b, c) + 1e-12
    assert uniform_distance(a, a.copy()) == 0
    assert (uniform_distance(a, b) == 0) == np.array_equal(a, b)


def test_quotient_of_metric_is_identity():
    rng = np.random.default_rng(0)
    X = FiniteMetricSpace.from_points(rng.random((5, 3)), list("edcba"))
    Q, cmap = quotient(X)
    assert len(Q) == 5
    assert np.array_equal(Q.dist, X.dist)
    assert cmap == {k: k for k in X.labels}


def test_quotient_examples():
    m = PseudoMetricMatrix(("p", "q", "r"), [[0, 0, 2], [0, 0, 2], [2, 2, 0]])
    Q, cmap = quotient(m)
    assert Q.labels == ("p", "r")
    assert np.array_equal(Q.dist, [[0, 2], [2, 0]])
    assert cmap == {"p": "p", "q": "p", "r": "r"}

    Q, cmap = quotient(PseudoMetricMatrix(("d", "b", "c", "a"), np.zeros((4, 4))))
    assert Q.labels == ("a",) and len(set(cmap.values())) == 1


def test_quotient_snaps_roundoff_dust():
    m = PseudoMetricMatrix(labels(3), [[0, 1e-13, 1], [1e-13, 0, 1], [1, 1, 0]])
    assert len(quotient(m)[0]) == 2


def test_quotient_rejects_invalid():
    with pytest.raises(MetricAxiomError) as exc:
        quotient(PseudoMetricMatrix(labels(3), [[0, 1, 5], [1, 0, 1], [5, 1, 0]]))
    assert "triangle" in exc.value.report.axioms()


def union_find_classes(d):
    n = len(d)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for i in range(n):
        for j in range(n):
            if d[i, j] == 0:
                parent[find(i)] = find(j)
    return len({find(i) for i in range(n)})


@given(pseudo_metrics())
def test_quotient_properties(case):
    d, cls = case
    m = PseudoMetricMatrix(labels(len(d)), d)
    Q, cmap = quotient(m)
    assert len(Q) == union_find_classes(d) == len(set(cls))
    assert validate(Q, require_metric=True)
    # distances are read through the class map
    idx = {lab: i for i, lab in enumerate(Q.labels)}
    for a in m.labels:
        for b in m.labels:
            assert Q.dist[idx[cmap[a]], idx[cmap[b]]] == m.dist[m.index(a), m.index(b)]
    Q2, cmap2 = quotient(Q)
    assert Q2.labels == Q.labels and np.array_equal(Q2.dist, Q.dist)


def test_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    X = FiniteMetricSpace.from_points(rng.random((7, 2)))
    path = tmp_path / "x.json"
    save_space(X, path, note="hi")
    Y = load_space(path)
    assert Y.labels == X.labels and np.array_equal(Y.dist, X.dist)
    assert json.loads(path.read_text())["note"] == "hi"


def test_load_missing_key(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"labels": ["a"]}')
    with pytest.raises(MetricStructureError):
        load_space(path)

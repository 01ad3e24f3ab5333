import math

import numpy as np
import pytest
from conftest import metric_spaces
from hypothesis import given
from hypothesis import strategies as st
from scipy.sparse.csgraph import shortest_path

from gromovkit.constructions import ball_restrict, glue, l2_product, path_space, product_matrix, scale
from gromovkit.metric import FiniteMetricSpace, MetricStructureError, validate


def space(labels, d):
    return FiniteMetricSpace(tuple(labels), np.asarray(d, dtype=float))


def test_glue_cross_distance():
    X = space("px", [[0, 1], [1, 0]])
    Y = space(["q", "y"], [[0, 2], [2, 0]])
    W = glue(X, Y, "p", "q")
    assert W.labels == ("p", "x", "y")
    assert W.dist[W.index("x"), W.index("y")] == 3


def test_glue_with_point_is_copy():
    X = path_space(4, 0.5)
    W = glue(X, FiniteMetricSpace.point("z"), "2", "z")
    assert W.labels == X.labels and np.array_equal(W.dist, X.dist)


def test_glue_two_paths_is_a_path():
    X = path_space(3, prefix="a")
    Y = path_space(3, prefix="b")
    W = glue(X, Y, "a2", "b0")
    assert W.labels == ("a0", "a1", "a2", "b1", "b2")
    edges = np.diag(np.ones(4), 1)
    oracle = shortest_path(edges + edges.T, directed=False)
    assert np.array_equal(W.dist, oracle)


def test_glue_label_clash():
    X = path_space(2)
    with pytest.raises(MetricStructureError):
        glue(X, path_space(2), "0", "0")
    with pytest.raises(KeyError):
        glue(X, path_space(2, prefix="y"), "0", "nope")


@given(metric_spaces(prefix="x"), metric_spaces(prefix="y"), st.data())
def test_glue_restrictions_exact(X, Y, data):
    px = data.draw(st.sampled_from(X.labels))
    py = data.draw(st.sampled_from(Y.labels))
    W = glue(X, Y, px, py)
    nx = len(X)
    assert np.array_equal(W.dist[:nx, :nx], X.dist)
    ky = [W.index(px if lab == py else lab) for lab in Y.labels]
    assert np.array_equal(W.dist[np.ix_(ky, ky)], Y.dist)
    assert validate(W, require_metric=True, tol=1e-12)


def test_product_square():
    seg = path_space(2)
    P = l2_product(seg, seg)
    assert len(P) == 4
    assert P.labels == ("(0,0)", "(0,1)", "(1,0)", "(1,1)")
    assert P.dist[0, 1] == 1 and P.dist[0, 3] == math.sqrt(2)


def test_product_345():
    X = path_space(2, 3.0)
    Y = path_space(2, 4.0)
    assert l2_product(X, Y).dist[0, 3] == 5


def test_product_with_point():
    X = path_space(4, 0.7)
    P = l2_product(X, FiniteMetricSpace.point())
    assert np.array_equal(P.dist, X.dist)


@given(metric_spaces(max_size=4), metric_spaces(max_size=4))
def test_product_is_metric_and_matches_weighted_form(X, Y):
    P = l2_product(X, Y)
    assert validate(P, require_metric=True, tol=1e-9)
    assert np.allclose(product_matrix([X.dist, Y.dist]), P.dist, rtol=0, atol=1e-12)
    w = product_matrix([X.dist, Y.dist], [0.5, 2.0])
    assert np.allclose(w[0], np.hypot(0.5 * X.dist[0].repeat(len(Y)), 2.0 * np.tile(Y.dist[0], len(X))))


def test_product_diameter_on_grid():
    X = path_space(3, 1.0)
    Y = path_space(4, 0.5)
    P = l2_product(X, Y)
    assert P.dist.max() == pytest.approx(math.hypot(2.0, 1.5), abs=1e-15)


def test_scale():
    X = space("ab", [[0, 1], [1, 0]])
    assert np.array_equal(scale(1, X).dist, X.dist)
    assert np.array_equal(scale(2, X).dist, [[0, 2], [2, 0]])
    with pytest.raises(ValueError):
        scale(0, X)
    with pytest.raises(ValueError):
        scale(math.inf, X)


@given(metric_spaces(), st.floats(0.01, 100))
def test_scale_roundtrip(X, L):
    back = scale(L, scale(1 / L, X)).dist
    assert np.all(np.abs(back - X.dist) <= np.spacing(X.dist) * 2)


def test_ball_examples():
    X = path_space(3)
    assert ball_restrict(X, "1", 0).labels == ("1",)
    assert ball_restrict(X, "0", math.inf).labels == X.labels
    assert ball_restrict(X, "0", 1).labels == ("0", "1")
    with pytest.raises(ValueError):
        ball_restrict(X, "0", -1)


@given(metric_spaces(max_size=6), st.floats(0, 5), st.floats(0, 5))
def test_ball_monotone(X, r1, r2):
    r1, r2 = sorted((r1, r2))
    small = set(ball_restrict(X, X.labels[0], r1).labels)
    big = set(ball_restrict(X, X.labels[0], r2).labels)
    assert small <= big

import json
import math

import numpy as np
import pytest
from conftest import metric_spaces
from hypothesis import given
from hypothesis import strategies as st

from gromovkit.constructions import path_space
from gromovkit.family import default_config, zeta
from gromovkit.generators import minimal_eps, random_rough_isometry, trial_rngs
from gromovkit.metric import FiniteMetricSpace, MetricAxiomError, validate
from gromovkit.pointed import (
    PointedSpace,
    RoughIsometryCert,
    RoughIsometryError,
    ball_product,
    check_admissible,
    check_rough_isometry,
    glue_from_rough_isometry,
    lemma41_threshold,
    pgh_upper,
    pointed_product,
    product_rough_isometry,
    projection_rough_isometry,
    sigma,
)

INF = math.inf


def pointed(X, base=0):
    return PointedSpace(X, base)


def cloud(n, seed, dim=2):
    return FiniteMetricSpace.from_points(np.random.default_rng(seed).random((n, dim)))


def test_pointed_space_base_checked():
    with pytest.raises(IndexError):
        PointedSpace(path_space(3), 3)
    P = PointedSpace(path_space(3), 2)
    assert PointedSpace.from_dict(P.to_dict()).base == 2


@given(metric_spaces(max_size=6), st.floats(0.01, 2), st.sampled_from([0.5, 3.0, INF]))
def test_identity_is_certified(X, eps, R):
    if not R > eps:
        return
    P = pointed(X)
    cert = check_rough_isometry(range(len(X)), P, P, R, eps)
    assert cert.verdict and not cert.violations


def test_collapse_to_point():
    X = pointed(cloud(6, 1))
    delta = X.dist.max()
    pt = pointed(FiniteMetricSpace.point())
    assert check_rough_isometry([0] * 6, X, pt, INF, delta).verdict
    bad = check_rough_isometry([0] * 6, X, pt, INF, 0.9 * delta)
    assert [c for c, _, _ in bad.violations] == [3]


def test_base_mismatch_witness():
    eps = 0.1
    Y = pointed(path_space(2, 2 * eps), base=1)
    X = pointed(FiniteMetricSpace.point())
    cert = check_rough_isometry([0], X, Y, INF, eps)
    assert not cert.verdict
    cond, witness, _ = cert.violations[0]
    assert cond == 1 and witness == (0, 1)


def test_density_condition_is_strict():
    # y sits exactly eps from the image: not covered
    X = pointed(FiniteMetricSpace.point())
    Y = pointed(path_space(2, 0.1))
    cert = check_rough_isometry([0], X, Y, INF, 0.1)
    assert [c for c, _, _ in cert.violations] == [2]
    assert check_rough_isometry([0], X, Y, INF, 0.1000001).verdict
    # outside B(b, R - eps) nothing is required
    assert check_rough_isometry([0], X, Y, 0.15, 0.1).verdict


def test_domain_is_the_ball():
    X = pointed(path_space(4))
    Y = pointed(path_space(2))
    cert = check_rough_isometry({0: 0, 1: 1}, X, Y, 1.5, 0.1)
    assert cert.domain == (0, 1) and cert.verdict
    with pytest.raises(RoughIsometryError):
        check_rough_isometry({0: 0}, X, Y, 1.5, 0.1)
    with pytest.raises(RoughIsometryError):
        check_rough_isometry({0: 0, 1: 5}, X, Y, 1.5, 0.1)
    with pytest.raises(ValueError):
        check_rough_isometry({0: 0}, X, Y, 0.1, 0.1)
    with pytest.raises(ValueError):
        check_rough_isometry({0: 0}, X, Y, 1.0, 0.0)


def test_cert_json_roundtrip():
    X = pointed(path_space(3))
    cert = check_rough_isometry([0, 1, 1], X, X, INF, 0.5)
    obj = json.loads(cert.dumps(X, X))
    assert obj["R"] == "inf" and obj["verdict"] is False
    assert obj["violations"][0][0] == 2
    back = RoughIsometryCert.from_dict(obj)
    assert back == cert


def test_admissible_identical_spaces():
    X = pointed(cloud(5, 2))
    h = np.block([[X.dist, X.dist], [X.dist, X.dist]])
    # the zero-inflation gluing is only a pseudo-metric; twins at distance 0
    assert validate(h, tol=1e-12)
    with pytest.raises(MetricAxiomError):
        check_admissible(h, X, X, 1.0)
    eps = 1e-6
    h = np.block([[X.dist, X.dist + eps], [X.dist + eps, X.dist]])
    for t in (1e-3, 0.5, 10.0):
        assert check_admissible(h, X, X, t).ok


def test_admissible_clause_names():
    tri = np.ones((3, 3)) - np.eye(3)
    X = pointed(FiniteMetricSpace(("p", "q", "r"), tri))
    cert = check_rough_isometry(range(3), X, X, INF, 0.1)
    h = glue_from_rough_isometry(cert, X, X)
    assert check_admissible(h, X, X, 0.2 + 1e-9).ok
    bumped = h.copy()
    bumped[0, 1] = bumped[1, 0] = 1.05
    rep = check_admissible(bumped, X, X, 0.3)
    assert rep.failed == ("h|X2=d",)
    # h(a, b) = t is rejected
    rep = check_admissible(h, X, X, h[0, 3])
    assert "h(a,b)<t" in rep.failed


def test_glue_examples():
    X = pointed(cloud(5, 3))
    cert = check_rough_isometry(range(5), X, X, INF, 0.2)
    h = glue_from_rough_isometry(cert, X, X)
    assert np.allclose(np.diag(h[:5, 5:]), 0.2, rtol=0, atol=1e-15)
    assert np.array_equal(h[:5, :5], X.dist) and np.array_equal(h[5:, 5:], X.dist)
    assert validate(h, require_metric=True, tol=1e-12)

    P = pointed(FiniteMetricSpace.point())
    cert = check_rough_isometry([0], P, P, INF, 0.3)
    assert glue_from_rough_isometry(cert, P, P)[0, 1] == 0.3


def test_glue_needs_certified():
    X = pointed(path_space(3))
    cert = check_rough_isometry([0, 0, 0], X, X, INF, 0.1)
    with pytest.raises(ValueError):
        glue_from_rough_isometry(cert, X, X)
    with pytest.raises(ValueError):
        pgh_upper(cert)


def test_pgh_upper_examples():
    X = pointed(path_space(3))
    cert = check_rough_isometry(range(3), X, X, INF, 0.1)
    assert pgh_upper(cert) == pytest.approx(0.2)
    assert pgh_upper(cert, X, X) == pytest.approx(0.2)
    cert = check_rough_isometry(range(3), X, X, 2.0, 0.1)
    assert lemma41_threshold(2.0, 0.1) == pytest.approx(1 / 1.9)
    assert pgh_upper(cert) == 0.5
    for eps in (1e-2, 1e-4, 1e-8):
        assert pgh_upper(check_rough_isometry(range(3), X, X, INF, eps)) == pytest.approx(2 * eps)


@given(st.integers(0, 2**32 - 1))
def test_lemma41_property(seed):
    rng = np.random.default_rng(seed)
    cert, X, Y = random_rough_isometry(rng)
    assert cert.verdict
    h = glue_from_rough_isometry(cert, X, Y)
    base = lemma41_threshold(cert.R, cert.eps)
    assert pgh_upper(cert) <= 0.5
    for t in (base + 1e-9, 1.5 * base + 1e-9, 4 * base):
        assert check_admissible(h, X, Y, t).ok


def test_minimal_eps_is_tight():
    for rng in trial_rngs(7, 30):
        cert, X, Y = random_rough_isometry(rng)
        # points outside the ball are never read
        f = np.array([cert.mapping.get(i, 0) for i in range(len(X))])
        assert minimal_eps(f, X, Y, cert.R) == cert.eps
        if cert.eps > 1e-9:
            assert not check_rough_isometry(cert.mapping, X, Y, cert.R, cert.eps * (1 - 1e-6)).verdict


def test_product_single_factor_matches():
    rng = np.random.default_rng(11)
    cert, X, Y = random_rough_isometry(rng, max_points=5, R=INF)
    pc, Ps, Pt = product_rough_isometry([list(cert.image)], [X], [Y], cert.eps)
    assert pc.verdict and pc.eps == cert.eps
    assert np.array_equal(Ps.dist, X.dist)


def test_product_identities():
    Fs = [pointed(path_space(3)), pointed(cloud(3, 4)), pointed(path_space(2))]
    cert, Ps, _ = product_rough_isometry([range(3), range(3), range(2)], Fs, Fs, 1e-3)
    assert cert.verdict and len(Ps) == 18 and cert.eps == pytest.approx(math.sqrt(3) * 1e-3)


def test_product_rejects_bad_factor():
    X = pointed(path_space(3))
    with pytest.raises(ValueError, match="factor 0"):
        product_rough_isometry([[0, 0, 0]], [X], [X], 0.1)


def test_product_three_random_factors():
    for rng in trial_rngs(3, 20):
        maps, src, tgt, eps = [], [], [], 0.0
        for _ in range(3):
            c, X, Y = random_rough_isometry(rng, max_points=4, R=INF)
            maps.append(list(c.image))
            src.append(X)
            tgt.append(Y)
            eps = max(eps, c.eps)
        cert, Ps, Pt = product_rough_isometry(maps, src, tgt, eps)
        assert cert.verdict
        dom, img = np.asarray(cert.domain), np.asarray(cert.image)
        gap = np.abs(Ps.dist[np.ix_(dom, dom)] - Pt.dist[np.ix_(img, img)])
        assert gap.max() <= math.sqrt(3) * eps + 1e-12


def test_pointed_product_base():
    P = pointed_product([PointedSpace(path_space(3), 1), PointedSpace(path_space(2), 1)])
    assert P.base == 3 and P.space.labels[3] == "(1,1)"


def test_projection_singletons_is_isometry():
    big = pointed(cloud(5, 6))
    pt = pointed(FiniteMetricSpace.point("q"))
    cert, P = projection_rough_isometry([pt, big, pt], 1, INF, 1e-12)
    assert cert.verdict
    dom, img = np.asarray(cert.domain), np.asarray(cert.image)
    assert np.array_equal(P.dist[np.ix_(dom, dom)], big.dist[np.ix_(img, img)])


def test_projection_small_other_factor():
    eps = 0.1
    big = pointed(path_space(6, 0.5))
    small = pointed(path_space(2, eps))
    cert, P = projection_rough_isometry([big, small], 0, INF, eps)
    assert cert.verdict and cert.eps == pytest.approx(2 * eps)
    idx = np.unravel_index(np.arange(len(P)), (6, 2))[0]
    assert np.all(np.abs(P.dist - big.dist[np.ix_(idx, idx)]) <= 2 * eps + 1e-12)


def test_projection_premise_violated():
    eps = 0.1
    big = pointed(path_space(4, 0.5))
    fat = pointed(path_space(2, 3 * eps))
    cert, _ = projection_rough_isometry([big, fat], 0, INF, eps)
    assert not cert.verdict
    cond, pair, _ = cert.violations[0]
    assert cond == 3 and len(pair) == 2


def test_projection_into_ambient_target():
    eps = 0.05
    X = pointed(path_space(6, 0.5))
    ball = PointedSpace(X.space.subspace(range(4)), 0)
    other = pointed(path_space(2, eps))
    cert, _ = projection_rough_isometry([ball, other], 0, 1.2, eps, target=X)
    assert cert.verdict


def test_sigma_values():
    cfg = default_config()
    v0, v1 = cfg.anchor_points
    assert sigma(0, v0, cfg) == INF and sigma(1, v0, cfg) == 0
    assert sigma(1, v1, cfg) == INF and sigma(0, v1, cfg) == 0
    assert zeta(0, (0.5, 0.5), cfg) == 0.5 and sigma(0, (0.5, 0.5), cfg) == 1


def test_ball_product():
    cfg = default_config()
    X, Y = cfg.anchors
    at_v0 = ball_product(cfg.anchor_points[0], cfg)
    assert len(at_v0) == len(X) and np.array_equal(at_v0.dist, X.dist)
    mid = ball_product((0.5, 0.5), cfg)
    assert len(mid) == 2 * 3 and mid.base == 0

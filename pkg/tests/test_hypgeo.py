import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypentropy import hypgeo as hg


def ball_vectors(d, rmax=0.95):
    return st.lists(st.floats(-1, 1), min_size=d, max_size=d).map(
        lambda v: np.asarray(v) * rmax / max(1.0, np.linalg.norm(v) + 1e-9))


def test_distance_examples():
    o = hg.BallPoint.origin(3)
    assert hg.hyp_dist(o, o) == 0.0
    assert hg.hyp_dist(o, hg.BallPoint([0.5, 0, 0])) == pytest.approx(math.log(3), rel=1e-14)
    for s in (0.1, 0.7, 0.99):
        p = hg.BallPoint([0, s, 0])
        assert hg.hyp_dist(o, p) == pytest.approx(math.log((1 + s) / (1 - s)), rel=1e-13)


def test_distance_matches_arccosh_form(rng):
    p = rng.uniform(-0.5, 0.5, (50, 3))
    q = rng.uniform(-0.5, 0.5, (50, 3))
    arg = 1 + 2 * np.sum((p - q) ** 2, 1) / ((1 - np.sum(p * p, 1)) * (1 - np.sum(q * q, 1)))
    assert np.allclose(hg.dist_array(p, q), np.arccosh(arg), rtol=1e-12)


def test_point_validation():
    with pytest.raises(ValueError):
        hg.BallPoint([1.0, 0.0])
    with pytest.raises(ValueError):
        hg.BallPoint([0.5])
    with pytest.raises(ValueError):
        hg.IdealPoint([1.0, 0.1])
    with pytest.raises(ValueError):
        hg.hyp_dist(hg.BallPoint([0, 0]), hg.BallPoint([0, 0, 0]))


def test_translation_examples(rng):
    a = np.array([0.3, -0.2, 0.1])
    T = hg.mobius_translate(a)
    assert np.allclose(T.apply_array(np.zeros(3)), a)
    x = rng.uniform(-0.5, 0.5, (100, 3))
    assert np.allclose(hg.mobius_translate(np.zeros(3)).apply_array(x), x)
    back = hg.mobius_translate(-a).apply_array(T.apply_array(x))
    assert np.max(np.abs(back - x)) < 1e-10
    with pytest.raises(ValueError):
        hg.mobius_translate([1.0, 0, 0])


def test_translation_formula(rng):
    a = np.array([0.4, 0.1])
    x = rng.uniform(-0.6, 0.6, (20, 2))
    ax, xx, aa = x @ a, np.sum(x * x, 1), a @ a
    ref = ((1 + 2 * ax + xx)[:, None] * a + (1 - aa) * x) / (1 + 2 * ax + aa * xx)[:, None]
    assert np.allclose(hg.mobius_translate(a).apply_array(x), ref, atol=1e-14)


def test_isometry_invariance(rng):
    p = rng.uniform(-0.55, 0.55, (1000, 3))
    q = rng.uniform(-0.55, 0.55, (1000, 3))
    T = hg.random_isometry(rng, 3, 0.8)
    d0 = hg.dist_array(p, q)
    d1 = hg.dist_array(T.apply_array(p), T.apply_array(q))
    assert np.max(np.abs(d1 - d0)) <= 1e-9


def test_composition_closure(rng):
    A = hg.random_isometry(rng, 3, 0.7)
    B = hg.random_isometry(rng, 3, 0.7)
    C = A @ B
    x = rng.uniform(-0.5, 0.5, (50, 3))
    assert np.max(np.abs(C.apply_array(x) - A.apply_array(B.apply_array(x)))) < 1e-10
    assert np.max(np.abs(C.rotation.T @ C.rotation - np.eye(3))) < 1e-10
    y = rng.uniform(-0.5, 0.5, (50, 3))
    assert np.max(np.abs(hg.dist_array(C.apply_array(x), C.apply_array(y))
                         - hg.dist_array(x, y))) < 1e-9
    I = A @ A.inverse()
    assert np.max(np.abs(I.apply_array(x) - x)) < 1e-10


def test_boundary_extension_circle(rng):
    phi = 2 * np.pi * np.arange(64) / 64
    circle = np.stack([np.cos(phi), np.sin(phi), np.zeros(64)], 1)
    assert np.allclose(hg.BallIsometry.identity(3).boundary_array(circle), circle)
    img = hg.random_isometry(rng, 3, 0.8).boundary_array(circle)
    assert np.allclose(np.linalg.norm(img, axis=1), 1.0, atol=1e-12)
    # concyclic: the points lie in one plane (a round circle on the sphere)
    c = img.mean(0)
    _, s, _ = np.linalg.svd(img - c)
    assert s[-1] < 1e-8 * s[0]


def test_boundary_concentration():
    e = np.array([0.0, 0.0, 1.0])
    xi = np.random.default_rng(0).normal(size=(200, 3))
    xi /= np.linalg.norm(xi, axis=1, keepdims=True)
    xi = xi[xi @ e > -0.9]
    img = hg.mobius_translate((1 - 1e-6) * e).boundary_array(xi)
    assert np.min(img @ e) > 0.99


def test_boundary_conformal(rng):
    T = hg.random_isometry(rng, 3, 0.8)
    for _ in range(10):
        xi = rng.normal(size=3)
        xi /= np.linalg.norm(xi)
        u, v = [w - (w @ xi) * xi for w in rng.normal(size=(2, 3))]
        h = 1e-6
        stretch = []
        for w in (u, v):
            w = w / np.linalg.norm(w)
            a = T.boundary_array(np.cos(h) * xi + np.sin(h) * w)
            b = T.boundary_array(np.cos(h) * xi - np.sin(h) * w)
            stretch.append(np.linalg.norm(a - b) / (2 * h))
        assert stretch[0] == pytest.approx(stretch[1], rel=1e-6)


def test_geodesic_point():
    p, q = hg.BallPoint([0.1, -0.3]), hg.BallPoint([0.5, 0.4])
    assert np.allclose(hg.geodesic_point(p, q, 0).coords, p.coords, atol=1e-10)
    assert np.allclose(hg.geodesic_point(p, q, 1).coords, q.coords, atol=1e-10)
    assert hg.geodesic_point(p, p, 0.3) == p
    o, x = hg.BallPoint.origin(2), hg.BallPoint([0.8, 0])
    mid = hg.geodesic_point(o, x, 0.5)
    assert hg.hyp_dist(o, mid) == pytest.approx(hg.hyp_dist(o, x) / 2, rel=1e-12)
    m = hg.geodesic_point(p, q, 0.37)
    assert hg.hyp_dist(p, m) + hg.hyp_dist(m, q) == pytest.approx(hg.hyp_dist(p, q), abs=1e-9)


@given(ball_vectors(3), ball_vectors(3), st.floats(0, 1), st.floats(0, 1))
def test_geodesic_is_straight(p, q, s1, s2):
    dpq = float(hg.dist_array(p, q))
    if dpq < 1e-6:
        return
    a = hg.geodesic_point_array(p, q, s1)
    b = hg.geodesic_point_array(p, q, s2)
    assert abs(float(hg.dist_array(a, b)) - abs(s1 - s2) * dpq) <= 1e-8 * max(1.0, dpq)


@given(ball_vectors(2, 0.9), ball_vectors(2, 0.9))
def test_distance_symmetric_nonnegative(p, q):
    d1, d2 = float(hg.dist_array(p, q)), float(hg.dist_array(q, p))
    assert d1 >= 0 and d1 == pytest.approx(d2, rel=1e-12, abs=1e-15)


def test_radial_hessian():
    r = 0.8
    assert hg.radial_hessian_coeffs(r, math.sinh(r), math.cosh(r)) == pytest.approx(
        (math.cosh(r), math.cosh(r)), rel=1e-14)
    assert hg.radial_hessian_coeffs(0.5, 0.0, 0.0) == (0.0, 0.0)
    assert hg.radial_hessian_coeffs(1.0, 1.0, 1.0) == pytest.approx((1.0, 1.3130352854993312))
    with pytest.raises(ValueError):
        hg.radial_hessian_coeffs(0.0, 1.0, 1.0)


def test_json_roundtrip():
    p = hg.BallPoint([0.25, -0.5, 0.125])
    assert hg.BallPoint(p.to_json()) == p

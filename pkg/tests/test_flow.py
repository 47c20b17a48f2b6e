import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypentropy import hypgeo as hg
from hypentropy import flow as fl
from hypentropy.heatkernel import sphere_volume
from hypentropy.manifolds import DiscreteCurve, GeodesicDisk, GeodesicSphere


@pytest.fixture(scope="module")
def circle_run():
    c = DiscreteCurve.geodesic_circle(1.0, 128)
    return fl.run_curve(c, fl.extinction_time(1, 1.0),
                        stop_length=2 * math.pi * math.sinh(0.05), record_every=200)


def test_circle_curvature():
    r = 0.8
    c = DiscreteCurve.geodesic_circle(r, 512)
    k = fl.curvature_magnitudes(c)
    assert np.allclose(k, 1 / math.tanh(r), rtol=1e-3)
    v = fl.hyperbolic_curvature(c)
    assert np.all(np.einsum("ij,ij->i", v, c.vertices) < 0)


def test_geodesic_has_zero_curvature():
    # a closed polygon whose middle vertices lie on a diameter
    x = np.linspace(-0.6, 0.6, 41)
    pts = np.vstack([np.stack([x, 0 * x], 1), [[0.0, 0.5]]])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        v = fl.curvature_velocity(pts)
    assert np.max(np.abs(v[1:40])) <= 1e-10


def test_collinear_triples_warn():
    pts = np.array([[0.0, 0.0], [0.1, 0.0], [0.2, 0.0], [0.1, 0.3]])
    with pytest.warns(UserWarning, match="collinear"):
        fl.curvature_velocity(pts)


@given(st.integers(0, 10 ** 6))
def test_curvature_isometry_invariant(seed):
    rng = np.random.default_rng(seed)
    phi = np.linspace(0, 2 * np.pi, 129)[:-1]
    c = DiscreteCurve(np.stack([0.4 * np.cos(phi), 0.25 * np.sin(phi) + 0.05 * np.cos(3 * phi)], 1))
    T = hg.random_isometry(rng, 2, 0.6)
    a = fl.curvature_magnitudes(c)
    b = fl.curvature_magnitudes(c.transformed(T))
    np.testing.assert_allclose(b, a, rtol=1e-6, atol=1e-6)


def test_sphere_flow_closed_forms():
    assert fl.sphere_flow(2, 1.0, 0.0) == pytest.approx(1.0, rel=1e-15)
    # half of ln cosh 1 is 0.2168904; the five-digit 0.21690 is good to ~1e-5
    assert fl.extinction_time(2, 1.0) == pytest.approx(0.21690, abs=1e-5)
    assert fl.extinction_time(2, 1.0) == pytest.approx(0.5 * math.log(math.cosh(1.0)), rel=1e-15)
    assert fl.extinction_time(1, 1.0) == pytest.approx(0.4338, rel=1e-2)
    with pytest.raises(fl.FlowError, match="extinction"):
        fl.sphere_flow(2, 1.0, 0.3)


def test_sphere_flow_against_ode():
    from scipy.integrate import solve_ivp
    sol = solve_ivp(lambda t, r: [-2 / math.tanh(r[0])], (0, 0.2), [1.0], rtol=1e-12, atol=1e-14,
                    dense_output=True)
    for t in (0.05, 0.1, 0.2):
        assert fl.sphere_flow(2, 1.0, t) == pytest.approx(sol.sol(t)[0], rel=1e-9)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_area_first_variation(n):
    r, h = 0.9, 1e-5
    f = lambda x: math.log(sphere_volume(n) * math.sinh(x) ** n)
    assert (f(r + h) - f(r - h)) / (2 * h) == pytest.approx(n / math.tanh(r), abs=1e-8)


def test_circle_flow_radius_law(circle_run):
    exact = [math.acosh(math.cosh(1.0) * math.exp(-s.time)) for s in circle_run]
    radii = [fl.curve_radius(s.shape) for s in circle_run]
    assert max(abs(r / e - 1) for r, e in zip(radii, exact)) <= 5e-3
    assert radii[-1] <= 0.05 + 1e-5
    assert circle_run[-1].time == pytest.approx(fl.extinction_time(1, 1.0), rel=1e-2)


def test_flow_length_strictly_decreases():
    # geodesic square with rounded corners
    corners = hg.exp_origin(0.8 * np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]]) / math.sqrt(2))
    pts = []
    for a, b in zip(corners, np.roll(corners, -1, axis=0)):
        pts += [hg.geodesic_point_array(a, b, s) for s in np.linspace(0, 1, 33)[:-1]]
    c = fl.resample(DiscreteCurve(np.array(pts)), 128)
    lengths = []
    fl.run_curve(c, 0.05, record_every=0, callback=lambda s: lengths.append(s.shape.length()))
    assert len(lengths) > 10
    assert all(b < a for a, b in zip(lengths, lengths[1:]))


def test_step_rejection_aborts():
    c = DiscreteCurve.geodesic_circle(1.0, 64)
    state = fl.FlowState(0.0, c)
    orig = fl.curvature_velocity
    try:
        fl.curvature_velocity = lambda x, closed=True: np.full_like(x, np.nan)
        with pytest.raises(fl.FlowError) as exc:
            fl.step_curve(state)
    finally:
        fl.curvature_velocity = orig
    assert exc.value.state is state


def test_run_curve_hits_record_times():
    c = DiscreteCurve.geodesic_circle(0.8, 64)
    targets = [0.01, 0.02, 0.05]
    tr = fl.run_curve(c, 0.05, record_times=targets, record_every=0)
    assert [s.time for s in tr] == pytest.approx([0.0] + targets, abs=1e-14)


@settings(max_examples=4)
@given(st.integers(0, 10 ** 6))
def test_flow_isometry_equivariance(seed):
    T = hg.random_isometry(np.random.default_rng(seed), 2, 0.5)
    phi = np.linspace(0, 2 * np.pi, 65)[:-1]
    c = DiscreteCurve(np.stack([0.4 * np.cos(phi), 0.3 * np.sin(phi)], 1))
    dt = 0.5 * min(fl.stable_dt(c), fl.stable_dt(c.transformed(T)))
    a = fl.FlowState(0.0, c)
    b = fl.FlowState(0.0, c.transformed(T))
    for _ in range(20):
        a, b = fl.step_curve(a, dt), fl.step_curve(b, dt)
    assert a.time == b.time
    moved = T.apply_array(a.shape.vertices)
    assert np.max(hg.dist_array(moved, b.shape.vertices)) <= 1e-5


def test_static_geodesic_probe():
    D = GeodesicDisk.coordinate_plane(2, 1)
    traj = [fl.FlowState(t, D) for t in np.linspace(0, 0.4, 5)]
    p0 = np.array([0.3, 0.0])
    rec = fl.monotonicity_probe(traj, 0.5, p0)
    assert np.allclose(rec.F_values, 1.0, atol=1e-8)
    assert np.max(np.abs(rec.Q_integrals)) <= 1e-10
    assert np.max(np.abs(rec.defect_integrals)) <= 1e-10
    assert fl.monotonicity_identity_check(rec, 0.5, p0).max_residual <= 1e-10


def test_probe_rejects_late_t0(circle_run):
    with pytest.raises(ValueError):
        fl.monotonicity_probe(circle_run, 0.1, np.zeros(2))


@pytest.mark.parametrize("t0", [0.45, 1.0])
def test_circle_probe_monotone(circle_run, t0):
    center = fl.monotonicity_probe(circle_run, t0, np.zeros(2))
    assert np.all(center.slopes() <= 1e-4)
    offset = fl.monotonicity_probe(circle_run, t0, hg.exp_origin(np.array([0.7, 0.0])))
    assert np.all(offset.slopes() <= -1e-6)
    for rec in (center, offset):
        assert np.all(np.isfinite(rec.F_values)) and min(rec.Q_min) >= -1e-6
        assert len(rec.to_rows()) == len(circle_run)


def test_polyline_identity_within_five_percent():
    c = DiscreteCurve.geodesic_circle(1.0, 128)
    tr = fl.run_curve(c, 0.2, record_times=list(np.linspace(0.02, 0.2, 10)), record_every=0)
    for p0 in (np.zeros(2), hg.exp_origin(np.array([0.7, 0.0]))):
        assert fl.monotonicity_identity_check(tr, 0.5, p0).relative <= 0.05


def test_polyline_identity_improves_under_refinement():
    p0 = hg.exp_origin(np.array([0.7, 0.0]))
    out = []
    for n in (32, 64):
        tr = fl.run_curve(DiscreteCurve.geodesic_circle(1.0, n), 0.1,
                          record_times=list(np.linspace(0.01, 0.1, 10)), record_every=0)
        out.append(fl.monotonicity_identity_check(tr, 0.3, p0).max_residual)
    assert out[1] < out[0]


def test_sphere_identity_and_closed_forms():
    tstar = fl.extinction_time(2, 1.0)
    times = np.linspace(0.0, 0.5 * tstar, 81)
    traj = fl.sphere_trajectory(2, 1.0, times)
    rec = fl.monotonicity_probe(traj, 0.5, np.zeros(3))
    for t, F, Q, D in zip(rec.times, rec.F_values, rec.Q_integrals, rec.defect_integrals):
        Fc, rate = fl.sphere_identity_terms(2, fl.sphere_flow(2, 1.0, t), 0.5 - t)
        assert F == pytest.approx(Fc, rel=1e-10)
        assert -(Q + D) == pytest.approx(rate, rel=1e-8)
    chk = fl.monotonicity_identity_check(rec, 0.5, np.zeros(3))
    assert chk.relative <= 1e-3
    assert min(rec.Q_min) >= -1e-6


def test_offcenter_sphere_probe_matches_dense_sampling():
    S = GeodesicSphere(np.array([0.1, 0.0, -0.1]), 0.9, 2, resolution=160)
    p0 = np.array([0.2, 0.2, 0.0])
    F, Q, D, _ = fl.probe_terms(S, 0.6, p0, 0.0)
    ve = S.volume_elements()
    from hypentropy.heatkernel import kernel_batch
    rho = hg.dist_array(ve.points, p0)
    kb = kernel_batch(2, 0.6, rho)
    nu = hg.radial_direction_array(ve.points, S.center)
    u = hg.radial_direction_array(ve.points, p0)
    un2 = np.einsum("ij,ij->i", u, nu) ** 2
    Qd = float(np.sum(ve.weights * kb.gap * un2 * np.exp(kb.log_value)))
    assert Q == pytest.approx(Qd, rel=1e-6)

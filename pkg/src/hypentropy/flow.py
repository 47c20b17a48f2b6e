"""Mean curvature flow at desk scale, instrumented with the monotone quantity.

* Polyline curve shortening in the Poincaré disk (explicit RK4, periodic
  resampling in hyperbolic arclength).
* Exact flow of geodesic spheres: cosh r(t) = cosh(r0) exp(-n t).

Along a flow, with Phi(t, x) = K_n(t0 - t, dist(x, p0)),

    d/dt int Phi = - int ( |grad^perp log Phi - H|^2 + gap |grad^perp rho|^2 ) Phi,

where gap is the convexity gap of K_n.  ``monotonicity_probe`` records both
sides so the identity and the sign can be checked.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import hypgeo as hg
from .functional import f_functional
from .heatkernel import kernel_batch, sphere_volume
from .manifolds import DiscreteCurve, GeodesicDisk, GeodesicSphere

STABILITY_C = 0.2
RESAMPLE_EVERY = 10
MAX_REJECTIONS = 20
TAU_FLOOR = 1e-6


class FlowError(RuntimeError):
    def __init__(self, msg, state=None):
        super().__init__(msg)
        self.state = state


@dataclass
class FlowState:
    time: float
    shape: object
    dt: float = 0.0
    max_displacement: float = 0.0
    steps: int = 0


# ---------------------------------------------------------------------------
# curve geometry


def _circumcurvature(prev, cur, nxt):
    """Euclidean curvature vectors and tangents of the circles through consecutive triples.

    k = 2 det N / |N|^2 with N = |w|^2 (|u|^2 - u.w) u + |u|^2 (|w|^2 - u.w) w, which
    goes to zero smoothly for nearly collinear triples.  The tangent is the chord
    prev -> nxt with its component along k removed, i.e. the circle's own tangent,
    so Moebius maps (which send circles to circles) preserve it exactly.
    """
    u = prev - cur
    w = nxt - cur
    uu = np.einsum("ij,ij->i", u, u)
    ww = np.einsum("ij,ij->i", w, w)
    uw = np.einsum("ij,ij->i", u, w)
    wedge = u[:, :, None] * w[:, None, :] - u[:, None, :] * w[:, :, None]
    det = 0.5 * np.einsum("ijk,ijk->i", wedge, wedge)
    N = (ww * (uu - uw))[:, None] * u + (uu * (ww - uw))[:, None] * w
    NN = np.einsum("ij,ij->i", N, N)
    bad = det <= 1e-24 * uu * ww
    k = (2.0 * det / np.where(NN > 0, NN, 1.0))[:, None] * N
    chord = nxt - prev
    t = chord - (np.einsum("ij,ij->i", chord, N) / np.where(NN > 0, NN, 1.0))[:, None] * N
    t /= np.linalg.norm(t, axis=1, keepdims=True)
    return k, t, bad


def _neighbours(curve: DiscreteCurve):
    v = np.asarray(curve.vertices)
    if not curve.closed:
        raise ValueError("curvature flow needs a closed curve")
    return np.roll(v, 1, axis=0), v, np.roll(v, -1, axis=0)


def vertex_tangents(curve: DiscreteCurve) -> np.ndarray:
    """Unit tangents of the circles through each vertex and its neighbours."""
    return _circumcurvature(*_neighbours(curve))[1]


def curvature_velocity(x: np.ndarray, closed: bool = True) -> np.ndarray:
    """Coordinate velocity of curve shortening at the vertices x (closed polygon).

    With lambda = 2/(1 - |x|^2) the metric curvature vector has coordinates
    (k_e - P_N grad log lambda) / lambda^2, k_e the Euclidean curvature
    vector and P_N the projection normal to the curve.
    """
    prev, nxt = np.roll(x, 1, axis=0), np.roll(x, -1, axis=0)
    k, t, bad = _circumcurvature(prev, x, nxt)
    if bad.any():
        warnings.warn(f"{int(bad.sum())} collinear vertex triples: zero curvature used")
    r2 = np.einsum("ij,ij->i", x, x)
    glog = 2.0 * x / (1.0 - r2)[:, None]
    gn = glog - np.einsum("ij,ij->i", glog, t)[:, None] * t
    lam = 2.0 / (1.0 - r2)
    return (k - gn) / (lam * lam)[:, None]


def hyperbolic_curvature(curve: DiscreteCurve) -> np.ndarray:
    """Per-vertex curvature vectors as coordinate velocities."""
    _neighbours(curve)
    return curvature_velocity(np.asarray(curve.vertices))


def curvature_magnitudes(curve: DiscreteCurve) -> np.ndarray:
    """Metric length of the curvature vector, i.e. lambda |velocity|."""
    v = hyperbolic_curvature(curve)
    lam = hg.conformal_factor(curve.vertices)
    return lam * np.linalg.norm(v, axis=1)


def resample(curve: DiscreteCurve, n: int | None = None) -> DiscreteCurve:
    """Resample to (nearly) uniform hyperbolic arclength with a periodic spline."""
    v = np.asarray(curve.vertices)
    n = len(v) if n is None else n
    seg = curve.edge_lengths()
    s = np.concatenate([[0.0], np.cumsum(seg)])
    pts = np.vstack([v, v[:1]])
    spline = CubicSpline(s, pts, axis=0, bc_type="periodic")
    snew = np.linspace(0.0, s[-1], n + 1)[:-1]
    return DiscreteCurve(spline(snew), True)


# ---------------------------------------------------------------------------
# stepping


def stable_dt(curve: DiscreteCurve) -> float:
    return STABILITY_C * float(curve.edge_lengths().min()) ** 2


def _rk4(x: np.ndarray, dt: float) -> np.ndarray:
    k1 = curvature_velocity(x)
    k2 = curvature_velocity(x + 0.5 * dt * k1)
    k3 = curvature_velocity(x + 0.5 * dt * k2)
    k4 = curvature_velocity(x + dt * k3)
    return x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def step_curve(state: FlowState, dt: float | None = None) -> FlowState:
    """One RK4 step; dt is capped by the stability limit and halved on rejection."""
    curve = state.shape
    cap = stable_dt(curve)
    dt = cap if dt is None else min(dt, cap)
    x = np.asarray(curve.vertices)
    half_edge = 0.5 * float(curve.edge_lengths().min())
    for _ in range(MAX_REJECTIONS):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            y = _rk4(x, dt)
        ok = np.all(np.isfinite(y)) and np.all(np.einsum("ij,ij->i", y, y) < 1.0)
        if ok:
            disp = float(np.max(hg.dist_array(x, y)))
            if disp <= half_edge:
                new = DiscreteCurve(y, True)
                return FlowState(state.time + dt, new, dt, disp, state.steps + 1)
        dt *= 0.5
    raise FlowError(f"{MAX_REJECTIONS} consecutive step rejections at t = {state.time:.6g}", state)


def run_curve(initial: DiscreteCurve, t_end: float, *, stop_length: float = 1e-3,
              record_every: int = 100, record_times=None, resample_every: int = RESAMPLE_EVERY,
              callback=None) -> list[FlowState]:
    """Flow until t_end or until the length drops below stop_length.

    States are recorded every ``record_every`` steps, and the time step is
    shortened to land exactly on each of ``record_times``.
    """
    state = FlowState(0.0, initial)
    out = [state]
    targets = sorted(t for t in (record_times or []) if 0 < t <= t_end)
    k = 0
    while state.time < t_end:
        limit = t_end - state.time
        hit = bool(targets) and targets[0] - state.time <= stable_dt(state.shape)
        if hit:
            limit = targets[0] - state.time
        state = step_curve(state, min(limit, stable_dt(state.shape)))
        k += 1
        if k % resample_every == 0:
            state = FlowState(state.time, resample(state.shape), state.dt, state.max_displacement,
                              state.steps)
        if hit and abs(state.time - targets[0]) < 1e-14 * max(1.0, targets[0]):
            targets.pop(0)
            out.append(state)
        elif record_every and k % record_every == 0:
            out.append(state)
        if callback is not None:
            callback(state)
        if state.shape.length() < stop_length:
            break
    if out[-1] is not state:
        out.append(state)
    return out


def curve_radius(curve: DiscreteCurve, center=None) -> float:
    """Mean hyperbolic distance of the vertices from ``center`` (default 0)."""
    c = np.zeros(curve.ambient_dim) if center is None else np.asarray(hg._coords(center))
    return float(np.mean(hg.dist_array(curve.vertices, c)))


def sphere_flow(n: int, r0: float, t: float) -> float:
    """Radius at time t of a flowing geodesic n-sphere of initial radius r0."""
    t_star = extinction_time(n, r0)
    if t >= t_star:
        raise FlowError(f"t = {t} is past the extinction time t* = {t_star}")
    return math.acosh(math.cosh(r0) * math.exp(-n * t))


def extinction_time(n: int, r0: float) -> float:
    return math.log(math.cosh(r0)) / n


def sphere_trajectory(n: int, r0: float, times, center=None) -> list[FlowState]:
    c = np.zeros(n + 1) if center is None else np.asarray(hg._coords(center), dtype=float)
    return [FlowState(float(t), GeodesicSphere(c, sphere_flow(n, r0, t), n)) for t in times]


# ---------------------------------------------------------------------------
# monotonicity


@dataclass
class MonotonicityRecord:
    t0: float
    p0: list
    times: list = field(default_factory=list)
    F_values: list = field(default_factory=list)
    Q_integrals: list = field(default_factory=list)
    defect_integrals: list = field(default_factory=list)
    Q_min: list = field(default_factory=list)

    def slopes(self) -> np.ndarray:
        t, F = np.asarray(self.times), np.asarray(self.F_values)
        return np.diff(F) / np.diff(t)

    def rhs(self) -> np.ndarray:
        """-(defect + Q) at each recorded time: the predicted dF/dt."""
        return -(np.asarray(self.defect_integrals) + np.asarray(self.Q_integrals))

    def to_rows(self) -> list:
        return [{"t": t, "F": F, "Q": q, "defect": dfc}
                for t, F, q, dfc in zip(self.times, self.F_values, self.Q_integrals,
                                        self.defect_integrals)]


def _normal_data(shape, p0, tau):
    """Samples with weights, (grad rho)^perp and H as Euclidean-frame vectors.

    Vectors are expressed in a metric-orthonormal frame (coordinates times
    lambda), so their Euclidean norms are metric norms.
    """
    if isinstance(shape, DiscreteCurve):
        v = np.asarray(shape.vertices)
        seg = shape.edge_lengths()
        w = 0.5 * (seg + np.roll(seg, 1))
        T = vertex_tangents(shape)
        u = hg.radial_direction_array(v, p0)
        un = u - np.einsum("ij,ij->i", u, T)[:, None] * T
        H = hg.conformal_factor(v)[:, None] * curvature_velocity(v)
        return v, w, un, H
    if isinstance(shape, GeodesicSphere):
        return _sphere_normal_data(shape, p0)
    if isinstance(shape, GeodesicDisk):
        D = shape
        if math.isinf(D.radius):
            a, b = D.foot_data(p0)
            reach = a + b + (D.dim - 1) * tau + math.sqrt(320 * tau) + 5.0
            D = GeodesicDisk(D.base, D.frame, reach, D.resolution)
        ve = D.volume_elements()
        y = D.to_local(ve.points)
        u = hg.radial_direction_array(y, D.to_local(p0))
        un = u - (u @ D.frame.T) @ D.frame
        return ve.points, ve.weights, un, np.zeros_like(un)
    raise TypeError(f"unsupported shape {type(shape).__name__}")


SPHERE_GL = 96


def _sphere_normal_data(S: GeodesicSphere, p0):
    """Polar-angle rule about the axis from the center to p0.

    Everything is moved so the center is the origin; the integrands then
    depend on the angle theta to the axis only, with the weight
    Vol(S^(n-1)) sinh^n(r) sin^(n-1)(theta) dtheta.
    """
    n, r = S.sphere_dim, S.radius
    d = S.ambient_dim
    q = hg.mobius_add(-np.asarray(S.center, dtype=float), p0)
    nq = float(np.linalg.norm(q))
    e = np.eye(d)[0] if nq == 0.0 else q / nq
    f = np.eye(d)[0] if abs(e[0]) < 0.9 else np.eye(d)[1]
    f = f - (f @ e) * e
    f /= np.linalg.norm(f)
    if n == 1 and d == 2:
        x, w = np.polynomial.legendre.leggauss(SPHERE_GL)
        theta = math.pi * (x + 1.0)
        w = w * math.pi * math.sinh(r)
    else:
        x, w = np.polynomial.legendre.leggauss(SPHERE_GL)
        theta = 0.5 * math.pi * (x + 1.0)
        w = 0.5 * math.pi * w * sphere_volume(n - 1) * math.sinh(r) ** n * np.sin(theta) ** (n - 1)
    nu = np.cos(theta)[:, None] * e + np.sin(theta)[:, None] * f
    pts = math.tanh(r / 2) * nu
    u = hg.radial_direction_array(pts, q)
    un = np.einsum("ij,ij->i", u, nu)[:, None] * nu
    H = -n / math.tanh(r) * nu
    # rho is measured from q in this frame
    return pts, w, un, H, q


def probe_terms(shape, t0: float, p0, t: float):
    """(F, Q integral, defect integral, min Q integrand) at one time."""
    p0 = np.asarray(hg._coords(p0), dtype=float)
    tau = max(t0 - t, TAU_FLOOR)
    n = shape.dim
    F = f_functional(shape, p0, tau)
    data = _normal_data(shape, p0, tau)
    x, w, un, H = data[:4]
    rho = hg.dist_array(x, data[4] if len(data) > 4 else p0)
    kb = kernel_batch(n, tau, rho)
    phi = np.exp(kb.log_value)
    coincident = rho < 1e-12
    un = np.where(coincident[:, None], 0.0, un)
    normal2 = np.einsum("ij,ij->i", un, un)
    q = kb.gap * normal2
    dvec = kb.dlog[:, None] * un - H
    defect = np.einsum("ij,ij->i", dvec, dvec)
    return F, float(np.sum(w * q * phi)), float(np.sum(w * defect * phi)), float(np.min(q))


def monotonicity_probe(trajectory, t0: float, p0) -> MonotonicityRecord:
    times = [s.time for s in trajectory]
    if t0 <= max(times):
        raise ValueError("t0 must exceed every trajectory time")
    rec = MonotonicityRecord(float(t0), list(map(float, hg._coords(p0))))
    for s in trajectory:
        F, Q, D, qmin = probe_terms(s.shape, t0, p0, s.time)
        rec.times.append(s.time)
        rec.F_values.append(F)
        rec.Q_integrals.append(Q)
        rec.defect_integrals.append(D)
        rec.Q_min.append(qmin)
    return rec


@dataclass
class IdentityCheck:
    max_residual: float
    scale: float
    residuals: list

    @property
    def relative(self) -> float:
        return self.max_residual / self.scale if self.scale > 0 else self.max_residual


def monotonicity_identity_check(trajectory, t0: float, p0) -> IdentityCheck:
    """Compare dF/dt (interval differences) with the trapezoid mean of -(defect + Q)."""
    rec = trajectory if isinstance(trajectory, MonotonicityRecord) else \
        monotonicity_probe(trajectory, t0, p0)
    slopes = rec.slopes()
    rhs = rec.rhs()
    pred = 0.5 * (rhs[1:] + rhs[:-1])
    res = np.abs(slopes - pred)
    scale = float(np.max(np.abs(slopes))) if len(slopes) else 0.0
    return IdentityCheck(float(res.max()) if len(res) else 0.0, scale, res.tolist())


def sphere_identity_terms(n: int, r: float, tau: float):
    """Closed forms for a sphere of radius r with p0 at its center:
    (F, dF/dt predicted)."""
    kb = kernel_batch(n, tau, np.array([r]))
    F = sphere_volume(n) * math.sinh(r) ** n * math.exp(kb.log_value[0])
    rate = -((kb.dlog[0] + n / math.tanh(r)) ** 2 + kb.gap[0]) * F
    return F, rate

"""Weighted-volume functional F(Sigma; p0, tau) and hyperbolic entropy.

F(Sigma; p0, tau) = int_Sigma K_n(tau, dist(x, p0)) dVol(x),  n = dim Sigma,

and the entropy is its supremum over p0 and tau > 0.  Sampled
representations (curves, meshes) use their volume elements.  Geodesic
spheres and disks of dimension 1 and 2 use exact one-dimensional
reductions, which stay accurate for arbitrarily small tau.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import betainc

from . import hypgeo as hg
from .heatkernel import kernel_batch, log_sinh, sphere_volume
from .manifolds import DiscreteCurve, GeodesicDisk, GeodesicSphere, TriMeshSurface

TAU_MIN = 1e-4
TAU_MAX = 1e4
SEARCH_MARGIN = 5.0
CUT_NATS = 80.0
GL_ORDER = 12
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


@dataclass(frozen=True)
class ReferenceConstants:
    euclidean_entropy_S1: float = math.sqrt(2 * math.pi / math.e)
    euclidean_entropy_S2: float = 4 / math.e
    euclidean_entropy_S1xR: float = math.sqrt(2 * math.pi / math.e)

    @staticmethod
    def vol_sphere(m: int) -> float:
        return sphere_volume(m)


REFERENCE = ReferenceConstants()


# ---------------------------------------------------------------------------
# quadrature helpers


def _graded_nodes(lo: float, hi: float, w0: float, cap: float, breaks=()):
    """Gauss-Legendre nodes on [lo, hi]: panels grow geometrically from each
    breakpoint (first width w0, ratio 1.6) until they reach width ``cap``."""
    pts = sorted({lo, hi, *[b for b in breaks if lo < b < hi]})
    edges = [lo]
    for a, b in zip(pts[:-1], pts[1:]):
        x, w = a, min(w0, cap)
        while x + w < b:
            x += w
            edges.append(x)
            w = min(1.6 * w, cap)
        edges.append(b)
    e = np.asarray(edges)
    a_, b_ = e[:-1, None], e[1:, None]
    nodes = 0.5 * (a_ + b_) + 0.5 * (b_ - a_) * _GL_X
    weights = 0.5 * (b_ - a_) * _GL_W
    return nodes.ravel(), weights.ravel()


def _window(n: int, tau: float, d_lo: float, d_hi: float):
    """Part of [d_lo, d_hi] where K_n(tau, d) sinh^(n-1) d is not negligible."""
    peak = max(d_lo, min(d_hi, (n - 1) * tau))
    half = 1.05 * math.sqrt(4 * tau * CUT_NATS)
    return max(d_lo, peak - half), min(d_hi, peak + half)


def _scales(n: int, tau: float, d: float):
    slope = d / (2 * tau) + 0.5 * (n - 1)
    w0 = 0.25 * min(math.sqrt(tau), 1.0 / slope if slope > 0 else math.inf)
    return w0, 2.0 * math.sqrt(tau)


def _logk(n, tau, d):
    return kernel_batch(n, tau, d).log_value


# ---------------------------------------------------------------------------
# analytic reductions


def _sphere_F(S: GeodesicSphere, p0: np.ndarray, tau: float) -> float:
    n, r = S.sphere_dim, S.radius
    b = float(hg.dist_array(p0, S.center))
    if b < 1e-9:
        return math.exp(math.log(sphere_volume(n)) + n * float(log_sinh(r))
                        + float(_logk(n, tau, np.array([r]))[0]))
    d_lo, d_hi = abs(b - r), b + r
    if n == 2:
        # sin(theta) dtheta = sinh(d) dd / (sinh b sinh r)
        lo, hi = _window(n, tau, d_lo, d_hi)
        w0, cap = _scales(n, tau, lo)
        x, w = _graded_nodes(lo, hi, w0, cap)
        logf = _logk(n, tau, x) + log_sinh(x)
        pref = math.log(2 * math.pi) + float(log_sinh(r)) - float(log_sinh(b))
        return float(np.sum(w * np.exp(logf + pref)))
    if n == 1:
        # theta in [0, pi]; d^2 ~ (b - r)^2 + sinh b sinh r theta^2 near 0
        lo, hi = _window(1, tau, d_lo, d_hi)
        theta_hi = _theta_of_d(b, r, hi)
        scale = math.sqrt(tau / max(math.sinh(b) * math.sinh(r), 1e-300))
        x, w = _graded_nodes(0.0, theta_hi, 0.25 * min(scale, theta_hi), 0.5 * scale)
        d = _d_of_theta(b, r, x)
        return float(2 * math.sinh(r) * np.sum(w * np.exp(_logk(1, tau, d))))
    ve = S.volume_elements()
    return _sample_F(ve.points, ve.weights, n, p0, tau)


def _d_of_theta(b, r, theta):
    s2 = np.sinh(0.5 * (b - r)) ** 2 + math.sinh(b) * math.sinh(r) * np.sin(0.5 * theta) ** 2
    return 2.0 * np.arcsinh(np.sqrt(s2))


def _theta_of_d(b, r, d):
    s2 = (math.sinh(0.5 * d) ** 2 - math.sinh(0.5 * (b - r)) ** 2) / (math.sinh(b) * math.sinh(r))
    return 2.0 * math.asin(min(1.0, math.sqrt(max(s2, 0.0))))


def _cap_measure(n: int, a: float, r: np.ndarray, R: float) -> np.ndarray:
    """Measure of directions phi in S^(n-1) with the point at distance r from
    the foot (foot at distance a from the disk center) inside radius R."""
    om = sphere_volume(n - 1)
    if math.isinf(R):
        return np.full_like(r, om)
    if a < 1e-12:
        return np.where(r <= R, om, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (math.cosh(a) * np.cosh(r) - math.cosh(R)) / (math.sinh(a) * np.sinh(r))
    c = np.clip(np.nan_to_num(c, nan=1.0, posinf=1.0, neginf=-1.0), -1.0, 1.0)
    if n == 2:
        return 2.0 * np.arccos(c)
    half = 0.5 * betainc(0.5 * (n - 1), 0.5, 1.0 - c * c)
    frac = np.where(c >= 0, half, 1.0 - half)
    return om * frac


def _acosh_ratio(x: np.ndarray, b: float) -> np.ndarray:
    """arccosh(cosh x / cosh b) for x >= b, without overflow."""
    x = np.asarray(x, dtype=float)
    big = x > 300
    xs = np.where(big, 0.0, x)
    small = np.arccosh(np.maximum(np.cosh(xs) / math.cosh(b), 1.0))
    return np.where(big, x - math.log(math.cosh(b)), small)


def _acosh_product(x: np.ndarray, b: float) -> np.ndarray:
    """arccosh(cosh b cosh x) without overflow."""
    x = np.abs(np.asarray(x, dtype=float))
    big = x > 300
    xs = np.where(big, 0.0, x)
    small = np.arccosh(math.cosh(b) * np.cosh(xs))
    return np.where(big, x + math.log(math.cosh(b)), small)


def _disk_F(D: GeodesicDisk, p0: np.ndarray, tau: float) -> float:
    n, R = D.dim, D.radius
    a, b = D.foot_data(p0)
    r_lo = max(0.0, a - R) if not math.isinf(R) else 0.0
    r_hi = R + a
    if n == 2:
        # sinh r dr = sinh d dd / cosh b, with cosh d = cosh b cosh r
        def d_of(r):
            return math.acosh(math.cosh(b) * math.cosh(r)) if not math.isinf(r) else math.inf
        d_lo, d_hi = d_of(r_lo), d_of(r_hi)
        lo, hi = _window(2, tau, d_lo, d_hi)
        if hi <= lo:
            return 0.0
        kinks = [d_of(R - a)] if not math.isinf(R) and R - a > 0 else []
        w0, cap = _scales(2, tau, lo)
        x, w = _graded_nodes(lo, hi, w0, cap, kinks)
        rr = _acosh_ratio(x, b)
        theta = _cap_measure(2, a, rr, R)
        logf = _logk(2, tau, x) + log_sinh(x) - math.log(math.cosh(b))
        return float(np.sum(w * theta * np.exp(logf)))
    if n == 1:
        # signed position s along the line from the foot; d(s) from Pythagoras
        s_lo, s_hi = (-math.inf, math.inf) if math.isinf(R) else (-R - a, R - a)
        d_cut = _window(1, tau, b, math.inf)[1]
        s_cut = float(_acosh_ratio(np.array([d_cut]), b)[0])
        lo, hi = max(s_lo, -s_cut), min(s_hi, s_cut)
        if hi <= lo:
            return 0.0
        scale = math.sqrt(tau)
        x, w = _graded_nodes(lo, hi, 0.5 * scale, 0.5 * scale, [0.0])
        d = _acosh_product(x, b)
        return float(np.sum(w * np.exp(_logk(1, tau, d))))
    ve = D.volume_elements()
    return _sample_F(ve.points, ve.weights, n, p0, tau)


def _sample_F(points, weights, n, p0, tau) -> float:
    rho = hg.dist_array(points, p0)
    logk = kernel_batch(n, tau, rho).log_value
    return float(np.sum(weights * np.exp(logk)))


def f_functional(sigma, p0, tau: float, n: int | None = None) -> float:
    """F(Sigma; p0, tau) with the kernel of dimension n = dim Sigma."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    p0 = np.asarray(hg._coords(p0), dtype=float)
    if p0.size != sigma.ambient_dim:
        raise ValueError("p0 has the wrong dimension")
    n = sigma.dim if n is None else n
    if n == sigma.dim and isinstance(sigma, GeodesicSphere):
        return _sphere_F(sigma, p0, tau)
    if n == sigma.dim and isinstance(sigma, GeodesicDisk):
        return _disk_F(sigma, p0, tau)
    ve = sigma.volume_elements()
    return _sample_F(ve.points, ve.weights, n, p0, tau)


# ---------------------------------------------------------------------------
# entropy


@dataclass
class EntropyResult:
    value: float
    argmax_p0: hg.BallPoint
    argmax_tau: float
    status: str
    trace: list = field(default_factory=list)
    evaluations: int = 0
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"value": self.value, "argmax_p0": self.argmax_p0.to_json(),
                "argmax_tau": self.argmax_tau, "status": self.status,
                "evaluations": self.evaluations, "config": self.config,
                "trace": [{"p0": list(p), "tau": t, "value": v} for p, t, v in self.trace]}


@dataclass
class SearchConfig:
    starts: int = 12
    seed: int = 0
    tau_min: float | None = None
    tau_max: float = TAU_MAX
    margin: float = SEARCH_MARGIN
    maxiter: int = 600
    xatol: float = 1e-7
    fatol: float = 1e-13
    seed_taus: int = 9
    seed_points: int = 8


def _mesh_size(sigma) -> float | None:
    if isinstance(sigma, DiscreteCurve):
        return sigma.mesh_size()
    if isinstance(sigma, TriMeshSurface):
        v, tri = sigma._elements()
        return float(max(hg.dist_array(v[tri[:, i]], v[tri[:, j]]).max()
                         for i, j in ((0, 1), (1, 2), (2, 0))))
    return None


def default_tau_min(sigma) -> float:
    """1e-4, raised to (4h)^2 for sampled inputs so the kernel stays resolved."""
    h = _mesh_size(sigma)
    return TAU_MIN if h is None else max(TAU_MIN, (4 * h) ** 2)


def entropy(sigma, config: SearchConfig | None = None, **overrides) -> EntropyResult:
    """Multi-start Nelder-Mead over (p0, log tau).

    p0 = c (+) exp_0(v) with c the centroid of Sigma and |v| <= R1, where
    R1 = extrinsic radius + margin; log tau is confined to
    [log tau_min, log tau_max].  Points outside the box are projected back,
    so the objective is continuous.
    """
    cfg = config or SearchConfig()
    for k, v in overrides.items():
        setattr(cfg, k, v)
    d = sigma.ambient_dim
    c = np.asarray(sigma.centroid(), dtype=float)
    ext = sigma.extrinsic_radius()
    R1 = (0.0 if math.isinf(ext) else ext) + cfg.margin
    tau_min = default_tau_min(sigma) if cfg.tau_min is None else cfg.tau_min
    s_lo, s_hi = math.log(tau_min), math.log(cfg.tau_max)
    rng = np.random.default_rng(cfg.seed)

    def project(z):
        v, s = z[:d], z[d]
        nv = np.linalg.norm(v)
        if nv > R1:
            v = v * (R1 / nv)
        return np.concatenate([v, [min(max(s, s_lo), s_hi)]])

    def p0_of(z):
        return hg.mobius_add(c, hg.exp_origin(z[:d]))

    trace: list = []
    best = {"value": -math.inf, "z": None}
    count = [0]

    def F(z):
        z = project(np.asarray(z, dtype=float))
        count[0] += 1
        p0 = p0_of(z)
        try:
            val = f_functional(sigma, p0, math.exp(z[d]))
        except (ValueError, ArithmeticError, RuntimeError) as exc:
            warnings.warn(f"probe discarded: {exc}")
            return math.inf
        if not math.isfinite(val):
            warnings.warn("probe discarded: non-finite F")
            return math.inf
        better = val > best["value"] or (val == best["value"] and z[d] < best["z"][d])
        if better:
            best["value"], best["z"] = val, z
            trace.append((p0.tolist(), math.exp(z[d]), val))
        return -val

    # seed grid: centroid and sample points, log-spaced tau
    samples = np.asarray(sigma.sample_points())
    pick = samples[np.linspace(0, len(samples) - 1, min(cfg.seed_points, len(samples))).astype(int)]
    seed_vs = [np.zeros(d)] + [hg.log_origin(hg.mobius_add(-c, p)) for p in pick]
    seeds = []
    for v in seed_vs:
        for s in np.linspace(s_lo, s_hi, cfg.seed_taus):
            z = project(np.concatenate([v, [s]]))
            seeds.append((F(z), len(seeds), z))
    seeds.sort(key=lambda e: (e[0], e[1]))
    starts = [z for _, _, z in seeds[:cfg.starts]]

    step_v = max(0.05, 0.1 * min(R1, max(ext, 0.1)))
    step_s = 0.5
    for k, z0 in enumerate(starts):
        jitter = rng.normal(scale=1e-3, size=d + 1)
        z0 = project(z0 + jitter)
        simplex = [z0] + [z0 + (step_v if i < d else step_s) * np.eye(d + 1)[i] for i in range(d + 1)]
        minimize(F, z0, method="Nelder-Mead",
                 options={"initial_simplex": np.array(simplex), "maxiter": cfg.maxiter,
                          "xatol": cfg.xatol, "fatol": cfg.fatol})
    # polish around the best point with a small simplex
    zb = best["z"]
    for scale in (0.1, 0.01):
        simplex = [zb] + [zb + scale * (step_v if i < d else step_s) * np.eye(d + 1)[i]
                          for i in range(d + 1)]
        minimize(F, zb, method="Nelder-Mead",
                 options={"initial_simplex": np.array(simplex), "maxiter": cfg.maxiter,
                          "xatol": cfg.xatol * 0.1, "fatol": cfg.fatol})
        zb = best["z"]

    z = best["z"]
    s_span = s_hi - s_lo
    at_bound = (np.linalg.norm(z[:d]) >= 0.99 * R1
                or z[d] - s_lo <= 0.01 * s_span or s_hi - z[d] <= 0.01 * s_span)
    status = "boundary-of-search-domain" if at_bound else "converged"
    conf = {"starts": cfg.starts, "seed": cfg.seed, "tau_min": tau_min, "tau_max": cfg.tau_max,
            "search_radius": R1, "maxiter": cfg.maxiter, "xatol": cfg.xatol, "fatol": cfg.fatol}
    return EntropyResult(best["value"], hg.BallPoint(p0_of(z)), math.exp(z[d]), status,
                         trace, count[0], conf)


def small_tau_limit(sigma, p0, taus=(1e-2, 1e-3, 1e-4)) -> dict:
    """F at decreasing tau with a Richardson step linear in tau."""
    taus = sorted(taus, reverse=True)
    h = _mesh_size(sigma)
    if h is not None and h > math.sqrt(min(taus)) / 4:
        warnings.warn(f"mesh size {h:.3g} is too coarse for tau = {min(taus):g} (need h <= sqrt(tau)/4)")
    vals = [f_functional(sigma, p0, t) for t in taus]
    t1, t2 = taus[-2], taus[-1]
    limit = vals[-1] + (vals[-1] - vals[-2]) * t2 / (t1 - t2)
    return {"taus": taus, "values": vals, "limit": limit}

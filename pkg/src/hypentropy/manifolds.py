"""Discrete submanifolds of the Poincaré ball with hyperbolic volume weights.

Four representations share one small interface:

* ``DiscreteCurve``   polyline, open or closed, any ambient dimension
* ``TriMeshSurface``  triangulated surface in the 3-ball
* ``GeodesicSphere``  exact metric sphere (analytic weights)
* ``GeodesicDisk``    totally geodesic n-plane, optionally truncated

``volume_elements()`` returns sample points and weights whose sum
approximates integrals over the submanifold.  ``normal_defect(p0)`` gives
|grad^perp rho| at the samples, where rho = dist(., p0).
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from . import hypgeo as hg
from .heatkernel import sphere_volume

NEAR_BOUNDARY = 1e-6
TANGENTIAL_MARGIN = 1e-8


class VolumeElements(NamedTuple):
    points: np.ndarray   # (N, d)
    weights: np.ndarray  # (N,)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def as_pairs(self) -> list:
        return [(hg.BallPoint(p), float(w)) for p, w in zip(self.points, self.weights)]


def _points_array(vertices) -> np.ndarray:
    if len(vertices) and isinstance(vertices[0], hg.BallPoint):
        v = np.array([p.coords for p in vertices])
    else:
        v = np.array(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] < 2:
        raise ValueError("vertices must be an (N, d) array with d >= 2")
    norms = np.linalg.norm(v, axis=1)
    if np.any(norms >= 1.0 - hg.BOUNDARY_EPS):
        raise ValueError("all vertices must lie strictly inside the unit ball")
    v.setflags(write=False)
    return v


def _check_volume_ready(v: np.ndarray) -> None:
    if np.any(np.linalg.norm(v, axis=1) > 1.0 - NEAR_BOUNDARY):
        raise ValueError("vertices within 1e-6 of the ideal boundary; use the boundary module")


def _karcher_mean(points: np.ndarray, weights: np.ndarray, iters: int = 50) -> np.ndarray:
    c = np.zeros(points.shape[1])
    w = weights / weights.sum()
    for _ in range(iters):
        y = hg.log_origin(hg.mobius_add(-c, points))
        step = w @ y
        c = hg.mobius_add(c, hg.exp_origin(step))
        if np.linalg.norm(step) < 1e-13:
            break
    return c


class _Base:
    ambient_dim: int
    dim: int

    def centroid(self) -> np.ndarray:
        ve = self.volume_elements()
        return _karcher_mean(ve.points, ve.weights)

    def extrinsic_radius(self, center=None) -> float:
        c = self.centroid() if center is None else np.asarray(center, dtype=float)
        return float(np.max(hg.dist_array(self.sample_points(), c)))

    def sample_points(self) -> np.ndarray:
        return self.volume_elements().points

    def volume(self) -> float:
        return self.volume_elements().total

    def transformed(self, T: hg.BallIsometry):
        raise NotImplementedError


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True, eq=False)
class DiscreteCurve(_Base):
    vertices: np.ndarray
    closed: bool = True
    h: float | None = None

    def __post_init__(self):
        v = _points_array(self.vertices)
        object.__setattr__(self, "vertices", v)
        need = 3 if self.closed else 2
        if len(v) < need:
            raise ValueError(f"a {'closed' if self.closed else 'open'} curve needs >= {need} vertices")
        lengths = self.edge_lengths()
        if np.any(lengths <= 0):
            raise ValueError("consecutive vertices must be distinct")
        if self.h is not None and lengths.max() > self.h * (1 + 1e-12):
            raise ValueError(f"max edge {lengths.max():.3g} exceeds mesh parameter h = {self.h}")

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    dim = 1

    def _ends(self):
        v = self.vertices
        if self.closed:
            return v, np.roll(v, -1, axis=0)
        return v[:-1], v[1:]

    def edge_lengths(self) -> np.ndarray:
        a, b = self._ends()
        return hg.dist_array(a, b)

    def length(self) -> float:
        return float(self.edge_lengths().sum())

    def mesh_size(self) -> float:
        return float(self.edge_lengths().max())

    def volume_elements(self) -> VolumeElements:
        _check_volume_ready(self.vertices)
        a, b = self._ends()
        return VolumeElements(hg.geodesic_point_array(a, b, 0.5), hg.dist_array(a, b))

    def tangents(self) -> np.ndarray:
        """Unit tangent of each edge at its midpoint (Euclidean components)."""
        a, b = self._ends()
        m = hg.geodesic_point_array(a, b, 0.5)
        y = hg.mobius_add(-m, b)  # translation to 0 has a scalar differential
        return y / np.linalg.norm(y, axis=1, keepdims=True)

    def normal_defect(self, p0) -> np.ndarray:
        ve = self.volume_elements()
        u = hg.radial_direction_array(ve.points, hg._coords(p0))
        c = np.einsum("ij,ij->i", u, self.tangents())
        return np.sqrt(np.clip(1.0 - c * c, 0.0, None))

    def refine(self) -> "DiscreteCurve":
        a, b = self._ends()
        mids = hg.geodesic_point_array(a, b, 0.5)
        h = None if self.h is None else self.h / 2
        return DiscreteCurve(_interleave(self.vertices, mids), self.closed, h)

    def transformed(self, T: hg.BallIsometry) -> "DiscreteCurve":
        return DiscreteCurve(T.apply_array(self.vertices), self.closed, None)

    def to_json(self) -> dict:
        return {"model": "poincare_ball", "ambient_dim": self.ambient_dim, "submanifold_dim": 1,
                "kind": "curve", "vertices": self.vertices.tolist(), "elements": [],
                "closed": bool(self.closed)}

    @classmethod
    def geodesic_circle(cls, r: float, n: int = 512, center=None, d: int = 2) -> "DiscreteCurve":
        """Metric circle of radius r (in the first coordinate plane)."""
        phi = 2 * np.pi * np.arange(n) / n
        pts = np.zeros((n, d))
        pts[:, 0] = np.cos(phi)
        pts[:, 1] = np.sin(phi)
        pts *= math.tanh(r / 2)
        if center is not None:
            pts = hg.mobius_add(np.asarray(hg._coords(center), dtype=float), pts)
        return cls(pts, True)

    @classmethod
    def geodesic_segment(cls, p, q, n: int = 2) -> "DiscreteCurve":
        s = np.linspace(0.0, 1.0, n)
        p, q = np.asarray(hg._coords(p)), np.asarray(hg._coords(q))
        pts = np.array([hg.geodesic_point_array(p, q, si) for si in s])
        return cls(pts, False)


def _interleave(v: np.ndarray, mids: np.ndarray) -> np.ndarray:
    out = np.empty((len(v) + len(mids), v.shape[1]))
    out[0::2] = v
    out[1::2] = mids
    return out


# ---------------------------------------------------------------------------
# triangle meshes


@dataclass(frozen=True, eq=False)
class TriMeshSurface(_Base):
    vertices: np.ndarray
    triangles: np.ndarray
    subdivisions: int = 0

    dim = 2

    def __post_init__(self):
        v = _points_array(self.vertices)
        if v.shape[1] != 3:
            raise ValueError("triangle meshes live in the 3-ball")
        tri = np.array(self.triangles, dtype=np.int64)
        if tri.ndim != 2 or tri.shape[1] != 3:
            raise ValueError("triangles must be an (M, 3) index array")
        if tri.min() < 0 or tri.max() >= len(v):
            raise ValueError("triangle index out of range")
        if np.any((tri[:, 0] == tri[:, 1]) | (tri[:, 1] == tri[:, 2]) | (tri[:, 0] == tri[:, 2])):
            raise ValueError("triangle with repeated vertex")
        for i, j in ((0, 1), (1, 2), (2, 0)):
            if np.any(hg.dist_array(v[tri[:, i]], v[tri[:, j]]) <= 1e-10):
                raise ValueError("degenerate triangle (edge shorter than 1e-10)")
        _check_orientation(tri)
        tri.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", tri)

    ambient_dim = 3

    def _elements(self):
        if self.subdivisions:
            mesh = self
            for _ in range(self.subdivisions):
                mesh = mesh.refine()
            return mesh.vertices, mesh.triangles
        return self.vertices, self.triangles

    def volume_elements(self) -> VolumeElements:
        v, tri = self._elements()
        _check_volume_ready(v)
        a, b, c = v[tri[:, 0]], v[tri[:, 1]], v[tri[:, 2]]
        cen = (a + b + c) / 3.0
        area = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)
        return VolumeElements(cen, area * hg.conformal_factor(cen) ** 2)

    def normals(self) -> np.ndarray:
        v, tri = self._elements()
        a, b, c = v[tri[:, 0]], v[tri[:, 1]], v[tri[:, 2]]
        nrm = np.cross(b - a, c - a)
        return nrm / np.linalg.norm(nrm, axis=1, keepdims=True)

    def normal_defect(self, p0) -> np.ndarray:
        ve = self.volume_elements()
        u = hg.radial_direction_array(ve.points, hg._coords(p0))
        return np.abs(np.einsum("ij,ij->i", u, self.normals()))

    def refine(self) -> "TriMeshSurface":
        v = [row for row in self.vertices]
        cache: dict = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                cache[key] = len(v)
                v.append(hg.geodesic_point_array(self.vertices[i], self.vertices[j], 0.5))
            return cache[key]

        out = []
        for i, j, k in self.triangles:
            a, b, c = mid(i, j), mid(j, k), mid(k, i)
            out += [(i, a, c), (a, j, b), (c, b, k), (a, b, c)]
        return TriMeshSurface(np.array(v), np.array(out))

    def transformed(self, T: hg.BallIsometry) -> "TriMeshSurface":
        return TriMeshSurface(T.apply_array(self.vertices), self.triangles, self.subdivisions)

    def to_json(self) -> dict:
        return {"model": "poincare_ball", "ambient_dim": 3, "submanifold_dim": 2, "kind": "trimesh",
                "vertices": self.vertices.tolist(), "elements": self.triangles.tolist(),
                "closed": _is_closed(self.triangles)}

    @classmethod
    def geodesic_sphere_mesh(cls, r: float, level: int = 3, center=None) -> "TriMeshSurface":
        """Icosphere projected onto the metric sphere of radius r."""
        v, tri = _icosphere(level)
        pts = v * math.tanh(r / 2)
        if center is not None:
            pts = hg.mobius_add(np.asarray(hg._coords(center), dtype=float), pts)
        return cls(pts, tri)

    def sphere_slice(self, p0, r: float):
        return _mesh_slice(self, np.asarray(hg._coords(p0), dtype=float), r)


def _check_orientation(tri: np.ndarray) -> None:
    seen: dict = {}
    for t in tri:
        for i, j in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            if (i, j) in seen:
                raise ValueError("inconsistent triangle orientation or non-manifold edge")
            seen[(i, j)] = True


def _is_closed(tri: np.ndarray) -> bool:
    directed = {(int(a), int(b)) for t in tri for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))}
    return all((b, a) in directed for a, b in directed)


def _icosphere(level: int):
    p = (1 + 5 ** 0.5) / 2
    v = [(-1, p, 0), (1, p, 0), (-1, -p, 0), (1, -p, 0), (0, -1, p), (0, 1, p),
         (0, -1, -p), (0, 1, -p), (p, 0, -1), (p, 0, 1), (-p, 0, -1), (-p, 0, 1)]
    f = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
         (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
         (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    v = [np.array(x, float) / np.linalg.norm(x) for x in v]
    for _ in range(level):
        cache: dict = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = v[i] + v[j]
                cache[key] = len(v)
                v.append(m / np.linalg.norm(m))
            return cache[key]

        nf = []
        for i, j, k in f:
            a, b, c = mid(i, j), mid(j, k), mid(k, i)
            nf += [(i, a, c), (a, j, b), (c, b, k), (a, b, c)]
        f = nf
    return np.array(v), np.array(f)


def _edge_crossing(pa, pb, p0, r):
    def g(s):
        return float(hg.dist_array(hg.geodesic_point_array(pa, pb, s), p0)) - r
    s = brentq(g, 0.0, 1.0, xtol=1e-14, rtol=1e-14)
    return hg.geodesic_point_array(pa, pb, s)


@dataclass
class SliceResult:
    length: float
    segments: int
    tangential: list = field(default_factory=list)


def _mesh_slice(mesh: TriMeshSurface, p0: np.ndarray, r: float) -> SliceResult:
    v, tri = mesh._elements()
    dv = hg.dist_array(v, p0) - r
    total, count, flagged = 0.0, 0, []
    for idx, t in enumerate(tri):
        f = dv[t]
        if f.min() >= 0 or f.max() <= 0:
            continue
        if np.min(np.abs(f)) < TANGENTIAL_MARGIN:
            flagged.append(idx)
            continue
        crossings = []
        for i, j in ((0, 1), (1, 2), (2, 0)):
            if (f[i] < 0) != (f[j] < 0):
                crossings.append(_edge_crossing(v[t[i]], v[t[j]], p0, r))
        if len(crossings) == 2:
            total += float(hg.dist_array(crossings[0], crossings[1]))
            count += 1
    if flagged:
        warnings.warn(f"{len(flagged)} triangles skipped as tangential to the slicing sphere")
    return SliceResult(total, count, flagged)


# ---------------------------------------------------------------------------
# analytic pieces


def _gauss_legendre_panels(edges, order=16):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * x
    weights = 0.5 * (b - a) * w
    return nodes.ravel(), weights.ravel()


def _sphere_directions(n: int, resolution: int):
    """Quadrature on the unit n-sphere inside R^(n+1): (dirs, weights)."""
    if n == 1:
        phi = 2 * np.pi * np.arange(resolution) / resolution
        return np.stack([np.cos(phi), np.sin(phi)], axis=1), np.full(resolution, 2 * np.pi / resolution)
    if n == 2:
        z, wz = np.polynomial.legendre.leggauss(resolution)
        nphi = 2 * resolution
        phi = 2 * np.pi * np.arange(nphi) / nphi
        s = np.sqrt(1 - z * z)
        dirs = np.stack([np.outer(s, np.cos(phi)), np.outer(s, np.sin(phi)),
                         np.outer(z, np.ones(nphi))], axis=-1).reshape(-1, 3)
        w = np.outer(wz, np.full(nphi, 2 * np.pi / nphi)).ravel()
        return dirs, w
    raise ValueError("sampled spheres are implemented for dimensions 1 and 2")


@dataclass(frozen=True, eq=False)
class GeodesicSphere(_Base):
    center: np.ndarray
    radius: float
    sphere_dim: int = 2
    resolution: int = 64

    def __post_init__(self):
        c = np.array(hg._coords(self.center), dtype=float)
        hg.BallPoint(c)
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if c.size != self.sphere_dim + 1:
            raise ValueError("ambient dimension must equal sphere_dim + 1")
        c.setflags(write=False)
        object.__setattr__(self, "center", c)

    @property
    def ambient_dim(self) -> int:
        return self.sphere_dim + 1

    @property
    def dim(self) -> int:
        return self.sphere_dim

    def volume(self) -> float:
        return sphere_volume(self.sphere_dim) * math.sinh(self.radius) ** self.sphere_dim

    def volume_elements(self) -> VolumeElements:
        dirs, w = _sphere_directions(self.sphere_dim, self.resolution)
        pts = hg.mobius_add(self.center, dirs * math.tanh(self.radius / 2))
        return VolumeElements(pts, w * math.sinh(self.radius) ** self.sphere_dim)

    def centroid(self) -> np.ndarray:
        return np.array(self.center)

    def extrinsic_radius(self, center=None) -> float:
        if center is None:
            return self.radius
        return super().extrinsic_radius(center)

    def normal_defect(self, p0) -> np.ndarray:
        ve = self.volume_elements()
        u = hg.radial_direction_array(ve.points, hg._coords(p0))
        nu = hg.radial_direction_array(ve.points, self.center)
        return np.abs(np.einsum("ij,ij->i", u, nu))

    def transformed(self, T: hg.BallIsometry) -> "GeodesicSphere":
        return GeodesicSphere(T.apply_array(self.center), self.radius, self.sphere_dim, self.resolution)

    def to_json(self) -> dict:
        return {"model": "poincare_ball", "ambient_dim": self.ambient_dim,
                "submanifold_dim": self.sphere_dim, "kind": "sphere", "vertices": [],
                "elements": [], "closed": True, "center": self.center.tolist(),
                "radius": self.radius}


@dataclass(frozen=True, eq=False)
class GeodesicDisk(_Base):
    """Totally geodesic n-plane through ``base`` tangent to ``frame``.

    ``frame`` rows are orthonormal (Euclidean) vectors; the ball metric is
    conformal so they are also metric-orthogonal at the base point.
    ``radius`` truncates the plane to a metric disk about ``base``; use
    ``math.inf`` for the full plane (analytic operations only).
    """

    base: np.ndarray
    frame: np.ndarray
    radius: float = math.inf
    resolution: int = 48

    def __post_init__(self):
        b = np.array(hg._coords(self.base), dtype=float)
        hg.BallPoint(b)
        E = np.atleast_2d(np.array(self.frame, dtype=float))
        if E.shape[1] != b.size or E.shape[0] >= b.size:
            raise ValueError("frame must have fewer rows than the ambient dimension")
        if np.max(np.abs(E @ E.T - np.eye(E.shape[0]))) > 1e-10:
            raise ValueError("frame is not orthonormal")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        b.setflags(write=False)
        E.setflags(write=False)
        object.__setattr__(self, "base", b)
        object.__setattr__(self, "frame", E)

    @property
    def ambient_dim(self) -> int:
        return self.base.size

    @property
    def dim(self) -> int:
        return self.frame.shape[0]

    @classmethod
    def through(cls, base, frame, radius=math.inf, **kw) -> "GeodesicDisk":
        return cls(base, frame, radius, **kw)

    @classmethod
    def coordinate_plane(cls, d: int = 3, n: int = 2, offset: float = 0.0, radius=math.inf,
                         **kw) -> "GeodesicDisk":
        """Plane spanned by e_1..e_n, pushed a metric distance ``offset`` along e_d."""
        base = np.zeros(d)
        base[-1] = math.tanh(offset / 2)
        return cls(base, np.eye(d)[:n], radius, **kw)

    def volume(self) -> float:
        if math.isinf(self.radius):
            return math.inf
        if self.dim == 1:
            return 2 * self.radius
        if self.dim == 2:
            return 2 * math.pi * (math.cosh(self.radius) - 1)
        raise NotImplementedError

    def to_local(self, x: np.ndarray) -> np.ndarray:
        """Isometry moving the base to 0 (the plane becomes a linear subspace)."""
        return hg.mobius_add(-self.base, x)

    def from_local(self, y: np.ndarray) -> np.ndarray:
        return hg.mobius_add(self.base, y)

    def foot_data(self, p0) -> tuple[float, float]:
        """(a, b): distance from base to the foot point of p0 and from p0 to the plane."""
        y = self.to_local(np.asarray(hg._coords(p0), dtype=float))
        E = self.frame
        yt = E.T @ (E @ y)
        yn = y - yt
        # reflect through the plane: the geodesic from y to its mirror image
        # crosses the plane orthogonally at the foot point
        mirror = yt - yn
        b = 0.5 * float(hg.dist_array(y, mirror))
        foot = hg.geodesic_point_array(y, mirror, 0.5)
        a = float(hg.dist_from_origin(foot))
        return a, b

    def volume_elements(self) -> VolumeElements:
        if math.isinf(self.radius):
            raise ValueError("infinite disk has no finite volume elements; truncate it")
        R = self.radius
        nr = max(4, int(math.ceil(R / 0.25)))
        r, wr = _gauss_legendre_panels(np.linspace(0, R, nr + 1), 8)
        if self.dim == 1:
            dirs, wd = np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
        else:
            dirs, wd = _sphere_directions(self.dim - 1, self.resolution)
        local = (np.tanh(r / 2)[:, None, None] * dirs[None, :, :]).reshape(-1, self.dim) @ self.frame
        w = (wr * np.sinh(r) ** (self.dim - 1))[:, None] * wd[None, :]
        return VolumeElements(self.from_local(local), w.ravel())

    def normal_defect(self, p0) -> np.ndarray:
        ve = self.volume_elements()
        y = self.to_local(ve.points)
        u = hg.radial_direction_array(y, self.to_local(np.asarray(hg._coords(p0), dtype=float)))
        un = u - (u @ self.frame.T) @ self.frame
        return np.linalg.norm(un, axis=1)

    def centroid(self) -> np.ndarray:
        return np.array(self.base)

    def extrinsic_radius(self, center=None) -> float:
        if center is None:
            return self.radius
        return super().extrinsic_radius(center)

    def sample_points(self) -> np.ndarray:
        if math.isinf(self.radius):
            return GeodesicDisk(self.base, self.frame, 3.0, self.resolution).volume_elements().points
        return self.volume_elements().points

    def sphere_slice(self, p0, r: float) -> float:
        """Length/area of the plane inside the metric sphere of radius r about p0."""
        a, b = self.foot_data(p0)
        if r <= b:
            return 0.0
        rr = math.acosh(math.cosh(r) / math.cosh(b))
        if not math.isinf(self.radius) and rr + a > self.radius:
            raise ValueError("slice leaves the truncated disk")
        return sphere_volume(self.dim - 1) * math.sinh(rr) ** (self.dim - 1)

    def ideal_boundary(self, npts: int = 512) -> np.ndarray:
        """Ideal boundary of the full plane (dim 2 only): unit vectors."""
        if self.dim != 2:
            raise ValueError("ideal boundary sampling implemented for 2-planes")
        phi = 2 * np.pi * np.arange(npts) / npts
        local = np.cos(phi)[:, None] * self.frame[0] + np.sin(phi)[:, None] * self.frame[1]
        out = hg.mobius_add(self.base, local)
        return out / np.linalg.norm(out, axis=1, keepdims=True)

    def transformed(self, T: hg.BallIsometry) -> "GeodesicDisk":
        # geodesics from the base inside the plane map to geodesics from the
        # new base; translated to 0 they are diameters along the new frame
        nb = T.apply_array(self.base)
        dirs = hg.mobius_add(-nb, T.apply_array(self.from_local(0.5 * self.frame)))
        q, rr = np.linalg.qr(dirs.T)
        E = (q * np.sign(np.diag(rr))).T
        return GeodesicDisk(nb, E, self.radius, self.resolution)

    def to_json(self) -> dict:
        return {"model": "poincare_ball", "ambient_dim": self.ambient_dim,
                "submanifold_dim": self.dim, "kind": "disk", "vertices": [], "elements": [],
                "closed": False, "center": self.base.tolist(), "frame": self.frame.tolist(),
                "radius": None if math.isinf(self.radius) else self.radius}


# ---------------------------------------------------------------------------
# generic entry points


def volume_elements(sigma) -> VolumeElements:
    return sigma.volume_elements()


def normal_defect(sigma, p0) -> np.ndarray:
    return sigma.normal_defect(p0)


def refine(sigma):
    return sigma.refine()


def sphere_slice(sigma, p0, r: float) -> float:
    res = sigma.sphere_slice(p0, r)
    return res.length if isinstance(res, SliceResult) else res


def from_json(data) -> _Base:
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    if data.get("model", "poincare_ball") != "poincare_ball":
        raise ValueError("only the poincare_ball model is supported")
    kind = data.get("kind")
    if kind == "curve":
        return DiscreteCurve(np.array(data["vertices"], float), bool(data.get("closed", True)))
    if kind == "trimesh":
        return TriMeshSurface(np.array(data["vertices"], float), np.array(data["elements"], int))
    if kind == "sphere":
        return GeodesicSphere(np.array(data["center"], float), float(data["radius"]),
                              int(data.get("submanifold_dim", len(data["center"]) - 1)))
    if kind == "disk":
        d = int(data.get("ambient_dim", len(data["center"])))
        n = int(data.get("submanifold_dim", d - 1))
        frame = data.get("frame") or np.eye(d)[:n].tolist()
        radius = data.get("radius")
        return GeodesicDisk(np.array(data["center"], float), np.array(frame, float),
                            math.inf if radius is None else float(radius))
    raise ValueError(f"unknown submanifold kind {kind!r}")


def load(path) -> _Base:
    with open(path) as fh:
        return from_json(json.load(fh))


def dump(sigma, path) -> None:
    with open(path, "w") as fh:
        json.dump(sigma.to_json(), fh)

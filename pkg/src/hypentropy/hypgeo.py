"""Poincaré ball model of hyperbolic space.

Points are stored in ball coordinates, isometries in the normal form
``x -> translate(a)(R x)``.  Most helpers also have array-level variants
(``*_array``) that act on stacks of points with shape ``(..., d)``; the
submanifold and flow code uses those directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

BOUNDARY_EPS = 1e-12


def _as_vector(x) -> np.ndarray:
    v = np.array(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d coordinate vector, got shape {v.shape}")
    v.setflags(write=False)
    return v


@dataclass(frozen=True, eq=False)
class BallPoint:
    """A point of H^d in ball coordinates, strictly inside the unit ball."""

    coords: np.ndarray

    def __post_init__(self):
        v = _as_vector(self.coords)
        if v.size < 2:
            raise ValueError("ambient dimension must be at least 2")
        if not np.all(np.isfinite(v)):
            raise ValueError("coordinates must be finite")
        if np.linalg.norm(v) >= 1.0 - BOUNDARY_EPS:
            raise ValueError(f"|x| = {np.linalg.norm(v):.17g} is not inside the ball")
        object.__setattr__(self, "coords", v)

    @property
    def d(self) -> int:
        return self.coords.size

    @classmethod
    def origin(cls, d: int) -> "BallPoint":
        return cls(np.zeros(d))

    def to_json(self) -> list:
        return [float(c) for c in self.coords]

    def __repr__(self):
        return f"BallPoint({np.array2string(self.coords, precision=6)})"

    def __eq__(self, other):
        return isinstance(other, BallPoint) and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())


@dataclass(frozen=True, eq=False)
class IdealPoint:
    """A point of the ideal boundary, i.e. a unit vector."""

    direction: np.ndarray

    def __post_init__(self):
        v = _as_vector(self.direction)
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ValueError("ideal points must be unit vectors")
        object.__setattr__(self, "direction", v)

    @property
    def d(self) -> int:
        return self.direction.size


def _coords(p) -> np.ndarray:
    if isinstance(p, BallPoint):
        return p.coords
    if isinstance(p, IdealPoint):
        return p.direction
    return np.asarray(p, dtype=float)


# ---------------------------------------------------------------------------
# array-level primitives


def mobius_add(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Möbius addition ``a (+) x``; broadcasts over leading axes.

    This is the ball translation taking 0 to ``a``.  It is also valid for
    ``|x| = 1``, where it gives the boundary action.
    """
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    ax = np.sum(a * x, axis=-1, keepdims=True)
    aa = np.sum(a * a, axis=-1, keepdims=True)
    xx = np.sum(x * x, axis=-1, keepdims=True)
    num = (1.0 + 2.0 * ax + xx) * a + (1.0 - aa) * x
    den = 1.0 + 2.0 * ax + aa * xx
    return num / den


def dist_array(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hyperbolic distance between stacks of ball points.

    Uses ``sinh(d/2) = |p-q| / sqrt((1-|p|^2)(1-|q|^2))``, the half-angle
    form of ``cosh d = 1 + 2|p-q|^2/((1-|p|^2)(1-|q|^2))``; it keeps full
    relative precision for nearby points.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    diff = np.sqrt(np.sum((p - q) ** 2, axis=-1))
    np_ = np.sqrt(np.sum(p * p, axis=-1))
    nq = np.sqrt(np.sum(q * q, axis=-1))
    den = np.sqrt((1.0 - np_) * (1.0 + np_) * (1.0 - nq) * (1.0 + nq))
    return 2.0 * np.arcsinh(diff / den)


def dist_from_origin(x: np.ndarray) -> np.ndarray:
    s = np.sqrt(np.sum(np.asarray(x, dtype=float) ** 2, axis=-1))
    return 2.0 * np.arctanh(s)


def conformal_factor(x: np.ndarray) -> np.ndarray:
    """lambda(x) = 2 / (1 - |x|^2), so that g_P = lambda^2 g_euclid."""
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    return 2.0 / (1.0 - r2)


def exp_origin(v: np.ndarray) -> np.ndarray:
    """Exponential map at the origin: the point at distance |v| along v."""
    v = np.asarray(v, dtype=float)
    n = np.sqrt(np.sum(v * v, axis=-1, keepdims=True))
    scale = np.where(n > 0, np.tanh(0.5 * n) / np.where(n > 0, n, 1.0), 0.5)
    return scale * v


def log_origin(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = np.sqrt(np.sum(x * x, axis=-1, keepdims=True))
    scale = np.where(n > 0, 2.0 * np.arctanh(n) / np.where(n > 0, n, 1.0), 2.0)
    return scale * x


def radial_direction_array(x: np.ndarray, p0: np.ndarray) -> np.ndarray:
    """Euclidean unit vector of grad(dist(., p0)) at x.

    Ball coordinates are conformal, so this is also the direction of the
    metric gradient.  Translating x to the origin makes the geodesic from
    p0 a diameter, and the differential of that translation at 0 is a pure
    scaling, so the direction can be read off as ``-((-x) (+) p0)``.
    """
    x = np.asarray(x, dtype=float)
    y = mobius_add(-x, np.broadcast_to(p0, x.shape))
    n = np.sqrt(np.sum(y * y, axis=-1, keepdims=True))
    with np.errstate(invalid="ignore", divide="ignore"):
        return -y / n


# ---------------------------------------------------------------------------
# point-level API


def hyp_dist(p: BallPoint, q: BallPoint) -> float:
    if p.d != q.d:
        raise ValueError(f"dimension mismatch: {p.d} vs {q.d}")
    return float(dist_array(p.coords, q.coords))


@dataclass(frozen=True, eq=False)
class BallIsometry:
    """Isometry ``x -> translate(translation)(rotation @ x)`` of the ball."""

    translation: np.ndarray
    rotation: np.ndarray = field(default=None)

    def __post_init__(self):
        a = _as_vector(self.translation)
        if np.linalg.norm(a) >= 1.0:
            raise ValueError("translation must lie strictly inside the unit ball")
        R = np.eye(a.size) if self.rotation is None else np.array(self.rotation, dtype=float)
        if R.shape != (a.size, a.size):
            raise ValueError("rotation has the wrong shape")
        if np.max(np.abs(R.T @ R - np.eye(a.size))) > 1e-10:
            raise ValueError("rotation is not orthogonal")
        R.setflags(write=False)
        object.__setattr__(self, "translation", a)
        object.__setattr__(self, "rotation", R)

    @property
    def d(self) -> int:
        return self.translation.size

    @classmethod
    def identity(cls, d: int) -> "BallIsometry":
        return cls(np.zeros(d))

    def apply_array(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return mobius_add(self.translation, x @ self.rotation.T)

    def apply(self, p: BallPoint) -> BallPoint:
        return BallPoint(self.apply_array(p.coords))

    def boundary_array(self, xi: np.ndarray) -> np.ndarray:
        y = self.apply_array(xi)
        return y / np.linalg.norm(y, axis=-1, keepdims=True)

    def extend_to_boundary(self, xi: IdealPoint) -> IdealPoint:
        return IdealPoint(self.boundary_array(xi.direction))

    def inverse(self) -> "BallIsometry":
        Rt = self.rotation.T
        return BallIsometry(-(Rt @ self.translation), Rt)

    def compose(self, other: "BallIsometry") -> "BallIsometry":
        """Return ``self o other`` renormalised to translation-rotation form."""
        a1, R1 = self.translation, self.rotation
        b = R1 @ other.translation
        a = mobius_add(a1, b)
        # t_a1 t_b = t_(a1+b) gyr[a1, b]; gyr is linear, so probe basis vectors.
        probe = 0.5 * np.eye(self.d)
        gyr = mobius_add(-a, mobius_add(a1, mobius_add(b, probe))).T / 0.5
        u, _, vt = np.linalg.svd(gyr)
        return BallIsometry(a, (u @ vt) @ R1 @ other.rotation)

    def __matmul__(self, other: "BallIsometry") -> "BallIsometry":
        return self.compose(other)


def mobius_translate(a) -> BallIsometry:
    a = np.asarray(a, dtype=float)
    if np.linalg.norm(a) >= 1.0:
        raise ValueError("|a| must be < 1")
    return BallIsometry(a)


def apply_isometry(T: BallIsometry, p: BallPoint) -> BallPoint:
    return T.apply(p)


def extend_to_boundary(T: BallIsometry, xi: IdealPoint) -> IdealPoint:
    return T.extend_to_boundary(xi)


def random_isometry(rng: np.random.Generator, d: int, max_shift: float = 0.8) -> BallIsometry:
    """Random isometry with translation radius below ``max_shift``."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    direction = rng.standard_normal(d)
    direction /= np.linalg.norm(direction)
    return BallIsometry(direction * max_shift * rng.uniform() ** (1.0 / d), q)


def geodesic_point(p: BallPoint, q: BallPoint, s: float) -> BallPoint:
    """Point at arclength ``s * dist(p, q)`` from p on the geodesic to q."""
    return BallPoint(geodesic_point_array(p.coords, q.coords, s))


def geodesic_point_array(p: np.ndarray, q: np.ndarray, s) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    y = mobius_add(-p, q)
    n = np.sqrt(np.sum(y * y, axis=-1, keepdims=True))
    s = np.asarray(s, dtype=float)[..., None] if np.ndim(s) else s
    with np.errstate(invalid="ignore", divide="ignore"):
        target = np.tanh(s * np.arctanh(n)) / n
    y = np.where(n > 0, target * y, 0.0)
    return mobius_add(p, y)


def radial_hessian_coeffs(rho: float, df: float, d2f: float) -> tuple[float, float]:
    """Coefficients of Hess f = f'' drho^2 + coth(rho) f' (g - drho^2)."""
    if not rho > 0:
        raise ValueError("rho must be positive; the origin needs separate handling")
    return d2f, df / math.tanh(rho)


def sphere_boundary_distance(xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Great-circle distance between unit vectors, stable for close points."""
    chord = np.sqrt(np.sum((np.asarray(xi) - np.asarray(eta)) ** 2, axis=-1))
    return 2.0 * np.arcsin(np.clip(0.5 * chord, 0.0, 1.0))

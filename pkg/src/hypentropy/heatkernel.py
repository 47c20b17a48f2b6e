"""Heat kernels K_n(t, rho) of hyperbolic n-space.

``K_n(t, .)`` is the radial profile of the heat kernel; the heat kernel at
time t between points p and q is ``K_n(t, dist(p, q))``.

Values are carried in log-space.  A :class:`KernelValue` stores
``log_value`` and the log-derivatives ``dlog = K'/K`` and
``d2log = (log K)''`` next to the linear ``value, d1, d2``; the linear
fields underflow to zero far out (large rho or t) while the log fields stay
finite.

Odd n use the closed forms K_1, K_3 and, for n >= 5, exact Taylor jets of
the Millison recurrence.  Even n use one singular quadrature per point (see
``_kernels_py`` for the formulas).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import NamedTuple

import numpy as np

from . import _backend

MAX_N = 2 * _backend.core.MAXM + 1
QUAD_RTOL = 1e-12
QUAD_ATOL = 0.0


class QuadratureError(RuntimeError):
    """Adaptive quadrature hit its refinement limit."""


@dataclass(frozen=True)
class KernelValue:
    n: int
    t: float
    rho: float
    value: float
    d1: float
    d2: float
    method: str
    log_value: float
    dlog: float
    d2log: float
    gap: float

    def record(self) -> dict:
        """JSON record {n, t, rho, value, d1, d2, method} plus log fields."""
        return asdict(self)


class KernelArrays(NamedTuple):
    """Vectorized kernel output for one (n, t) and an array of radii."""

    log_value: np.ndarray
    dlog: np.ndarray
    d2log: np.ndarray
    gap: np.ndarray
    r2: np.ndarray  # K''/K
    method: str

    @property
    def value(self) -> np.ndarray:
        return np.exp(self.log_value)


def _check(n: int, t: float, rho) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if n > MAX_N:
        raise ValueError(f"n = {n} exceeds the supported maximum {MAX_N}")
    if not (t > 0 and math.isfinite(t)):
        raise ValueError(f"t must be positive and finite, got {t!r}")
    r = np.asarray(rho, dtype=float)
    if not np.all(r >= 0) or not np.all(np.isfinite(r)):
        raise ValueError("rho must be finite and >= 0")


def _make(n, t, rho, logk, r1, r2, gap, method) -> KernelValue:
    value = math.exp(logk)
    return KernelValue(
        n=n, t=float(t), rho=float(rho), value=value, d1=r1 * value, d2=r2 * value,
        method=method, log_value=logk, dlog=r1, d2log=r2 - r1 * r1, gap=gap,
    )


# ---------------------------------------------------------------------------
# closed forms


def _inv_minus_coth(rho: float) -> float:
    """1/rho - coth(rho)."""
    if rho < 0.1:
        r2 = rho * rho
        return rho * (-1 / 3 + r2 * (1 / 45 + r2 * (-2 / 945 + r2 * (1 / 4725 - r2 * 2 / 93555))))
    return 1.0 / rho - 1.0 / math.tanh(rho)


def _csch2_minus_inv2(rho: float) -> float:
    """1/sinh(rho)^2 - 1/rho^2."""
    if rho < 0.1:
        r2 = rho * rho
        return -1 / 3 + r2 * (1 / 15 + r2 * (-2 / 189 + r2 * (1 / 675 - r2 * 2 / 10395)))
    return 1.0 / math.sinh(rho) ** 2 - 1.0 / rho ** 2


def _log_rho_over_sinh(rho: float) -> float:
    if rho < 1e-4:
        r2 = rho * rho
        return -r2 / 6.0 + r2 * r2 / 180.0
    if rho < 20.0:
        return math.log(rho / math.sinh(rho))
    return math.log(2.0 * rho) - rho - math.log1p(-math.exp(-2.0 * rho))


def k1(t: float, rho: float) -> KernelValue:
    """Heat kernel of the line."""
    _check(1, t, rho)
    logk = -0.5 * math.log(4.0 * math.pi * t) - rho * rho / (4.0 * t)
    r1 = -rho / (2.0 * t)
    r2 = rho * rho / (4.0 * t * t) - 1.0 / (2.0 * t)
    gap = gap1_closed(t, rho)
    return _make(1, t, rho, logk, r1, r2, gap, "closed-odd")


def k3(t: float, rho: float) -> KernelValue:
    """Heat kernel of hyperbolic 3-space."""
    _check(3, t, rho)
    logk = -1.5 * math.log(4.0 * math.pi * t) + _log_rho_over_sinh(rho) - t - rho * rho / (4.0 * t)
    r1 = _inv_minus_coth(rho) - rho / (2.0 * t)
    d2log = _csch2_minus_inv2(rho) - 1.0 / (2.0 * t)
    return _make(3, t, rho, logk, r1, d2log + r1 * r1, gap3_closed(t, rho), "closed-odd")


def gap1_closed(t: float, rho: float) -> float:
    """(rho coth rho - 1) / 2t, the convexity gap of K_1."""
    return _rho_coth_minus_one(rho) / (2.0 * t)


def _rho_coth_minus_one(rho: float) -> float:
    return -rho * _inv_minus_coth(rho) if rho < 0.1 else rho / math.tanh(rho) - 1.0


def g_function(rho: float) -> float:
    """1 + cosh^2 - sinh^2/rho^2 - cosh sinh/rho, via its series when small."""
    if rho < 0.5:
        x = rho * rho
        total, xl = 0.0, x
        for l in range(1, 14):
            total += (8 * l * l + 4 * l - 12) * 4.0 ** (l - 1) / math.factorial(2 * l + 2) * xl
            xl *= x
        return total
    c, s = math.cosh(rho), math.sinh(rho)
    return 1.0 + c * c - s * s / rho ** 2 - c * s / rho


def gap3_closed(t: float, rho: float) -> float:
    """Convexity gap of K_3: (rho coth rho - 1)/2t + g(rho)/sinh(rho)^2."""
    if rho < 1e-8:
        # leading terms; sinh^2 underflows for subnormal rho
        return rho * rho * (1.0 / (6.0 * t) + 7.0 / 45.0)
    if rho > 350.0:
        return _rho_coth_minus_one(rho) / (2.0 * t) + 1.0 - 1.0 / rho
    return _rho_coth_minus_one(rho) / (2.0 * t) + g_function(rho) / math.sinh(rho) ** 2


# ---------------------------------------------------------------------------
# general n


def _odd_arrays(n, t, rho, core):
    m = (n - 1) // 2
    rest, r1, r2, gap = core.odd_kernel_parts(m, t, rho)
    logk = rest - rho * rho / (4.0 * t) + core.odd_base(m, t)
    return logk, r1, r2, gap


def _even_arrays(n, t, rho, core, rtol, atol, threads):
    m = n // 2
    rest, r1, r2, gap, ok = core.even_kernel_parts(m, t, rho, rtol, atol, threads)
    if not np.all(ok):
        bad = np.asarray(rho)[~ok]
        raise QuadratureError(
            f"K_{n} quadrature did not reach rtol={rtol:g}, atol={atol:g} at t={t:g}, "
            f"rho={bad[:5].tolist()} (panel width hit span*2^-{core.MAX_DEPTH} "
            f"or {core.MAX_PANELS} panels used)")
    logk = rest - rho * rho / (4.0 * t) + core.even_base(m, t)
    return logk, r1, r2, gap


def odd_kernel(n: int, t: float, rho: float, *, backend: str | None = None) -> KernelValue:
    """K_n for odd n via derivative jets of the Millison recurrence."""
    if n % 2 == 0:
        raise ValueError("odd_kernel needs odd n; use even_kernel")
    _check(n, t, rho)
    core = _backend.get_core(backend)
    logk, r1, r2, gap = (float(a[0]) for a in _odd_arrays(n, t, np.array([float(rho)]), core))
    return _make(n, t, rho, logk, r1, r2, gap, "closed-odd")


def even_kernel(n: int, t: float, rho: float, *, rtol: float = QUAD_RTOL, atol: float = QUAD_ATOL,
                backend: str | None = None) -> KernelValue:
    """K_n for even n via the singular integral over K_{n+1}."""
    if n % 2 == 1:
        raise ValueError("even_kernel needs even n; use odd_kernel")
    _check(n, t, rho)
    core = _backend.get_core(backend)
    arrs = _even_arrays(n, t, np.array([float(rho)]), core, rtol, atol, 1)
    logk, r1, r2, gap = (float(a[0]) for a in arrs)
    return _make(n, t, rho, logk, r1, r2, gap, "quadrature-even")


def kernel(n: int, t: float, rho: float, **kw) -> KernelValue:
    """Dispatch to k1, k3, odd_kernel or even_kernel."""
    if n == 1:
        return k1(t, rho)
    if n == 3:
        return k3(t, rho)
    if n % 2:
        return odd_kernel(n, t, rho, backend=kw.get("backend"))
    return even_kernel(n, t, rho, **kw)


def kernel_batch(n: int, t: float, rho, *, rtol: float = QUAD_RTOL, atol: float = QUAD_ATOL,
                 threads: int = 1, backend: str | None = None) -> KernelArrays:
    """Evaluate K_n(t, .) on an array of radii (any shape)."""
    rho = np.asarray(rho, dtype=float)
    _check(n, t, rho)
    core = _backend.get_core(backend)
    flat = np.ascontiguousarray(rho.ravel())
    if n % 2:
        logk, r1, r2, gap = _odd_arrays(n, t, flat, core)
        method = "closed-odd"
    else:
        logk, r1, r2, gap = _even_arrays(n, t, flat, core, rtol, atol, threads)
        method = "quadrature-even"
    shape = rho.shape
    return KernelArrays(logk.reshape(shape), r1.reshape(shape), (r2 - r1 * r1).reshape(shape),
                        gap.reshape(shape), r2.reshape(shape), method)


def sphere_volume(m: int) -> float:
    """Vol(S^m) = 2 pi^((m+1)/2) / Gamma((m+1)/2)."""
    return 2.0 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


def log_sinh(r):
    """log(sinh r) without overflow, for r > 0."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        small = np.log(np.sinh(np.minimum(r, 1.0)))
        big = r + np.log1p(-np.exp(-2.0 * np.maximum(r, 1.0))) - math.log(2.0)
    return np.where(r < 1.0, small, big)


def heat_residual(n: int, t: float, rho: float, rel_step: float = 1e-4, **kw) -> float:
    """(dK/dt - K'' - (n-1) coth(rho) K') / K with a central difference in t."""
    h = rel_step * t
    kp = kernel(n, t + h, rho, **kw)
    km = kernel(n, t - h, rho, **kw)
    k0 = kernel(n, t, rho, **kw)
    dt_log = (kp.log_value - km.log_value) / (2.0 * h)
    r1 = k0.dlog
    r2 = k0.d2log + r1 * r1
    radial = (n - 1) * (r2 if rho == 0.0 else r1 / math.tanh(rho))
    return dt_log - r2 - radial


def mass(n: int, t: float, **kw) -> float:
    """Total mass of K_n(t, .) over hyperbolic n-space (should be 1)."""
    from scipy.integrate import quad

    omega = sphere_volume(n - 1)
    peak = (n - 1) * t  # the radial density peaks near here
    width = 12.0 * math.sqrt(t) + 30.0
    upper = peak + width

    def density(r):
        if r <= 0.0:
            return math.exp(kernel(n, t, 0.0, **kw).log_value) if n == 1 else 0.0
        return math.exp(kernel(n, t, r, **kw).log_value + (n - 1) * float(log_sinh(r)))

    pts = [p for p in (peak,) if 0 < p < upper]
    val, _ = quad(density, 0.0, upper, points=pts or None, limit=500, epsabs=0, epsrel=1e-12)
    return omega * val


def decay_bound(n: int, t: float, rho: float) -> float:
    """Shape of the uniform upper envelope for K_n, with unit constant.

    t^-(n+1)/2 exp(-n^2 t/4 - rho^2/4t - n rho/2) (1+rho+t)^(n/2-1) (1+rho).
    Only used as a scale reference, never as a certified bound.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    logb = (-(n + 1) / 2 * math.log(t) - n * n * t / 4 - rho * rho / (4 * t) - n * rho / 2
            + (n / 2 - 1) * math.log1p(rho + t) + math.log1p(rho))
    return math.exp(logb)

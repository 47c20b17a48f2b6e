"""Pure numpy kernel core (fallback for the compiled ``_kernels`` module).

Both cores work in the variable ``w = cosh(rho)``.  There the Millison step
is a plain derivative, ``K_{n+2} = -e^{-nt}/(2 pi) dK_n/dw``, so

    K_{2m+1}(t, w) = (-1)^m (2 pi)^-m e^{-m^2 t} (d/dw)^m K_1(t, w),
    K_1(t, w)      = (4 pi t)^-1/2 exp(-A(w) / 4t),   A(w) = arccosh(w)^2.

A is analytic at w = 1, so Taylor jets of A (and therefore of every odd
kernel) are computed without any 0/0 at the origin: by re-expanding the
series about w = 1 for small rho, and by a three-term recurrence from the
ODE ``(w^2-1) A'' + w A' = 2`` for larger rho.  Even kernels come from the
integral relation, written as ``K_{2m} = 2 sqrt2 e^{(4m-1)t/4} int_0^inf
K_{2m+1}(t, w + u^2) du`` and evaluated after the substitution
``s = rho + v^2`` by adaptive Gauss-Kronrod.

Every routine returns, per radius:
    rest  -- log K + rho^2/(4t) - base(t)   (see ``odd_base``/``even_base``)
    r1    -- dK/drho / K
    r2    -- d^2K/drho^2 / K
    gap   -- d^2 log K - coth(rho) d log K, computed as
             sinh^2(rho) * d^2/dw^2 log K, which has no cancellation at 0.
"""
from __future__ import annotations

import math

import numpy as np

NAME = "python"

RHO_SPLIT = 1.2
NSERIES = 64
MAXM = 14

# Taylor coefficients of arccosh(w)^2 about w = 1.
_A1 = np.zeros(NSERIES + 1)
_A1[1] = 2.0
for _k in range(1, NSERIES):
    _A1[_k + 1] = -_k * _k * _A1[_k] / ((_k + 1) * (2 * _k + 1))

# _SHIFT[k, p] = C(p + k, k) * a_{p+k}(1): coefficients for re-expanding.
_SHIFT = np.zeros((MAXM + 3, NSERIES + 1))
for _k in range(MAXM + 3):
    for _p in range(NSERIES + 1 - _k):
        _SHIFT[_k, _p] = math.comb(_p + _k, _k) * _A1[_p + _k]

_FACT = np.array([math.factorial(i) for i in range(MAXM + 3)], dtype=float)

# Gauss-Kronrod 7/15 nodes on [-1, 1], ascending.
_XK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
GK_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
GK_KRONROD = np.concatenate([_WK[:-1], _WK[::-1]])
GK_GAUSS = np.zeros(15)
GK_GAUSS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG, _WG[-2::-1]])

N_INITIAL_PANELS = 4
MAX_DEPTH = 40
SPAN_NATS = 80.0
SCALE_RHO = 1.0
# rounding in the integrand exponent is about eps * (rho + |rest|); the
# requested rtol is floored at NOISE_ULPS times that, and a point is
# abandoned (ok = False) after MAX_PANELS panel evaluations.
NOISE_ULPS = 16.0
MAX_PANELS = 20000


def odd_base(m: int, t: float) -> float:
    return -0.5 * math.log(4.0 * math.pi * t) - m * math.log(2.0 * math.pi) - m * m * t


def even_base(m: int, t: float) -> float:
    return math.log(2.0 * math.sqrt(2.0)) + (4 * m - 1) * t / 4.0 + odd_base(m, t)


def _exp_jet(B: np.ndarray) -> np.ndarray:
    """Taylor jet of exp(B) given the jet of B with B[0] == 0."""
    K = B.shape[0] - 1
    E = np.zeros_like(B)
    E[0] = 1.0
    for k in range(1, K + 1):
        acc = np.zeros_like(B[0])
        for j in range(1, k + 1):
            acc += j * B[j] * E[k - j]
        E[k] = acc / k
    return E


def _log_sinh(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(r < 1.0, np.log(np.sinh(np.minimum(r, 1.0))),
                        r + np.log1p(-np.exp(-2.0 * np.maximum(r, 1.0))) - math.log(2.0))


def _odd_parts(m: int, t: float, rho: np.ndarray):
    """(rest, q1, q2, r1, r2, gap, w2) for K_{2m+1}.

    q1, q2 are w-derivative ratios K_w/K, K_ww/K and w2 = sinh^2(rho) q2.
    """
    K = m + 2
    n = rho.size
    rest = np.empty(n)
    q1 = np.empty(n)
    q2 = np.empty(n)
    r1 = np.empty(n)
    r2 = np.empty(n)
    gap = np.empty(n)
    w2 = np.empty(n)
    sign = -1.0 if m % 2 else 1.0
    f0, f1, f2 = _FACT[m], _FACT[m + 1], _FACT[m + 2] / 2.0

    small = rho < RHO_SPLIT
    if small.any():
        r = rho[small]
        x = 2.0 * np.sinh(0.5 * r) ** 2
        a = np.zeros((K + 1, r.size))
        for k in range(1, K + 1):
            acc = np.zeros_like(r)
            for p in range(NSERIES - k, -1, -1):
                acc = acc * x + _SHIFT[k, p]
            a[k] = acc
        E = _exp_jet(-a / (4.0 * t) * (np.arange(K + 1) > 0)[:, None])
        M0 = sign * f0 * E[m]
        M1 = sign * f1 * E[m + 1]
        M2 = sign * f2 * E[m + 2]
        S = np.sinh(r)
        C = np.cosh(r)
        qq1 = M1 / M0
        qq2 = 2.0 * M2 / M0
        rest[small] = np.log(M0)
        q1[small] = qq1
        q2[small] = qq2
        r1[small] = S * qq1
        r2[small] = C * qq1 + S * S * qq2
        gap[small] = S * S * (qq2 - qq1 * qq1)
        w2[small] = S * S * qq2

    big = ~small
    if big.any():
        r = rho[big]
        cth = 1.0 / np.tanh(r)
        a = np.zeros((K + 1, r.size))
        a[0] = r * r
        a[1] = 2.0 * r
        for k in range(0, K - 1):
            rhs = -cth * (k + 1) * (2 * k + 1) * a[k + 1] - k * k * a[k]
            if k == 0:
                rhs = rhs + 2.0
            a[k + 2] = rhs / ((k + 1) * (k + 2))
        a[0] = 0.0
        E = _exp_jet(-a / (4.0 * t))
        M0 = sign * f0 * E[m]
        M1 = sign * f1 * E[m + 1]
        M2 = sign * f2 * E[m + 2]
        S = np.sinh(r)
        t1 = M1 / M0
        t2 = 2.0 * M2 / M0
        rest[big] = np.log(M0) - m * _log_sinh(r)
        q1[big] = t1 / S
        q2[big] = t2 / S / S
        r1[big] = t1
        r2[big] = cth * t1 + t2
        gap[big] = t2 - t1 * t1
        w2[big] = t2
    return rest, q1, q2, r1, r2, gap, w2


def _check_m(m: int) -> None:
    if m < 0 or m > MAXM:
        raise ValueError(f"m must be in [0, {MAXM}]")


def odd_kernel_parts(m: int, t: float, rho):
    """Return (rest, r1, r2, gap) arrays for K_{2m+1}(t, rho)."""
    _check_m(m)
    rho = np.ascontiguousarray(np.atleast_1d(rho), dtype=float)
    with np.errstate(over="ignore"):
        rest, _, _, r1, r2, gap, _ = _odd_parts(m, t, rho)
    return rest, r1, r2, gap


def noise_rtol(rtol: float, rho, rest_rho):
    return np.maximum(rtol, NOISE_ULPS * 2.220446049250313e-16 * (1.0 + rho + np.abs(rest_rho)))


def integration_span(t: float, rho: float) -> float:
    """Upper limit in v: past it the integrand is below e^-SPAN_NATS."""
    b = rho / (2.0 * t) + 0.5
    x = 2.0 * t * (-b + math.sqrt(b * b + SPAN_NATS / t))
    return math.sqrt(x)


def _integrand(m, t, rho, rest_rho, v):
    """Integrands for (I0, J1, J2) at nodes v (same shape as rho).

    Once rho >= SCALE_RHO the weight is divided by sqrt(sinh(rho)) (added
    back by ``_log_offset``) and J1, J2 carry the w-derivative ratios scaled
    by sinh(rho) and sinh(rho)^2; this keeps every term finite for large
    radii (see ``_finish``).
    """
    y = 0.5 * v * v
    s = rho + v * v
    rest, q1, q2, r1, _, _, w2 = _odd_parts(m, t, s)
    sy = np.where(y > 1e-150, np.sinh(y) / np.where(y > 1e-150, y, 1.0), 1.0)
    scaled = rho >= SCALE_RHO
    logw = _log_sinh(s) - 0.5 * _log_sinh(rho + y) - 0.5 * np.log(sy)
    logw -= np.where(scaled, 0.5 * _log_sinh(np.maximum(rho, SCALE_RHO)), 0.0)
    g = np.exp(-v * v * (2.0 * rho + v * v) / (4.0 * t) + rest - rest_rho + logw)
    e = np.exp(np.where(scaled, _log_sinh(np.maximum(rho, SCALE_RHO)) - _log_sinh(s), 0.0))
    j1 = np.where(scaled, r1 * e, q1)
    j2 = np.where(scaled, w2 * e * e, q2)
    return g, g * j1, g * j2


def _log_offset(rho):
    return np.where(rho >= SCALE_RHO, 0.5 * _log_sinh(np.maximum(rho, SCALE_RHO)), 0.0)


def _finish(rho, I0, I1, I2):
    """Turn the three integrals into (r1, r2, gap) for the radii rho."""
    j1 = I1 / I0
    j2 = I2 / I0
    S = np.sinh(np.minimum(rho, SCALE_RHO))
    C = np.cosh(np.minimum(rho, SCALE_RHO))
    scaled = rho >= SCALE_RHO
    cth = 1.0 / np.tanh(np.maximum(rho, 1e-300))
    r1 = np.where(scaled, j1, S * j1)
    r2 = np.where(scaled, cth * j1 + j2, C * j1 + S * S * j2)
    gap = np.where(scaled, j2 - j1 * j1, S * S * (j2 - j1 * j1))
    return r1, r2, gap


def _gk_panels(m, t, rho, rest_rho, a, b):
    """Evaluate GK15 on panels [a, b] belonging to queries rho (all 1-d)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    v = mid[:, None] + half[:, None] * GK_NODES[None, :]
    shape = v.shape
    rr = np.broadcast_to(rho[:, None], shape).ravel()
    rs = np.broadcast_to(rest_rho[:, None], shape).ravel()
    comps = _integrand(m, t, rr, rs, v.ravel())
    ints = np.empty((3, a.size))
    errs = np.empty((3, a.size))
    absint = np.empty((3, a.size))
    for c, F in enumerate(comps):
        F = F.reshape(shape)
        k = F @ GK_KRONROD
        g = F @ GK_GAUSS
        ints[c] = half * k
        errs[c] = half * np.abs(k - g)
        absint[c] = half * (np.abs(F) @ GK_KRONROD)
    return ints, errs, absint


def even_kernel_parts(m: int, t: float, rho, rtol: float = 1e-12, atol: float = 0.0,
                      threads: int = 1):
    """Return (rest, r1, r2, gap, ok) arrays for K_{2m}(t, rho).

    The adaptive rule is the same as in the compiled core: the span is cut
    into ``N_INITIAL_PANELS`` panels, the summed absolute integral fixes the
    tolerance, and each panel is bisected until its Kronrod-Gauss
    difference falls below its length share of that tolerance.  All radii
    are processed together, so ``threads`` is accepted and ignored.
    """
    _check_m(m)
    rho = np.ascontiguousarray(np.atleast_1d(rho), dtype=float)
    with np.errstate(over="ignore"):
        return _even(m, t, rho, rtol, atol)


def _even(m, t, rho, rtol, atol):
    nq = rho.size
    rest_rho = _odd_parts(m, t, rho)[0]
    spans = np.array([integration_span(t, r) for r in rho])

    n0 = N_INITIAL_PANELS
    q = np.repeat(np.arange(nq), n0)
    frac = np.tile(np.arange(n0 + 1) / n0, (nq, 1))
    edges = frac * spans[:, None]
    a = edges[:, :-1].ravel()
    b = edges[:, 1:].ravel()
    ints, errs, absint = _gk_panels(m, t, rho[q], rest_rho[q], a, b)
    scale = np.zeros((3, nq))
    for c in range(3):
        np.add.at(scale[c], q, absint[c])
    tol = np.maximum(atol, noise_rtol(rtol, rho, rest_rho) * scale)
    evals = np.full(nq, n0)

    total = np.zeros((3, nq))
    ok = np.ones(nq, dtype=bool)
    min_len = spans * 2.0 ** -MAX_DEPTH
    while a.size:
        length = b - a
        allowed = tol[:, q] * (length / spans[q])
        done = np.all(errs <= allowed, axis=0)
        bad = ~np.all(np.isfinite(errs), axis=0)
        stuck = ~done & ((length <= 2.0 * min_len[q]) | bad | (evals[q] >= MAX_PANELS))
        ok[q[stuck]] = False
        accept = done | stuck
        for c in range(3):
            np.add.at(total[c], q[accept], ints[c, accept])
        keep = ~accept
        if not keep.any():
            break
        a, b, q = a[keep], b[keep], q[keep]
        c_ = 0.5 * (a + b)
        a, b, q = np.concatenate([a, c_]), np.concatenate([c_, b]), np.concatenate([q, q])
        np.add.at(evals, q, 1)
        ints, errs, _ = _gk_panels(m, t, rho[q], rest_rho[q], a, b)

    I0, I1, I2 = total
    r1, r2, gap = _finish(rho, I0, I1, I2)
    return rest_rho + _log_offset(rho) + np.log(I0), r1, r2, gap, ok

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel core.  Same algorithm and API as ``_kernels_py``."""
import math

import numpy as np
cimport numpy as cnp
from libc.math cimport sinh, cosh, tanh, exp, log, log1p, sqrt, fabs, isfinite
from cython.parallel cimport prange

from ._kernels_py import odd_base, even_base, integration_span

cnp.import_array()

NAME = "cython"

cdef enum:
    NSERIES = 64
    C_MAXM = 14
    MAXK = 17
    NGK = 15
    STACK = 128
    N_INITIAL_PANELS = 4
    C_MAX_DEPTH = 40
    C_MAX_PANELS = 20000

MAXM = C_MAXM
MAX_DEPTH = C_MAX_DEPTH
MAX_PANELS = C_MAX_PANELS

cdef double RHO_SPLIT = 1.2
cdef double SPAN_NATS = 80.0
cdef double SCALE_RHO = 1.0
cdef double NOISE_ULPS = 16.0
cdef double SHIFT[MAXK][NSERIES + 1]
cdef double FACT[MAXK]
cdef double XNODE[NGK]
cdef double WKRON[NGK]
cdef double WGAUSS[NGK]


def _init_tables():
    from . import _kernels_py as ref
    cdef int k, p
    for k in range(MAXK):
        FACT[k] = math.factorial(k)
        for p in range(NSERIES + 1):
            SHIFT[k][p] = ref._SHIFT[k, p]
    for k in range(NGK):
        XNODE[k] = ref.GK_NODES[k]
        WKRON[k] = ref.GK_KRONROD[k]
        WGAUSS[k] = ref.GK_GAUSS[k]


_init_tables()


cdef struct OddOut:
    double rest
    double q1
    double q2
    double r1
    double r2
    double gap
    double w2


cdef inline double log_sinh(double r) noexcept nogil:
    if r < 1.0:
        return log(sinh(r))
    return r + log1p(-exp(-2.0 * r)) - 0.6931471805599453


cdef void exp_jet(double* B, double* E, int K) noexcept nogil:
    cdef int k, j
    cdef double acc
    E[0] = 1.0
    for k in range(1, K + 1):
        acc = 0.0
        for j in range(1, k + 1):
            acc = acc + j * B[j] * E[k - j]
        E[k] = acc / k


cdef OddOut odd_point(int m, double t, double rho) noexcept nogil:
    cdef double a[MAXK + 1]
    cdef double E[MAXK + 1]
    cdef int K = m + 2
    cdef int k, p
    cdef double x, acc, S, C, cth, M0, M1, M2, t1, t2, rhs
    cdef double sign = -1.0 if m % 2 else 1.0
    cdef OddOut o
    if rho < RHO_SPLIT:
        x = 2.0 * sinh(0.5 * rho) ** 2
        a[0] = 0.0
        for k in range(1, K + 1):
            acc = 0.0
            for p in range(NSERIES - k, -1, -1):
                acc = acc * x + SHIFT[k][p]
            a[k] = -acc / (4.0 * t)
        exp_jet(a, E, K)
        M0 = sign * FACT[m] * E[m]
        M1 = sign * FACT[m + 1] * E[m + 1]
        M2 = sign * FACT[m + 2] / 2.0 * E[m + 2]
        S = sinh(rho)
        C = cosh(rho)
        o.q1 = M1 / M0
        o.q2 = 2.0 * M2 / M0
        o.rest = log(M0)
        o.r1 = S * o.q1
        o.r2 = C * o.q1 + S * S * o.q2
        o.gap = S * S * (o.q2 - o.q1 * o.q1)
        o.w2 = S * S * o.q2
    else:
        cth = 1.0 / tanh(rho)
        a[0] = rho * rho
        a[1] = 2.0 * rho
        for k in range(0, K - 1):
            rhs = -cth * (k + 1) * (2 * k + 1) * a[k + 1] - k * k * a[k]
            if k == 0:
                rhs = rhs + 2.0
            a[k + 2] = rhs / ((k + 1) * (k + 2))
        a[0] = 0.0
        for k in range(1, K + 1):
            a[k] = -a[k] / (4.0 * t)
        exp_jet(a, E, K)
        M0 = sign * FACT[m] * E[m]
        M1 = sign * FACT[m + 1] * E[m + 1]
        M2 = sign * FACT[m + 2] / 2.0 * E[m + 2]
        S = sinh(rho)
        t1 = M1 / M0
        t2 = 2.0 * M2 / M0
        o.rest = log(M0) - m * log_sinh(rho)
        o.q1 = t1 / S
        o.q2 = t2 / S / S
        o.r1 = t1
        o.r2 = cth * t1 + t2
        o.gap = t2 - t1 * t1
        o.w2 = t2
    return o


cdef inline double span(double t, double rho) noexcept nogil:
    cdef double b = rho / (2.0 * t) + 0.5
    return sqrt(2.0 * t * (-b + sqrt(b * b + SPAN_NATS / t)))


cdef void gk_panel(int m, double t, double rho, double rest_rho, double lo, double hi,
                   double* ints, double* errs, double* absint) noexcept nogil:
    cdef double half = 0.5 * (hi - lo)
    cdef double mid = 0.5 * (hi + lo)
    cdef double k0 = 0.0, k1 = 0.0, k2 = 0.0, g0 = 0.0, g1 = 0.0, g2 = 0.0
    cdef double a0 = 0.0, a1 = 0.0, a2 = 0.0
    cdef double v, y, s, sy, g, wk, wg, e, j1, j2
    cdef double ls_rho = log_sinh(rho) if rho >= SCALE_RHO else 0.0
    cdef int i
    cdef OddOut o
    for i in range(NGK):
        v = mid + half * XNODE[i]
        y = 0.5 * v * v
        s = rho + v * v
        o = odd_point(m, t, s)
        sy = sinh(y) / y if y > 1e-150 else 1.0
        g = exp(-v * v * (2.0 * rho + v * v) / (4.0 * t) + o.rest - rest_rho
                + log_sinh(s) - 0.5 * log_sinh(rho + y) - 0.5 * log(sy) - 0.5 * ls_rho)
        if rho >= SCALE_RHO:
            e = exp(ls_rho - log_sinh(s))
            j1 = o.r1 * e
            j2 = o.w2 * e * e
        else:
            j1 = o.q1
            j2 = o.q2
        wk = WKRON[i]
        wg = WGAUSS[i]
        k0 += wk * g
        k1 += wk * g * j1
        k2 += wk * g * j2
        g0 += wg * g
        g1 += wg * g * j1
        g2 += wg * g * j2
        a0 += wk * fabs(g)
        a1 += wk * fabs(g * j1)
        a2 += wk * fabs(g * j2)
    ints[0] = half * k0
    ints[1] = half * k1
    ints[2] = half * k2
    errs[0] = half * fabs(k0 - g0)
    errs[1] = half * fabs(k1 - g1)
    errs[2] = half * fabs(k2 - g2)
    absint[0] = half * a0
    absint[1] = half * a1
    absint[2] = half * a2


cdef int even_point(int m, double t, double rho, double rtol, double atol,
                    double* out) noexcept nogil:
    """Fill out = (rest, r1, r2, gap); return 1 on convergence, 0 otherwise."""
    cdef double lo_s[STACK]
    cdef double hi_s[STACK]
    cdef double ints[3]
    cdef double errs[3]
    cdef double absint[3]
    cdef double tot[3]
    cdef double scale[3]
    cdef double tol[3]
    cdef double init_i[N_INITIAL_PANELS][3]
    cdef double init_e[N_INITIAL_PANELS][3]
    cdef double V = span(t, rho)
    cdef double min_len = V * 2.0 ** (-C_MAX_DEPTH)
    cdef double lo, hi, length, midp, j1, j2, S, C
    cdef int i, c, top = 0, ok = 1, done, evals = N_INITIAL_PANELS
    cdef double rt
    cdef OddOut base = odd_point(m, t, rho)
    for c in range(3):
        tot[c] = 0.0
        scale[c] = 0.0
    # the initial sweep fixes the tolerance
    for i in range(N_INITIAL_PANELS):
        lo = V * i / N_INITIAL_PANELS
        hi = V * (i + 1) / N_INITIAL_PANELS
        gk_panel(m, t, rho, base.rest, lo, hi, &init_i[i][0], &init_e[i][0], absint)
        for c in range(3):
            scale[c] += absint[c]
    rt = NOISE_ULPS * 2.220446049250313e-16 * (1.0 + rho + fabs(base.rest))
    if rt < rtol:
        rt = rtol
    for c in range(3):
        tol[c] = rt * scale[c]
        if tol[c] < atol:
            tol[c] = atol
    for i in range(N_INITIAL_PANELS - 1, -1, -1):
        lo = V * i / N_INITIAL_PANELS
        hi = V * (i + 1) / N_INITIAL_PANELS
        done = 1
        for c in range(3):
            if not (init_e[i][c] <= tol[c] / N_INITIAL_PANELS):
                done = 0
        if not isfinite(init_e[i][0] + init_e[i][1] + init_e[i][2]):
            ok = 0
            done = 1
        if done:
            for c in range(3):
                tot[c] += init_i[i][c]
        else:
            midp = 0.5 * (lo + hi)
            lo_s[top] = midp
            hi_s[top] = hi
            lo_s[top + 1] = lo
            hi_s[top + 1] = midp
            top += 2
    while top > 0:
        top -= 1
        lo = lo_s[top]
        hi = hi_s[top]
        gk_panel(m, t, rho, base.rest, lo, hi, ints, errs, absint)
        evals += 1
        length = hi - lo
        done = 1
        for c in range(3):
            if not (errs[c] <= tol[c] * (length / V)):
                done = 0
        if not done and (length <= 2.0 * min_len or evals >= C_MAX_PANELS
                         or not isfinite(errs[0] + errs[1] + errs[2])):
            ok = 0
            done = 1
        if done or top + 2 > STACK:
            if not done:
                ok = 0
            for c in range(3):
                tot[c] += ints[c]
        else:
            midp = 0.5 * (lo + hi)
            lo_s[top] = midp
            hi_s[top] = hi
            lo_s[top + 1] = lo
            hi_s[top + 1] = midp
            top += 2
    j1 = tot[1] / tot[0]
    j2 = tot[2] / tot[0]
    out[0] = base.rest + log(tot[0])
    if rho >= SCALE_RHO:
        out[0] += 0.5 * log_sinh(rho)
        out[1] = j1
        out[2] = j1 / tanh(rho) + j2
        out[3] = j2 - j1 * j1
    else:
        S = sinh(rho)
        C = cosh(rho)
        out[1] = S * j1
        out[2] = C * j1 + S * S * j2
        out[3] = S * S * (j2 - j1 * j1)
    return ok


def _check_m(int m):
    if m < 0 or m > C_MAXM:
        raise ValueError(f"m must be in [0, {MAXM}]")


def odd_kernel_parts(int m, double t, rho):
    """Return (rest, r1, r2, gap) arrays for K_{2m+1}(t, rho)."""
    _check_m(m)
    cdef cnp.ndarray[double, ndim=1] r = np.ascontiguousarray(np.atleast_1d(rho), dtype=float)
    cdef Py_ssize_t n = r.shape[0], i
    cdef double[::1] rv = r
    rest = np.empty(n)
    r1 = np.empty(n)
    r2 = np.empty(n)
    gap = np.empty(n)
    cdef double[::1] a = rest, b = r1, c = r2, d = gap
    cdef OddOut o
    with nogil:
        for i in range(n):
            o = odd_point(m, t, rv[i])
            a[i] = o.rest
            b[i] = o.r1
            c[i] = o.r2
            d[i] = o.gap
    return rest, r1, r2, gap


def even_kernel_parts(int m, double t, rho, double rtol=1e-12, double atol=0.0,
                      int threads=1):
    """Return (rest, r1, r2, gap, ok) arrays for K_{2m}(t, rho)."""
    _check_m(m)
    cdef cnp.ndarray[double, ndim=1] r = np.ascontiguousarray(np.atleast_1d(rho), dtype=float)
    cdef Py_ssize_t n = r.shape[0], i
    cdef double[::1] rv = r
    out = np.empty((n, 4))
    okarr = np.empty(n, dtype=np.int32)
    cdef double[:, ::1] ov = out
    cdef int[::1] okv = okarr
    cdef int nt = threads if threads > 0 else 1
    if nt == 1:
        with nogil:
            for i in range(n):
                okv[i] = even_point(m, t, rv[i], rtol, atol, &ov[i, 0])
    else:
        for i in prange(n, nogil=True, num_threads=nt, schedule="dynamic"):
            okv[i] = even_point(m, t, rv[i], rtol, atol, &ov[i, 0])
    return out[:, 0].copy(), out[:, 1].copy(), out[:, 2].copy(), out[:, 3].copy(), okarr.astype(bool)

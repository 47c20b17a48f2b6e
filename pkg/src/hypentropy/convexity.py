"""Convexity gap (log K)'' - coth(rho) (log K)' of the heat kernels.

The gap is what the monotonicity argument needs to be nonnegative.  It is
taken from the kernel cores, which compute it as sinh(rho)^2 times the
second w-derivative of log K (w = cosh rho).  That form has no cancellation
near the origin, so no special handling below some cutoff is needed.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .heatkernel import (
    QuadratureError, g_function, gap3_closed, kernel, kernel_batch, _rho_coth_minus_one,
)

__all__ = ["gap", "gap3_closed", "gap_from_derivatives", "series_lemmas_check", "scan",
           "GapSample", "ScanReport", "violation_tolerance"]

ASSERT_RHO_MIN = 1e-2


def gap(n: int, t: float, rho: float, **kw) -> float:
    if not (t > 0 and rho > 0):
        raise ValueError("gap needs t > 0 and rho > 0")
    return kernel(n, t, rho, **kw).gap


def gap_from_derivatives(value: float, d1: float, d2: float, rho: float) -> float:
    """Direct form d2/K - (d1/K)^2 - coth(rho) d1/K (cancels near rho = 0)."""
    a = d1 / value
    return d2 / value - a * a - a / math.tanh(rho)


def violation_tolerance(n: int) -> float:
    """Closed forms for odd n, quadrature for even n."""
    return 1e-7 if n % 2 else 1e-6


@dataclass(frozen=True)
class GapSample:
    n: int
    t: float
    rho: float
    gap: float
    method: str


@dataclass
class SeriesReport:
    ok: bool
    rho_coth_min: float
    g_min: float
    coefficient_min: int
    failures: list = field(default_factory=list)


def series_lemmas_check(rho_grid, lmax: int = 50) -> SeriesReport:
    """Check rho coth rho - 1 >= 0, g(rho) >= 0 and 8l^2 + 4l - 12 >= 0."""
    rho_grid = np.asarray(rho_grid, dtype=float)
    if np.any(rho_grid <= 0):
        raise ValueError("rho grid must be positive")
    failures = []
    a = np.array([_rho_coth_minus_one(r) for r in rho_grid])
    g = np.array([g_function(r) for r in rho_grid])
    for r, x in zip(rho_grid, a):
        if x < 0:
            failures.append({"check": "rho_coth_minus_one", "rho": float(r), "value": float(x)})
    for r, x in zip(rho_grid, g):
        if x < 0:
            failures.append({"check": "g", "rho": float(r), "value": float(x)})
    coeffs = [8 * l * l + 4 * l - 12 for l in range(1, lmax + 1)]
    for l, c in enumerate(coeffs, start=1):
        if c < 0:
            failures.append({"check": "coefficient", "l": l, "value": c})
    return SeriesReport(not failures, float(a.min()), float(g.min()), min(coeffs), failures)


@dataclass
class ScanReport:
    n: int
    grid: dict
    min_gap: float
    argmin: tuple
    violations: list
    errors: list = field(default_factory=list)
    samples: list = field(default_factory=list, repr=False)

    def to_json(self, include_samples: bool = False) -> dict:
        d = {"n": self.n, "grid": self.grid, "min_gap": self.min_gap,
             "argmin": list(self.argmin), "violations": [asdict(v) for v in self.violations],
             "errors": self.errors}
        if include_samples:
            d["samples"] = [asdict(s) for s in self.samples]
        return d

    def dumps(self, include_samples: bool = False) -> str:
        return json.dumps(self.to_json(include_samples), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n", "t", "rho", "gap", "method"])
        for s in self.samples:
            w.writerow([s.n, repr(s.t), repr(s.rho), repr(s.gap), s.method])
        return buf.getvalue()


def _scan_row(n, t, rhos, backend):
    try:
        k = kernel_batch(n, t, rhos, backend=backend)
        return k.gap, k.method, None
    except QuadratureError:
        # fall back to per-point evaluation so one bad radius stays local
        gaps, err = np.empty(rhos.size), []
        method = "quadrature-even"
        for i, r in enumerate(rhos):
            try:
                gaps[i] = kernel(n, t, float(r), backend=backend).gap
            except QuadratureError as exc:
                gaps[i] = np.nan
                err.append({"t": float(t), "rho": float(r), "error": str(exc)})
        return gaps, method, err


def scan(n: int, t_range=(0.01, 100.0), rho_range=(0.0, 10.0), counts=(40, 100), *,
         threads: int = 1, backend: str | None = None, tol: float | None = None) -> ScanReport:
    """Evaluate the gap on a log-spaced t by linear rho grid.

    rho starts one step above ``rho_range[0]`` when that is zero, so the
    grid is (rho_min, rho_max].  A sample is a violation when
    gap < -tol * (1 + |d2log| + |coth rho dlog|), the scale of the two
    terms whose difference forms the gap.
    """
    t0, t1 = t_range
    r0, r1 = rho_range
    nt, nr = counts
    ts = np.geomspace(t0, t1, nt)
    rhos = np.linspace(r0, r1, nr + 1)[1:] if r0 == 0 else np.linspace(r0, r1, nr)
    tol = violation_tolerance(n) if tol is None else tol

    def work(t):
        return _scan_row(n, float(t), rhos, backend)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            rows = list(ex.map(work, ts))
    else:
        rows = [work(t) for t in ts]

    samples, violations, errors = [], [], []
    best = (math.inf, (math.nan, math.nan))
    for t, (gaps, method, err) in zip(ts, rows):
        if err:
            errors.extend(err)
        scale = None
        for r, g in zip(rhos, gaps):
            s = GapSample(n, float(t), float(r), float(g), method)
            samples.append(s)
            if not math.isfinite(g):
                continue
            if g < best[0]:
                best = (float(g), (float(t), float(r)))
            if g < -tol:
                if scale is None:
                    kb = kernel_batch(n, float(t), rhos, backend=backend)
                    scale = 1.0 + np.abs(kb.d2log) + np.abs(kb.dlog / np.tanh(rhos))
                if g < -tol * scale[list(rhos).index(r)]:
                    violations.append(s)
    grid = {"t_min": t0, "t_max": t1, "t_count": nt, "t_spacing": "log",
            "rho_min": r0, "rho_max": r1, "rho_count": nr, "rho_spacing": "linear",
            "tolerance": tol}
    return ScanReport(n, grid, best[0], best[1], violations, errors, samples)

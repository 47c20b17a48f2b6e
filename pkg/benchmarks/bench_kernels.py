"""Compiled versus numpy kernel core.

    python3 benchmarks/bench_kernels.py [--points 2000] [--repeat 3]

Times odd (closed jet) and even (adaptive quadrature) kernels over a batch
of radii, per point and in one vectorized call, and reports the largest
relative disagreement between the two cores.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from hypentropy import _backend


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(points: int, repeat: int, cases) -> list[dict]:
    names = _backend.available()
    rho = np.linspace(0.01, 10.0, points)
    rows = []
    for n, t in cases:
        m = n // 2
        out, times = {}, {}
        for name in names:
            core = _backend.get_core(name)
            if n % 2:
                def batch(core=core):
                    return core.odd_kernel_parts(m, t, rho)

                def single(core=core):
                    for r in rho[:200]:
                        core.odd_kernel_parts(m, t, np.array([r]))
            else:
                def batch(core=core):
                    return core.even_kernel_parts(m, t, rho)

                def single(core=core):
                    for r in rho[:200]:
                        core.even_kernel_parts(m, t, np.array([r]))
            times[name] = (_best(batch, repeat), _best(single, repeat) / min(200, points))
            out[name] = batch()
        diff = 0.0
        if len(names) == 2:
            a, b = out["cython"], out["python"]
            diff = float(np.max(np.abs(np.expm1(a[0] - b[0]))))
        for name in names:
            rows.append({"n": n, "t": t, "core": name, "batch_s": times[name][0],
                         "per_call_us": 1e6 * times[name][1], "max_rel_diff": diff})
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    cases = [(3, 1.0), (7, 0.1), (2, 1.0), (4, 0.1), (6, 10.0)]
    rows = run(args.points, args.repeat, cases)
    print(f"{'n':>2} {'t':>6} {'core':>7} {'batch [s]':>10} {'per call [us]':>14} {'max rel diff':>13}")
    for r in rows:
        print(f"{r['n']:>2} {r['t']:>6g} {r['core']:>7} {r['batch_s']:>10.4f} "
              f"{r['per_call_us']:>14.1f} {r['max_rel_diff']:>13.2e}")


if __name__ == "__main__":
    main()

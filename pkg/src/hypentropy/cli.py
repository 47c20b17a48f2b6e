"""Command-line front end.

Every command writes one artifact (JSON, or CSV for grids and probe
records) that echoes the resolved configuration.  Exit codes: 0 success,
2 a check failed, 64 bad arguments, 66 unreadable or unwritable files.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from datetime import datetime, timezone

import numpy as np

from . import __version__
from ._backend import BACKEND

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_FILE = 0, 2, 64, 66
OUTPUT_DIR_ENV = "HYPENT_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def _config(args) -> dict:
    skip = {"func", "format", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _out_path(path: str | None) -> str | None:
    if path is None or path == "-":
        return None
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _write(args, payload: dict, rows: list | None = None) -> None:
    """Emit JSON (always) or CSV (when rows exist and --format csv)."""
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        buf.write(f"# command={args.command} timestamp={payload['timestamp']}\n")
        buf.write(f"# config={json.dumps(_jsonable(payload['config']), sort_keys=True)}\n")
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
            w.writeheader()
            for r in rows:
                w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
        text = buf.getvalue()
    else:
        text = json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"
    path = _out_path(args.out)
    if path is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)


def _envelope(args, result) -> dict:
    return {"command": args.command, "version": __version__, "backend": BACKEND,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "config": _config(args), "result": result}


def _read_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _point(values, d: int | None = None):
    if values is None:
        return None if d is None else np.zeros(d)
    p = np.asarray(values, dtype=float)
    if d is not None and p.size != d:
        raise UsageError(f"--p0 needs {d} coordinates, got {p.size}")
    if np.linalg.norm(p) >= 1.0:
        raise UsageError("--p0 must lie inside the unit ball")
    return p


# ---------------------------------------------------------------------------
# commands


def cmd_kernel_eval(args) -> int:
    from .heatkernel import kernel
    rec = kernel(args.n, args.t, args.rho, rtol=args.rtol, atol=args.atol).record() \
        if args.n % 2 == 0 else kernel(args.n, args.t, args.rho).record()
    rec["tolerances"] = {"rtol": args.rtol, "atol": args.atol}
    _write(args, _envelope(args, rec), [rec])
    return EXIT_OK


def _grid(text: str):
    from .acceptance import STANDARD_RHO, STANDARD_T
    if text == "standard":
        return list(STANDARD_T), list(STANDARD_RHO)
    try:
        ts, rs = text.split(":")
        return _floats(ts), _floats(rs)
    except ValueError as exc:
        raise UsageError("--grid is 'standard' or 't1,t2,...:rho1,rho2,...'") from exc


def cmd_kernel_check(args) -> int:
    from .heatkernel import heat_residual, kernel, mass
    ts, rs = _grid(args.grid)
    rows, ok = [], True
    for t in ts:
        m_err = abs(mass(args.n, t) - 1.0)
        for r in rs:
            rec = kernel(args.n, t, r).record()
            rec["heat_residual"] = heat_residual(args.n, t, r)
            rec["mass_error"] = m_err
            rec["pass"] = abs(rec["heat_residual"]) <= args.residual_tol and m_err <= args.mass_tol
            ok &= rec["pass"]
            rows.append(rec)
    result = {"records": rows, "pass": ok,
              "tolerances": {"residual": args.residual_tol, "mass": args.mass_tol}}
    _write(args, _envelope(args, result), rows)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_convexity_scan(args) -> int:
    from .convexity import scan
    rep = scan(args.n, (args.t_min, args.t_max), (args.rho_min, args.rho_max),
               (args.t_count, args.rho_count), threads=args.threads, tol=args.tol)
    payload = _envelope(args, rep.to_json())
    rows = [{"n": s.n, "t": s.t, "rho": s.rho, "gap": s.gap, "method": s.method}
            for s in rep.samples]
    _write(args, payload, rows)
    # the sign is only asserted where it is proven
    return EXIT_CHECK if rep.violations and args.n <= 3 else EXIT_OK


def cmd_convexity_lemmas(args) -> int:
    from .convexity import series_lemmas_check
    rep = series_lemmas_check(np.linspace(args.rho_max / args.count, args.rho_max, args.count),
                              args.lmax)
    _write(args, _envelope(args, dict(rep.__dict__, status="pass" if rep.ok else "fail")))
    return EXIT_OK if rep.ok else EXIT_CHECK


def _load_manifold(path):
    from .manifolds import from_json
    return from_json(_read_json(path))


def cmd_manifold_info(args) -> int:
    sigma = _load_manifold(args.input)
    info = {"kind": type(sigma).__name__, "ambient_dim": sigma.ambient_dim, "dim": sigma.dim}
    if hasattr(sigma, "radius") and math.isinf(getattr(sigma, "radius")):
        info["volume"] = math.inf
    else:
        info["volume"] = sigma.volume()
        info["centroid"] = sigma.centroid()
        info["extrinsic_radius"] = sigma.extrinsic_radius()
    for name in ("mesh_size", "length"):
        if hasattr(sigma, name):
            info[name] = getattr(sigma, name)()
    _write(args, _envelope(args, info))
    return EXIT_OK


def cmd_entropy(args) -> int:
    from .functional import SearchConfig, entropy, f_functional
    sigma = _load_manifold(args.input)
    if args.p0 is not None and args.tau is not None:
        p0 = _point(args.p0, sigma.ambient_dim)
        result = {"F": f_functional(sigma, p0, args.tau), "p0": p0, "tau": args.tau}
    else:
        cfg = SearchConfig(starts=args.starts, seed=args.seed)
        result = entropy(sigma, cfg).to_json()
    _write(args, _envelope(args, result))
    return EXIT_OK


def _traj_to_json(traj) -> list:
    return [{"time": s.time, "shape": s.shape.to_json()} for s in traj]


def _traj_from_json(data):
    from .flow import FlowState
    from .manifolds import from_json
    return [FlowState(float(e["time"]), from_json(e["shape"])) for e in data]


def cmd_flow_run(args) -> int:
    from .flow import run_curve, sphere_trajectory
    from .manifolds import DiscreteCurve, GeodesicSphere
    sigma = _load_manifold(args.input)
    if isinstance(sigma, DiscreteCurve):
        traj = run_curve(sigma, args.t_end, stop_length=args.stop_length,
                         record_every=args.record_every)
    elif isinstance(sigma, GeodesicSphere):
        times = np.linspace(0.0, args.t_end, args.samples)
        traj = sphere_trajectory(sigma.sphere_dim, sigma.radius, times, sigma.center)
    else:
        raise UsageError("flow run takes a curve or a geodesic sphere")
    _write(args, _envelope(args, {"trajectory": _traj_to_json(traj)}))
    return EXIT_OK


def cmd_flow_probe(args) -> int:
    from .flow import monotonicity_probe
    traj = _traj_from_json(_read_json(args.traj)["result"]["trajectory"])
    p0 = _point(args.p0, traj[0].shape.ambient_dim)
    rec = monotonicity_probe(traj, args.t0, p0)
    _write(args, _envelope(args, dict(rec.__dict__, slopes=rec.slopes())), rec.to_rows())
    return EXIT_OK


def cmd_flow_identity(args) -> int:
    from .flow import monotonicity_identity_check
    traj = _traj_from_json(_read_json(args.traj)["result"]["trajectory"])
    p0 = _point(args.p0, traj[0].shape.ambient_dim)
    chk = monotonicity_identity_check(traj, args.t0, p0)
    ok = chk.relative <= args.tol
    _write(args, _envelope(args, {"max_residual": chk.max_residual, "scale": chk.scale,
                                  "relative": chk.relative, "residuals": chk.residuals,
                                  "tolerance": args.tol, "pass": ok}))
    return EXIT_OK if ok else EXIT_CHECK


def cmd_confvol(args) -> int:
    from .boundary import BoundaryCurve, conformal_volume
    gamma = BoundaryCurve.from_json(_read_json(args.input))
    res = conformal_volume(gamma, seed=args.seed)
    _write(args, _envelope(args, res.to_json()))
    return EXIT_OK


def cmd_boundary_limit(args) -> int:
    from .boundary import boundary_limit
    sigma = _load_manifold(args.input)
    p0 = _point(args.p0, sigma.ambient_dim)
    res = boundary_limit(sigma, p0, args.r)
    _write(args, _envelope(args, res.to_json()))
    return EXIT_OK


def cmd_compare(args) -> int:
    from .boundary import entropy_vs_conformal
    from .functional import SearchConfig
    from .manifolds import GeodesicDisk
    sigma = _load_manifold(args.input) if args.input else GeodesicDisk.coordinate_plane(3, 2)
    if not isinstance(sigma, GeodesicDisk):
        raise UsageError("compare takes a geodesic disk")
    rep = entropy_vs_conformal(sigma, tolerance=args.tol,
                               entropy_config=SearchConfig(seed=args.seed))
    _write(args, _envelope(args, rep.to_json()))
    return EXIT_OK if rep.inequality_holds else EXIT_CHECK


def cmd_repro(args) -> int:
    from .acceptance import run_all
    results = run_all(set(args.only) if args.only else None)
    for r in results:
        sys.stderr.write(r.line() + "\n")
    rows = [{"criterion": r.number, "title": r.title, "passed": r.passed,
             "elapsed": round(r.elapsed, 3), "budget": r.budget} for r in results]
    _write(args, _envelope(args, {"summary": rows, "criteria": [r.to_json() for r in results]}),
           rows)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="output file (default stdout); relative "
                        f"paths go under ${OUTPUT_DIR_ENV} when set")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    p = _Parser(prog="hypentropy", description="Hyperbolic heat kernels, entropy and flows.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def add(parent, name, func, command, **kw):
        q = parent.add_parser(name, parents=[common], **kw)
        q.set_defaults(func=func, command=command)
        return q

    k = sub.add_parser("kernel").add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = add(k, "eval", cmd_kernel_eval, "kernel eval")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--t", type=float, required=True)
    q.add_argument("--rho", type=float, required=True)
    q.add_argument("--rtol", type=float, default=1e-12)
    q.add_argument("--atol", type=float, default=0.0)
    q = add(k, "check", cmd_kernel_check, "kernel check")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--grid", default="standard")
    q.add_argument("--residual-tol", type=float, default=1e-5)
    q.add_argument("--mass-tol", type=float, default=1e-6)

    c = sub.add_parser("convexity").add_subparsers(dest="action", required=True,
                                                   parser_class=_Parser)
    q = add(c, "scan", cmd_convexity_scan, "convexity scan")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--t-min", type=float, default=0.01)
    q.add_argument("--t-max", type=float, default=100.0)
    q.add_argument("--rho-min", type=float, default=0.01)
    q.add_argument("--rho-max", type=float, default=10.0)
    q.add_argument("--t-count", type=int, default=40)
    q.add_argument("--rho-count", type=int, default=100)
    q.add_argument("--tol", type=float, default=None)
    q = add(c, "lemmas", cmd_convexity_lemmas, "convexity lemmas")
    q.add_argument("--rho-max", type=float, default=20.0)
    q.add_argument("--count", type=int, default=2000)
    q.add_argument("--lmax", type=int, default=50)

    m = sub.add_parser("manifold").add_subparsers(dest="action", required=True,
                                                  parser_class=_Parser)
    q = add(m, "info", cmd_manifold_info, "manifold info")
    q.add_argument("--in", dest="input", required=True)

    e = sub.add_parser("entropy").add_subparsers(dest="action", required=True,
                                                 parser_class=_Parser)
    q = add(e, "compute", cmd_entropy, "entropy compute")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--p0", type=_floats, default=None)
    q.add_argument("--tau", type=float, default=None)
    q.add_argument("--starts", type=int, default=12)

    f = sub.add_parser("flow").add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = add(f, "run", cmd_flow_run, "flow run")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--t-end", type=float, required=True)
    q.add_argument("--stop-length", type=float, default=1e-3)
    q.add_argument("--record-every", type=int, default=100)
    q.add_argument("--samples", type=int, default=101, help="recorded times for sphere flows")
    for name, func in (("probe", cmd_flow_probe), ("identity-check", cmd_flow_identity)):
        q = add(f, name, func, f"flow {name}")
        q.add_argument("--traj", required=True)
        q.add_argument("--t0", type=float, required=True)
        q.add_argument("--p0", type=_floats, default=None)
        if name == "identity-check":
            q.add_argument("--tol", type=float, default=0.05)

    q = add(sub, "confvol", cmd_confvol, "confvol")
    q.add_argument("--in", dest="input", required=True)
    q = add(sub, "boundary-limit", cmd_boundary_limit, "boundary-limit")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--p0", type=_floats, default=None)
    q.add_argument("--r", type=_floats, default=[4.0, 5.0, 6.0, 7.0, 8.0])
    q = add(sub, "compare", cmd_compare, "compare")
    q.add_argument("--in", dest="input", default=None)
    q.add_argument("--tol", type=float, default=0.01)
    q = add(sub, "repro", cmd_repro, "repro")
    q.add_argument("--only", type=_ints, default=None, help="criterion numbers, e.g. 1,2,9")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"hypentropy: error: {exc}\n")
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"hypentropy: file error: {exc}\n")
        return EXIT_FILE
    except (ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"hypentropy: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

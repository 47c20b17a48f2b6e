"""Heat kernels on hyperbolic space, hyperbolic entropy and mean curvature flow checks."""
from __future__ import annotations

__version__ = "0.1.0"

from ._backend import BACKEND, available as available_backends  # noqa: E402
from .hypgeo import BallPoint, IdealPoint, BallIsometry, hyp_dist, mobius_translate  # noqa: E402
from .heatkernel import KernelValue, QuadratureError, kernel, kernel_batch  # noqa: E402
from .convexity import gap, scan, series_lemmas_check  # noqa: E402
from .manifolds import (DiscreteCurve, GeodesicDisk, GeodesicSphere,  # noqa: E402
                        TriMeshSurface)
from .functional import EntropyResult, SearchConfig, entropy, f_functional  # noqa: E402
from .flow import (FlowState, MonotonicityRecord, monotonicity_identity_check,  # noqa: E402
                   monotonicity_probe, run_curve, sphere_flow)
from .boundary import (BoundaryCurve, boundary_limit, conformal_volume,  # noqa: E402
                       entropy_vs_conformal, limit_prop_check, spherical_volume)

__all__ = [
    "BACKEND", "available_backends", "BallPoint", "IdealPoint", "BallIsometry", "hyp_dist",
    "mobius_translate", "KernelValue", "QuadratureError", "kernel", "kernel_batch", "gap", "scan",
    "series_lemmas_check", "DiscreteCurve", "GeodesicDisk", "GeodesicSphere", "TriMeshSurface",
    "EntropyResult", "SearchConfig", "entropy", "f_functional", "FlowState",
    "MonotonicityRecord", "monotonicity_identity_check", "monotonicity_probe", "run_curve",
    "sphere_flow", "BoundaryCurve", "boundary_limit", "conformal_volume", "entropy_vs_conformal",
    "limit_prop_check", "spherical_volume",
]

"""Warped-product manifolds whose oscillating warping defeats the
L^p Calderon-Zygmund inequality, with verified-quadrature norm accounting."""

from .experiment import (
    AuditFailed,
    CSV_COLUMNS,
    CZReport,
    ExperimentConfig,
    SweepRow,
    build_construction,
    run_experiment,
    search_min_n,
    sweep,
    write_csv,
)
from .green import (
    DELTA_UNIVERSAL,
    GreenFunction,
    OutOfRange,
    WindowTooNarrow,
    audit_green_bounds,
    find_h,
)
from .norms import (
    CutoffFunction,
    HessianValue,
    InvalidDelta,
    NormsReport,
    TestFunction,
    audit_norm_chain,
    build_cutoff,
    hessian_at,
    hessian_components,
    laplacian_at,
    lp_norm_pow,
    norms_report,
    s_integral_laplacian,
    s_integral_u,
    u_eval,
    volume_integral,
)
from .quadrature import (
    AuditEntry,
    BoundAudit,
    QuadratureNotConverged,
    QuadratureSpec,
    integrate,
)
from .warping import (
    CubeDoesNotFit,
    FootprintOutOfRange,
    ManifoldConfig,
    OverlappingWindow,
    Piece,
    SawtoothWindow,
    WarpingProfile,
    audit_strip,
    build_base_profile,
    eval_sigma,
    insert_sawtooth,
    plan_window,
    profile_from_json,
    profile_to_json,
)

__all__ = [
    "AuditEntry",
    "AuditFailed",
    "BoundAudit",
    "CSV_COLUMNS",
    "CZReport",
    "CubeDoesNotFit",
    "CutoffFunction",
    "DELTA_UNIVERSAL",
    "ExperimentConfig",
    "FootprintOutOfRange",
    "GreenFunction",
    "HessianValue",
    "InvalidDelta",
    "ManifoldConfig",
    "NormsReport",
    "OutOfRange",
    "OverlappingWindow",
    "Piece",
    "QuadratureNotConverged",
    "QuadratureSpec",
    "SawtoothWindow",
    "SweepRow",
    "TestFunction",
    "WarpingProfile",
    "WindowTooNarrow",
    "audit_green_bounds",
    "audit_norm_chain",
    "audit_strip",
    "build_base_profile",
    "build_construction",
    "build_cutoff",
    "eval_sigma",
    "find_h",
    "hessian_at",
    "hessian_components",
    "insert_sawtooth",
    "integrate",
    "laplacian_at",
    "lp_norm_pow",
    "norms_report",
    "plan_window",
    "profile_from_json",
    "profile_to_json",
    "run_experiment",
    "s_integral_laplacian",
    "s_integral_u",
    "search_min_n",
    "sweep",
    "u_eval",
    "volume_integral",
    "write_csv",
]

__version__ = "0.1.0"

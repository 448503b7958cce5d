"""Experiment pipeline: one configuration, minimal-n search, grids, CSV rows.

run_experiment builds the manifold for one (m, p, k, n) cell, re-verifies the
window placement on the final profile, runs the strip and envelope audits, and
compares the inequality sides.  search_min_n grows the tooth count until the
Hessian side wins.  sweep runs a grid of cells (optionally across threads) and
always assembles rows in grid order so the CSV is reproducible byte for byte.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .green import DELTA_UNIVERSAL, GreenFunction, WindowTooNarrow, audit_green_bounds, find_h
from .norms import CutoffFunction, NormsReport, TestFunction, _validate_p, norms_report
from .quadrature import BoundAudit, QuadratureSpec
from .warping import (
    ManifoldConfig,
    SawtoothWindow,
    audit_strip,
    build_base_profile,
    insert_sawtooth,
    plan_window,
)

__all__ = [
    "AuditFailed",
    "ExperimentConfig",
    "CZReport",
    "build_construction",
    "run_experiment",
    "search_min_n",
    "SweepRow",
    "sweep",
    "CSV_COLUMNS",
    "write_csv",
]

# slack for re-verifying the window bracket on the final profile; the entry
# connector only lowers sigma, so G(z) >= k + delta holds with strict sign
# and the slack absorbs table roundoff alone
BRACKET_SLACK = 1e-9


class AuditFailed(RuntimeError):
    """A bound audit reported a violation (used for CLI exit-code mapping)."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One cell of the experiment grid."""

    m: int
    p: float
    k: float
    n_teeth: int
    C1: float = 1.0
    C2: float = 1.0
    quad: QuadratureSpec = QuadratureSpec(base_order=8, rel_tol=1e-8)
    smooth_halfwidth: float | None = None
    r_cap: float = 2e5
    strip_samples: int = 2048
    envelope_samples: int = 512

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise ValueError("dimension m must be an integer >= 2")
        _validate_p(self.p)
        if not self.k >= 1.0:
            raise ValueError("level k must be >= 1")
        if not isinstance(self.n_teeth, int) or self.n_teeth < 1:
            raise ValueError("n_teeth must be an integer >= 1")
        if self.C1 < 0.0 or self.C2 < 0.0:
            raise ValueError("C1 and C2 must be nonnegative")
        if not self.r_cap > 1.0:
            raise ValueError("r_cap must exceed 1")
        if self.strip_samples < 2 or self.envelope_samples < 2:
            raise ValueError("audit sample counts must be >= 2")


@dataclass(frozen=True)
class CZReport:
    """Inequality sides and audit verdict for one configuration."""

    config: ExperimentConfig
    h: float
    window: SawtoothWindow
    norms: NormsReport
    lhs: float
    rhs: float
    ratio: float
    violated: bool
    audit: BoundAudit


def _table_r_max(cfg: ExperimentConfig) -> float:
    # Ginv(k+1) <= 2 e^(k+1) - 1 for in-strip profiles; the 2.2 e^(k+1.05)
    # headroom keeps s_max past k+1 with room for find_h's right-end check
    return min(cfg.r_cap, 2.2 * math.exp(cfg.k + 1.05))


def build_construction(
    cfg: ExperimentConfig,
) -> tuple[float, SawtoothWindow, GreenFunction, float]:
    """Base profile, anchored window, final profile with its Green table.

    The sawtooth shifts G slightly, so the window bracket is re-checked on
    the final profile: [z, z + width] must map into the plateau image
    [k + delta, k + 1 - delta] before anything downstream is trusted.
    """
    manifold = ManifoldConfig.from_dimension(cfg.m)
    base = build_base_profile(manifold)
    r_max = _table_r_max(cfg)
    h = find_h(GreenFunction(base, r_max=r_max), cfg.k)
    window = plan_window(manifold, h, cfg.n_teeth, cfg.smooth_halfwidth)
    profile = insert_sawtooth(base, window)
    green = GreenFunction(profile, r_max=r_max)

    delta = DELTA_UNIVERSAL
    left = green.value(window.z)
    right = green.value(window.z + window.width)
    if left < cfg.k + delta - BRACKET_SLACK or right > cfg.k + 1.0 - delta + BRACKET_SLACK:
        raise WindowTooNarrow(
            f"window maps to [{left!r}, {right!r}] outside the plateau image "
            f"[{cfg.k + delta!r}, {cfg.k + 1.0 - delta!r}]"
        )
    return h, window, green, r_max


def run_experiment(cfg: ExperimentConfig) -> CZReport:
    """Build, audit and measure one configuration.

    Audit failures do not raise: the report comes back flagged with
    violated forced to False so a broken construction can never claim a
    counterexample.
    """
    h, window, green, r_max = build_construction(cfg)
    profile = green.profile

    audit = BoundAudit()
    audit.extend(audit_strip(profile, 1.0, r_max, samples=cfg.strip_samples))
    audit.extend(audit_green_bounds(green, samples=cfg.envelope_samples))

    tf = TestFunction(cfg.k, CutoffFunction(), green)
    norms = norms_report(tf, cfg.p, cfg.quad)
    lhs = norms.norm_hess_p_pow
    rhs = cfg.C1 * norms.norm_lap_p_pow + cfg.C2 * norms.norm_u_p_pow
    ratio = lhs / rhs if rhs > 0.0 else math.inf
    violated = bool(lhs > rhs) and audit.overall_pass
    return CZReport(
        config=cfg,
        h=h,
        window=window,
        norms=norms,
        lhs=lhs,
        rhs=rhs,
        ratio=ratio,
        violated=violated,
        audit=audit,
    )


def search_min_n(
    cfg: ExperimentConfig, n_max: int
) -> tuple[int | None, list[CZReport]]:
    """Smallest tooth count violating the inequality, or None up to n_max.

    Doubling scan from n = 1, then bisection between the last clean probe
    and the first violating one.  Bisection trusts the ratio only if the
    doubling trace was strictly increasing from n = 32 on (below that the
    cutoff-ramp mass dominates and the ratio wobbles at the 1e-5 level);
    otherwise the first scan hit is returned unrefined.  cfg.n_teeth is
    ignored by the search.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    trace: list[CZReport] = []
    schedule = []
    n = 1
    while n <= n_max:
        schedule.append(n)
        n *= 2
    if schedule[-1] != n_max:
        schedule.append(n_max)

    first_hit = None
    prev_clean = 0
    for n in schedule:
        report = run_experiment(replace(cfg, n_teeth=n))
        trace.append(report)
        if report.violated:
            first_hit = n
            break
        prev_clean = n
    if first_hit is None:
        return None, trace

    tail = [r.ratio for r, n in zip(trace, schedule) if n >= 32]
    monotone = all(a < b for a, b in zip(tail, tail[1:]))
    if not monotone:
        return first_hit, trace

    lo, hi = prev_clean, first_hit
    while hi - lo > 1:
        mid = (lo + hi) // 2
        report = run_experiment(replace(cfg, n_teeth=mid))
        trace.append(report)
        if report.violated:
            hi = mid
        else:
            lo = mid
    return hi, trace


@dataclass(frozen=True)
class SweepRow:
    """One grid cell: either a report or a recorded error."""

    m: int
    p: float
    k: float
    n_teeth: int
    report: CZReport | None
    error: str = ""


def _run_cell(cfg: ExperimentConfig) -> SweepRow:
    try:
        report = run_experiment(cfg)
        return SweepRow(cfg.m, cfg.p, cfg.k, cfg.n_teeth, report)
    except Exception as exc:
        return SweepRow(
            cfg.m, cfg.p, cfg.k, cfg.n_teeth, None, f"{type(exc).__name__}: {exc}"
        )


def sweep(
    base: ExperimentConfig,
    ms: list[int],
    ps: list[float],
    ks: list[float],
    ns: list[int],
    workers: int = 1,
) -> list[SweepRow]:
    """Run every (m, p, k, n) cell; row order always equals grid order."""
    if not (ms and ps and ks and ns):
        raise ValueError("sweep grid must be nonempty on every axis")
    cells = [
        replace(base, m=m, p=p, k=k, n_teeth=n)
        for m in ms
        for p in ps
        for k in ks
        for n in ns
    ]
    if workers <= 1:
        return [_run_cell(c) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_cell, cells))


CSV_COLUMNS = (
    "m",
    "p",
    "k",
    "n",
    "eps_or_delta",
    "h",
    "eta",
    "norm_u_p_pow",
    "norm_lap_p_pow",
    "norm_hess_p_pow",
    "lhs",
    "rhs",
    "ratio",
    "violated",
    "audit_pass",
    "quad_err",
    "error",
)


def _row_dict(row: SweepRow) -> dict[str, str]:
    out = {
        "m": repr(row.m),
        "p": repr(row.p),
        "k": repr(row.k),
        "n": repr(row.n_teeth),
        "error": row.error,
    }
    if row.report is None:
        out.update({c: "" for c in CSV_COLUMNS if c not in out})
        return out
    rep = row.report
    out.update(
        {
            "eps_or_delta": repr(rep.window.step),
            "h": repr(rep.h),
            "eta": repr(rep.window.width),
            "norm_u_p_pow": repr(rep.norms.norm_u_p_pow),
            "norm_lap_p_pow": repr(rep.norms.norm_lap_p_pow),
            "norm_hess_p_pow": repr(rep.norms.norm_hess_p_pow),
            "lhs": repr(rep.lhs),
            "rhs": repr(rep.rhs),
            "ratio": repr(rep.ratio),
            "violated": "true" if rep.violated else "false",
            "audit_pass": "true" if rep.audit.overall_pass else "false",
            "quad_err": repr(rep.norms.quad_err),
        }
    )
    return out


def write_csv(rows: list[SweepRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(_row_dict(row))

"""Command line front end.

Subcommands: build (emit profile JSON and a sampled sigma CSV), audit
(bound audits only), norms (one full report as JSON), violate (minimal
tooth-count search), sweep (parameter grid to CSV).  Options may come
from a JSON config file; command line flags override file fields.

Exit codes: 0 success (for violate: violation found), 2 violate found
nothing up to n-max, 3 a bound audit failed, 4 quadrature did not
converge, 1 invalid configuration or construction failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .experiment import (
    AuditFailed,
    CZReport,
    ExperimentConfig,
    SweepRow,
    build_construction,
    run_experiment,
    search_min_n,
    sweep,
    write_csv,
)
from .green import audit_green_bounds
from .norms import CutoffFunction, TestFunction, audit_norm_chain
from .quadrature import BoundAudit, QuadratureNotConverged, QuadratureSpec
from .warping import audit_strip, profile_to_json

__all__ = ["main"]

# JSON config keys accepted at the top level; anything else is a typo
_CONFIG_KEYS = {
    "m",
    "p",
    "k",
    "n",
    "C1",
    "C2",
    "r_cap",
    "smooth_halfwidth",
    "strip_samples",
    "envelope_samples",
    "quad",
    "grid",
    "workers",
}
_QUAD_KEYS = {"base_order", "rel_tol", "abs_tol", "max_depth"}
_GRID_KEYS = {"m", "p", "k", "n"}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must contain a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    quad = data.get("quad", {})
    if not isinstance(quad, dict) or set(quad) - _QUAD_KEYS:
        raise ValueError(f"config key 'quad' must be an object with keys in {sorted(_QUAD_KEYS)}")
    return data


def _pick(args: argparse.Namespace, data: dict, name: str, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in data and data[name] is not None:
        return data[name]
    return default


def _quad_spec(args: argparse.Namespace, data: dict) -> QuadratureSpec:
    fields = dict(data.get("quad", {}))
    for key, flag in (
        ("base_order", "quad_order"),
        ("rel_tol", "quad_rel_tol"),
        ("abs_tol", "quad_abs_tol"),
        ("max_depth", "quad_max_depth"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            fields[key] = value
    fields.setdefault("base_order", 8)
    fields.setdefault("rel_tol", 1e-8)
    return QuadratureSpec(**fields)


def _experiment_config(args: argparse.Namespace, data: dict) -> ExperimentConfig:
    smooth = _pick(args, data, "smooth_halfwidth", None)
    return ExperimentConfig(
        m=int(_pick(args, data, "m", 2)),
        p=float(_pick(args, data, "p", 2.0)),
        k=float(_pick(args, data, "k", 3.0)),
        n_teeth=int(_pick(args, data, "n", 1)),
        C1=float(_pick(args, data, "C1", 1.0)),
        C2=float(_pick(args, data, "C2", 1.0)),
        quad=_quad_spec(args, data),
        smooth_halfwidth=None if smooth is None else float(smooth),
        r_cap=float(_pick(args, data, "r_cap", 2e5)),
        strip_samples=int(_pick(args, data, "strip_samples", 2048)),
        envelope_samples=int(_pick(args, data, "envelope_samples", 512)),
    )


def _report_doc(report: CZReport) -> dict:
    cfg = report.config
    win = report.window
    return {
        "m": cfg.m,
        "p": cfg.p,
        "k": cfg.k,
        "n": cfg.n_teeth,
        "C1": cfg.C1,
        "C2": cfg.C2,
        "h": report.h,
        "window": {
            "z": win.z,
            "width": win.width,
            "n_teeth": win.n_teeth,
            "step": win.step,
            "amplitude": win.amplitude,
            "base": win.base,
            "smooth_halfwidth": win.smooth_halfwidth,
        },
        "norm_u_p_pow": report.norms.norm_u_p_pow,
        "norm_lap_p_pow": report.norms.norm_lap_p_pow,
        "norm_hess_p_pow": report.norms.norm_hess_p_pow,
        "quad_err": report.norms.quad_err,
        "lhs": report.lhs,
        "rhs": report.rhs,
        "ratio": report.ratio,
        "violated": report.violated,
        "audit_pass": report.audit.overall_pass,
        "audit": [
            {
                "name": e.name,
                "worst_violation": e.worst_violation,
                "location": e.location,
                "passed": e.passed,
            }
            for e in report.audit.entries
        ],
    }


def _emit_json(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _print_audit(audit: BoundAudit) -> None:
    for entry in audit.entries:
        status = "PASS" if entry.passed else "FAIL"
        print(
            f"{status} {entry.name}: worst_violation={entry.worst_violation!r} "
            f"at={entry.location!r}"
        )


def _cmd_build(args: argparse.Namespace) -> int:
    cfg = _experiment_config(args, _load_config(args.config))
    _, window, green, _ = build_construction(cfg)
    profile = green.profile
    _emit_json(profile_to_json(profile), args.emit_profile)
    if args.samples_csv is not None:
        t_max = args.t_max if args.t_max is not None else window.z + window.width + 1.0
        if not t_max > 0.0:
            raise ValueError("--t-max must be positive")
        t = np.linspace(0.0, t_max, args.samples)
        sigma, dsigma, d2sigma = profile.eval_many(t)
        with open(args.samples_csv, "w") as fh:
            fh.write("t,sigma,dsigma,d2sigma\n")
            for row in zip(t, sigma, dsigma, d2sigma):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return 0


def _cmd_audit(args: argparse.Namespace) -> int:
    cfg = _experiment_config(args, _load_config(args.config))
    _, _, green, r_max = build_construction(cfg)
    audit = BoundAudit()
    audit.extend(audit_strip(green.profile, 1.0, r_max, samples=cfg.strip_samples))
    audit.extend(audit_green_bounds(green, samples=cfg.envelope_samples))
    tf = TestFunction(cfg.k, CutoffFunction(), green)
    audit.extend(audit_norm_chain(tf, cfg.p, cfg.quad))
    _print_audit(audit)
    if not audit.overall_pass:
        raise AuditFailed(
            f"{len(audit.failures())} of {len(audit.entries)} bound audits failed"
        )
    print(f"all {len(audit.entries)} bound audits passed")
    return 0


def _cmd_norms(args: argparse.Namespace) -> int:
    cfg = _experiment_config(args, _load_config(args.config))
    report = run_experiment(cfg)
    _emit_json(_report_doc(report), args.out)
    if not report.audit.overall_pass:
        raise AuditFailed(
            f"{len(report.audit.failures())} of {len(report.audit.entries)} "
            "bound audits failed"
        )
    return 0


def _cmd_violate(args: argparse.Namespace) -> int:
    cfg = _experiment_config(args, _load_config(args.config))
    n_star, trace = search_min_n(cfg, args.n_max)
    if args.trace_csv is not None:
        rows = [
            SweepRow(r.config.m, r.config.p, r.config.k, r.config.n_teeth, r)
            for r in trace
        ]
        write_csv(rows, args.trace_csv)
    doc = {
        "m": cfg.m,
        "p": cfg.p,
        "k": cfg.k,
        "C1": cfg.C1,
        "C2": cfg.C2,
        "n_max": args.n_max,
        "probes": len(trace),
        "n_star": n_star,
    }
    if n_star is not None:
        hit = next(r for r in reversed(trace) if r.config.n_teeth == n_star)
        doc.update(lhs=hit.lhs, rhs=hit.rhs, ratio=hit.ratio)
    _emit_json(doc, None)
    return 0 if n_star is not None else 2


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.config is None:
        raise ValueError("sweep requires --config with a 'grid' object")
    data = _load_config(args.config)
    grid = data.get("grid")
    if not isinstance(grid, dict) or set(grid) != _GRID_KEYS:
        raise ValueError(f"config key 'grid' must be an object with keys {sorted(_GRID_KEYS)}")

    def int_axis(name: str) -> list[int]:
        values = grid[name]
        if not all(float(v).is_integer() for v in values):
            raise ValueError(f"grid axis '{name}' must hold integers")
        return [int(v) for v in values]

    base = _experiment_config(args, data)
    workers = args.workers if args.workers is not None else int(data.get("workers", 1))
    rows = sweep(
        base,
        int_axis("m"),
        [float(v) for v in grid["p"]],
        [float(v) for v in grid["k"]],
        int_axis("n"),
        workers=workers,
    )
    write_csv(rows, args.out)
    violated = sum(1 for r in rows if r.report is not None and r.report.violated)
    errors = sum(1 for r in rows if r.error)
    print(f"wrote {len(rows)} rows to {args.out} (violated={violated}, errors={errors})")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its fields")
    parser.add_argument("--m", type=int, help="dimension (default 2)")
    parser.add_argument("--p", type=float, help="Lebesgue exponent in (1, inf) (default 2)")
    parser.add_argument("--k", type=float, help="window level (default 3)")
    parser.add_argument("--n", type=int, help="tooth count (default 1)")
    parser.add_argument("--C1", type=float, help="Laplacian-side constant (default 1)")
    parser.add_argument("--C2", type=float, help="function-side constant (default 1)")
    parser.add_argument("--r-cap", type=float, help="hard cap on the tabulated radius")
    parser.add_argument(
        "--smooth-halfwidth", type=float, help="corner smoothing half width override"
    )
    parser.add_argument("--strip-samples", type=int, help="strip audit sample count")
    parser.add_argument("--envelope-samples", type=int, help="envelope audit sample count")
    parser.add_argument("--quad-order", type=int, help="Gauss-Legendre panel order")
    parser.add_argument("--quad-rel-tol", type=float, help="quadrature relative tolerance")
    parser.add_argument("--quad-abs-tol", type=float, help="quadrature absolute floor")
    parser.add_argument("--quad-max-depth", type=int, help="quadrature bisection depth limit")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="czwarp",
        description="Warped-product counterexamples to the L^p Hessian-Laplacian bound",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="construct a profile; emit JSON and sampled sigma")
    _add_common(build)
    build.add_argument("--emit-profile", help="write profile JSON here instead of stdout")
    build.add_argument("--samples-csv", help="write t,sigma,dsigma,d2sigma samples here")
    build.add_argument("--samples", type=int, default=2048, help="sample count (default 2048)")
    build.add_argument("--t-max", type=float, help="sample grid end (default: window end + 1)")
    build.set_defaults(func=_cmd_build)

    audit = sub.add_parser("audit", help="run bound audits only; exit 3 on any failure")
    _add_common(audit)
    audit.set_defaults(func=_cmd_audit)

    norms = sub.add_parser("norms", help="run one configuration; print the report as JSON")
    _add_common(norms)
    norms.add_argument("--out", help="write the JSON report here instead of stdout")
    norms.set_defaults(func=_cmd_norms)

    violate = sub.add_parser(
        "violate", help="search the minimal tooth count violating the bound"
    )
    _add_common(violate)
    violate.add_argument(
        "--n-max", type=int, default=2**15, help="search ceiling (default 32768)"
    )
    violate.add_argument("--trace-csv", help="write every probed configuration here")
    violate.set_defaults(func=_cmd_violate)

    swp = sub.add_parser("sweep", help="run a parameter grid and write a CSV table")
    _add_common(swp)
    swp.add_argument("--out", required=True, help="output CSV path")
    swp.add_argument("--workers", type=int, help="thread count (default 1)")
    swp.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QuadratureNotConverged as exc:
        print(f"error: quadrature did not converge: {exc}", file=sys.stderr)
        return 4
    except AuditFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

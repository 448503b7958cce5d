"""Rotationally symmetric warping profiles with sawtooth oscillation windows.

A profile is a contiguous table of closed-form pieces on [0, inf):

  CAP     quintic t + a3 t^3 + a4 t^4 + a5 t^5 on [0, 1], pinned to
          sigma(0) = 0, sigma'(0) = 1, sigma''(0) = 0 and matching the base
          curve's value, slope and curvature at t = 1
  POWER   (t + c)^alpha, the background curve (c = 1/2 keeps it mid-strip)
  LINEAR  sawtooth teeth and the short connector ramps
  BLEND   smoothstep mix of the two neighbouring formulas across a corner

Every corner is replaced by a BLEND of halfwidth smooth_halfwidth.  The
smoothstep s(x) = B(x) / (B(x) + B(1-x)) with B(x) = exp(-1/x) satisfies
s(x) + s(1-x) = 1, and the tooth slopes are chosen so that each corner that
touches a strip boundary has equal and opposite slope deviations from it;
the convex blend then stays inside the strip pointwise, not just to
tolerance.

Profiles are immutable after construction and evaluation is pure, so values
may be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .quadrature import BoundAudit

__all__ = [
    "CAP",
    "POWER",
    "LINEAR",
    "BLEND",
    "CubeDoesNotFit",
    "OverlappingWindow",
    "FootprintOutOfRange",
    "ManifoldConfig",
    "SawtoothWindow",
    "Piece",
    "WarpingProfile",
    "build_base_profile",
    "plan_window",
    "insert_sawtooth",
    "eval_sigma",
    "audit_strip",
    "profile_to_json",
    "profile_from_json",
]

POWER, LINEAR, CAP, BLEND = 0, 1, 2, 3

STRIP_TOL = 1e-12


class CubeDoesNotFit(ValueError):
    """The oscillation cube fails its strip-containment check (h too small)."""


class OverlappingWindow(ValueError):
    """A new window's footprint (with connectors) touches existing structure."""


class FootprintOutOfRange(ValueError):
    """Window footprint, including connectors, must sit inside (1, inf)."""


@dataclass(frozen=True)
class ManifoldConfig:
    """Dimension-derived constants: alpha = 1/(m-1), gamma_m = area of S^{m-1}."""

    m: int
    alpha: float
    gamma_m: float

    @classmethod
    def from_dimension(cls, m: int) -> "ManifoldConfig":
        if not isinstance(m, (int, np.integer)) or isinstance(m, bool) or m < 2:
            raise ValueError("dimension m must be an integer >= 2")
        m = int(m)
        alpha = 1.0 / (m - 1)
        gamma_m = 2.0 * math.pi ** (m / 2.0) / math.gamma(m / 2.0)
        return cls(m=m, alpha=alpha, gamma_m=gamma_m)


@dataclass(frozen=True)
class SawtoothWindow:
    """Placement and shape of one oscillation window.

    For m = 2 the teeth drift up the diagonal: width = amplitude = 1 and the
    rise/fall slopes are 2n+1 and -(2n-1).  For m >= 3 the teeth are symmetric
    triangles of slope +-(amplitude/step) inside an eta-cube resting on the
    strip floor at the footprint's right end.
    """

    z: float
    width: float
    n_teeth: int
    step: float
    amplitude: float
    base: float
    smooth_halfwidth: float

    def __post_init__(self):
        if self.n_teeth < 1:
            raise ValueError("n_teeth must be >= 1")
        if not 2 * self.n_teeth * self.step == self.width or not self.step > 0:
            # step is always derived as width / (2 n); keep the invariant loud
            if abs(2 * self.n_teeth * self.step - self.width) > 1e-12 * max(1.0, self.width):
                raise ValueError("step must equal width / (2 * n_teeth)")
        if not 0.0 < self.smooth_halfwidth < 0.5 * self.step:
            raise ValueError("smooth_halfwidth must lie in (0, step/2)")


@dataclass(frozen=True)
class Piece:
    """One closed-form segment [t0, t1).

    params by kind:
      POWER   (c,)                      sigma = (t + c)^alpha
      LINEAR  (t_ref, y_ref, slope)     sigma = y_ref + slope*(t - t_ref)
      CAP     (a3, a4, a5)              sigma = t + a3 t^3 + a4 t^4 + a5 t^5
      BLEND   (kindL, pL0, pL1, pL2, kindR, pR0, pR1, pR2)
    """

    kind: int
    t0: float
    t1: float
    params: tuple


def _pad3(params: Sequence[float]) -> tuple[float, float, float]:
    out = list(float(x) for x in params) + [0.0, 0.0, 0.0]
    return tuple(out[:3])


# smoothstep region below which exp(-1/x) is zero to double precision
_XCUT = 0.01


def _smoothstep(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """C-infinity step on [0, 1] with its first two derivatives in x."""
    x = np.asarray(x, dtype=float)
    s = np.empty_like(x)
    sp = np.zeros_like(x)
    spp = np.zeros_like(x)
    lo = x <= _XCUT
    hi = x >= 1.0 - _XCUT
    s[lo] = 0.0
    s[hi] = 1.0
    mid = ~(lo | hi)
    if np.any(mid):
        xm = x[mid]
        x1 = 1.0 - xm
        b = np.exp(-1.0 / xm)
        b1 = np.exp(-1.0 / x1)
        bp = b / xm**2
        b1p = b1 / x1**2
        bpp = b * (1.0 - 2.0 * xm) / xm**4
        b1pp = b1 * (1.0 - 2.0 * x1) / x1**4
        den = b + b1
        num = bp * b1 + b * b1p
        dden = bp - b1p
        dnum = bpp * b1 - b * b1pp
        s[mid] = b / den
        sp[mid] = num / den**2
        spp[mid] = dnum / den**2 - 2.0 * num * dden / den**3
    return s, sp, spp


def _plain_formula(
    kind: int,
    p0: np.ndarray,
    p1: np.ndarray,
    p2: np.ndarray,
    t: np.ndarray,
    alpha: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if kind == POWER:
        u = t + p0
        y = u**alpha
        dy = alpha * u ** (alpha - 1.0)
        d2y = alpha * (alpha - 1.0) * u ** (alpha - 2.0)
        return y, dy, d2y
    if kind == LINEAR:
        y = p1 + p2 * (t - p0)
        return y, p2 * np.ones_like(t), np.zeros_like(t)
    if kind == CAP:
        t2 = t * t
        y = t + t2 * t * (p0 + t * (p1 + t * p2))
        dy = 1.0 + t2 * (3.0 * p0 + t * (4.0 * p1 + t * 5.0 * p2))
        d2y = t * (6.0 * p0 + t * (12.0 * p1 + t * 20.0 * p2))
        return y, dy, d2y
    raise ValueError(f"unknown plain piece kind {kind}")


def _side_eval(
    pp: np.ndarray, t: np.ndarray, alpha: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate the formulas referenced inside BLEND params (columns k,p0,p1,p2)."""
    y = np.empty_like(t)
    dy = np.empty_like(t)
    d2y = np.empty_like(t)
    kinds = pp[:, 0].astype(np.int64)
    for kind in (POWER, LINEAR, CAP):
        mask = kinds == kind
        if np.any(mask):
            yv, d1, d2 = _plain_formula(
                kind, pp[mask, 1], pp[mask, 2], pp[mask, 3], t[mask], alpha
            )
            y[mask] = yv
            dy[mask] = d1
            d2y[mask] = d2
    return y, dy, d2y


class WarpingProfile:
    """Immutable piecewise profile tiling [0, inf)."""

    def __init__(
        self,
        config: ManifoldConfig,
        pieces: Sequence[Piece],
        windows: Sequence[SawtoothWindow] = (),
    ):
        pieces = tuple(pieces)
        if not pieces:
            raise ValueError("profile needs at least one piece")
        if pieces[0].t0 != 0.0:
            raise ValueError("pieces must start at t = 0")
        if not math.isinf(pieces[-1].t1):
            raise ValueError("last piece must extend to infinity")
        for left, right in zip(pieces, pieces[1:]):
            if left.t1 != right.t0:
                raise ValueError(f"pieces must tile contiguously at t = {left.t1!r}")
            if not left.t0 < left.t1:
                raise ValueError("pieces must have positive width")
        self.config = config
        self.pieces = pieces
        self.windows = tuple(sorted(windows, key=lambda wdw: wdw.z))

        n = len(pieces)
        kind_arr = np.fromiter((p.kind for p in pieces), dtype=np.int64, count=n)
        t0_arr = np.fromiter((p.t0 for p in pieces), dtype=float, count=n)
        t1_arr = np.fromiter((p.t1 for p in pieces), dtype=float, count=n)
        params = np.zeros((n, 8))
        for i, p in enumerate(pieces):
            vals = np.asarray(p.params, dtype=float)
            params[i, : vals.size] = vals
        for arr in (kind_arr, t0_arr, t1_arr, params):
            arr.flags.writeable = False
        self.piece_kinds = kind_arr
        self.piece_t0 = t0_arr
        self.piece_t1 = t1_arr
        self.piece_params = params

    @property
    def knots(self) -> np.ndarray:
        """Interior piece boundaries (all finite)."""
        return self.piece_t0[1:]

    def knots_in(self, a: float, b: float) -> np.ndarray:
        k = self.knots
        return k[(k > a) & (k < b)]

    def blend_spans_in(self, a: float, b: float) -> list[tuple[float, float]]:
        """Corner-blend intervals inside (a, b); quadrature-negligible slivers."""
        mask = (self.piece_kinds == BLEND) & (self.piece_t0 >= a) & (self.piece_t1 <= b)
        return list(zip(self.piece_t0[mask], self.piece_t1[mask]))

    def piece_index(self, t: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.piece_t0, t, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def _eval_rows(
        self, rows: np.ndarray, t: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        alpha = self.config.alpha
        y = np.empty_like(t)
        dy = np.empty_like(t)
        d2y = np.empty_like(t)
        kinds = self.piece_kinds[rows]
        pp = self.piece_params[rows]
        for kind in (POWER, LINEAR, CAP):
            mask = kinds == kind
            if np.any(mask):
                yv, d1, d2 = _plain_formula(
                    kind, pp[mask, 0], pp[mask, 1], pp[mask, 2], t[mask], alpha
                )
                y[mask] = yv
                dy[mask] = d1
                d2y[mask] = d2
        mask = kinds == BLEND
        if np.any(mask):
            rws = rows[mask]
            tm = t[mask]
            t0 = self.piece_t0[rws]
            width = self.piece_t1[rws] - t0
            x = (tm - t0) / width
            s, sp, spp = _smoothstep(x)
            yl, dl, d2l = _side_eval(pp[mask, 0:4], tm, alpha)
            yr, dr, d2r = _side_eval(pp[mask, 4:8], tm, alpha)
            y[mask] = yl + s * (yr - yl)
            dy[mask] = dl + s * (dr - dl) + (sp / width) * (yr - yl)
            d2y[mask] = (
                d2l
                + s * (d2r - d2l)
                + 2.0 * (sp / width) * (dr - dl)
                + (spp / width**2) * (yr - yl)
            )
        return y, dy, d2y

    def eval_many(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(sigma, sigma', sigma'') at an array of radii; pure and deterministic."""
        t = np.asarray(t, dtype=float)
        flat = np.ravel(t)
        rows = self.piece_index(flat)
        y, dy, d2y = self._eval_rows(rows, flat)
        return y.reshape(t.shape), dy.reshape(t.shape), d2y.reshape(t.shape)

    def eval(self, t: float) -> tuple[float, float, float]:
        y, dy, d2y = self.eval_many(np.asarray([float(t)]))
        return float(y[0]), float(dy[0]), float(d2y[0])

    def knot_mismatches(self) -> dict[str, np.ndarray]:
        """One-sided value/slope/curvature gaps at every interior knot.

        Checked by piece inspection: the left piece and the right piece are
        each evaluated at the shared boundary point.
        """
        n = len(self.pieces)
        ts = self.piece_t0[1:]
        left = self._eval_rows(np.arange(0, n - 1), ts)
        right = self._eval_rows(np.arange(1, n), ts)
        return {
            "knots": ts,
            "value": np.abs(left[0] - right[0]),
            "slope": np.abs(left[1] - right[1]),
            "curvature": np.abs(left[2] - right[2]),
        }


def eval_sigma(profile: WarpingProfile, t: float) -> tuple[float, float, float]:
    """(sigma(t), sigma'(t), sigma''(t))."""
    return profile.eval(t)


def _cap_coefficients(alpha: float) -> tuple[float, float, float]:
    v = 1.5**alpha
    d1 = alpha * 1.5 ** (alpha - 1.0)
    d2 = alpha * (alpha - 1.0) * 1.5 ** (alpha - 2.0)
    lhs = np.array([[1.0, 1.0, 1.0], [3.0, 4.0, 5.0], [6.0, 12.0, 20.0]])
    rhs = np.array([v - 1.0, d1 - 1.0, d2])
    a3, a4, a5 = np.linalg.solve(lhs, rhs)
    return float(a3), float(a4), float(a5)


def build_base_profile(config: ManifoldConfig) -> WarpingProfile:
    """Background profile: quintic cap on [0, 1], then (t + 1/2)^alpha.

    The cap satisfies sigma(0) = 0, sigma'(0) = 1, sigma''(0) = 0 and joins
    the power curve with matching value, slope and curvature at t = 1, so the
    profile is C^2 with no blend needed there.
    """
    coeffs = _cap_coefficients(config.alpha)
    pieces = (
        Piece(CAP, 0.0, 1.0, coeffs),
        Piece(POWER, 1.0, math.inf, (0.5,)),
    )
    profile = WarpingProfile(config, pieces)
    ts = np.linspace(1.0 / 512, 1.0, 512)
    y = profile.eval_many(ts)[0]
    top = (ts + 1.0) ** config.alpha
    if not (np.all(y > 0.0) and np.all(y <= top * (1.0 + 1e-12))):
        raise CubeDoesNotFit(
            f"cap polynomial leaves (0, (t+1)^alpha] on (0, 1] for m = {config.m}"
        )
    return profile


def plan_window(
    config: ManifoldConfig,
    h: float,
    n_teeth: int,
    smooth_halfwidth: float | None = None,
) -> SawtoothWindow:
    """Size an oscillation window starting at h.

    m = 2: the unit window [h, h+1] with drifting teeth spanning the strip.
    m >= 3: cube side eta = min over [h, h+1] of ((t+1)^alpha - t^alpha) / 10,
    attained at t = h+1 since the gap decreases, resting on base = (h+eta)^alpha.
    Raises CubeDoesNotFit when the cube pokes above the strip ceiling.
    """
    if not h > 1.0:
        raise ValueError("window start h must exceed 1")
    if not isinstance(n_teeth, (int, np.integer)) or n_teeth < 1:
        raise ValueError("n_teeth must be an integer >= 1")
    n_teeth = int(n_teeth)
    alpha = config.alpha
    if config.m == 2:
        width = 1.0
        amplitude = 1.0
        base = h
    else:
        eta = ((h + 2.0) ** alpha - (h + 1.0) ** alpha) / 10.0
        width = eta
        amplitude = eta
        base = (h + eta) ** alpha
        ceiling = (h + 1.0) ** alpha
        scale = max(1.0, ceiling)
        if base < (h + width) ** alpha - 1e-12 * scale:
            raise CubeDoesNotFit("cube base fell below the strip floor")
        if base + amplitude > ceiling + 1e-12 * scale:
            raise CubeDoesNotFit(
                f"cube top {base + amplitude!r} above strip ceiling {ceiling!r} at h = {h!r}"
            )
    step = width / (2.0 * n_teeth)
    if smooth_halfwidth is None:
        smooth_halfwidth = max(
            min(step / 100.0, step**10),
            64.0 * float(np.spacing(h + width + 1.0)),
        )
    smooth_halfwidth = float(smooth_halfwidth)
    if not 0.0 < smooth_halfwidth < 0.5 * step:
        raise CubeDoesNotFit(
            f"smoothing halfwidth {smooth_halfwidth!r} must lie in (0, step/2)"
        )
    return SawtoothWindow(
        z=float(h),
        width=width,
        n_teeth=n_teeth,
        step=step,
        amplitude=amplitude,
        base=float(base),
        smooth_halfwidth=smooth_halfwidth,
    )


def _bisect_root(fn, lo: float, hi: float) -> float:
    flo = fn(lo)
    fhi = fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError("connector root not bracketed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = fn(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def _window_intervals(
    config: ManifoldConfig, window: SawtoothWindow, host_c: float
) -> tuple[float, float, list[tuple[float, float, int, tuple]]]:
    """Formula intervals covering [t_enter, t_exit], corners not yet blended.

    The entry connector falls into (z, base) with the falling-tooth slope and
    the exit connector rises out of (z + width, end value) with the rising
    slope, so the corners where the window touches the strip have symmetric
    slope deviations and blend cleanly.
    """
    alpha = config.alpha
    z = window.z
    n = window.n_teeth
    step = window.step
    width = window.width
    base = window.base

    edges = z + step * np.arange(2 * n + 1)
    edges[-1] = z + width

    intervals: list[tuple[float, float, int, tuple]] = []
    if config.m == 2:
        rise = 2.0 * n + 1.0
        fall = 2.0 * n - 1.0
        t_enter = z - 0.5 * step
        t_exit = z + width + 0.5 * step
        intervals.append((t_enter, z, LINEAR, (z, z, -fall)))
        for j in range(n):
            v = float(edges[2 * j])
            p = float(edges[2 * j + 1])
            v_next = float(edges[2 * j + 2])
            intervals.append((v, p, LINEAR, (v, v, rise)))
            intervals.append((p, v_next, LINEAR, (p, p + 1.0, -fall)))
        end = z + width
        intervals.append((end, t_exit, LINEAR, (end, end, rise)))
    else:
        slope = window.amplitude / step
        top = base + window.amplitude

        def entry_gap(t: float) -> float:
            return (t + host_c) ** alpha - (base + slope * (z - t))

        delta_in = (z + host_c) ** alpha - base
        t_enter = _bisect_root(entry_gap, z - 1.5 * delta_in / slope, z)

        end = z + width

        def exit_gap(t: float) -> float:
            return (t + host_c) ** alpha - (base + slope * (t - end))

        delta_out = (end + host_c) ** alpha - base
        t_exit = _bisect_root(exit_gap, end, end + 1.5 * delta_out / slope)

        intervals.append((t_enter, z, LINEAR, (z, base, -slope)))
        for j in range(n):
            v = float(edges[2 * j])
            p = float(edges[2 * j + 1])
            v_next = float(edges[2 * j + 2])
            intervals.append((v, p, LINEAR, (v, base, slope)))
            intervals.append((p, v_next, LINEAR, (p, top, -slope)))
        intervals.append((end, t_exit, LINEAR, (end, base, slope)))
    return t_enter, t_exit, intervals


def _assemble_with_blends(
    intervals: list[tuple[float, float, int, tuple]], halfwidth: float
) -> list[Piece]:
    """Trim each interval by the blend halfwidth and bridge corners with BLENDs.

    The outermost interval edges are left untouched; callers blend them
    against the surrounding profile separately or keep them as-is.
    """
    pieces: list[Piece] = []
    last = len(intervals) - 1
    for i, (ta, tb, kind, params) in enumerate(intervals):
        a = ta + halfwidth if i > 0 else ta
        b = tb - halfwidth if i < last else tb
        if not a < b:
            raise CubeDoesNotFit("smoothing halfwidth swallows a whole piece")
        pieces.append(Piece(kind, a, b, params))
        if i < last:
            nkind, nparams = intervals[i + 1][2], intervals[i + 1][3]
            blend = (float(kind), *_pad3(params), float(nkind), *_pad3(nparams))
            pieces.append(Piece(BLEND, b, tb + halfwidth, blend))
    return pieces


def _occupied_spans(profile: WarpingProfile) -> list[tuple[float, float]]:
    """Maximal runs of non-POWER structure at t >= 1 (existing windows)."""
    spans: list[tuple[float, float]] = []
    for p in profile.pieces:
        if p.kind == POWER or p.t1 <= 1.0:
            continue
        if spans and spans[-1][1] == p.t0:
            spans[-1] = (spans[-1][0], p.t1)
        else:
            spans.append((p.t0, p.t1))
    return spans


def insert_sawtooth(profile: WarpingProfile, window: SawtoothWindow) -> WarpingProfile:
    """New profile with the window's teeth, connectors and corner blends.

    The footprint [z, z + width] carries n_teeth sawtooth units; short
    connector ramps outside the footprint rejoin the background curve, and
    every corner is a BLEND of halfwidth smooth_halfwidth.  sigma and sigma'
    stay continuous everywhere and the strip bounds are preserved.
    """
    host_idx = int(profile.piece_index(np.asarray([window.z]))[0])
    host = profile.pieces[host_idx]
    if host.kind != POWER:
        raise OverlappingWindow(
            f"window start {window.z!r} does not sit on background curve"
        )
    host_c = float(host.params[0])
    w = window.smooth_halfwidth
    t_enter, t_exit, intervals = _window_intervals(profile.config, window, host_c)

    span = (t_enter - w, t_exit + w)
    if span[0] <= 1.0:
        raise FootprintOutOfRange(
            f"window span {span!r} (with connectors) must stay inside (1, inf)"
        )
    for lo, hi in _occupied_spans(profile):
        if span[0] < hi and lo < span[1]:
            raise OverlappingWindow(
                f"window span {span!r} overlaps existing structure [{lo!r}, {hi!r}]"
            )
    if not (host.t0 <= span[0] and span[1] <= host.t1):
        raise OverlappingWindow(
            f"window span {span!r} crosses piece boundaries of the host curve"
        )

    full = [(host.t0, t_enter, POWER, host.params)]
    full.extend(intervals)
    full.append((t_exit, host.t1, POWER, host.params))
    assembled = _assemble_with_blends(full, w)

    pieces = list(profile.pieces[:host_idx]) + assembled + list(
        profile.pieces[host_idx + 1 :]
    )
    return WarpingProfile(profile.config, pieces, (*profile.windows, window))


def audit_strip(
    profile: WarpingProfile, t_min: float, t_max: float, samples: int = 2048
) -> BoundAudit:
    """Check t^alpha <= sigma(t) <= (t+1)^alpha on [t_min, t_max].

    The sample set contains every knot in range plus a uniform fill.
    Violations are relative; touching the boundaries is allowed.
    """
    if not 1.0 <= t_min < t_max:
        raise ValueError("need 1 <= t_min < t_max")
    ts = np.unique(
        np.concatenate(
            [
                np.asarray([t_min, t_max]),
                profile.knots_in(t_min, t_max),
                np.linspace(t_min, t_max, max(2, samples)),
            ]
        )
    )
    y = profile.eval_many(ts)[0]
    alpha = profile.config.alpha
    floor = ts**alpha
    ceil = (ts + 1.0) ** alpha
    low_viol = (floor - y) / np.maximum(1.0, floor)
    high_viol = (y - ceil) / np.maximum(1.0, ceil)
    audit = BoundAudit()
    i = int(np.argmax(low_viol))
    audit.add("strip_lower", float(low_viol[i]), float(ts[i]), STRIP_TOL)
    j = int(np.argmax(high_viol))
    audit.add("strip_upper", float(high_viol[j]), float(ts[j]), STRIP_TOL)
    return audit


def profile_to_json(profile: WarpingProfile) -> dict:
    """Canonical serialization: dimension, windows, cap coefficients."""
    cap = next(p for p in profile.pieces if p.kind == CAP)
    return {
        "m": profile.config.m,
        "cap_coefficients": [float(c) for c in cap.params],
        "windows": [
            {
                "z": wdw.z,
                "width": wdw.width,
                "n_teeth": wdw.n_teeth,
                "amplitude": wdw.amplitude,
                "base": wdw.base,
                "smooth_halfwidth": wdw.smooth_halfwidth,
            }
            for wdw in profile.windows
        ],
    }


def profile_from_json(data: dict) -> WarpingProfile:
    """Rebuild a profile from its serialized form (windows re-inserted in order)."""
    config = ManifoldConfig.from_dimension(int(data["m"]))
    profile = build_base_profile(config)
    for wdata in sorted(data.get("windows", []), key=lambda d: d["z"]):
        window = SawtoothWindow(
            z=float(wdata["z"]),
            width=float(wdata["width"]),
            n_teeth=int(wdata["n_teeth"]),
            step=float(wdata["width"]) / (2.0 * int(wdata["n_teeth"])),
            amplitude=float(wdata["amplitude"]),
            base=float(wdata["base"]),
            smooth_halfwidth=float(wdata["smooth_halfwidth"]),
        )
        profile = insert_sawtooth(profile, window)
    return profile

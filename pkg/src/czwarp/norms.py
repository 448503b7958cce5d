"""Radial test functions u(r) = phi(G(r) - k) and their L^p norm accounting.

phi(s) = s * w(s) with a smooth cutoff w that is 1 on [delta, 1 - delta] and
0 outside (delta/2, 1 - delta/2).  On the plateau u equals G - k, where the
radial Laplacian collapses to phi'' * sigma^(2 - 2m) exactly, so u is
harmonic there while the sawtooth drives the Hessian through the tangential
component sigma' u' / sigma.

Norms use the rotationally invariant weight: ||f||_p^p is gamma_m times the
integral of |f|^p sigma^(m-1) dr over the support bracket.  The same
quantities in the Green coordinate s (the I-integrals below) admit the
k-explicit bounds that the audit chain verifies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .green import DELTA_UNIVERSAL, GreenFunction
from .quadrature import BoundAudit, QuadratureSpec, integrate
from .warping import _smoothstep

__all__ = [
    "InvalidDelta",
    "CutoffFunction",
    "build_cutoff",
    "TestFunction",
    "HessianValue",
    "hessian_components",
    "u_eval",
    "hessian_at",
    "laplacian_at",
    "volume_integral",
    "lp_norm_pow",
    "NormsReport",
    "norms_report",
    "s_integral_u",
    "s_integral_laplacian",
    "audit_norm_chain",
]


class InvalidDelta(ValueError):
    """Cutoff margin must satisfy 0 < delta < 1/2."""


class CutoffFunction:
    """phi(s) = s * w(s); w rises on (delta/2, delta), falls on (1-delta, 1-delta/2)."""

    def __init__(self, delta: float = DELTA_UNIVERSAL):
        if not 0.0 < delta < 0.5:
            raise InvalidDelta(f"delta = {delta!r} outside (0, 1/2)")
        self.delta = float(delta)
        self.sup_d2 = self._scan_sup_d2()

    def _scan_sup_d2(self) -> float:
        d = self.delta
        grid = np.concatenate(
            [
                np.linspace(0.5 * d, d, 20001),
                np.linspace(1.0 - d, 1.0 - 0.5 * d, 20001),
            ]
        )
        return float(np.max(np.abs(self.eval_many(grid)[2])))

    def eval_many(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(phi, phi', phi'') with identically zero values outside the support."""
        s = np.asarray(s, dtype=float)
        d = self.delta
        half = 0.5 * d
        w = np.zeros_like(s)
        dw = np.zeros_like(s)
        d2w = np.zeros_like(s)

        plateau = (s >= d) & (s <= 1.0 - d)
        w[plateau] = 1.0

        rise = (s > half) & (s < d)
        if np.any(rise):
            x = (s[rise] - half) / half
            sv, sp, spp = _smoothstep(x)
            w[rise] = sv
            dw[rise] = sp / half
            d2w[rise] = spp / half**2

        fall = (s > 1.0 - d) & (s < 1.0 - half)
        if np.any(fall):
            x = ((1.0 - half) - s[fall]) / half
            sv, sp, spp = _smoothstep(x)
            w[fall] = sv
            dw[fall] = -sp / half
            d2w[fall] = spp / half**2

        phi = s * w
        dphi = w + s * dw
        d2phi = 2.0 * dw + s * d2w
        return phi, dphi, d2phi


def build_cutoff(delta: float = DELTA_UNIVERSAL) -> CutoffFunction:
    return CutoffFunction(delta)


@dataclass(frozen=True)
class HessianValue:
    """Radial/tangential Hessian eigenvalues; tangential has multiplicity m-1."""

    radial: float
    tangential: float
    multiplicity: int

    @property
    def frame_norm(self) -> float:
        return math.sqrt(self.radial**2 + self.multiplicity * self.tangential**2)

    @property
    def trace(self) -> float:
        return self.radial + self.multiplicity * self.tangential


def hessian_components(
    du: np.ndarray, d2u: np.ndarray, sigma: np.ndarray, dsigma: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Hessian eigenvalues of a radial function: (u'', sigma' u' / sigma)."""
    return d2u, dsigma * du / sigma


class TestFunction:
    """u(r) = phi(G(r) - k), supported where G(r) - k lies in (delta/2, 1 - delta/2)."""

    __test__ = False  # keep pytest from collecting this despite the name

    def __init__(self, k: float, cutoff: CutoffFunction, green: GreenFunction):
        if not k >= 1.0:
            raise ValueError("level k must be >= 1")
        if k + 1.0 > green.s_max:
            raise ValueError(
                f"support needs Green range up to {k + 1.0!r} but the table "
                f"ends at {green.s_max!r}; rebuild with a larger r_max"
            )
        self.k = float(k)
        self.cutoff = cutoff
        self.green = green
        self.r_lo = green.inverse(self.k)
        self.r_hi = green.inverse(self.k + 1.0)
        d = cutoff.delta
        self.support_r = (
            green.inverse(self.k + 0.5 * d),
            green.inverse(self.k + 1.0 - 0.5 * d),
        )

    def s_many(self, r: np.ndarray) -> np.ndarray:
        return self.green.value_many(r) - self.k

    def _chain(self, r: np.ndarray):
        """One evaluation sweep: cutoff at s = G(r) - k plus the warp triple."""
        r = np.asarray(r, dtype=float)
        s = self.s_many(r)
        phi, dphi, d2phi = self.cutoff.eval_many(s)
        sigma, dsigma, _ = self.green.profile.eval_many(r)
        return phi, dphi, d2phi, sigma, dsigma

    def derivatives_many(
        self, r: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u, u', u'') from the chain rule through G."""
        phi, dphi, d2phi, sigma, dsigma = self._chain(r)
        m = self.green.profile.config.m
        gp = sigma ** (1 - m)
        gpp = (1 - m) * sigma ** (-m) * dsigma
        return phi, dphi * gp, d2phi * gp**2 + dphi * gpp

    def hessian_many(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        phi, dphi, d2phi, sigma, dsigma = self._chain(r)
        m = self.green.profile.config.m
        gp = sigma ** (1 - m)
        du = dphi * gp
        d2u = d2phi * gp**2 + dphi * (1 - m) * sigma ** (-m) * dsigma
        return hessian_components(du, d2u, sigma, dsigma)

    def laplacian_many(self, r: np.ndarray, route: str = "direct") -> np.ndarray:
        """Radial Laplacian along two independent routes.

        direct         u'' + (m-1) sigma' u' / sigma, with all cancellation
                       left to floating point
        green_identity phi''(G - k) * sigma^(2 - 2m), the collapsed form
        """
        m = self.green.profile.config.m
        if route == "direct":
            radial, tangential = self.hessian_many(r)
            return radial + (m - 1) * tangential
        if route == "green_identity":
            r = np.asarray(r, dtype=float)
            s = self.s_many(r)
            d2phi = self.cutoff.eval_many(s)[2]
            sigma = self.green.profile.eval_many(r)[0]
            return d2phi * sigma ** (2 - 2 * m)
        raise ValueError(f"unknown Laplacian route {route!r}")


def u_eval(tf: TestFunction, r: float) -> float:
    return float(tf.derivatives_many(np.asarray([float(r)]))[0][0])


def hessian_at(tf: TestFunction, r: float) -> HessianValue:
    radial, tangential = tf.hessian_many(np.asarray([float(r)]))
    return HessianValue(
        radial=float(radial[0]),
        tangential=float(tangential[0]),
        multiplicity=tf.green.profile.config.m - 1,
    )


def laplacian_at(tf: TestFunction, r: float, route: str = "direct") -> float:
    return float(tf.laplacian_many(np.asarray([float(r)]), route=route)[0])


def volume_integral(
    profile,
    f_many,
    a: float,
    b: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> tuple[float, float]:
    """gamma_m * integral of f(r) sigma^(m-1) dr with knot-aware panels."""
    m = profile.config.m
    gamma = profile.config.gamma_m

    def integrand(r: np.ndarray) -> np.ndarray:
        sigma = profile.eval_many(r)[0]
        return f_many(r) * sigma ** (m - 1)

    value, err = integrate(
        integrand,
        a,
        b,
        breakpoints=profile.knots_in(a, b),
        spec=spec,
        slivers=profile.blend_spans_in(a, b),
    )
    return gamma * value, gamma * err


def _validate_p(p: float) -> float:
    p = float(p)
    if not (1.0 < p < math.inf):
        raise ValueError(
            f"p = {p!r} outside (1, inf); the endpoint cases follow from "
            "classical theory and are not handled here"
        )
    return p


def _field_many(tf: TestFunction, field: str):
    if field == "u":
        return lambda r: tf.derivatives_many(r)[0]
    if field == "laplacian":
        return lambda r: tf.laplacian_many(r, route="green_identity")
    if field == "hessian":
        m = tf.green.profile.config.m

        def frame(r: np.ndarray) -> np.ndarray:
            radial, tangential = tf.hessian_many(r)
            return np.sqrt(radial**2 + (m - 1) * tangential**2)

        return frame
    raise ValueError(f"unknown field {field!r}")


def _norm_breakpoints(tf: TestFunction) -> np.ndarray:
    d = tf.cutoff.delta
    transitions = tf.green.inverse_many(
        tf.k + np.asarray([0.5 * d, d, 1.0 - d, 1.0 - 0.5 * d])
    )
    knots = tf.green.profile.knots_in(tf.r_lo, tf.r_hi)
    return np.concatenate([transitions, knots])


def lp_norm_pow(
    tf: TestFunction,
    field: str,
    p: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> tuple[float, float]:
    """(||field||_p^p, error bound) over the support bracket [Ginv(k), Ginv(k+1)]."""
    p = _validate_p(p)
    f = _field_many(tf, field)
    profile = tf.green.profile
    m = profile.config.m
    gamma = profile.config.gamma_m

    def integrand(r: np.ndarray) -> np.ndarray:
        sigma = profile.eval_many(r)[0]
        return np.abs(f(r)) ** p * sigma ** (m - 1)

    value, err = integrate(
        integrand,
        tf.r_lo,
        tf.r_hi,
        breakpoints=_norm_breakpoints(tf),
        spec=spec,
        slivers=profile.blend_spans_in(tf.r_lo, tf.r_hi),
    )
    return gamma * value, gamma * err


@dataclass(frozen=True)
class NormsReport:
    p: float
    k: float
    norm_u_p_pow: float
    norm_lap_p_pow: float
    norm_hess_p_pow: float
    err_u: float
    err_lap: float
    err_hess: float

    @property
    def quad_err(self) -> float:
        return max(self.err_u, self.err_lap, self.err_hess)


def norms_report(
    tf: TestFunction, p: float, spec: QuadratureSpec = QuadratureSpec()
) -> NormsReport:
    u_pow, u_err = lp_norm_pow(tf, "u", p, spec)
    lap_pow, lap_err = lp_norm_pow(tf, "laplacian", p, spec)
    hess_pow, hess_err = lp_norm_pow(tf, "hessian", p, spec)
    return NormsReport(
        p=float(p),
        k=tf.k,
        norm_u_p_pow=u_pow,
        norm_lap_p_pow=lap_pow,
        norm_hess_p_pow=hess_pow,
        err_u=u_err,
        err_lap=lap_err,
        err_hess=hess_err,
    )


def _s_panels(tf: TestFunction) -> tuple[np.ndarray, list[tuple[float, float]]]:
    """Breakpoints and blend slivers mapped into the Green coordinate."""
    d = tf.cutoff.delta
    knots = tf.green.profile.knots_in(tf.r_lo, tf.r_hi)
    pts = [np.asarray([0.5 * d, d, 1.0 - d, 1.0 - 0.5 * d])]
    if knots.size:
        pts.append(tf.green.value_many(knots) - tf.k)
    spans = tf.green.profile.blend_spans_in(tf.r_lo, tf.r_hi)
    slivers: list[tuple[float, float]] = []
    if spans:
        edges = np.asarray(spans)
        s_lo = tf.green.value_many(edges[:, 0]) - tf.k
        s_hi = tf.green.value_many(edges[:, 1]) - tf.k
        slivers = [(lo, hi) for lo, hi in zip(s_lo, s_hi) if lo < hi]
    return np.concatenate(pts), slivers


def s_integral_u(
    tf: TestFunction, p: float, spec: QuadratureSpec = QuadratureSpec()
) -> tuple[float, float]:
    """I_u = integral over s in [0,1] of |phi|^p sigma(Ginv(k+s))^(2(m-1))."""
    p = _validate_p(p)
    m = tf.green.profile.config.m

    def integrand(s: np.ndarray) -> np.ndarray:
        phi = tf.cutoff.eval_many(s)[0]
        r = tf.green.inverse_many(tf.k + s)
        sigma = tf.green.profile.eval_many(r)[0]
        return np.abs(phi) ** p * sigma ** (2 * (m - 1))

    brk, slivers = _s_panels(tf)
    return integrate(
        integrand, 0.0, 1.0, breakpoints=brk, spec=spec, slivers=slivers
    )


def s_integral_laplacian(
    tf: TestFunction, p: float, spec: QuadratureSpec = QuadratureSpec()
) -> tuple[float, float]:
    """I_lap = integral over s of |phi''|^p sigma(Ginv(k+s))^((2-2p)(m-1))."""
    p = _validate_p(p)
    m = tf.green.profile.config.m

    def integrand(s: np.ndarray) -> np.ndarray:
        d2phi = tf.cutoff.eval_many(s)[2]
        r = tf.green.inverse_many(tf.k + s)
        sigma = tf.green.profile.eval_many(r)[0]
        return np.abs(d2phi) ** p * sigma ** ((2.0 - 2.0 * p) * (m - 1))

    brk, slivers = _s_panels(tf)
    return integrate(
        integrand, 0.0, 1.0, breakpoints=brk, spec=spec, slivers=slivers
    )


def audit_norm_chain(
    tf: TestFunction, p: float, spec: QuadratureSpec = QuadratureSpec()
) -> BoundAudit:
    """k-explicit bound chain: u mass above, Laplacian mass above, tooth mass below.

    upper bounds (in the Green coordinate, without gamma_m):
      I_u   <= 2 e^(2k+2) for m = 2, else 4 e^(2(k+1))
      I_lap <= sup|phi''|^p e^(-2(p-1)k)
    lower bound, per window inside the support, on the raw slope mass
    integral of |sigma'|^p dt over the footprint:
      m = 2   n (step - 2 w_s) (2n-1)^p
      m >= 3  (eta - 4 l w_s) (amplitude/step)^p
    """
    p = _validate_p(p)
    k = tf.k
    m = tf.green.profile.config.m
    audit = BoundAudit()

    iu, iu_err = s_integral_u(tf, p, spec)
    bound_u = 2.0 * math.exp(2.0 * k + 2.0) if m == 2 else 4.0 * math.exp(2.0 * (k + 1.0))
    audit.add("u_mass_upper", (iu + iu_err - bound_u) / bound_u, k, 0.0)

    il, il_err = s_integral_laplacian(tf, p, spec)
    bound_l = tf.cutoff.sup_d2**p * math.exp(-2.0 * (p - 1.0) * k)
    audit.add("laplacian_mass_upper", (il + il_err - bound_l) / bound_l, k, 0.0)

    profile = tf.green.profile
    for window in profile.windows:
        z0, z1 = window.z, window.z + window.width
        if not (tf.r_lo <= z0 and z1 <= tf.r_hi):
            continue

        def slope_mass(t: np.ndarray) -> np.ndarray:
            return np.abs(profile.eval_many(t)[1]) ** p

        mass, mass_err = integrate(
            slope_mass,
            z0,
            z1,
            breakpoints=profile.knots_in(z0, z1),
            spec=spec,
            slivers=profile.blend_spans_in(z0, z1),
        )
        n = window.n_teeth
        ws = window.smooth_halfwidth
        if m == 2:
            floor = n * (window.step - 2.0 * ws) * (2.0 * n - 1.0) ** p
        else:
            slope = window.amplitude / window.step
            floor = (window.width - 4.0 * n * ws) * slope**p
        audit.add(
            f"tooth_mass_lower[z={window.z!r}]",
            (floor - (mass - mass_err)) / floor,
            window.z,
            0.0,
        )
    return audit

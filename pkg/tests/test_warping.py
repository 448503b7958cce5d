"""Profile construction, window geometry, strip containment, smoothness."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from czwarp.warping import (
    CAP,
    LINEAR,
    POWER,
    CubeDoesNotFit,
    FootprintOutOfRange,
    ManifoldConfig,
    OverlappingWindow,
    Piece,
    SawtoothWindow,
    WarpingProfile,
    _cap_coefficients,
    _smoothstep,
    audit_strip,
    build_base_profile,
    insert_sawtooth,
    plan_window,
    profile_from_json,
    profile_to_json,
)


def test_dimension_constants():
    c2 = ManifoldConfig.from_dimension(2)
    c3 = ManifoldConfig.from_dimension(3)
    c5 = ManifoldConfig.from_dimension(5)
    assert c2.alpha == 1.0
    assert c3.alpha == 0.5
    assert c5.alpha == 0.25
    # unit sphere areas: circle 2*pi, sphere 4*pi, S^4 has 8*pi^2/3
    assert abs(c2.gamma_m - 2.0 * math.pi) <= 1e-15
    assert abs(c3.gamma_m - 4.0 * math.pi) <= 1e-14
    assert abs(c5.gamma_m - 8.0 * math.pi**2 / 3.0) <= 1e-13


def test_dimension_validation():
    with pytest.raises(ValueError):
        ManifoldConfig.from_dimension(1)
    with pytest.raises(ValueError):
        ManifoldConfig.from_dimension(2.5)


def test_base_profile_fixture_values():
    p2 = build_base_profile(ManifoldConfig.from_dimension(2))
    assert p2.eval(2.0)[0] == 2.5
    p3 = build_base_profile(ManifoldConfig.from_dimension(3))
    assert abs(p3.eval(4.0)[0] - math.sqrt(4.5)) <= 1e-15


def test_cap_boundary_conditions():
    for m in (2, 3, 5):
        prof = build_base_profile(ManifoldConfig.from_dimension(m))
        y0, dy0, d2y0 = prof.eval(0.0)
        assert y0 == 0.0 and dy0 == 1.0 and d2y0 == 0.0
        mism = prof.knot_mismatches()
        assert mism["value"].max() <= 1e-13
        assert mism["slope"].max() <= 1e-13
        assert mism["curvature"].max() <= 1e-13


def test_cap_coefficients_m2_closed_form():
    # hand-solved 3x3 system for alpha = 1: matches value 1.5, slope 1,
    # curvature 0 of t + 1/2 at t = 1
    a3, a4, a5 = _cap_coefficients(1.0)
    assert abs(a3 - 5.0) <= 1e-12
    assert abs(a4 + 7.5) <= 1e-12
    assert abs(a5 - 3.0) <= 1e-12


def test_cap_monotone_for_m2():
    # sigma' = 1 + 15 t^2 (1 - t)^2 >= 1 on the cap
    prof = build_base_profile(ManifoldConfig.from_dimension(2))
    ts = np.linspace(0.0, 1.0, 2001)
    dy = prof.eval_many(ts)[1]
    assert dy.min() >= 1.0 - 1e-12


def test_cap_positive_all_dimensions():
    for m in (2, 3, 4, 5, 8):
        prof = build_base_profile(ManifoldConfig.from_dimension(m))
        ts = np.linspace(1e-4, 1.0, 2000)
        assert prof.eval_many(ts)[0].min() > 0.0


def test_smoothstep_partition_and_center():
    x = np.linspace(0.0, 1.0, 1001)
    s, sp, spp = _smoothstep(x)
    s_flip = _smoothstep(1.0 - x)[0]
    assert np.max(np.abs(s + s_flip - 1.0)) <= 1e-15
    assert s[0] == 0.0 and s[-1] == 1.0
    mid = _smoothstep(np.asarray([0.5]))
    assert mid[0][0] == 0.5
    assert abs(mid[1][0] - 2.0) <= 1e-14  # s'(1/2) = 2 for exp(-1/x) weights
    assert np.all(sp >= 0.0)


def test_smoothstep_derivatives_match_differences():
    x = np.linspace(0.05, 0.95, 181)
    h = 1e-6
    s, sp, spp = _smoothstep(x)
    s_p = _smoothstep(x + h)[0]
    s_m = _smoothstep(x - h)[0]
    d1 = (s_p - s_m) / (2.0 * h)
    d2 = (s_p - 2.0 * s + s_m) / h**2
    assert np.max(np.abs(d1 - sp)) <= 1e-6 * max(1.0, np.max(np.abs(sp)))
    assert np.max(np.abs(d2 - spp)) <= 1e-3 * max(1.0, np.max(np.abs(spp)))


def test_window_slopes_m2():
    cfg = ManifoldConfig.from_dimension(2)
    w = plan_window(cfg, 3.0, 5)
    prof = insert_sawtooth(build_base_profile(cfg), w)
    mids = 3.0 + w.step * (np.arange(10) + 0.5)
    dy = prof.eval_many(mids)[1]
    assert np.all(dy[0::2] == 11.0)
    assert np.all(dy[1::2] == -9.0)


def test_window_corners_single_tooth_m2():
    cfg = ManifoldConfig.from_dimension(2)
    prof = insert_sawtooth(build_base_profile(cfg), plan_window(cfg, 3.0, 1))
    assert abs(prof.eval(3.0)[0] - 3.0) <= 1e-13
    assert abs(prof.eval(3.5)[0] - 4.5) <= 1e-13
    assert abs(prof.eval(4.0)[0] - 4.0) <= 1e-13


def test_window_eta_and_corners_m3():
    cfg = ManifoldConfig.from_dimension(3)
    w = plan_window(cfg, 9.0, 4)
    eta = (math.sqrt(11.0) - math.sqrt(10.0)) / 10.0
    assert abs(w.width - eta) <= 1e-15
    assert w.amplitude == w.width
    assert abs(w.base - math.sqrt(9.0 + eta)) <= 1e-15
    prof = insert_sawtooth(build_base_profile(cfg), w)
    assert abs(prof.eval(w.z)[0] - w.base) <= 1e-12
    top = w.base + w.amplitude
    assert abs(prof.eval(w.z + w.step)[0] - top) <= 1e-12 * top


def test_window_teeth_slopes_by_piece_inspection():
    cfg = ManifoldConfig.from_dimension(2)
    n = 8
    w = plan_window(cfg, 5.0, n)
    prof = insert_sawtooth(build_base_profile(cfg), w)
    rises = []
    falls = []
    for p in prof.pieces:
        if p.kind == LINEAR and w.z <= p.t0 and p.t1 <= w.z + w.width:
            if p.params[2] > 0:
                rises.append(p)
            else:
                falls.append(p)
    assert len(rises) == n and len(falls) == n
    assert all(p.params[2] == 2.0 * n + 1.0 for p in rises)
    assert all(p.params[2] == -(2.0 * n - 1.0) for p in falls)
    measured = sum(p.t1 - p.t0 for p in falls)
    assert measured >= n * (w.step - 2.0 * w.smooth_halfwidth) - 1e-15


def test_symmetric_teeth_slopes_m_ge_3():
    cfg = ManifoldConfig.from_dimension(4)
    w = plan_window(cfg, 16.0, 6)
    prof = insert_sawtooth(build_base_profile(cfg), w)
    slope = w.amplitude / w.step
    assert slope == 2.0 * w.n_teeth
    mids = w.z + w.step * (np.arange(12) + 0.5)
    dy = prof.eval_many(mids)[1]
    assert np.max(np.abs(np.abs(dy) - slope)) <= 1e-12 * slope


def test_strip_containment_with_windows():
    for m, h, n in ((2, 3.0, 1), (2, 7.0, 16), (3, 9.0, 8), (5, 20.0, 4)):
        cfg = ManifoldConfig.from_dimension(m)
        prof = insert_sawtooth(build_base_profile(cfg), plan_window(cfg, h, n))
        audit = audit_strip(prof, 1.0, h + 3.0, samples=8192)
        assert audit.overall_pass, audit.failures()


def test_strip_audit_flags_violation():
    cfg = ManifoldConfig.from_dimension(2)
    coeffs = _cap_coefficients(1.0)
    pieces = (
        Piece(CAP, 0.0, 1.0, coeffs),
        Piece(POWER, 1.0, 2.0, (0.5,)),
        Piece(LINEAR, 2.0, 3.0, (2.0, 3.6, 1.0)),  # 0.6 above the ceiling
        Piece(POWER, 3.0, math.inf, (0.5,)),
    )
    prof = WarpingProfile(cfg, pieces)
    audit = audit_strip(prof, 1.0, 4.0)
    assert not audit.overall_pass
    worst = audit.failures()[0]
    assert worst.name == "strip_upper"
    assert worst.worst_violation > 0.1


def test_profile_smoothness_at_knots():
    for m, h, n in ((2, 4.0, 8), (3, 9.0, 4)):
        cfg = ManifoldConfig.from_dimension(m)
        prof = insert_sawtooth(build_base_profile(cfg), plan_window(cfg, h, n))
        mism = prof.knot_mismatches()
        assert mism["value"].max() <= 1e-12
        assert mism["slope"].max() <= 1e-11
        assert mism["curvature"].max() <= 1e-9


def test_blend_slope_overshoot_is_bounded():
    cfg = ManifoldConfig.from_dimension(2)
    w = plan_window(cfg, 3.0, 5)
    prof = insert_sawtooth(build_base_profile(cfg), w)
    ts = np.unique(np.concatenate([
        np.linspace(2.9, 4.1, 40001),
        prof.knots_in(2.9, 4.1),
    ]))
    dy = prof.eval_many(ts)[1]
    assert np.max(np.abs(dy)) <= 11.0 * 1.1


def test_footprint_validation():
    cfg = ManifoldConfig.from_dimension(2)
    base = build_base_profile(cfg)
    with pytest.raises(FootprintOutOfRange):
        insert_sawtooth(base, plan_window(cfg, 1.02, 1))
    prof = insert_sawtooth(base, plan_window(cfg, 3.0, 2))
    with pytest.raises(OverlappingWindow):
        insert_sawtooth(prof, plan_window(cfg, 3.5, 2))
    # connectors collide even though footprints [3,4] and [4.2,5.2] do not
    with pytest.raises(OverlappingWindow):
        insert_sawtooth(prof, plan_window(cfg, 4.2, 1))
    two = insert_sawtooth(prof, plan_window(cfg, 6.0, 2))
    assert len(two.windows) == 2
    assert audit_strip(two, 1.0, 9.0).overall_pass


def test_plan_window_validation():
    cfg = ManifoldConfig.from_dimension(3)
    with pytest.raises(ValueError):
        plan_window(cfg, 0.5, 4)
    with pytest.raises(ValueError):
        plan_window(cfg, 9.0, 0)
    with pytest.raises(CubeDoesNotFit):
        plan_window(cfg, 9.0, 4, smooth_halfwidth=1.0)


def test_eval_purity_and_determinism():
    cfg = ManifoldConfig.from_dimension(3)
    prof = insert_sawtooth(build_base_profile(cfg), plan_window(cfg, 9.0, 8))
    ts = np.linspace(0.5, 12.0, 5000)
    a = prof.eval_many(ts)
    b = prof.eval_many(ts)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_json_round_trip_bit_exact():
    cfg = ManifoldConfig.from_dimension(3)
    prof = insert_sawtooth(build_base_profile(cfg), plan_window(cfg, 9.0, 8))
    prof = insert_sawtooth(prof, plan_window(cfg, 11.0, 4))
    data = json.loads(json.dumps(profile_to_json(prof)))
    rebuilt = profile_from_json(data)
    ts = np.linspace(0.0, 14.0, 30000)
    ya, da, d2a = prof.eval_many(ts)
    yb, db, d2b = rebuilt.eval_many(ts)
    assert np.array_equal(ya, yb)
    assert np.array_equal(da, db)
    assert np.array_equal(d2a, d2b)


def test_piece_table_invariants():
    cfg = ManifoldConfig.from_dimension(2)
    with pytest.raises(ValueError):
        WarpingProfile(cfg, (Piece(POWER, 0.5, math.inf, (0.5,)),))
    with pytest.raises(ValueError):
        WarpingProfile(cfg, (Piece(CAP, 0.0, 1.0, (5.0, -7.5, 3.0)),))
    with pytest.raises(ValueError):
        WarpingProfile(
            cfg,
            (
                Piece(CAP, 0.0, 1.0, (5.0, -7.5, 3.0)),
                Piece(POWER, 1.5, math.inf, (0.5,)),
            ),
        )

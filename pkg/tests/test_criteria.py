"""Pinching criteria: critical angle, growth threshold, verdicts."""

import math

import numpy as np
import pytest

import radialgeo as rg

RAMP_DELTA = (math.pi / 2.0) * math.exp(-1.0 / 6.0)

CUSP_AMPLITUDE = 3.8205221749659675


def ramp():
    return rg.RadialCurvature.from_spline([0.0, 1.0], [-1.0, 0.0])


def cusp_fixture():
    a = CUSP_AMPLITUDE
    return rg.RadialCurvature.from_spline(
        [0.0, 0.5, 1.0, 1.5, 2.0],
        [a, a, 0.5 * a, -0.5, -1.0],
        tail=rg.ConstantTail(-1.0),
    )


def test_critical_angle_flat_is_right_angle():
    env = rg.nonpositive_min(rg.RadialCurvature.zero())
    assert rg.critical_angle(env) == math.pi / 2.0


def test_critical_angle_ramp_analytic():
    env = rg.nonpositive_min(ramp())
    assert abs(rg.critical_angle(env) - RAMP_DELTA) <= 1e-10


def test_critical_angle_divergent_moment_collapses():
    env = rg.nonpositive_min(rg.RadialCurvature.constant(-1.0))
    assert rg.critical_angle(env) == 0.0


def test_growth_threshold_half_for_right_angle():
    for n in range(2, 9):
        assert abs(rg.growth_threshold(n, math.pi / 2.0) - 0.5) <= 1e-13


def test_growth_threshold_ramp_n3_closed_form():
    # n = 3 cap fraction is (1 - cos d)/2, so the threshold is (1 + cos d)/2
    expect = (1.0 + math.cos(RAMP_DELTA)) / 2.0
    assert abs(rg.growth_threshold(3, RAMP_DELTA) - expect) <= 1e-12


def test_growth_threshold_degenerate_angle():
    assert rg.growth_threshold(3, 0.0) == 1.0


def test_main_check_flat_above_threshold():
    flat = rg.RadialCurvature.zero()
    rep = rg.ricci_pinch_check(3, flat, flat, numerator=(0.999, 1.0))
    assert rep.verdict == "DiffeoRn"
    assert rep.b1_holds
    assert rep.b2_holds == "Holds"
    assert abs(rep.delta - math.pi / 2.0) <= 1e-14
    assert abs(rep.threshold - 0.5) <= 1e-14


def test_main_check_sub_threshold_bracket_inconclusive():
    flat = rg.RadialCurvature.zero()
    rep = rg.ricci_pinch_check(3, flat, flat, numerator=(0.3, 0.4))
    assert rep.verdict == "Inconclusive"
    assert rep.b2_holds == "Fails"


def test_main_check_straddling_bracket_inconclusive():
    flat = rg.RadialCurvature.zero()
    rep = rg.ricci_pinch_check(3, flat, flat, numerator=(0.45, 0.55))
    assert rep.verdict == "Inconclusive"
    assert rep.b2_holds == "Inconclusive"


def test_main_check_rigidity_for_constant_negative():
    hyp = rg.RadialCurvature.constant(-1.0)
    rep = rg.ricci_pinch_check(3, hyp, hyp, numerator=(1.0, 1.0))
    assert rep.verdict == "DegenerateRigidity"
    assert rep.delta == 0.0
    assert rep.threshold == 1.0


def test_main_check_manifold_numerator():
    hyp = rg.RadialCurvature.constant(-1.0)
    mfd = rg.RotSymManifold.from_curvature(3, hyp, t_max=20.0)
    rep = rg.ricci_pinch_check(3, hyp, hyp, numerator=mfd)
    assert rep.verdict == "DegenerateRigidity"
    lo, hi = rep.growth_limit
    assert lo <= 1.0 <= hi + 1e-9
    assert hi - lo <= 1e-6


def test_main_check_domination_violation_raises():
    # declared bound 0 but the manifold curvature dips to -0.5
    dip = rg.RadialCurvature.from_spline([0.0, 1.0], [-0.5, 0.0])
    mfd = rg.RotSymManifold.from_curvature(3, dip, t_max=18.0)
    flat = rg.RadialCurvature.zero()
    with pytest.raises(rg.DomainError, match="domination"):
        rg.ricci_pinch_check(3, flat, flat, numerator=mfd)


def test_corollary_finite_volume_branch():
    rep = rg.sectional_pinch_check(3, cusp_fixture(), numerator=(0.0, 0.0))
    assert rep.verdict == "DiffeoRn"
    assert not rep.b1_holds
    assert "FiniteModelVolume" in rep.diagnostics["flags"]


def test_corollary_finite_volume_with_manifold_numerator():
    k = cusp_fixture()
    mfd = rg.RotSymManifold.from_curvature(3, k, t_max=18.0)
    rep = rg.sectional_pinch_check(3, k, numerator=mfd)
    assert rep.verdict == "DiffeoRn"
    assert "FiniteModelVolume" in rep.diagnostics["flags"]


def test_corollary_infinite_volume_needs_growth():
    flat = rg.RadialCurvature.zero()
    rep = rg.sectional_pinch_check(3, flat, numerator=(0.999, 1.0))
    assert rep.verdict == "DiffeoRn"
    assert rep.b1_holds
    rep2 = rg.sectional_pinch_check(3, flat, numerator=(0.1, 0.2))
    assert rep2.verdict == "Inconclusive"


def test_report_json_shape():
    flat = rg.RadialCurvature.zero()
    rep = rg.ricci_pinch_check(3, flat, flat, numerator=(0.999, 1.0))
    blob = rep.to_json()
    assert list(blob.keys()) == [
        "n", "delta", "threshold", "growth_limit",
        "b1_holds", "b2_holds", "verdict", "diagnostics",
    ]
    assert isinstance(blob["growth_limit"], list) and len(blob["growth_limit"]) == 2
    assert isinstance(blob["diagnostics"]["flags"], list)
    assert isinstance(blob["diagnostics"]["notes"], list)


def test_bracket_validation():
    flat = rg.RadialCurvature.zero()
    with pytest.raises(rg.DomainError):
        rg.ricci_pinch_check(3, flat, flat, numerator=(0.8, 0.2))
    with pytest.raises(rg.DomainError):
        rg.ricci_pinch_check(3, flat, flat, numerator=(-0.1, 0.5))

"""Warping ODE solutions and model-surface scalars."""

import numpy as np
import pytest

import radialgeo as rg

from conftest import random_compact_curvature

# Classical fixed-step RK4 (h = 2e-5) for m'' = -k m on the spline fixture
# below, evaluated at t = 3. Independent of the adaptive solver in the
# package; the interpolant is shared because it defines the curvature.
RK4_KNOTS = [0.0, 0.7, 1.4, 2.1]
RK4_VALUES = [-1.2, -0.3, -0.8, 0.0]
RK4_M_AT_3 = 5.29965905815901
RK4_MP_AT_3 = 2.483018436036797

# Independent adaptive integration of the power-tail fixture to T = 20000
# followed by the exp(0.2 / T) tail correction; residual error ~1e-8.
POWER_TAIL_SLOPE = 1.3867242867657819


def power_tail_fixture():
    return rg.RadialCurvature.from_spline(
        [0.0, 1.0], [-0.5, -0.2], tail=rg.PowerLawTail(-0.2, 3.0)
    )


def test_flat_profile_is_identity():
    # the adaptive solver carries ~1e-13 roundoff even on the trivial ODE
    w = rg.solve_warping(rg.RadialCurvature.zero(), 12.0)
    ts = np.linspace(0.0, 12.0, 601)
    assert np.max(np.abs(w.m(ts) - ts)) <= 1e-10
    assert np.max(np.abs(w.m_prime(ts) - 1.0)) <= 1e-10
    assert np.max(np.abs(w.m_second(ts))) <= 1e-9


def test_hyperbolic_profile_matches_sinh():
    w = rg.solve_warping(rg.RadialCurvature.constant(-1.0), 10.0)
    ts = np.linspace(0.0, 10.0, 501)
    # relative to cosh: the solution grows like e^t, so absolute tolerances
    # must scale with it
    assert np.max(np.abs(w.m(ts) - np.sinh(ts)) / np.cosh(ts)) <= 1e-9
    assert np.max(np.abs(w.m_prime(ts) - np.cosh(ts)) / np.cosh(ts)) <= 1e-9


def test_solver_matches_fixed_step_rk4_oracle():
    k = rg.RadialCurvature.from_spline(RK4_KNOTS, RK4_VALUES)
    w = rg.solve_warping(k, 5.0)
    assert abs(w.m(3.0) - RK4_M_AT_3) <= 1e-9
    assert abs(w.m_prime(3.0) - RK4_MP_AT_3) <= 1e-9


def test_conjugate_point_detected():
    # k >= 1 on most of [0, 3.5] forces the profile to vanish near pi < 4
    k = rg.RadialCurvature.from_spline([0.0, 3.5, 4.0], [1.0, 1.0, 0.0])
    with pytest.raises(rg.ConjugatePointError):
        rg.solve_warping(k, 4.0)


def test_evaluation_outside_horizon_rejected():
    w = rg.solve_warping(rg.RadialCurvature.zero(), 5.0)
    with pytest.raises(rg.HorizonExceededError):
        w.m(5.5)


def test_slope_limit_trivials():
    w = rg.solve_warping(rg.RadialCurvature.zero(), 12.0)
    assert abs(rg.slope_limit(w) - 1.0) <= 1e-12
    assert abs(rg.total_curvature_direct(w)) <= 1e-12
    assert abs(rg.total_curvature_isoperimetric(w)) <= 1e-11


def test_slope_limit_exact_beyond_compact_support():
    # m'' = 0 past the support, so the slope is already final at t_tail
    for seed in (3, 11, 42):
        env = rg.nonpositive_min(random_compact_curvature(np.random.default_rng(seed)))
        w = rg.solve_warping(env, max(8.0, env.t_tail * 2))
        assert abs(rg.slope_limit(w) - w.m_prime(env.t_tail)) <= 1e-12


def test_power_tail_slope_against_referee():
    w = rg.solve_warping(power_tail_fixture(), 40.0)
    value, bound = rg.slope_limit(w, with_bound=True)
    assert abs(value - POWER_TAIL_SLOPE) <= bound + 1e-8
    assert abs(value - POWER_TAIL_SLOPE) <= 1e-4
    assert bound <= 4e-3
    lo, hi = rg.slope_limit_bounds(w)
    assert lo - 1e-12 <= POWER_TAIL_SLOPE <= hi + 1e-12


def test_slope_extrapolation_tightens_with_horizon():
    k = power_tail_fixture()
    err_near = abs(rg.slope_limit(rg.solve_warping(k, 40.0)) - POWER_TAIL_SLOPE)
    err_far = abs(rg.slope_limit(rg.solve_warping(k, 160.0)) - POWER_TAIL_SLOPE)
    assert err_far < err_near


def test_total_curvature_diverges_for_constant_tail():
    w = rg.solve_warping(rg.RadialCurvature.constant(-1.0), 20.0)
    with pytest.raises(rg.UnboundedError):
        rg.total_curvature_direct(w)
    with pytest.raises(rg.UnboundedError):
        rg.slope_limit(w)


def test_ramp_isoperimetric_identity():
    k = rg.RadialCurvature.from_spline([0.0, 1.0], [-1.0, 0.0])
    w = rg.solve_warping(k, 10.0)
    direct = rg.total_curvature_direct(w)
    iso = rg.total_curvature_isoperimetric(w)
    assert direct < 0.0
    assert abs(direct - iso) <= 1e-6


def test_sturm_properties_over_corpus():
    # for k <= 0: m' nondecreasing, m >= t, and more negative curvature
    # gives the larger profile
    for seed in range(20):
        rng = np.random.default_rng(seed)
        k = random_compact_curvature(rng)
        env = rg.nonpositive_min(k)
        horizon = max(8.0, env.t_tail * 2)
        w = rg.solve_warping(env, horizon)
        ts = np.linspace(0.0, horizon, 401)
        mp = w.m_prime(ts)
        assert np.all(np.diff(mp) >= -1e-10)
        assert np.all(w.m(ts) >= ts - 1e-9)
        # doubling the curvature depth dominates the original
        deeper = rg.nonpositive_min(
            rg.RadialCurvature.from_spline(
                np.asarray(k.breakpoints, dtype=float),
                2.0 * np.asarray(k(k.breakpoints), dtype=float),
            )
        )
        w2 = rg.solve_warping(deeper, horizon)
        assert np.all(w2.m(ts) >= w.m(ts) - 1e-9)


def test_model_surface_wraps_solution():
    env = rg.nonpositive_min(random_compact_curvature(np.random.default_rng(5)))
    s = rg.ModelSurface.from_curvature(env, 10.0)
    ts = np.linspace(0.0, 10.0, 201)
    w = rg.solve_warping(env, 10.0)
    assert np.max(np.abs(s.m(ts) - w.m(ts))) <= 1e-12
    assert abs(s.slope_limit - rg.slope_limit(w)) <= 1e-14
    assert abs(s.total_curvature - rg.total_curvature_direct(w)) <= 1e-12

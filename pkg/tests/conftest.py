"""Shared corpus generators. Every random corpus is seeded so failures replay."""

import numpy as np
import pytest

import radialgeo as rg


def random_compact_curvature(rng):
    """Random nonpositive spline with compact support and a zero tail.

    Knots are evenly spaced; random knots can make the interpolant overshoot
    so far that the moment integral leaves the regime the corpus is meant to
    cover. The interpolant may still poke above zero between knots, which is
    exactly what nonpositive_min is for.
    """
    t_tail = rng.uniform(0.8, 3.0)
    nk = int(rng.integers(4, 9))
    knots = np.linspace(0.0, t_tail, nk)
    vals = -rng.uniform(0.0, 1.5, nk)
    vals[-1] = 0.0
    return rg.RadialCurvature.from_spline(knots, vals)


def random_envelope(rng):
    return rg.nonpositive_min(random_compact_curvature(rng))


def bishop_pair(rng):
    """(n, numerator warping, denominator warping) with numerator curvature
    >= denominator curvature pointwise.

    The numerator core is linear from v0 down to the shared constant c, so
    the domination holds exactly (no interpolation overshoot to argue about).
    """
    n = int(rng.integers(2, 9))
    c = -rng.uniform(0.3, 1.2)
    t_tail = rng.uniform(0.5, 3.0)
    v0 = c * rng.uniform(0.0, 1.0)
    k_num = rg.RadialCurvature.from_spline(
        [0.0, t_tail], [v0, c], tail=rg.ConstantTail(c)
    )
    k_den = rg.RadialCurvature.constant(c, t_tail=t_tail)
    horizon = 16.0
    w_num = rg.solve_warping(k_num, horizon * 1.05)
    w_den = rg.solve_warping(k_den, horizon * 1.05)
    return n, w_num, w_den


@pytest.fixture(scope="session")
def compact_corpus():
    """100 compact-support envelopes with solved model surfaces.

    Shared between the sandwich and isoperimetric acceptance checks so the
    warping ODE is solved once per member.
    """
    out = []
    for i in range(100):
        rng = np.random.default_rng(i)
        k = random_compact_curvature(rng)
        env = rg.nonpositive_min(k)
        surface = rg.ModelSurface.from_curvature(env, max(8.0, env.t_tail * 2))
        out.append((k, env, surface))
    return out

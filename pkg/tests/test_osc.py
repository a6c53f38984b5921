import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bmotv import bvfun
from bmotv.acceptance import random_bv_model, zoo
from bmotv.bvfun import Analytic, Analytic2D, Domain, Region2D
from bmotv.osc import (
    Cube,
    ToleranceError,
    integrate_abs_dev,
    mean_oscillation,
    mean_oscillation_2d,
    oscillations_1d,
)
from conftest import UNIT, heaviside, linear

TOL = 1e-8
BOX = Domain.box((0, 1), (0, 1))


# -- 1D examples ------------------------------------------------------------


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.01])
def test_linear_abs_dev(identity, eps):
    assert integrate_abs_dev(identity, Cube.interval(0, eps), eps / 2) == pytest.approx(eps / 4, abs=TOL)


def test_constant_is_zero():
    f = Analytic(UNIT, (bvfun.SmoothPiece(0, 1, (3.0,)),))
    assert mean_oscillation(f, Cube(0.5, 0.2)).value == 0.0
    assert integrate_abs_dev(f, Cube(0.5, 0.2), 3.0) == 0.0


@pytest.mark.parametrize("t", [0.1, 0.25, 0.5, 0.8])
def test_offcenter_jump_two_rectangles(step, t):
    eps = 0.1
    q = Cube.interval(0.5 - t * eps, 0.5 + (1 - t) * eps)
    assert integrate_abs_dev(step, q, 1 - t) == pytest.approx(2 * t * (1 - t), abs=TOL)
    assert mean_oscillation(step, q).value == pytest.approx(2 * t * (1 - t), abs=TOL)


@pytest.mark.parametrize("a,eps", [(1.0, 0.1), (-3.0, 0.05), (7.5, 0.2)])
def test_linear_mean_oscillation(a, eps):
    f = linear(a)
    assert mean_oscillation(f, Cube(0.4, eps)).value == pytest.approx(abs(a) * eps / 4, abs=TOL)


@pytest.mark.parametrize("eps", [0.2, 0.1, 0.001])
def test_centered_jump(step, eps):
    assert mean_oscillation(step, Cube(0.5, eps)).value == pytest.approx(0.5, abs=TOL)


@pytest.mark.parametrize("eps", [0.2, 0.1, 0.01])
def test_slope_plus_centered_jump(mixed, eps):
    assert mean_oscillation(mixed, Cube(0.5, eps)).value == pytest.approx(0.5 + eps / 4, abs=TOL)


def test_cube_must_be_inside(identity):
    with pytest.raises(ValueError, match="not contained"):
        mean_oscillation(identity, Cube(0.95, 0.2))


def test_cube_validation():
    with pytest.raises(ValueError):
        Cube(0.5, 0.0)


def test_osc_value_flags(step):
    v = mean_oscillation(step, Cube(0.5, 0.1))
    assert v.flag == "exact" and v.tol <= TOL


def test_decreasing_pieces_and_mixed_sign():
    # decreasing quadratic plus an upward jump: generic path with mixed signs
    f = Analytic(UNIT, (bvfun.SmoothPiece(0, 1, (1.0, 0.0, -1.0)),), (bvfun.Jump(0.5, 0.0, 2.0),))
    q = Cube(0.5, 0.3)
    xs = np.linspace(q.lo, q.hi, 2_000_001)[1:-1]
    vals = f.profile.value(xs)
    ref = np.mean(np.abs(vals - vals.mean()))
    assert mean_oscillation(f, q).value == pytest.approx(ref, abs=1e-5)


def test_batch_matches_single(rng):
    for f in (zoo("mixed_cantor"), random_bv_model(rng), zoo("cantor")):
        starts = rng.uniform(0, 0.85, 60)
        batch = oscillations_1d(f.profile, starts, 0.15)
        single = [mean_oscillation(f, Cube.interval(s, s + 0.15)).value for s in starts]
        np.testing.assert_allclose(batch, single, atol=1e-14)


def test_cantor_against_dense_sampling(staircase):
    q = Cube.interval(0.1, 0.45)
    xs = np.linspace(q.lo, q.hi, 2_000_001)
    vals = staircase.profile.value(xs)
    ref = np.mean(np.abs(vals - vals.mean()))
    assert mean_oscillation(staircase, q).value == pytest.approx(ref, abs=1e-5)


# -- properties -------------------------------------------------------------

MODELS = [zoo("identity"), zoo("heaviside"), zoo("mixed"), zoo("cantor"), zoo("mixed_cantor")]
model_idx = st.integers(0, len(MODELS) - 1)
eps_st = st.floats(0.005, 0.4)


@given(model_idx, eps_st, st.floats(0, 1), st.floats(-10, 10).filter(lambda a: abs(a) > 1e-3))
def test_scaling(i, eps, u, alpha):
    f = MODELS[i]
    s = u * (1 - eps)
    q = Cube.interval(s, s + eps)
    lhs = mean_oscillation(bvfun.scaled(f, alpha), q).value
    assert lhs == pytest.approx(abs(alpha) * mean_oscillation(f, q).value, abs=2 * TOL * max(1, abs(alpha)))


@given(model_idx, eps_st, st.floats(0, 1), st.floats(-3, 3))
def test_translation(i, eps, u, h):
    f = MODELS[i]
    s = u * (1 - eps)
    a = mean_oscillation(f, Cube.interval(s, s + eps)).value
    b = mean_oscillation(bvfun.shifted(f, h), Cube.interval(s + h, s + h + eps)).value
    assert a == pytest.approx(b, abs=2 * TOL)


@given(model_idx, eps_st, st.floats(0, 1))
def test_monotone_half_bound(i, eps, u):
    f = MODELS[i]
    s = u * (1 - eps)
    prof = f.profile
    half = 0.5 * (float(prof.value(s + eps, -1)) - float(prof.value(s, 1)))
    assert mean_oscillation(f, Cube.interval(s, s + eps)).value <= half + TOL


@given(model_idx, eps_st, st.floats(0, 1))
def test_mean_within_factor_two_of_median(i, eps, u):
    f = MODELS[i]
    s = u * (1 - eps)
    q = Cube.interval(s, s + eps)
    # every model here is nondecreasing, so f at the center is a median,
    # and the median minimizes the L1 deviation
    best = integrate_abs_dev(f, q, float(f.profile.value(q.center, 1)))
    at_mean = mean_oscillation(f, q).value
    assert best <= at_mean + TOL
    assert at_mean <= 2 * best + TOL


# -- 2D ---------------------------------------------------------------------


@pytest.mark.parametrize("g", [1.0, 2.5])
def test_affine_axis_parallel(g):
    f = Analytic2D(BOX, (0.3, g, 0.0))
    assert mean_oscillation_2d(f, Cube((0.5, 0.5), 0.1)).value == pytest.approx(g * 0.1 / 4, abs=TOL)
    f = Analytic2D(BOX, (0.3, 0.0, -g))
    assert mean_oscillation_2d(f, Cube((0.4, 0.6), 0.2)).value == pytest.approx(g * 0.2 / 4, abs=TOL)


def test_affine_rotated_cube_matches_rotated_gradient():
    theta = 0.3
    f = Analytic2D(BOX, (0.0, math.cos(theta), math.sin(theta)))
    assert mean_oscillation_2d(f, Cube((0.5, 0.5), 0.1, theta)).value == pytest.approx(0.1 / 4, abs=TOL)


def test_halfplane_through_center():
    poly = ((0.1, 0.1), (0.5, 0.1), (0.5, 0.9), (0.1, 0.9))
    f = Analytic2D(BOX, (0, 0, 0), (Region2D("polygon", 1.0, 0.0, vertices=poly),))
    assert mean_oscillation_2d(f, Cube((0.5, 0.5), 0.1)).value == pytest.approx(0.5, abs=TOL)


def test_rotated_halfplane_aligned_cube():
    th = 0.4
    c, s = math.cos(th), math.sin(th)
    center = np.array([0.5, 0.5])
    # long thin rotated rectangle whose edge passes through the cube center
    n = np.array([c, s])
    t = np.array([-s, c])
    verts = [center - 0.3 * t, center + 0.3 * t, center + 0.3 * t - 0.2 * n, center - 0.3 * t - 0.2 * n]
    f = Analytic2D(BOX, (0, 0, 0), (Region2D("polygon", 2.0, 0.0, vertices=tuple(map(tuple, verts))),))
    assert mean_oscillation_2d(f, Cube((0.5, 0.5), 0.1, th)).value == pytest.approx(1.0, abs=TOL)


def test_constant_2d_is_zero():
    f = Analytic2D(BOX, (2.0, 0.0, 0.0))
    assert mean_oscillation_2d(f, Cube((0.5, 0.5), 0.3, 0.2)).value == 0.0


def test_affine_plus_disk_against_sampling():
    f = Analytic2D(BOX, (0.0, 1.0, 0.5), (Region2D("disk", 1.0, 0.0, center=(0.5, 0.5), radius=0.2),))
    q = Cube((0.68, 0.52), 0.1, 0.2)
    val = mean_oscillation_2d(f, q, tol=1e-6)
    n = 1500
    u = (np.arange(n) + 0.5) / n - 0.5
    U, V = np.meshgrid(u, u)
    c, s = math.cos(0.2), math.sin(0.2)
    X = 0.68 + 0.1 * (c * U - s * V)
    Y = 0.52 + 0.1 * (s * U + c * V)
    F = X + 0.5 * Y + (np.hypot(X - 0.5, Y - 0.5) < 0.2)
    ref = np.mean(np.abs(F - F.mean()))
    assert val.value == pytest.approx(ref, abs=2e-4)


def test_2d_budget_exhaustion():
    # two crossing boundaries inside the cube are never resolved exactly
    regions = (
        Region2D("disk", 1.0, 0.0, center=(0.5, 0.5), radius=0.2),
        Region2D("disk", 1.0, 0.0, center=(0.8, 0.5), radius=0.15),
    )
    f = Analytic2D(BOX, (0.0, 1.0, 0.0), regions)
    with pytest.raises(ToleranceError, match="budget") as info:
        mean_oscillation_2d(f, Cube((0.7, 0.5), 0.1, 0.3), tol=1e-18)
    assert info.value.achieved > 1e-18


def test_2d_containment():
    with pytest.raises(ValueError, match="not contained"):
        mean_oscillation_2d(zoo("disk2d"), Cube((0.02, 0.5), 0.1))

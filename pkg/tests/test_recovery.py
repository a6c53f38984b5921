import json
import math

import numpy as np
import pytest

from bmotv import bvfun
from bmotv.acceptance import random_bv_model, zoo
from bmotv.bvfun import Analytic, ModelError, SmoothPiece, coarea_tv, evaluate, mean_value, tv_decomposition
from bmotv.limits import EpsSchedule, gamma_experiment
from bmotv.mollifier import Mollifier
from bmotv.recovery import (
    DiagonalPlan,
    PlanEntry,
    ThresholdSearchError,
    check_mollifier_monotonicity,
    interpolant,
    mollify,
    plan_indices,
    sbv_recovery_family,
    smooth_recovery_family,
)
from conftest import UNIT, trapezoid

# -- mollifier kernel -------------------------------------------------------


@pytest.mark.parametrize("kernel", [Mollifier(), Mollifier.triweight()], ids=["biweight", "triweight"])
def test_kernel_invariants(kernel):
    z = np.linspace(-1, 1, 2001)
    rho = kernel.density(z)
    assert np.all(rho >= 0)
    np.testing.assert_allclose(rho, rho[::-1], atol=1e-15)
    assert float(kernel.step(np.array([1.0]))[0]) == pytest.approx(1.0, abs=1e-10)
    assert float(kernel.step(np.array([0.0]))[0]) == pytest.approx(0.5, abs=1e-15)
    assert float(kernel.density(np.array([1.5]))[0]) == 0.0
    assert float(kernel.scaled(np.array([0.03]), 0.02)[0]) == 0.0


@pytest.mark.parametrize(
    "coeffs,match",
    [((1.0, 0.5), "even"), ((0.4,), "unit mass"), ((-0.25, 0.0, 2.25), "nonnegative")],
)
def test_kernel_validation(coeffs, match):
    with pytest.raises(ValueError, match=match):
        Mollifier(coeffs)


# -- mollify ----------------------------------------------------------------


def test_mollify_constant():
    f = Analytic(UNIT, (SmoothPiece(0, 1, (2.5,)),))
    g = mollify(f, 0.05)
    xs = np.linspace(0.05, 0.95, 101)
    np.testing.assert_allclose(g.profile.value(xs), 2.5, atol=1e-13)


def test_mollify_heaviside_at_jump(step):
    assert evaluate(mollify(step, 0.02), 0.5) == pytest.approx(0.5, abs=1e-14)


def test_mollify_identity_exact(identity):
    g = mollify(identity, 0.03)
    xs = np.linspace(0.03, 0.97, 101)
    np.testing.assert_allclose(g.profile.value(xs), xs, atol=1e-13)


def test_mollify_domain_and_margin(identity):
    assert mollify(identity, 0.03).domain.bounds == ((0.03, 0.97),)
    assert mollify(identity, 0.03, margin=0.1).domain.bounds == ((0.1, 0.9),)
    with pytest.raises(ModelError, match="too large"):
        mollify(identity, 0.1, margin=0.05)
    with pytest.raises(ModelError):
        mollify(identity, 0.0)


def test_mollify_extend_keeps_domain(step):
    g = mollify(step, 0.05, margin=0.0, extend=True)
    assert g.domain.bounds == ((0.0, 1.0),)
    assert evaluate(g, 0.01) == 0.0 and evaluate(g, 0.99) == 1.0


def test_mollified_against_direct_convolution(staircase):
    staircase_only = staircase
    # x + H(x - 1/2) + C(x): the slope survives unchanged, the jump becomes the
    # kernel's step, and the continuous staircase is checked by quadrature
    f = zoo("mixed_cantor")
    delta = 0.04
    g = mollify(f, delta)
    kern = Mollifier()
    ys = np.linspace(-delta, delta, 40001)
    w = kern.scaled(ys, delta)
    for x in (0.1, 0.3, 0.49, 0.52, 0.8):
        smeared = trapezoid(w * staircase_only.profile.value(x - ys), ys)
        expect = x + float(kern.step(np.array([(x - 0.5) / delta]))[0]) + smeared
        assert float(g.profile.value(np.array([x]))[0]) == pytest.approx(expect, abs=1e-8)


@pytest.mark.parametrize("seed", range(8))
def test_mass_preservation(seed):
    f = random_bv_model(np.random.default_rng(seed))
    delta = 0.03
    g = mollify(f, delta)
    lo, hi = g.domain.a, g.domain.b
    mass = mean_value(g, (lo, hi)) * (hi - lo)
    # the same mass is f integrated against the kernel-smeared window of (lo, hi)
    k = Mollifier()
    ys = np.linspace(lo - delta, hi + delta, 400001)
    weights = k.step((hi - ys) / delta) - k.step((lo - ys) / delta)
    assert mass == pytest.approx(trapezoid(weights * f.profile.value(ys), ys), abs=1e-4)


@pytest.mark.parametrize("seed", range(8))
def test_tv_non_increase(seed):
    f = random_bv_model(np.random.default_rng(seed))
    total = tv_decomposition(f).total
    for delta in (0.005, 0.03):
        g = mollify(f, delta)
        assert coarea_tv(g, 1000) <= total * 1.01
        assert g.tv().total <= total * (1 + 1e-9)


# -- diagonal plans ---------------------------------------------------------


def test_plan_indices():
    assert plan_indices() == [100, 200, 400, 800, 1600]
    assert plan_indices(3, 10) == [10, 20, 40]


def test_plan_validation():
    with pytest.raises(ValueError, match="decreasing"):
        DiagonalPlan([PlanEntry(10, 0.1, 0.05, 0, 0), PlanEntry(20, 0.1, 0.05, 0, 0)])
    with pytest.raises(ValueError, match="below 1/"):
        DiagonalPlan([PlanEntry(10, 0.1, 0.1, 0, 0)])


def test_plan_lookup():
    plan = DiagonalPlan(
        [PlanEntry(10, 0, 0.05, 0, 0), PlanEntry(20, 0, 0.02, 0, 0), PlanEntry(40, 0, 0.01, 0, 0)], ["a", "b", "c"]
    )
    assert plan.member(0.05) == "a"
    assert plan.member(0.03) == "a"
    assert plan.member(0.02) == "b"
    assert plan.member(0.015) == "b"
    assert plan.member(0.001) == "c"
    assert plan.member(0.5) == "a"


def test_plan_dump(tmp_path, step):
    _, plan = smooth_recovery_family(step)
    path = tmp_path / "plan.json"
    plan.dump(path)
    data = json.loads(path.read_text())
    assert [d["i"] for d in data] == plan_indices()
    assert set(data[0]) == {"i", "delta_or_k", "eps_threshold", "kappa_measured", "norm_measured"}


# -- smooth recovery --------------------------------------------------------


def _check_plan(plan, bound):
    th = plan.thresholds
    assert all(q < p for p, q in zip(th[:-1], th[1:]))
    for e in plan.entries:
        assert e.eps_threshold < 1 / e.i
        assert e.kappa_measured <= bound + 2 / e.i


def test_smooth_identity(identity):
    fam, plan = smooth_recovery_family(identity)
    _check_plan(plan, 0.25)
    k = [e.kappa_measured for e in plan.entries]
    np.testing.assert_allclose(k, 0.25, rtol=0.03)


def test_smooth_heaviside(step):
    fam, plan = smooth_recovery_family(step)
    _check_plan(plan, 0.25)
    for e in plan.entries:
        assert e.kappa_measured == pytest.approx(0.25, rel=0.03)
        # mollified unit jump at scale delta sits 5/16 delta away in L1
        assert e.norm_measured == pytest.approx(5 / 16 * e.delta_or_k, rel=1e-9)
    norms = [e.norm_measured for e in plan.entries]
    assert all(q < p for p, q in zip(norms[:-1], norms[1:]))
    assert fam.p == 1.0 and fam.plan is plan


def test_smooth_cantor(staircase):
    _, plan = smooth_recovery_family(staircase)
    _check_plan(plan, 0.25)
    assert plan.entries[-1].kappa_measured == pytest.approx(0.25, rel=0.03)


def test_smooth_family_in_gamma_experiment(step):
    fam, plan = smooth_recovery_family(step)
    rep = gamma_experiment(fam, EpsSchedule(tuple(plan.thresholds)))
    np.testing.assert_allclose(rep.kappas, [e.kappa_measured for e in plan.entries])
    np.testing.assert_allclose([r.norm_value for r in rep.rows], [e.norm_measured for e in plan.entries])


def test_smooth_rejects_inf(step):
    with pytest.raises(ValueError):
        smooth_recovery_family(step, p=math.inf)


def test_threshold_search_failure(step):
    with pytest.raises(ThresholdSearchError, match="extend the schedule"):
        smooth_recovery_family(step, schedule=EpsSchedule((0.005,)), indices=[100, 200])


# -- SBV recovery -----------------------------------------------------------


def test_interpolant_without_cantor_is_identity(mixed):
    assert interpolant(mixed, 5) is mixed
    fam, plan = sbv_recovery_family(mixed)
    assert all(m is mixed for m in plan.members)
    assert all(e.norm_measured == 0 for e in plan.entries)


def test_interpolant_generation_six(staircase):
    g = interpolant(staircase, 6)
    xs = np.linspace(0, 1, 100001)
    assert np.max(np.abs(g.profile.value(xs) - staircase.profile.value(xs))) <= 2.0**-6
    t = tv_decomposition(g)
    assert (t.abs_cont, t.jump, t.cantor) == (1, 0, 0)


def test_interpolant_needs_analytic(step):
    with pytest.raises(ModelError):
        interpolant(mollify(step, 0.01), 3)


@pytest.mark.parametrize("rises", [(1.0,), (2.0, -0.5)])
def test_uniform_convergence(rises):
    comps = tuple(
        bvfun.CantorComponent(0.1 + 0.4 * j, 0.45 + 0.4 * j, r) for j, r in enumerate(rises)
    )
    f = Analytic(UNIT, (), (), comps)
    xs = np.linspace(0, 1, 200001)
    for k in (2, 5, 9):
        gap = np.max(np.abs(interpolant(f, k).profile.value(xs) - f.profile.value(xs)))
        assert gap <= sum(abs(r) for r in rises) * 2.0**-k


def test_sbv_cantor(staircase):
    fam, plan = sbv_recovery_family(staircase)
    _check_plan(plan, 0.25)
    for e in plan.entries:
        assert e.norm_measured <= 2.0 ** -e.delta_or_k
    for e in plan.entries[-3:]:
        assert e.kappa_measured <= 0.25 * 1.03
    assert math.isinf(fam.p)


def test_sbv_needs_analytic(step):
    with pytest.raises(ModelError):
        sbv_recovery_family(mollify(step, 0.01))


# -- mollifier monotonicity -------------------------------------------------


def test_monotonicity_constant():
    f = Analytic(UNIT, (SmoothPiece(0, 1, (1.0,)),))
    rep = check_mollifier_monotonicity(f, [0.1], [0.02], 0.05)
    assert rep.ok and rep.cells[0].lhs == 0 and rep.cells[0].rhs == 0


def test_monotonicity_heaviside(step):
    rep = check_mollifier_monotonicity(step, [0.1], [0.02], 0.05)
    assert rep.ok and rep.cells[0].lhs <= 0.5 + 1e-3


def test_monotonicity_identity(identity):
    rep = check_mollifier_monotonicity(identity, [0.1, 0.03], [0.01, 0.04], 0.05)
    assert rep.ok
    for c in rep.cells:
        assert c.lhs <= c.rhs + c.slack
        assert c.lhs == pytest.approx(0.25 * 0.9, rel=0.05)


def test_monotonicity_margin_check(step):
    with pytest.raises(ValueError):
        check_mollifier_monotonicity(step, [0.1], [0.05], 0.05)


def test_monotonicity_reports_violations(step):
    rep = check_mollifier_monotonicity(step, [0.1], [0.02], 0.05, slack=-1.0)
    assert not rep.ok and len(rep.violations) == 1


def test_heaviside_drop_from_half_to_quarter(step):
    # the constant family sits at |D^j f|/2 while the recovery family reaches |Df|/4
    from bmotv.packing import kappa_1d

    _, plan = smooth_recovery_family(step)
    assert kappa_1d(step, plan.entries[-1].eps_threshold).value == pytest.approx(0.5, abs=1e-8)
    assert plan.entries[-1].kappa_measured == pytest.approx(0.25, rel=0.03)

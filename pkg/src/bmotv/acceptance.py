"""Desk-scale acceptance checks of the limit theorems, run on a bundled zoo
of models.  Each check returns a :class:`CriterionResult`; ``run_all`` is
what ``bmotv verify`` executes."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from bmotv import bvfun
from bmotv.bvfun import Analytic, CantorComponent, Domain, Jump, SmoothPiece, model_from_dict
from bmotv.limits import EpsSchedule, sweep, targets
from bmotv.osc import Cube, mean_oscillation
from bmotv.packing import CandidateSet, brute_force_kappa_1d, kappa_1d, kappa_2d, max_disjoint_sum
from bmotv.recovery import check_mollifier_monotonicity, sbv_recovery_family, smooth_recovery_family

ZOO = {
    "identity": {"domain": [0, 1], "pieces": [{"interval": [0, 1], "coeffs": [0, 1]}]},
    "heaviside": {"domain": [0, 1], "jumps": [{"x": 0.5, "left": 0, "right": 1}]},
    "mixed": {
        "domain": [0, 1],
        "pieces": [{"interval": [0, 1], "coeffs": [0, 1]}],
        "jumps": [{"x": 0.5, "left": 0, "right": 1}],
    },
    "cantor": {"domain": [0, 1], "cantor": [{"interval": [0, 1], "rise": 1, "lambda": 1 / 3}]},
    "mixed_cantor": {
        "domain": [0, 1],
        "pieces": [{"interval": [0, 1], "coeffs": [0, 1]}],
        "jumps": [{"x": 0.5, "left": 0, "right": 1}],
        "cantor": [{"interval": [0, 1], "rise": 1, "lambda": 1 / 3}],
    },
    "disk2d": {
        "domain": [[0, 1], [0, 1]],
        "regions": [{"shape": "disk", "center": [0.5, 0.5], "radius": 0.3, "inside": 1, "outside": 0}],
    },
}


def zoo(name):
    return model_from_dict(ZOO[name])


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:>2} {self.title}: {self.detail} ({self.seconds:.2f}s)"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _rel(x, target):
    return abs(x - target) / abs(target)


@_timed
def criterion_1():
    f = zoo("identity")
    t0 = time.perf_counter()
    vals = {e: kappa_1d(f, e, 64).value for e in (0.1, 0.02, 0.005)}
    elapsed = time.perf_counter() - t0
    ok = all(_rel(v, 0.25) <= 0.02 for v in vals.values()) and elapsed < 10
    det = ", ".join(f"k({e:g})={v:.6f}" for e, v in vals.items())
    return CriterionResult(1, "SBV limit, smooth", ok, f"{det}; target 0.25 +-2%; {elapsed:.2f}s < 10s")


@_timed
def criterion_2():
    f = zoo("heaviside")
    eps_list = (0.2, 0.15, 0.1, 0.07, 0.05, 0.037, 0.02, 0.01, 0.005, 0.003, 0.001)
    t0 = time.perf_counter()
    vals = [kappa_1d(f, e).value for e in eps_list]
    elapsed = time.perf_counter() - t0
    worst = max(abs(v - 0.5) for v in vals)
    ok = worst <= 1e-6 and elapsed < 1.0
    return CriterionResult(2, "SBV limit, jump", ok, f"max |k-0.5|={worst:.2e} over {len(eps_list)} eps <= 0.2; {elapsed:.3f}s < 1s")


@_timed
def criterion_3():
    v = kappa_1d(zoo("mixed"), 0.005).value
    return CriterionResult(3, "SBV limit, mixed", _rel(v, 0.75) <= 0.02, f"k(0.005)={v:.6f}; target 0.75 +-2%")


CANTOR_SCHEDULE = EpsSchedule.logperiodic(1 / 3, (4, 8), (1, 0.8, 0.6, 0.45, 0.37))


@_timed
def criterion_4():
    rep = sweep(zoo("cantor"), CANTOR_SCHEDULE)
    k = rep.kappas
    ok = bool(np.all((k >= 0.24) & (k <= 0.51)))
    s = rep.summary()
    return CriterionResult(
        4,
        "Cantor window",
        ok,
        f"{len(k)} values in [{k.min():.4f}, {k.max():.4f}] (window [0.24, 0.51]); last-period liminf/limsup proxies {s['liminf_proxy']:.4f}/{s['limsup_proxy']:.4f}",
    )


@_timed
def criterion_5():
    bad = 0
    worst = -math.inf
    cells = 0
    for name in ("heaviside", "mixed", "cantor"):
        rep = check_mollifier_monotonicity(zoo(name), (0.1, 0.05, 0.02), (0.005, 0.01, 0.02), 0.05, slack=1e-3)
        bad += len(rep.violations)
        cells += len(rep.cells)
        worst = max(worst, max(c.lhs - c.rhs for c in rep.cells))
    return CriterionResult(5, "Mollifier monotonicity", bad == 0 and cells == 27, f"{cells} cells, {bad} violations, max lhs-rhs={worst:.2e} (slack 1e-3)")


@_timed
def criterion_6():
    _, plan = smooth_recovery_family(zoo("heaviside"), p=1)
    ks = [e.kappa_measured for e in plan.entries]
    norms = [e.norm_measured for e in plan.entries]
    last = ks[-3:]
    dec = all(q < p for p, q in zip(norms[:-1], norms[1:]))
    ok = all(k <= 0.25 * 1.03 for k in last) and dec and all(n < 1e-2 for n in norms[-3:])
    return CriterionResult(
        6,
        "Gamma_1 recovery",
        ok,
        "last kappa " + ", ".join(f"{k:.5f}" for k in last) + " (<= 0.2575); L1 " + ", ".join(f"{n:.2e}" for n in norms) + (" decreasing" if dec else " NOT decreasing"),
    )


def criterion_7_parts():
    """``(cantor_ok, mixed_value, mixed_formula_target, detail_cantor)``."""
    _, plan = sbv_recovery_family(zoo("cantor"))
    ks = [e.kappa_measured for e in plan.entries]
    unif = all(e.norm_measured <= 2.0 ** (-e.delta_or_k) for e in plan.entries)
    cantor_ok = all(k <= 0.25 * 1.03 for k in ks[-3:]) and unif
    det = "Cantor last kappa " + ", ".join(f"{k:.5f}" for k in ks[-3:]) + f" (<= 0.2575), sup-norm <= 2^-k: {unif}"
    f = zoo("mixed_cantor")
    _, plan_m = sbv_recovery_family(f)
    return cantor_ok, plan_m.entries[-1].kappa_measured, targets(f).gamma_inf, det


@_timed
def criterion_7():
    cantor_ok, mixed, formula, det = criterion_7_parts()
    literal_ok = _rel(mixed, 0.75) <= 0.04
    formula_ok = _rel(mixed, formula) <= 0.04
    return CriterionResult(
        7,
        "Gamma_inf recovery",
        cantor_ok and literal_ok,
        f"{det}; x+H+Cantor diagonal kappa={mixed:.5f} vs stated 0.75 +-4%: {'ok' if literal_ok else 'off'}"
        f" (Gamma_inf formula 1/4|D^a|+1/4|D^c|+1/2|D^j| = {formula:g}: {'within' if formula_ok else 'outside'} 4%)",
    )


def random_dp_instance(rng, n):
    eps = float(rng.uniform(0.05, 0.3))
    if rng.random() < 0.5:
        # touching and coincident starts on a coarse grid
        starts = np.sort(rng.integers(0, 12, n) * (eps / 2))
    else:
        starts = np.sort(rng.uniform(0, 1, n))
    if rng.random() < 0.3:
        values = rng.integers(0, 4, n).astype(float)
    else:
        values = rng.uniform(0, 1, n)
    return CandidateSet(starts, values, np.arange(n), eps)


@_timed
def criterion_8(instances=200, seed=8):
    rng = np.random.default_rng(seed)
    bad = 0
    for t in range(instances):
        n = int(rng.integers(0, 23)) if t >= 2 else (22 if t == 0 else 0)
        cs = random_dp_instance(rng, n)
        dp = max_disjoint_sum(cs).total
        bf = brute_force_kappa_1d(cs)
        bad += dp != bf
    return CriterionResult(8, "Packing oracle", bad == 0, f"{instances} instances (n <= 22), {bad} mismatches (bit-exact)")


def random_bv_model(rng):
    """Continuous piecewise cubic on (0, 1) with random breaks plus jumps."""
    k = int(rng.integers(1, 5))
    br = np.concatenate([[0.0], np.sort(rng.uniform(0.05, 0.95, k - 1)), [1.0]])
    pieces = []
    prev_end = float(rng.normal())
    for lo, hi in zip(br[:-1], br[1:]):
        c = rng.normal(scale=3.0, size=4)
        c[0] += prev_end - np.polynomial.polynomial.polyval(lo, c)
        pieces.append(SmoothPiece(float(lo), float(hi), tuple(c)))
        prev_end = float(np.polynomial.polynomial.polyval(hi, c))
    nj = int(rng.integers(0, 4))
    xs = np.sort(rng.uniform(0.02, 0.98, nj))
    jumps = []
    for x in xs:
        h = float(rng.normal())
        if abs(h) < 1e-3:
            h = 0.5
        jumps.append(Jump(float(x), 0.0, h))
    return Analytic(Domain.interval(0, 1), tuple(pieces), tuple(jumps))


@_timed
def criterion_9(models=20, seed=9):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(models):
        f = random_bv_model(rng)
        worst = max(worst, _rel(bvfun.coarea_tv(f, 1000), bvfun.tv_decomposition(f).total))
    return CriterionResult(9, "Coarea oracle", worst <= 0.01, f"{models} random models, max relative gap {worst:.2e} (<= 1%)")


@_timed
def criterion_10():
    f = zoo("disk2d")
    t0 = time.perf_counter()
    est = kappa_2d(f, 0.01, angles=16)
    elapsed = time.perf_counter() - t0
    half_per = 0.5 * 2 * math.pi * 0.3
    ok = _rel(est.value, half_per) <= 0.15 and est.value <= half_per * 1.01 and elapsed < 300 and est.family.is_disjoint()
    return CriterionResult(
        10,
        "2D jump",
        ok,
        f"k(0.01)={est.value:.5f} vs pi*0.3={half_per:.5f} ({100 * (est.value / half_per - 1):+.1f}%, {est.size} cubes, {est.strategy}); {elapsed:.1f}s < 300s",
    )


# -------------------------------------------------------------------------
# invariant suites


def invariant_violations(seed=11, samples=40):
    """Counts of violations per invariant suite."""
    from bmotv import cli

    rng = np.random.default_rng(seed)
    tol = 1e-8
    out = {}
    models = [zoo("identity"), zoo("heaviside"), zoo("mixed"), zoo("cantor"), zoo("mixed_cantor")] + [random_bv_model(rng) for _ in range(5)]

    bad = 0
    for _ in range(samples):
        f = models[int(rng.integers(len(models)))]
        e = float(rng.uniform(0.01, 0.3))
        q = Cube.interval(s := float(rng.uniform(0, 1 - e)), s + e)
        alpha = float(rng.choice([-1, 1]) * rng.uniform(0.1, 10))
        lhs = mean_oscillation(bvfun.scaled(f, alpha), q, tol).value
        bad += abs(lhs - abs(alpha) * mean_oscillation(f, q, tol).value) > 2 * tol * max(1.0, abs(alpha))
    out["osc scaling"] = bad

    bad = 0
    for _ in range(samples):
        f = models[int(rng.integers(len(models)))]
        e = float(rng.uniform(0.01, 0.3))
        s = float(rng.uniform(0, 1 - e))
        h = float(rng.uniform(-2, 2))
        a = mean_oscillation(f, Cube.interval(s, s + e), tol).value
        b = mean_oscillation(bvfun.shifted(f, h), Cube.interval(s + h, s + h + e), tol).value
        bad += abs(a - b) > 2 * tol + 1e-9 * max(1.0, abs(h))
    out["osc translation"] = bad

    bad = 0
    for _ in range(samples):
        f = models[int(rng.integers(5))]  # monotone zoo members
        e = float(rng.uniform(0.01, 0.5))
        s = float(rng.uniform(0, 1 - e))
        prof = f.profile
        half = 0.5 * (float(prof.value(s + e, -1)) - float(prof.value(s, 1)))
        bad += mean_oscillation(f, Cube.interval(s, s + e), tol).value > half + tol
    out["monotone half-bound"] = bad

    bad = 0
    for f in models + [zoo("disk2d")]:
        t = targets(f)
        total = bvfun.tv_decomposition(f).total
        bad += not (t.gamma_p <= t.gamma_inf <= 0.5 * total)
    out["target ordering"] = bad

    sched = EpsSchedule((0.1, 0.05, 0.02))
    r1 = sweep(zoo("mixed"), sched)
    r2 = sweep(zoo("mixed"), sched)
    out["report determinism"] = int(r1.csv_text() != r2.csv_text() or r1.json_text() != r2.json_text())

    bad = 0
    for text in cli.SAMPLE_CONFIGS:
        cfg = cli.parse_config(text)
        bad += cli.parse_config(cli.config_to_text(cfg)) != cfg
    out["config round-trip"] = bad
    return out


@_timed
def criterion_11():
    v = invariant_violations()
    total = sum(v.values())
    return CriterionResult(11, "Invariant suites", total == 0, ", ".join(f"{k}: {n}" for k, n in v.items()))


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, criterion_10, criterion_11)


def run_all(echo=print):
    results = []
    for fn in CRITERIA:
        res = fn()
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results

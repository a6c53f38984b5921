"""Recovery families: approximants f_i of f whose kappa values reach the
Gamma-limits, glued along a diagonal plan eps -> f_i.

Smooth approximants (mollification) bring kappa down to a quarter of the
total variation.  SBV approximants replace each Cantor staircase by a
piecewise-linear interpolant, moving the Cantor mass into the absolutely
continuous part while keeping jumps intact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from bmotv.bvfun import Analytic, Interpolant, Mollified, ModelError, tv_decomposition
from bmotv.limits import EpsSchedule, Family, lp_distance, targets
from bmotv.mollifier import DEFAULT_MOLLIFIER
from bmotv.packing import PackingParams, kappa


class ThresholdSearchError(RuntimeError):
    """No scheduled eps satisfies the selection rule for some approximant."""


def mollify(f, delta, margin=None, extend=False, kernel=DEFAULT_MOLLIFIER) -> Mollified:
    """``rho_delta * f`` on the domain shrunk by ``margin`` (default delta).
    With ``extend`` f is continued by its boundary values, so the result
    lives on the whole domain."""
    return Mollified(f, float(delta), margin, extend, kernel)


@dataclass(frozen=True)
class PlanEntry:
    i: int
    delta_or_k: float
    eps_threshold: float
    kappa_measured: float
    norm_measured: float

    def to_json(self):
        return {
            "i": self.i,
            "delta_or_k": self.delta_or_k,
            "eps_threshold": self.eps_threshold,
            "kappa_measured": self.kappa_measured,
            "norm_measured": self.norm_measured,
        }


@dataclass
class DiagonalPlan:
    """Thresholds eps_1 > eps_2 > ...; f_eps := f_i for eps in (eps_{i+1}, eps_i]."""

    entries: list = field(default_factory=list)
    members: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        th = [e.eps_threshold for e in self.entries]
        if any(q >= p for p, q in zip(th[:-1], th[1:])):
            raise ValueError("plan thresholds must be strictly decreasing")
        for e in self.entries:
            if not e.eps_threshold < 1.0 / e.i:
                raise ValueError(f"threshold {e.eps_threshold} not below 1/{e.i}")

    def position(self, eps):
        """Index into ``entries`` of the approximant used at ``eps``."""
        th = np.array([e.eps_threshold for e in self.entries])
        # last k with eps <= th[k]; eps above eps_1 uses the first member
        k = int(np.searchsorted(-th, -eps, side="right")) - 1
        return max(k, 0)

    def member(self, eps):
        return self.members[self.position(eps)]

    @property
    def thresholds(self):
        return [e.eps_threshold for e in self.entries]

    def to_json(self):
        return [e.to_json() for e in self.entries]

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)
            fh.write("\n")


def plan_indices(count=5, first=100):
    """Approximant indices i_j = first * 2^j."""
    return [first * 2**j for j in range(count)]


def _scan_grid(top, bottom, per_octave=4):
    """Geometric eps grid strictly below ``top`` down to ``bottom``."""
    n = int(math.ceil(per_octave * math.log2(top / bottom))) + 1
    return top * 2.0 ** (-(np.arange(1, n + 1)) / per_octave)


def _select_threshold(g, bound, top, params, bottom, schedule=None):
    """Largest scanned eps < top with measured kappa_eps(g) <= bound."""
    if schedule is not None:
        grid = [e for e in schedule if e < top]
    else:
        grid = _scan_grid(top, bottom)
    for eps in grid:
        if eps >= g.domain.sides[0]:
            continue
        est = kappa(g, float(eps), params)
        if est.value <= bound:
            return float(eps), est.value
    raise ThresholdSearchError(f"no eps below {top:g} gives kappa <= {bound:g}; extend the schedule or loosen the slack")


def _diagonal(f, approximants, bound_fn, p, params, schedule, bottom):
    entries, members = [], []
    top = math.inf
    for i, param, g in approximants:
        bound = bound_fn(g) + 2.0 / i
        # eps_i < 1/i (strictly below: the scan starts one grid step lower)
        eps_i, k_i = _select_threshold(g, bound, min(1.0 / i, top), params, bottom, schedule)
        norm = lp_distance(g, f, (max(g.domain.a, f.domain.a), min(g.domain.b, f.domain.b)), p)
        entries.append(PlanEntry(i, float(param), eps_i, k_i, norm))
        members.append(g)
        top = eps_i
    return DiagonalPlan(entries, members)


def smooth_recovery_family(f, p=1.0, schedule: EpsSchedule | None = None, indices=None, params: PackingParams = PackingParams(), delta_scale=8.0, delta_max=0.1, bottom=1e-6):
    """Mollified approximants f_i = rho_{delta_i} * f (extended by boundary
    values, so each f_i lives on the whole domain) with delta_i =
    min(delta_scale/i, delta_max), and eps_i chosen so that the measured
    kappa_{eps_i}(f_i) <= |Df|/4 + 2/i.  Returns ``(Family, DiagonalPlan)``."""
    if math.isinf(p):
        raise ValueError("smooth recovery needs p < inf")
    if f.dimension != 1:
        raise ValueError("recovery families are one-dimensional")
    indices = plan_indices() if indices is None else list(indices)
    total = tv_decomposition(f).total
    approx = []
    for i in indices:
        delta = min(delta_scale / i, delta_max)
        approx.append((i, delta, mollify(f, delta, margin=0.0, extend=True)))
    plan = _diagonal(f, approx, lambda g: 0.25 * total, p, params, schedule, bottom)
    return Family(plan.member, f, p, plan, "smooth"), plan


def interpolant(f, k) -> Interpolant | Analytic:
    """f with every Cantor staircase replaced by its generation-k
    interpolant; f itself when there is none."""
    if not isinstance(f, Analytic):
        raise ModelError("SBV recovery needs an Analytic model")
    return Interpolant(f, int(k)) if f.cantor else f


def sbv_recovery_family(f, schedule: EpsSchedule | None = None, indices=None, params: PackingParams = PackingParams(), first_generation=3, bottom=1e-6):
    """Generation-k interpolants f_k (k = first_generation + j along the
    plan) with eps chosen so that kappa <= |D^a f_k|/4 + |D^j f_k|/2 + 2/i.
    The family converges uniformly.  Returns ``(Family, DiagonalPlan)``."""
    if not isinstance(f, Analytic):
        raise ModelError("SBV recovery needs an Analytic model")
    indices = plan_indices() if indices is None else list(indices)
    approx = []
    for j, i in enumerate(indices):
        k = first_generation + j
        approx.append((i, k, interpolant(f, k)))
    plan = _diagonal(f, approx, lambda g: targets(g).sbv, math.inf, params, schedule, bottom)
    return Family(plan.member, f, math.inf, plan, "sbv"), plan


@dataclass(frozen=True)
class MonotonicityCell:
    eps: float
    delta: float
    lhs: float
    rhs: float
    slack: float

    @property
    def ok(self):
        return self.lhs <= self.rhs + self.slack


@dataclass
class MonotonicityReport:
    cells: list

    @property
    def violations(self):
        return [c for c in self.cells if not c.ok]

    @property
    def ok(self):
        return not self.violations


def check_mollifier_monotonicity(f, eps_grid, delta_grid, margin, params: PackingParams = PackingParams(), slack=1e-3):
    """Compare kappa_eps(rho_delta * f, Omega') with kappa_eps(f, Omega),
    Omega' the domain shrunk by ``margin``, on every grid cell."""
    if not margin > max(delta_grid):
        raise ValueError("margin must exceed every mollifier radius")
    rhs = {float(e): kappa(f, e, params).value for e in eps_grid}
    cells = []
    for d in delta_grid:
        g = mollify(f, d, margin=margin)
        for e in eps_grid:
            lhs = kappa(g, e, params).value if e < g.domain.sides[0] else 0.0
            cells.append(MonotonicityCell(float(e), float(d), lhs, rhs[float(e)], slack))
    return MonotonicityReport(cells)

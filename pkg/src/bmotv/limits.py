"""Epsilon sweeps, the three limit targets, and Gamma-experiments.

A sweep measures kappa_eps(f) along a decreasing schedule; a Gamma-experiment
measures kappa_eps(f_eps) for a family ``eps -> f_eps`` together with the
distance of f_eps to the limit f in a chosen L^p norm.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre

from bmotv.bvfun import tv_decomposition
from bmotv.packing import KappaEstimate, PackingParams, kappa

CSV_COLUMNS = ("epsilon", "kappa", "family_size", "target_sbv", "target_gamma_p", "target_gamma_inf", "norm_p", "norm_value")


@dataclass(frozen=True)
class Targets:
    sbv: float
    gamma_p: float
    gamma_inf: float


def targets(f) -> Targets:
    t = tv_decomposition(f)
    return Targets(
        sbv=0.25 * t.abs_cont + 0.5 * t.jump,
        gamma_p=0.25 * t.total,
        gamma_inf=0.25 * t.abs_cont + 0.25 * t.cantor + 0.5 * t.jump,
    )


@dataclass(frozen=True)
class EpsSchedule:
    """Strictly decreasing eps values; ``window`` is the number of trailing
    entries forming the final refinement window."""

    values: tuple
    window: int = 1
    kind: str = "explicit"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(not (v > 0 and math.isfinite(v)) for v in vals):
            raise ValueError("schedule values must be positive and finite")
        if any(q >= p for p, q in zip(vals[:-1], vals[1:])):
            raise ValueError("schedule must be strictly decreasing")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "window", max(1, min(int(self.window), max(len(vals), 1))))

    @classmethod
    def geometric(cls, start, ratio=0.5, n=8, window=3):
        if not 0 < ratio < 1:
            raise ValueError("geometric ratio must lie in (0, 1)")
        vals = tuple(start * ratio**j for j in range(n))
        return cls(vals, window, "geometric", {"start": start, "ratio": ratio, "n": n})

    @classmethod
    def logperiodic(cls, base, k, taus):
        """eps = base^k * tau for k in the inclusive range ``k`` and every
        multiplier tau in (base, 1]; the window is the last period."""
        k0, k1 = int(k[0]), int(k[1])
        taus = sorted({float(t) for t in taus}, reverse=True)
        if not 0 < base < 1 or any(not base < t <= 1 for t in taus) or k1 < k0:
            raise ValueError("log-periodic schedule needs 0 < base < tau <= 1 and k0 <= k1")
        vals = tuple(base**kk * t for kk in range(k0, k1 + 1) for t in taus)
        return cls(vals, len(taus), "logperiodic", {"base": base, "k": [k0, k1], "taus": taus})

    @classmethod
    def default_for(cls, domain):
        return cls.geometric(min(domain.sides) / 4.0)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def to_json(self):
        if self.kind == "explicit":
            return {"kind": "explicit", "values": list(self.values), "window": self.window}
        return {"kind": self.kind, **self.params}


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    kappa: float
    family_size: int
    targets: Targets
    norm_p: float | None = None
    norm_value: float | None = None

    def cells(self):
        def num(v):
            # shortest round-trip form, stable across runs and platforms
            return "" if v is None else repr(float(v))

        p = "" if self.norm_p is None else ("inf" if math.isinf(self.norm_p) else format(self.norm_p, "g"))
        return [
            num(self.epsilon),
            num(self.kappa),
            str(int(self.family_size)),
            num(self.targets.sbv),
            num(self.targets.gamma_p),
            num(self.targets.gamma_inf),
            p,
            num(self.norm_value),
        ]


@dataclass
class SweepReport:
    rows: list
    window: int = 1
    estimates: list = field(default_factory=list, repr=False, compare=False)

    @property
    def kappas(self):
        return np.array([r.kappa for r in self.rows])

    def summary(self) -> dict:
        if not self.rows:
            return {"rows": 0}
        k = self.kappas
        w = k[-self.window :]
        out = {
            "rows": len(self.rows),
            "min": float(k.min()),
            "max": float(k.max()),
            "last": float(k[-1]),
            "liminf_proxy": float(w.min()),
            "limsup_proxy": float(w.max()),
            "window": self.window,
        }
        t = self.rows[0].targets
        out["targets"] = {"sbv": t.sbv, "gamma_p": t.gamma_p, "gamma_inf": t.gamma_inf}
        norms = [r.norm_value for r in self.rows if r.norm_value is not None]
        if norms:
            out["norm_last"] = float(norms[-1])
        return out

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(r.cells())
        return buf.getvalue()

    def json_text(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


def _estimate(f, eps, params, domain) -> KappaEstimate:
    return kappa(f, eps, params, domain)


def sweep(f, schedule: EpsSchedule | None = None, params: PackingParams = PackingParams(), domain=None) -> SweepReport:
    """kappa_eps(f) along the schedule."""
    dom = f.domain if domain is None else domain
    schedule = EpsSchedule.default_for(dom) if schedule is None else schedule
    if len(schedule) == 0:
        raise ValueError("empty schedule")
    tg = targets(f)
    rows, ests = [], []
    for eps in schedule:
        est = _estimate(f, eps, params, dom)
        ests.append(est)
        rows.append(SweepRow(eps, est.value, est.size, tg))
    return SweepReport(rows, schedule.window, ests)


# -------------------------------------------------------------------------
# families and distances


class Family:
    """``eps -> f_eps`` (built lazily, cached) with limit ``reference`` in
    the L^p topology, ``p`` in [1, inf]."""

    def __init__(self, member, reference, p=1.0, plan=None, name=""):
        if not (p >= 1):
            raise ValueError("topology exponent p must be >= 1")
        self._member = member
        self.reference = reference
        self.p = float(p)
        self.plan = plan
        self.name = name
        self._cache = {}

    @classmethod
    def constant(cls, f, p=1.0):
        return cls(lambda eps: f, f, p, name="constant")

    def __call__(self, eps):
        key = float(eps)
        if key not in self._cache:
            self._cache[key] = self._member(key)
        return self._cache[key]


_GL8 = legendre.leggauss(8)


def _breaks(prof, lo, hi):
    pts = [lo, hi]
    for comp in prof.components:
        for u, v in comp.supports():
            pts.extend([u, v])
        pts.extend(comp.points())
    pts = np.unique(np.clip(np.asarray(pts, dtype=float), lo, hi))
    return pts


def lp_distance(g, f, region, p, panels=2048, samples=10000):
    """||g - f||_{L^p(region)} for 1D models; ``p = inf`` uses dense
    sampling plus the one-sided values at every jump."""
    lo, hi = region
    pg, pf = g.profile, f.profile
    if math.isinf(p):
        xs = np.linspace(lo, hi, samples)
        diff = np.abs(pg.value(xs) - pf.value(xs))
        best = float(diff.max())
        jumps = np.concatenate([pg.jump_points(), pf.jump_points()])
        jumps = jumps[(jumps >= lo) & (jumps <= hi)]
        for side in (-1, 1):
            if jumps.size:
                best = max(best, float(np.max(np.abs(pg.value(jumps, side) - pf.value(jumps, side)))))
        return best
    cuts = np.union1d(_breaks(pg, lo, hi), _breaks(pf, lo, hi))
    # refine long pieces so non-polynomial parts are resolved
    h = (hi - lo) / panels
    pieces = []
    for u, v in zip(cuts[:-1], cuts[1:]):
        k = max(1, int(math.ceil((v - u) / h)))
        pieces.append(np.linspace(u, v, k + 1))
    nodes = np.unique(np.concatenate(pieces))
    u, v = nodes[:-1], nodes[1:]
    mid, half = 0.5 * (u + v), 0.5 * (v - u)
    x = mid[:, None] + half[:, None] * _GL8[0][None, :]
    d = np.abs(pg.value(x) - pf.value(x)) ** p
    total = float(np.sum(d * _GL8[1][None, :] * half[:, None]))
    return total ** (1.0 / p)


def family_distance(fam: Family, eps, region=None, p=None):
    """L^p distance of the family member at ``eps`` to the limit on a
    compact sub-interval of both domains."""
    g = fam(eps)
    f = fam.reference
    p = fam.p if p is None else float(p)
    if region is None:
        region = (max(g.domain.a, f.domain.a), min(g.domain.b, f.domain.b))
    lo, hi = region
    if not (lo >= f.domain.a and hi <= f.domain.b and lo >= g.domain.a and hi <= g.domain.b and hi > lo):
        raise ValueError("distance region must lie inside both domains")
    return lp_distance(g, f, (lo, hi), p)


def gamma_experiment(fam: Family, schedule: EpsSchedule, params: PackingParams = PackingParams(), domain=None, region=None) -> SweepReport:
    """kappa_eps(f_eps) and ||f_eps - f||_p along the schedule; targets are
    those of the limit f."""
    if len(schedule) == 0:
        raise ValueError("empty schedule")
    tg = targets(fam.reference)
    rows, ests = [], []
    for eps in schedule:
        g = fam(eps)
        est = _estimate(g, eps, params, g.domain if domain is None else domain)
        ests.append(est)
        norm = family_distance(fam, eps, region) if fam.reference.dimension == 1 else None
        rows.append(SweepRow(eps, est.value, est.size, tg, fam.p if norm is not None else None, norm))
    return SweepReport(rows, schedule.window, ests)

"""Exactly described BV functions on intervals and boxes.

A 1D :class:`Analytic` model is a sum of a continuous piecewise polynomial
(degree <= 3), finitely many steps and finitely many Cantor staircases.
Wrappers smooth it (:class:`Mollified`) or replace its staircases by their
generation-k interpolants (:class:`Interpolant`); :class:`Sampled` is
piecewise-linear data.  :class:`Analytic2D` is an affine function plus
constant jumps across disk or convex-polygon boundaries.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from numpy.polynomial import polynomial as npoly

from bmotv import geometry
from bmotv.components import Profile, Stair, Step, jordan_parts
from bmotv.mollifier import DEFAULT_MOLLIFIER, Mollifier


class ModelError(ValueError):
    """Invalid model description."""


class JumpEvaluationError(ValueError):
    """Point evaluation requested exactly at a jump location."""


@dataclass(frozen=True)
class Domain:
    """Open interval ``((a, b),)`` or open axis-aligned box ``((x0, x1), (y0, y1))``."""

    bounds: tuple

    def __post_init__(self):
        b = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if len(b) not in (1, 2):
            raise ModelError("only dimensions 1 and 2 are supported")
        for lo, hi in b:
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
                raise ModelError(f"empty or unbounded domain side ({lo}, {hi})")
        object.__setattr__(self, "bounds", b)

    @classmethod
    def interval(cls, a, b):
        return cls(((a, b),))

    @classmethod
    def box(cls, xr, yr):
        return cls((tuple(xr), tuple(yr)))

    @property
    def dimension(self):
        return len(self.bounds)

    @property
    def a(self):
        return self.bounds[0][0]

    @property
    def b(self):
        return self.bounds[0][1]

    @property
    def sides(self):
        return tuple(hi - lo for lo, hi in self.bounds)

    @property
    def measure(self):
        return math.prod(self.sides)

    def shrink(self, margin):
        """The subdomain at distance ``margin`` from the boundary."""
        if margin < 0 or any(2 * margin >= s for s in self.sides):
            raise ModelError(f"margin {margin} too large for {self.bounds}")
        return Domain(tuple((lo + margin, hi - margin) for lo, hi in self.bounds))

    def contains(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return all(lo < xi < hi for (lo, hi), xi in zip(self.bounds, x))

    def to_json(self):
        if self.dimension == 1:
            return list(self.bounds[0])
        return [list(s) for s in self.bounds]


@dataclass(frozen=True)
class SmoothPiece:
    lo: float
    hi: float
    coeffs: tuple  # ascending powers of x

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ModelError(f"empty piece ({self.lo}, {self.hi})")
        c = tuple(float(v) for v in self.coeffs)
        if len(c) == 0:
            c = (0.0,)
        if len(c) > 4:
            raise ModelError("piece polynomials are limited to degree 3")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, x):
        return npoly.polyval(x, self.coeffs)

    def variation(self):
        """int |p'| over the piece, split at the interior roots of p'."""
        dc = npoly.polyder(self.coeffs) if len(self.coeffs) > 1 else np.zeros(1)
        cuts = [self.lo, self.hi]
        if len(dc) > 1:
            for root in np.roots(np.asarray(dc)[::-1]):
                if abs(root.imag) < 1e-14 and self.lo < root.real < self.hi:
                    cuts.append(float(root.real))
        cuts.sort()
        vals = npoly.polyval(np.array(cuts), self.coeffs)
        return float(np.sum(np.abs(np.diff(vals))))


@dataclass(frozen=True)
class Jump:
    """Step term equal to ``left`` before ``x`` and ``right`` after it."""

    x: float
    left: float
    right: float

    def __post_init__(self):
        if self.left == self.right:
            raise ModelError(f"zero-height jump at x={self.x}")

    @property
    def height(self):
        return self.right - self.left


@dataclass(frozen=True)
class CantorComponent:
    """Middle-``ratio`` Cantor staircase rising by ``rise`` across ``(lo, hi)``."""

    lo: float
    hi: float
    rise: float
    ratio: float = 1.0 / 3.0
    depth: int = 40

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ModelError("empty Cantor base interval")
        if self.rise == 0:
            raise ModelError("zero-rise Cantor component")
        if not 0.0 < self.ratio < 1.0:
            raise ModelError("dissection ratio must lie in (0, 1)")
        if self.depth < 1:
            raise ModelError("Cantor depth must be positive")

    def stair(self, depth=None):
        return Stair(self.lo, self.hi, self.rise, self.ratio, self.depth if depth is None else depth)


@dataclass(frozen=True)
class TVDecomposition:
    abs_cont: float
    jump: float
    cantor: float

    @property
    def total(self):
        return self.abs_cont + self.jump + self.cantor

    def __str__(self):
        return f"abs_cont={self.abs_cont:g} jump={self.jump:g} cantor={self.cantor:g} total={self.total:g}"


class FunctionModel:
    """Common interface of all model variants."""

    domain: Domain

    @property
    def dimension(self):
        return self.domain.dimension


def _check_pieces(domain, pieces):
    if not pieces:
        return
    a, b = domain.a, domain.b
    if abs(pieces[0].lo - a) > 1e-12 or abs(pieces[-1].hi - b) > 1e-12:
        raise ModelError("smooth pieces must tile the domain")
    scale = 1.0 + max(abs(a), abs(b))
    for p, q in zip(pieces[:-1], pieces[1:]):
        if abs(p.hi - q.lo) > 1e-12:
            raise ModelError(f"smooth pieces must tile the domain (gap or overlap at {p.hi})")
        vp, vq = p(p.hi), q(q.lo)
        if abs(vp - vq) > 1e-9 * (scale + abs(vp)):
            raise ModelError(f"smooth pieces disagree at x={p.hi}; declare a jump there instead")


@dataclass(frozen=True)
class Analytic(FunctionModel):
    domain: Domain
    pieces: tuple = ()
    jumps: tuple = ()
    cantor: tuple = ()

    def __post_init__(self):
        if self.domain.dimension != 1:
            raise ModelError("Analytic is one-dimensional; use Analytic2D")
        object.__setattr__(self, "pieces", tuple(sorted(self.pieces, key=lambda p: p.lo)))
        object.__setattr__(self, "jumps", tuple(self.jumps))
        object.__setattr__(self, "cantor", tuple(self.cantor))
        _check_pieces(self.domain, self.pieces)
        xs = [j.x for j in self.jumps]
        if any(q <= p for p, q in zip(xs[:-1], xs[1:])):
            raise ModelError("jump locations must be strictly increasing")
        for x in xs:
            if not self.domain.a < x < self.domain.b:
                raise ModelError(f"jump at {x} outside the domain interior")
        for c in self.cantor:
            if c.lo < self.domain.a - 1e-12 or c.hi > self.domain.b + 1e-12:
                raise ModelError("Cantor base interval must lie in the domain")

    def _profile(self, depth=None):
        start, up, down = jordan_parts([(p.lo, p.hi, p.coeffs) for p in self.pieces])
        comps = [c for c in (up, down) if c is not None]
        offset = start
        for j in self.jumps:
            offset += j.left
            comps.append(Step(j.x, j.height))
        for c in self.cantor:
            comps.append(c.stair(depth))
        return Profile(self.domain.a, self.domain.b, offset, comps)

    @cached_property
    def profile(self) -> Profile:
        return self._profile()

    def tv(self):
        return TVDecomposition(
            abs_cont=sum(p.variation() for p in self.pieces),
            jump=sum(abs(j.height) for j in self.jumps),
            cantor=sum(abs(c.rise) for c in self.cantor),
        )


@dataclass(frozen=True)
class Interpolant(FunctionModel):
    """``inner`` with every Cantor staircase replaced by its generation-k
    piecewise-linear interpolant."""

    inner: Analytic
    generation: int

    def __post_init__(self):
        if not isinstance(self.inner, Analytic):
            raise ModelError("interpolant wraps an Analytic model")
        if self.generation < 0:
            raise ModelError("generation must be nonnegative")

    @property
    def domain(self):
        return self.inner.domain

    @cached_property
    def profile(self) -> Profile:
        return self.inner._profile(depth=self.generation)

    def tv(self):
        t = self.inner.tv()
        return TVDecomposition(t.abs_cont + t.cantor, t.jump, 0.0)

    def uniform_error_bound(self):
        return sum(abs(c.rise) for c in self.inner.cantor) * 2.0 ** (-self.generation)


@dataclass(frozen=True)
class Sampled(FunctionModel):
    """Piecewise-linear interpolation of sorted ``(x, value)`` rows."""

    rows: tuple

    def __post_init__(self):
        rows = tuple((float(x), float(v)) for x, v in self.rows)
        if len(rows) < 2:
            raise ModelError("need at least two samples")
        xs = [r[0] for r in rows]
        if any(q <= p for p, q in zip(xs[:-1], xs[1:])):
            raise ModelError("sample x values must be strictly increasing (unsorted or duplicate x)")
        object.__setattr__(self, "rows", rows)

    @property
    def domain(self):
        return Domain.interval(self.rows[0][0], self.rows[-1][0])

    @cached_property
    def analytic(self) -> Analytic:
        pieces = []
        for (x0, v0), (x1, v1) in zip(self.rows[:-1], self.rows[1:]):
            slope = (v1 - v0) / (x1 - x0)
            pieces.append(SmoothPiece(x0, x1, (v0 - slope * x0, slope)))
        return Analytic(self.domain, tuple(pieces))

    @property
    def profile(self) -> Profile:
        return self.analytic.profile

    def tv(self):
        vals = np.array([v for _, v in self.rows])
        return TVDecomposition(float(np.sum(np.abs(np.diff(vals)))), 0.0, 0.0)


@dataclass(frozen=True)
class Mollified(FunctionModel):
    """``rho_delta * inner`` on ``inner.domain`` shrunk by ``margin``.

    With ``extend=True`` the inner model is extended by its boundary values
    outside its domain, so no margin is needed (``margin`` may be 0).
    """

    inner: FunctionModel
    delta: float
    margin: float | None = None
    extend: bool = False
    kernel: Mollifier = field(default=DEFAULT_MOLLIFIER)

    def __post_init__(self):
        if self.inner.dimension != 1:
            raise ModelError("mollification is implemented for 1D models")
        if not self.delta > 0:
            raise ModelError("mollifier radius must be positive")
        margin = self.delta if self.margin is None else float(self.margin)
        if margin < self.delta and not self.extend:
            raise ModelError(f"radius {self.delta} too large for domain margin {margin}")
        object.__setattr__(self, "margin", margin)
        self.inner.domain.shrink(margin)

    @property
    def domain(self):
        return self.inner.domain.shrink(self.margin)

    @cached_property
    def profile(self) -> Profile:
        d = self.domain
        return self.inner.profile.mollified(self.delta, self.kernel, d.a, d.b)

    def tv(self):
        return TVDecomposition(smooth_tv(self), 0.0, 0.0)


@dataclass(frozen=True)
class Region2D:
    """Constant jump across the boundary of a disk or convex polygon."""

    shape: str  # "disk" | "polygon"
    inside: float
    outside: float
    center: tuple = (0.0, 0.0)
    radius: float = 0.0
    vertices: tuple = ()

    def __post_init__(self):
        if self.inside == self.outside:
            raise ModelError("zero-height jump across region boundary")
        if self.shape == "disk":
            if not self.radius > 0:
                raise ModelError("disk radius must be positive")
            object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        elif self.shape == "polygon":
            verts = geometry.ccw(np.asarray(self.vertices, dtype=float))
            if len(verts) < 3 or not geometry.is_convex(verts):
                raise ModelError("polygon regions must be convex with at least 3 vertices")
            object.__setattr__(self, "vertices", tuple(map(tuple, verts.tolist())))
        else:
            raise ModelError(f"unknown region shape {self.shape!r}")

    @property
    def height(self):
        return self.inside - self.outside

    @property
    def perimeter(self):
        if self.shape == "disk":
            return 2.0 * math.pi * self.radius
        v = np.asarray(self.vertices)
        return float(np.sum(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)))

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        if self.shape == "disk":
            return np.hypot(p[..., 0] - self.center[0], p[..., 1] - self.center[1]) < self.radius
        return geometry.points_in_convex(p, np.asarray(self.vertices))

    def on_boundary(self, p, tol=0.0):
        p = np.asarray(p, dtype=float)
        if self.shape == "disk":
            return np.abs(np.hypot(p[..., 0] - self.center[0], p[..., 1] - self.center[1]) - self.radius) <= tol
        return geometry.dist_to_polygon_boundary(p, np.asarray(self.vertices)) <= tol

    def area_in(self, poly):
        """Exact area of ``poly`` (convex, ccw) inside the region."""
        if self.shape == "disk":
            return geometry.convex_disk_area(poly, self.center, self.radius)
        return geometry.polygon_area(geometry.clip_convex(poly, np.asarray(self.vertices)))

    def bbox(self):
        if self.shape == "disk":
            cx, cy = self.center
            return (cx - self.radius, cx + self.radius, cy - self.radius, cy + self.radius)
        v = np.asarray(self.vertices)
        return (v[:, 0].min(), v[:, 0].max(), v[:, 1].min(), v[:, 1].max())


@dataclass(frozen=True)
class Analytic2D(FunctionModel):
    """``c0 + gx*x + gy*y`` plus region steps."""

    domain: Domain
    affine: tuple = (0.0, 0.0, 0.0)
    regions: tuple = ()

    def __post_init__(self):
        if self.domain.dimension != 2:
            raise ModelError("Analytic2D needs a 2D box domain")
        object.__setattr__(self, "affine", tuple(float(a) for a in self.affine))
        object.__setattr__(self, "regions", tuple(self.regions))
        (x0, x1), (y0, y1) = self.domain.bounds
        for reg in self.regions:
            bx0, bx1, by0, by1 = reg.bbox()
            if bx0 <= x0 or bx1 >= x1 or by0 <= y0 or by1 >= y1:
                raise ModelError("region closures must lie inside the domain")

    @property
    def gradient(self):
        return np.array(self.affine[1:])

    @property
    def base_value(self):
        return self.affine[0] + sum(r.outside for r in self.regions)

    def tv(self):
        return TVDecomposition(
            abs_cont=float(np.hypot(*self.affine[1:])) * self.domain.measure,
            jump=sum(abs(r.height) * r.perimeter for r in self.regions),
            cantor=0.0,
        )


# -------------------------------------------------------------------------
# operations


def _check_point_1d(f, x):
    x = np.asarray(x, dtype=float)
    a, b = f.domain.a, f.domain.b
    if np.any((x <= a) | (x >= b)):
        raise ValueError(f"point outside the domain ({a}, {b})")
    return x


def evaluate(f: FunctionModel, x):
    """Point value of ``f``; raises :class:`JumpEvaluationError` at jumps."""
    if f.dimension == 2:
        p = np.asarray(x, dtype=float)
        if not f.domain.contains(p):
            raise ValueError("point outside the domain")
        val = f.affine[0] + float(np.dot(f.gradient, p))
        # a few ulps of slack so boundary points written in decimal still count
        slack = 8 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(p))))
        for reg in f.regions:
            if reg.on_boundary(p, slack):
                raise JumpEvaluationError("undefined at jump: point on a region boundary")
            val += reg.inside if reg.contains(p) else reg.outside
        return float(val)
    x = _check_point_1d(f, x)
    prof = f.profile
    jp = prof.jump_points()
    if jp.size and np.any(np.isin(x, jp)):
        raise JumpEvaluationError("undefined at jump")
    out = prof.value(x)
    return float(out) if out.ndim == 0 else out


def mean_value(f: FunctionModel, region, tol=1e-8):
    """Average of ``f`` over an interval ``(lo, hi)`` (1D) or a cube (2D).

    The 1D path is exact up to rounding (antiderivatives are closed form or
    exact self-similar recursions); ``tol`` is the certified bound.
    """
    if f.dimension == 2:
        from bmotv.osc import Cube, _mean_2d

        if not isinstance(region, Cube):
            (x0, x1), (y0, y1) = region
            if x1 - x0 != y1 - y0:
                raise ValueError("2D mean regions are cubes")
            region = Cube(((x0 + x1) / 2, (y0 + y1) / 2), x1 - x0, 0.0)
        return _mean_2d(f, region)
    lo, hi = region
    if not hi > lo:
        raise ValueError("zero-measure region")
    prof = f.profile
    return float((prof.primitive(hi) - prof.primitive(lo)) / (hi - lo))


def tv_decomposition(f: FunctionModel) -> TVDecomposition:
    return f.tv()


def smooth_tv(f: FunctionModel, samples_per_mixed=4000) -> float:
    """Total variation of a continuous model from its monotone structure:
    exact on monotone segments, dense sampling where signs mix."""
    prof = f.profile
    a, b = f.domain.a, f.domain.b
    total = 0.0
    for u, v, sign in prof.segments(a, b):
        if sign in (1, -1):
            total += abs(float(prof.value(v, -1)) - float(prof.value(u, 1)))
        elif sign == 2:
            xs = np.linspace(u, v, samples_per_mixed + 1)
            total += float(np.sum(np.abs(np.diff(prof.value(xs)))))
    return total


def _monotone_pieces(f, samples_per_mixed=2000):
    """``(lo_value, hi_value)`` ranges of the monotone pieces of a 1D model,
    including the vertical ranges at discontinuities."""
    prof = f.profile
    a, b = f.domain.a, f.domain.b
    ranges = []
    for u, v, sign in prof.segments(a, b):
        if sign == 2:
            xs = np.linspace(u, v, samples_per_mixed + 1)
            vals = prof.value(xs)
            vals[0] = float(prof.value(u, 1))
            vals[-1] = float(prof.value(v, -1))
            ranges.extend(zip(vals[:-1], vals[1:]))
        else:
            ranges.append((float(prof.value(u, 1)), float(prof.value(v, -1))))
    for x in prof.jump_points():
        if a < x < b:
            ranges.append((float(prof.value(x, -1)), float(prof.value(x, 1))))
    return np.array([(min(p, q), max(p, q)) for p, q in ranges])


def coarea_tv(f: FunctionModel, t_samples=1000) -> float:
    """Total variation as the integral over levels t of the number of
    boundary points of {f > t}, by the midpoint rule in t."""
    if f.dimension != 1:
        raise ValueError("coarea oracle is one-dimensional")
    if t_samples < 16:
        raise ValueError("need at least 16 level samples")
    r = _monotone_pieces(f)
    lo, hi = float(r[:, 0].min()), float(r[:, 1].max())
    if hi <= lo:
        return 0.0
    dt = (hi - lo) / t_samples
    t = lo + (np.arange(t_samples) + 0.5) * dt
    starts = np.sort(r[:, 0])
    ends = np.sort(r[:, 1])
    # pieces with start < t < end
    crossings = np.searchsorted(starts, t, side="left") - np.searchsorted(ends, t, side="right")
    return float(dt * np.sum(crossings))


def ingest_samples(rows) -> Sampled:
    return Sampled(tuple(tuple(r) for r in rows))


def load_samples_csv(path) -> Sampled:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames[:2]] != ["x", "value"]:
            raise ModelError("sample CSV must have header 'x,value'")
        rows = [(float(r["x"]), float(r["value"])) for r in reader]
    return ingest_samples(rows)


# -------------------------------------------------------------------------
# JSON function specifications


def model_from_dict(spec: dict, base_dir=None) -> FunctionModel:
    """Build a model from a JSON-style function specification."""
    if not isinstance(spec, dict):
        raise ModelError("function spec must be an object")
    if "samples" in spec or "samples_csv" in spec:
        if "samples_csv" in spec:
            path = Path(spec["samples_csv"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            model = load_samples_csv(path)
        else:
            model = ingest_samples(spec["samples"])
        return _wrap(model, spec.get("wrapper"))
    if "domain" not in spec:
        raise ModelError("function spec needs a 'domain'")
    dom = spec["domain"]
    try:
        if len(dom) == 2 and not isinstance(dom[0], (list, tuple)):
            domain = Domain.interval(*dom)
        else:
            domain = Domain(tuple(tuple(s) for s in dom))
    except TypeError as exc:
        raise ModelError(f"bad domain {dom!r}") from exc
    if domain.dimension == 2:
        regions = []
        for r in spec.get("regions", []):
            kind = r.get("shape")
            if kind == "disk":
                regions.append(Region2D("disk", r["inside"], r.get("outside", 0.0), center=tuple(r["center"]), radius=r["radius"]))
            else:
                regions.append(Region2D("polygon", r["inside"], r.get("outside", 0.0), vertices=tuple(map(tuple, r["vertices"]))))
        return Analytic2D(domain, tuple(spec.get("affine", (0.0, 0.0, 0.0))), tuple(regions))
    try:
        pieces = tuple(SmoothPiece(p["interval"][0], p["interval"][1], tuple(p["coeffs"])) for p in spec.get("pieces", []))
        jumps = tuple(Jump(j["x"], j["left"], j["right"]) for j in spec.get("jumps", []))
        cantor = tuple(
            CantorComponent(c["interval"][0], c["interval"][1], c["rise"], c.get("lambda", 1.0 / 3.0), c.get("depth", 40))
            for c in spec.get("cantor", [])
        )
    except (KeyError, IndexError, TypeError) as exc:
        raise ModelError(f"malformed function spec: {exc}") from exc
    return _wrap(Analytic(domain, pieces, jumps, cantor), spec.get("wrapper"))


def _wrap(model, wrapper):
    if not wrapper:
        return model
    kind = wrapper.get("kind")
    if kind == "mollified":
        return Mollified(model, float(wrapper["param"]), wrapper.get("margin"), bool(wrapper.get("extend", False)))
    if kind == "interpolant":
        if isinstance(model, Sampled):
            raise ModelError("interpolant wrapper needs Cantor components")
        return Interpolant(model, int(wrapper["param"]))
    raise ModelError(f"unknown wrapper kind {kind!r}")


def model_to_dict(f: FunctionModel) -> dict:
    if isinstance(f, Mollified):
        d = model_to_dict(f.inner)
        d["wrapper"] = {"kind": "mollified", "param": f.delta, "margin": f.margin, "extend": f.extend}
        return d
    if isinstance(f, Interpolant):
        d = model_to_dict(f.inner)
        d["wrapper"] = {"kind": "interpolant", "param": f.generation}
        return d
    if isinstance(f, Sampled):
        return {"samples": [list(r) for r in f.rows]}
    if isinstance(f, Analytic2D):
        regs = []
        for r in f.regions:
            if r.shape == "disk":
                regs.append({"shape": "disk", "center": list(r.center), "radius": r.radius, "inside": r.inside, "outside": r.outside})
            else:
                regs.append({"shape": "polygon", "vertices": [list(v) for v in r.vertices], "inside": r.inside, "outside": r.outside})
        return {"domain": f.domain.to_json(), "affine": list(f.affine), "regions": regs}
    return {
        "domain": f.domain.to_json(),
        "pieces": [{"interval": [p.lo, p.hi], "coeffs": list(p.coeffs)} for p in f.pieces],
        "jumps": [{"x": j.x, "left": j.left, "right": j.right} for j in f.jumps],
        "cantor": [{"interval": [c.lo, c.hi], "rise": c.rise, "lambda": c.ratio, "depth": c.depth} for c in f.cantor],
    }


def load_model(path) -> FunctionModel:
    path = Path(path)
    with open(path) as fh:
        return model_from_dict(json.load(fh), base_dir=path.parent)


def scaled(f: FunctionModel, alpha: float) -> FunctionModel:
    """The model ``alpha * f`` (alpha nonzero)."""
    if alpha == 0:
        raise ModelError("scale factor must be nonzero")
    if isinstance(f, Mollified):
        return Mollified(scaled(f.inner, alpha), f.delta, f.margin, f.extend, f.kernel)
    if isinstance(f, Interpolant):
        return Interpolant(scaled(f.inner, alpha), f.generation)
    if isinstance(f, Sampled):
        return Sampled(tuple((x, alpha * v) for x, v in f.rows))
    if isinstance(f, Analytic2D):
        regs = tuple(Region2D(r.shape, alpha * r.inside, alpha * r.outside, r.center, r.radius, r.vertices) for r in f.regions)
        return Analytic2D(f.domain, tuple(alpha * a for a in f.affine), regs)
    return Analytic(
        f.domain,
        tuple(SmoothPiece(p.lo, p.hi, tuple(alpha * c for c in p.coeffs)) for p in f.pieces),
        tuple(Jump(j.x, alpha * j.left, alpha * j.right) for j in f.jumps),
        tuple(CantorComponent(c.lo, c.hi, alpha * c.rise, c.ratio, c.depth) for c in f.cantor),
    )


def _shift_poly(coeffs, h):
    """Coefficients of x -> p(x - h)."""
    out = np.zeros(len(coeffs))
    base = np.array([-h, 1.0])
    term = np.array([1.0])
    for c in coeffs:
        out[: len(term)] += c * term
        term = npoly.polymul(term, base)
    return tuple(out.tolist())


def shifted(f: FunctionModel, h: float) -> FunctionModel:
    """The 1D model ``x -> f(x - h)`` on the translated domain."""
    if isinstance(f, Mollified):
        return Mollified(shifted(f.inner, h), f.delta, f.margin, f.extend, f.kernel)
    if isinstance(f, Interpolant):
        return Interpolant(shifted(f.inner, h), f.generation)
    if isinstance(f, Sampled):
        return Sampled(tuple((x + h, v) for x, v in f.rows))
    if f.dimension != 1:
        raise ModelError("shifted is implemented for 1D models")
    return Analytic(
        Domain.interval(f.domain.a + h, f.domain.b + h),
        tuple(SmoothPiece(p.lo + h, p.hi + h, _shift_poly(p.coeffs, h)) for p in f.pieces),
        tuple(Jump(j.x + h, j.left, j.right) for j in f.jumps),
        tuple(CantorComponent(c.lo + h, c.hi + h, c.rise, c.ratio, c.depth) for c in f.cantor),
    )

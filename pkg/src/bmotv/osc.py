"""Mean oscillation of a model over a cube, the integrand of the functional.

1D values are exact up to rounding: the mean comes from exact
antiderivatives, and the L1 deviation splits the cube at the crossing of
the level ``c``, located by a bracketed root iteration where ``f`` is
monotone.  The 2D path
runs a quadtree over the cube whose cells are integrated exactly whenever
``f - c`` keeps a sign on each part of the cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bmotv import geometry

DEFAULT_TOL = 1e-8
_ULP = 2.0**-52


class ToleranceError(RuntimeError):
    """Adaptive quadrature could not certify the requested tolerance."""

    def __init__(self, message, achieved):
        super().__init__(f"{message} (achieved bound {achieved:.3e})")
        self.achieved = achieved


@dataclass(frozen=True)
class Cube:
    """Open cube of side ``side``; 1D centers are floats, 2D centers pairs
    with rotation ``angle`` in radians."""

    center: object
    side: float
    angle: float = 0.0

    def __post_init__(self):
        if not self.side > 0:
            raise ValueError("cube side must be positive")

    @classmethod
    def interval(cls, lo, hi):
        return cls(0.5 * (lo + hi), hi - lo)

    @property
    def lo(self):
        return self.center - 0.5 * self.side

    @property
    def hi(self):
        return self.center + 0.5 * self.side

    @property
    def measure(self):
        return self.side if np.ndim(self.center) == 0 else self.side**2

    def vertices(self):
        return geometry.square_vertices(self.center, self.side, self.angle)

    def inside(self, domain, slack=1e-12):
        if domain.dimension == 1:
            s = slack * (1.0 + abs(domain.a) + abs(domain.b))
            return domain.a - s <= self.lo and self.hi <= domain.b + s
        return bool(geometry.inside_box(self.vertices()[None], domain.bounds, slack)[0])

    def to_json(self, osc=None):
        center = float(self.center) if np.ndim(self.center) == 0 else [float(c) for c in self.center]
        out = {"center": center, "side": float(self.side), "angle": float(self.angle)}
        if osc is not None:
            out["osc"] = float(osc)
        return out


@dataclass(frozen=True)
class OscValue:
    value: float
    tol: float
    flag: str  # "exact" | "quadrature"


def _require_inside(f, cube):
    if not cube.inside(f.domain):
        raise ValueError("cube not contained in the domain")


# -------------------------------------------------------------------------
# 1D


def _crossing(prof, s, e, target, sign, max_iter=200):
    """Points x in [s, e] where the increasing function g = sign*f - target
    changes sign, found by a bracketed Illinois iteration (every third step
    bisects).  A cube stops once 2 |g(x)| (hi - lo), which bounds the error
    the point causes in the deviation integral, is at rounding level."""
    lo, hi = s.copy(), e.copy()
    glo = sign * prof.value(s, 1) - target
    ghi = sign * prof.value(e, -1) - target
    x = 0.5 * (lo + hi)
    thr = 8 * _ULP * (e - s) * (np.abs(glo) + np.abs(ghi) + np.abs(target) + 1e-300)
    last = np.zeros(s.shape, dtype=np.int8)
    act = np.flatnonzero((glo < 0) & (ghi > 0))
    x[glo >= 0] = s[glo >= 0]
    x[(glo < 0) & (ghi <= 0)] = e[(glo < 0) & (ghi <= 0)]
    for it in range(max_iter):
        if act.size == 0:
            break
        l, h, gl, gh = lo[act], hi[act], glo[act], ghi[act]
        if it % 3 == 2:
            xa = 0.5 * (l + h)
        else:
            xa = (l * gh - h * gl) / (gh - gl)
            bad = ~((xa > l) & (xa < h))
            xa[bad] = 0.5 * (l[bad] + h[bad])
        ga = sign[act] * prof.value(xa, 1) - target[act]
        x[act] = xa
        done = 2.0 * np.abs(ga) * (h - l) <= thr[act]
        left = ga < 0
        # Illinois: halve the stale endpoint's value when the same side moves twice
        stale_hi = left & (last[act] == -1)
        stale_lo = ~left & (last[act] == 1)
        lo[act] = np.where(left, xa, l)
        glo[act] = np.where(left, ga, np.where(stale_lo, 0.5 * gl, gl))
        hi[act] = np.where(left, h, xa)
        ghi[act] = np.where(left, np.where(stale_hi, 0.5 * gh, gh), ga)
        last[act] = np.where(left, -1, 1)
        done |= (hi[act] - lo[act]) <= 4 * _ULP * np.maximum(np.abs(lo[act]), np.abs(hi[act]))
        act = act[~done]
    return x


def _abs_dev_monotone(prof, s, e, c, sign, Fs=None, Fe=None):
    """int_s^e |f - c| where f is monotone with direction ``sign`` (+1/-1)
    on each (s, e); vectorized."""
    s = np.asarray(s, dtype=float)
    e = np.asarray(e, dtype=float)
    c = np.asarray(c, dtype=float)
    sign = np.asarray(sign, dtype=float)
    if Fs is None:
        Fs = prof.primitive(s)
    if Fe is None:
        Fe = prof.primitive(e)
    target = sign * c
    x = _crossing(prof, s, e, target, sign)
    Fx = prof.primitive(x)
    # g = sign*f increases: g < target on (s, x), g > target on (x, e)
    upper = sign * (Fe - Fx) - target * (e - x)
    lower = target * (x - s) - sign * (Fx - Fs)
    return np.maximum(upper, 0.0) + np.maximum(lower, 0.0)


def _abs_dev_mixed(prof, u, v, c, depth=0):
    """Bracketing subdivision on a segment where component signs mix.
    Returns ``(integral, error_bound)``."""
    lo, hi = prof.bounds(u, v)
    width = v - u
    if c <= lo or c >= hi:
        F = prof.primitive(np.array([u, v]))
        return abs(float(F[1] - F[0]) - c * width), 0.0
    if depth >= 48 or width <= 64 * _ULP * max(1.0, abs(u), abs(v)):
        mid = float(prof.value(np.array([0.5 * (u + v)]))[0])
        return abs(mid - c) * width, (hi - lo) * width
    m = 0.5 * (u + v)
    a, ea = _abs_dev_mixed(prof, u, m, c, depth + 1)
    b, eb = _abs_dev_mixed(prof, m, v, c, depth + 1)
    return a + b, ea + eb


def _abs_dev_generic(prof, s, e, c):
    total = 0.0
    err = 0.0
    for u, v, sign in prof.segments(s, e):
        if v <= u:
            continue
        if sign == 0:
            total += abs(float(prof.value(np.array([0.5 * (u + v)]))[0]) - c) * (v - u)
        elif sign in (1, -1):
            total += float(_abs_dev_monotone(prof, np.array([u]), np.array([v]), np.array([c]), np.array([sign]))[0])
        else:
            val, bound = _abs_dev_mixed(prof, u, v, c)
            total += val
            err += bound
    return total, err


def integrate_abs_dev(f, cube: Cube, c, tol=DEFAULT_TOL):
    """Average of ``|f - c|`` over the cube."""
    if f.dimension == 2:
        return _abs_dev_2d(f, cube, c, tol)[0] / cube.measure
    _require_inside(f, cube)
    total, err = _abs_dev_generic(f.profile, cube.lo, cube.hi, float(c))
    if err / cube.side > tol:
        raise ToleranceError("deviation integral not certified", err / cube.side)
    return total / cube.side


def mean_oscillation(f, cube: Cube, tol=DEFAULT_TOL) -> OscValue:
    """Average of ``|f - f_Q|`` over the cube ``Q``."""
    if f.dimension == 2:
        return mean_oscillation_2d(f, cube, tol)
    _require_inside(f, cube)
    prof = f.profile
    if prof.monotone_sign(np.array([cube.lo]), np.array([cube.hi]))[0] == 0:
        return OscValue(0.0, 0.0, "exact")
    F = prof.primitive(np.array([cube.lo, cube.hi]))
    c = float(F[1] - F[0]) / cube.side
    total, err = _abs_dev_generic(prof, cube.lo, cube.hi, c)
    achieved = err / cube.side
    if achieved > tol:
        raise ToleranceError("mean oscillation not certified", achieved)
    return OscValue(total / cube.side, max(achieved, 0.0) if err else tol, "exact" if err == 0 else "quadrature")


def oscillations_1d(prof, starts, eps):
    """Mean oscillations over the intervals ``(s, s + eps)``; vectorized."""
    s = np.asarray(starts, dtype=float)
    e = s + eps
    out = np.zeros_like(s)
    if s.size == 0:
        return out
    sign = prof.monotone_sign(s, e)
    varying = sign != 0
    if not varying.any():
        return out
    Fs = prof.primitive(s[varying])
    Fe = prof.primitive(e[varying])
    c = (Fe - Fs) / eps
    sv = sign[varying]
    mono = (sv == 1) | (sv == -1)
    vals = np.zeros(sv.shape)
    if mono.any():
        vals[mono] = _abs_dev_monotone(prof, s[varying][mono], e[varying][mono], c[mono], sv[mono], Fs[mono], Fe[mono]) / eps
    for k in np.flatnonzero(~mono):
        i = np.flatnonzero(varying)[k]
        vals[k] = _abs_dev_generic(prof, float(s[i]), float(e[i]), float(c[k]))[0] / eps
    out[varying] = vals
    return out


# -------------------------------------------------------------------------
# 2D


def _affine_value(f, p):
    a0, gx, gy = f.affine
    return a0 + gx * p[..., 0] + gy * p[..., 1]


def _mean_2d(f, cube):
    verts = cube.vertices()
    area = geometry.polygon_area(verts)
    total = float(_affine_value(f, np.asarray(cube.center))) * area
    for reg in f.regions:
        a_in = reg.area_in(verts)
        total += reg.outside * area + reg.height * a_in
    return total / area


def _part_moments(reg, cell):
    if reg.shape == "disk":
        return geometry.convex_disk_moments(cell, reg.center, reg.radius)
    return geometry.polygon_moments(geometry.clip_convex(cell, np.asarray(reg.vertices)))


def _affine_abs_integral(poly, a0, gx, gy):
    """Exact int over a convex polygon of |a0 + gx x + gy y|."""
    if len(poly) < 3:
        return 0.0
    if gx == 0.0 and gy == 0.0:
        return abs(a0) * geometry.polygon_area(poly)
    total = 0.0
    for sgn in (1.0, -1.0):
        part = geometry.clip_halfplane(poly, (-sgn * gx, -sgn * gy), sgn * a0)
        ar, mx, my = geometry.polygon_moments(part)
        total += sgn * (a0 * ar + gx * mx + gy * my)
    return total


def _abs_dev_2d(f, cube, c, tol, max_depth=22, max_cells=200000):
    """``(int_Q |f - c|, error_bound)`` by quadtree with exact clean cells."""
    _require_inside(f, cube)
    a0, gx, gy = f.affine
    grad = math.hypot(gx, gy)
    verts = cube.vertices()
    qarea = geometry.polygon_area(verts)
    budget = 0.5 * tol * qarea
    stack = [(verts, 0)]
    total = 0.0
    err = 0.0
    cells = 0
    while stack:
        cell, depth = stack.pop()
        cells += 1
        area = geometry.polygon_area(cell)
        const = a0 - c
        cut = []
        for reg in f.regions:
            a_in = reg.area_in(cell)
            if a_in >= area * (1 - 1e-15):
                const += reg.inside
            elif a_in <= area * 1e-15:
                const += reg.outside
            else:
                cut.append(reg)
        if not cut:
            total += _affine_abs_integral(cell, const, gx, gy)
            continue
        corner_vals = gx * cell[:, 0] + gy * cell[:, 1]
        lmin, lmax = float(corner_vals.min()), float(corner_vals.max())
        if len(cut) == 1:
            reg = cut[0]
            v_in = const + reg.inside
            v_out = const + reg.outside
            # exact when f - c keeps one sign on each part of the cell
            if (lmin + v_in >= 0 or lmax + v_in <= 0) and (lmin + v_out >= 0 or lmax + v_out <= 0):
                ar_in, mx_in, my_in = _part_moments(reg, cell)
                ar, mx, my = geometry.polygon_moments(cell)
                i_in = v_in * ar_in + gx * mx_in + gy * my_in
                i_out = v_out * (ar - ar_in) + gx * (mx - mx_in) + gy * (my - my_in)
                total += abs(i_in) + abs(i_out)
                continue
        diam = math.dist(cell[0], cell[2])
        bound = area * (grad * diam + sum(abs(r.height) for r in cut))
        if depth >= max_depth or bound <= budget * area / qarea or cells + len(stack) > max_cells:
            mid = cell.mean(axis=0)
            val = const + gx * mid[0] + gy * mid[1]
            if len(cut) == 1:
                a_in = cut[0].area_in(cell)
                total += abs(val + cut[0].inside) * a_in + abs(val + cut[0].outside) * (area - a_in)
            else:
                total += abs(val + sum(r.outside for r in cut)) * area
            err += bound
            continue
        m01 = 0.5 * (cell[0] + cell[1])
        m12 = 0.5 * (cell[1] + cell[2])
        m23 = 0.5 * (cell[2] + cell[3])
        m30 = 0.5 * (cell[3] + cell[0])
        ctr = 0.5 * (cell[0] + cell[2])
        stack.extend(
            [
                (np.array([cell[0], m01, ctr, m30]), depth + 1),
                (np.array([m01, cell[1], m12, ctr]), depth + 1),
                (np.array([ctr, m12, cell[2], m23]), depth + 1),
                (np.array([m30, ctr, m23, cell[3]]), depth + 1),
            ]
        )
    return total, err


def mean_oscillation_2d(f, cube: Cube, tol=DEFAULT_TOL) -> OscValue:
    if f.dimension != 2:
        raise ValueError("mean_oscillation_2d needs a 2D model")
    c = _mean_2d(f, cube)
    total, err = _abs_dev_2d(f, cube, c, tol)
    area = cube.measure
    achieved = err / area
    if achieved > tol:
        raise ToleranceError("subdivision budget exhausted", achieved)
    return OscValue(total / area, achieved if err else tol, "exact" if err == 0 else "quadrature")


def affine_square_factor(phi):
    """int over the unit square centered at 0 of |s cos(phi) + t sin(phi)|."""
    sq = geometry.square_vertices((0.0, 0.0), 1.0, 0.0)
    return _affine_abs_integral(sq, 0.0, math.cos(phi), math.sin(phi))

"""Monotone building blocks of 1D models and their exact calculus.

Every 1D model is reduced to ``offset + sum(components)`` where each
component is globally monotone with a fixed sign (a Jordan decomposition of
the derivative measure).  Each component knows its value, an exact
antiderivative, and the intervals on which it varies.  Mollification acts
component-wise and preserves the sign, which is what lets oscillation
integrals locate level crossings by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial import polynomial as npoly

from bmotv import kernels
from bmotv.mollifier import Mollifier

_GL_X, _GL_W = legendre.leggauss(6)


def _horner_rows(coefs, x):
    """Evaluate row-wise ascending polynomials ``coefs[i]`` at ``x[i]``."""
    out = np.zeros_like(x)
    for k in range(coefs.shape[-1] - 1, -1, -1):
        out = out * x + coefs[..., k]
    return out


class Component:
    sign: int = 0

    def value(self, x, side=1):
        raise NotImplementedError

    def primitive(self, x):
        raise NotImplementedError

    def supports(self):
        """Closed intervals ``(lo, hi)`` outside which the component is constant."""
        raise NotImplementedError

    def cover(self, resolution):
        return self.supports()

    def points(self):
        """Locations of discontinuities."""
        return []

    def mollified(self, delta, kernel):
        raise NotImplementedError


class PolyPart(Component):
    """Continuous monotone piecewise polynomial, constant outside its breaks."""

    def __init__(self, breaks, coefs, sign, active):
        self.breaks = np.asarray(breaks, dtype=float)
        self.coefs = np.asarray(coefs, dtype=float)
        self.sign = sign
        self.active = np.asarray(active, dtype=bool)
        anti = np.zeros((self.coefs.shape[0], self.coefs.shape[1] + 1))
        anti[:, 1:] = self.coefs / np.arange(1, self.coefs.shape[1] + 1)
        self.anti = anti
        lo, hi = self.breaks[:-1], self.breaks[1:]
        seg = _horner_rows(anti, hi) - _horner_rows(anti, lo)
        self.cum = np.concatenate([[0.0], np.cumsum(seg)])
        self.left_value = float(npoly.polyval(self.breaks[0], self.coefs[0]))
        self.right_value = float(npoly.polyval(self.breaks[-1], self.coefs[-1]))

    def _index(self, x):
        return np.clip(np.searchsorted(self.breaks, x, side="right") - 1, 0, len(self.breaks) - 2)

    def value(self, x, side=1):
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, self.breaks[0], self.breaks[-1])
        i = self._index(xc)
        return _horner_rows(self.coefs[i], xc)

    def primitive(self, x):
        x = np.asarray(x, dtype=float)
        b0, b1 = self.breaks[0], self.breaks[-1]
        xc = np.clip(x, b0, b1)
        i = self._index(xc)
        inner = self.cum[i] + _horner_rows(self.anti[i], xc) - _horner_rows(self.anti[i], self.breaks[i])
        return inner + self.left_value * np.minimum(x - b0, 0.0) + self.right_value * np.maximum(x - b1, 0.0)

    def supports(self):
        return [(float(u), float(v)) for u, v, a in zip(self.breaks[:-1], self.breaks[1:], self.active) if a]

    def mollified(self, delta, kernel):
        return MollifiedPoly(self, delta, kernel)


class Step(Component):
    """``height * 1[x > at]``; ``side`` selects the one-sided limit at ``at``."""

    def __init__(self, at, height):
        self.at = float(at)
        self.height = float(height)
        self.sign = 1 if height > 0 else -1

    def value(self, x, side=1):
        x = np.asarray(x, dtype=float)
        hit = x >= self.at if side > 0 else x > self.at
        return np.where(hit, self.height, 0.0)

    def primitive(self, x):
        return self.height * np.maximum(np.asarray(x, dtype=float) - self.at, 0.0)

    def supports(self):
        return [(self.at, self.at)]

    def points(self):
        return [self.at]

    def mollified(self, delta, kernel):
        return MollifiedStep(self, delta, kernel)


class Stair(Component):
    """``rise * C((x - lo)/(hi - lo))`` for a middle-ratio Cantor staircase C."""

    def __init__(self, lo, hi, rise, ratio, depth):
        self.lo = float(lo)
        self.hi = float(hi)
        self.rise = float(rise)
        self.side_ratio = (1.0 - ratio) / 2.0
        self.depth = int(depth)
        self.sign = 1 if rise > 0 else -1

    @property
    def length(self):
        return self.hi - self.lo

    def value(self, x, side=1):
        w = (np.asarray(x, dtype=float) - self.lo) / self.length
        return self.rise * kernels.cantor_eval(w, self.side_ratio, self.depth)

    def primitive(self, x):
        w = (np.asarray(x, dtype=float) - self.lo) / self.length
        return self.rise * self.length * kernels.cantor_primitive(w, self.side_ratio, self.depth)

    def supports(self):
        return [(self.lo, self.hi)]

    def cover(self, resolution, max_pieces=1 << 14):
        """Generation intervals covering the staircase's support, at least as
        fine as ``resolution`` where affordable."""
        r = self.side_ratio
        g = 0
        while g < self.depth and self.length * r**g > resolution and (2 << g) <= max_pieces:
            g += 1
        lefts = np.zeros(1)
        size = 1.0
        for _ in range(g):
            child = size * r
            lefts = np.concatenate([lefts, lefts + size - child])
            size = child
        lefts.sort()
        lo = self.lo + self.length * lefts
        return list(zip(lo.tolist(), (lo + self.length * size).tolist()))

    def mollified(self, delta, kernel):
        return MollifiedStair(self, delta, kernel)


class MollifiedStep(Component):
    def __init__(self, base: Step, delta, kernel: Mollifier):
        self.base = base
        self.delta = float(delta)
        self.kernel = kernel
        self.sign = base.sign

    def value(self, x, side=1):
        return self.base.height * self.kernel.step((np.asarray(x, dtype=float) - self.base.at) / self.delta)

    def primitive(self, x):
        z = (np.asarray(x, dtype=float) - self.base.at) / self.delta
        return self.base.height * self.delta * self.kernel.ramp(z)

    def supports(self):
        return [(self.base.at - self.delta, self.base.at + self.delta)]


class MollifiedPoly(Component):
    """Convolution of a :class:`PolyPart` with a scaled polynomial kernel.

    On each polynomial segment the integrand is a polynomial of degree at
    most 10, so six-point Gauss-Legendre is exact.
    """

    def __init__(self, base: PolyPart, delta, kernel: Mollifier):
        self.base = base
        self.delta = float(delta)
        self.kernel = kernel
        self.sign = base.sign
        b = base.breaks
        self._lo = np.concatenate([[-np.inf], b])
        self._hi = np.concatenate([b, [np.inf]])
        ncoef = base.coefs.shape[1]
        rows = np.zeros((len(b) + 1, ncoef))
        rows[0, 0] = base.left_value
        rows[1:-1] = base.coefs
        rows[-1, 0] = base.right_value
        self._val_rows = rows
        # antiderivative rows, continuous and linear outside the breaks
        arows = np.zeros((len(b) + 1, ncoef + 1))
        arows[1:-1] = base.anti
        arows[1:-1, 0] += base.cum[:-1] - _horner_rows(base.anti, b[:-1])
        arows[0, 0] = -base.left_value * b[0]
        arows[0, 1] = base.left_value
        arows[-1, 0] = base.cum[-1] - base.right_value * b[-1]
        arows[-1, 1] = base.right_value
        self._prim_rows = arows

    def _convolve(self, x, rows):
        x = np.asarray(x, dtype=float)
        shape = x.shape
        x = x.ravel()
        d = self.delta
        first = np.searchsorted(self._hi, x - d, side="right")
        last = np.searchsorted(self._lo, x + d, side="left") - 1
        out = np.zeros_like(x)
        span = int(np.max(last - first)) + 1 if x.size else 0
        for k in range(span):
            seg = first + k
            ok = seg <= last
            if not ok.any():
                continue
            xs = x[ok]
            s = seg[ok]
            a = np.maximum(self._lo[s], xs - d)
            b = np.minimum(self._hi[s], xs + d)
            mid = 0.5 * (a + b)
            half = 0.5 * (b - a)
            acc = np.zeros_like(xs)
            for node, weight in zip(_GL_X, _GL_W):
                t = mid + half * node
                acc += weight * _horner_rows(rows[s], t) * self.kernel.density((xs - t) / d)
            out[ok] += acc * half / d
        return out.reshape(shape)

    def value(self, x, side=1):
        return self._convolve(x, self._val_rows)

    def primitive(self, x):
        return self._convolve(x, self._prim_rows)

    def supports(self):
        return [(u - self.delta, v + self.delta) for u, v in self.base.supports()]


class MollifiedStair(Component):
    """Convolution of a Cantor staircase with a scaled polynomial kernel,
    integrated exactly against the (truncated) Cantor measure."""

    def __init__(self, base: Stair, delta, kernel: Mollifier):
        self.base = base
        self.delta = float(delta)
        self.kernel = kernel
        self.sign = base.sign
        self._d = self.delta / base.length

    def _norm(self, x):
        return (np.asarray(x, dtype=float) - self.base.lo) / self.base.length

    def value(self, x, side=1):
        w = self._norm(x)
        d = self._d
        r, depth = self.base.side_ratio, self.base.depth
        below = kernels.cantor_eval(w - d, r, depth)
        win = kernels.cantor_window(w - d, w + d, w, d, self.kernel.cdf, r, depth)
        return self.base.rise * (below + win)

    def primitive(self, x):
        w = self._norm(x)
        d = self._d
        r, depth = self.base.side_ratio, self.base.depth
        y = w - d
        # int_{[0, y]} (w - s) dmu = (w - y) C(y) + int_0^y C
        below = (w - y) * kernels.cantor_eval(y, r, depth) + kernels.cantor_primitive(y, r, depth)
        win = kernels.cantor_window(w - d, w + d, w, d, self.kernel.cdf_integral, r, depth)
        return self.base.rise * self.base.length * (below + d * win)

    def supports(self):
        return [(self.base.lo - self.delta, self.base.hi + self.delta)]

    def cover(self, resolution):
        return [(u - self.delta, v + self.delta) for u, v in self.base.cover(resolution)]


def jordan_parts(pieces):
    """Split continuous piecewise polynomials into nondecreasing and
    nonincreasing :class:`PolyPart` s, both vanishing at the left end.

    ``pieces`` is a list of ``(lo, hi, coeffs)`` with ascending coefficients.
    Returns ``(start_value, up, down)``.
    """
    breaks = []
    rows = []
    for lo, hi, coeffs in pieces:
        c = np.asarray(coeffs, dtype=float)
        dc = npoly.polyder(c) if c.size > 1 else np.zeros(1)
        cuts = [lo, hi]
        if dc.size > 1 and np.any(dc[1:] != 0.0):
            for root in np.roots(dc[::-1]):
                if abs(root.imag) < 1e-14 and lo < root.real < hi:
                    cuts.append(float(root.real))
        cuts = sorted(set(cuts))
        for u, v in zip(cuts[:-1], cuts[1:]):
            breaks.append((u, v))
            rows.append(c)
    if not breaks:
        return 0.0, None, None
    width = max(len(r) for r in rows)
    start = float(npoly.polyval(breaks[0][0], rows[0]))
    bpts = [breaks[0][0]] + [v for _, v in breaks]
    up_rows, down_rows, up_act, down_act = [], [], [], []
    up_acc = down_acc = 0.0
    for (u, v), c in zip(breaks, rows):
        pu = float(npoly.polyval(u, c))
        pv = float(npoly.polyval(v, c))
        shifted = np.zeros(width)
        shifted[: len(c)] = c
        const = np.zeros(width)
        if pv > pu:
            row = shifted.copy()
            row[0] += up_acc - pu
            up_rows.append(row)
            up_act.append(True)
            const[0] = down_acc
            down_rows.append(const)
            down_act.append(False)
            up_acc += pv - pu
        elif pv < pu:
            row = shifted.copy()
            row[0] += down_acc - pu
            down_rows.append(row)
            down_act.append(True)
            const[0] = up_acc
            up_rows.append(const)
            up_act.append(False)
            down_acc += pv - pu
        else:
            c1 = np.zeros(width)
            c1[0] = up_acc
            c2 = np.zeros(width)
            c2[0] = down_acc
            up_rows.append(c1)
            down_rows.append(c2)
            up_act.append(False)
            down_act.append(False)
    up = PolyPart(bpts, up_rows, 1, up_act) if any(up_act) else None
    down = PolyPart(bpts, down_rows, -1, down_act) if any(down_act) else None
    return start, up, down


@dataclass
class Profile:
    """``offset + sum(component values)`` on the interval ``(a, b)``."""

    a: float
    b: float
    offset: float
    components: list

    def __post_init__(self):
        self._build_structure()

    # values -------------------------------------------------------------
    def value(self, x, side=1):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self.offset)
        for comp in self.components:
            out = out + comp.value(x, side)
        return out

    def primitive(self, x):
        x = np.asarray(x, dtype=float)
        out = self.offset * x
        for comp in self.components:
            out = out + comp.primitive(x)
        return out

    def jump_points(self):
        pts = []
        for comp in self.components:
            pts.extend(comp.points())
        return np.unique(np.asarray(pts, dtype=float))

    def mollified(self, delta, kernel, a=None, b=None):
        comps = [c.mollified(delta, kernel) for c in self.components]
        return Profile(self.a if a is None else a, self.b if b is None else b, self.offset, comps)

    # monotone structure -------------------------------------------------
    def _build_structure(self):
        pts = {self.a, self.b}
        for comp in self.components:
            for u, v in comp.supports():
                pts.add(u)
                pts.add(v)
        bp = np.array(sorted(pts))
        self.breaks = bp
        m = len(bp)
        # open elementary intervals (bp[i], bp[i+1]) and the points bp[i]
        seg_pos = np.zeros(m - 1, dtype=bool)
        seg_neg = np.zeros(m - 1, dtype=bool)
        pt_pos = np.zeros(m, dtype=bool)
        pt_neg = np.zeros(m, dtype=bool)
        for comp in self.components:
            for u, v in comp.supports():
                if u == v:
                    i = np.searchsorted(bp, u)
                    (pt_pos if comp.sign > 0 else pt_neg)[i] = True
                else:
                    i = np.searchsorted(bp, u)
                    j = np.searchsorted(bp, v)
                    (seg_pos if comp.sign > 0 else seg_neg)[i:j] = True
        self.seg_pos, self.seg_neg = seg_pos, seg_neg
        self.pt_pos, self.pt_neg = pt_pos, pt_neg
        self._cs = {
            "seg_pos": np.concatenate([[0], np.cumsum(seg_pos)]),
            "seg_neg": np.concatenate([[0], np.cumsum(seg_neg)]),
            "pt_pos": np.concatenate([[0], np.cumsum(pt_pos)]),
            "pt_neg": np.concatenate([[0], np.cumsum(pt_neg)]),
        }

    def monotone_sign(self, s, e):
        """Per-interval monotonicity of f on (s, e): +1 nondecreasing,
        -1 nonincreasing, 0 constant, 2 mixed."""
        s = np.asarray(s, dtype=float)
        e = np.asarray(e, dtype=float)
        bp = self.breaks
        # elementary open intervals meeting (s, e): indices [i0, i1)
        i0 = np.clip(np.searchsorted(bp, s, side="right") - 1, 0, len(bp) - 1)
        i1 = np.clip(np.searchsorted(bp, e, side="left"), 0, len(bp) - 1)
        i1 = np.maximum(i1, i0)
        # points strictly inside (s, e): indices [p0, p1)
        p0 = np.searchsorted(bp, s, side="right")
        p1 = np.searchsorted(bp, e, side="left")
        p1 = np.maximum(p1, p0)
        cs = self._cs
        pos = (cs["seg_pos"][i1] - cs["seg_pos"][i0]) + (cs["pt_pos"][p1] - cs["pt_pos"][p0])
        neg = (cs["seg_neg"][i1] - cs["seg_neg"][i0]) + (cs["pt_neg"][p1] - cs["pt_neg"][p0])
        out = np.where(pos > 0, np.where(neg > 0, 2, 1), np.where(neg > 0, -1, 0))
        return out

    def segments(self, s, e):
        """Split (s, e) at breakpoints; yields ``(u, v, sign)``."""
        bp = self.breaks
        inner = bp[(bp > s) & (bp < e)]
        cuts = np.concatenate([[s], inner, [e]])
        for u, v in zip(cuts[:-1], cuts[1:]):
            yield float(u), float(v), int(self.monotone_sign(np.array([u]), np.array([v]))[0])

    def active_cover(self, resolution):
        """Sorted, merged intervals outside which f is locally constant."""
        ivs = []
        for comp in self.components:
            ivs.extend(comp.cover(resolution))
        if not ivs:
            return []
        ivs.sort()
        merged = [list(ivs[0])]
        for u, v in ivs[1:]:
            if u <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], v)
            else:
                merged.append([u, v])
        return [(u, v) for u, v in merged]

    def bounds(self, u, v):
        """Lower and upper bounds of f on (u, v) from component monotonicity."""
        lo = hi = self.offset
        for comp in self.components:
            gu = float(comp.value(np.array([u]), 1)[0])
            gv = float(comp.value(np.array([v]), -1)[0])
            lo += min(gu, gv)
            hi += max(gu, gv)
        return lo, hi

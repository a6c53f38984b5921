"""Lower estimates of the cube-packing functional kappa_eps.

1D: a shift lattice of candidate intervals (plus one interval centered on
each jump) is scored exactly and the best disjoint subfamily is found by
weighted interval scheduling.  2D: shifted rotated grids and a greedy
packing of boundary-band candidates; both give valid disjoint families, so
their maximum is a certified lower estimate.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from bmotv import geometry, kernels
from bmotv.osc import DEFAULT_TOL, Cube, affine_square_factor, mean_oscillation_2d, oscillations_1d

DEFAULT_M = 64
DEFAULT_ANGLES = 16
DEFAULT_SHIFTS = 4
BRUTE_FORCE_LIMIT = 22
# touching open cubes are disjoint; this absorbs rounding in lattice starts
TOUCH_SLACK = 1e-12


@dataclass(frozen=True)
class Candidate:
    cube: Cube
    value: float
    index: int  # lattice index; -1 for injected jump-centered cubes


@dataclass
class CandidateSet:
    """Array form of a 1D candidate list, sorted by start."""

    starts: np.ndarray
    values: np.ndarray
    index: np.ndarray
    eps: float

    def __len__(self):
        return len(self.starts)

    def __getitem__(self, i):
        s = float(self.starts[i])
        return Candidate(Cube(s + 0.5 * self.eps, self.eps), float(self.values[i]), int(self.index[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))


@dataclass
class CubeFamily:
    cubes: list = field(default_factory=list)
    values: list = field(default_factory=list)
    weight: float = 1.0  # eps^(n-1)

    @property
    def total(self):
        s = 0.0
        for v in self.values:
            s += v
        return self.weight * s

    def __len__(self):
        return len(self.cubes)

    def to_json(self):
        return [c.to_json(v) for c, v in zip(self.cubes, self.values)]

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)
            fh.write("\n")

    def is_disjoint(self, slack=TOUCH_SLACK):
        if not self.cubes:
            return True
        if np.ndim(self.cubes[0].center) == 0:
            iv = sorted((c.lo, c.hi) for c in self.cubes)
            return all(p[1] <= q[0] + slack * (1 + abs(q[0])) for p, q in zip(iv[:-1], iv[1:]))
        verts = [c.vertices() for c in self.cubes]
        for i, j in itertools.combinations(range(len(verts)), 2):
            if geometry.squares_overlap(verts[i], verts[j], slack):
                return False
        return True


@dataclass
class KappaEstimate:
    eps: float
    value: float
    family: CubeFamily
    m: int
    tol: float
    angles: int = 1
    n_candidates: int = 0
    strategy: str = "dp"

    @property
    def size(self):
        return len(self.family)

    @property
    def error_bound(self):
        """Bound on how far ``value`` may exceed the true kappa_eps."""
        return self.size * self.family.weight * self.tol


# -------------------------------------------------------------------------
# 1D


def _lattice_indices(prof, a, b, eps, m):
    """Lattice indices j (start a + j*eps/m) of intervals that meet the set
    where f varies; all other intervals have zero oscillation."""
    step = eps / m
    jmax = int(math.floor((b - a - eps) / step * (1 + 1e-14) + 1e-9))
    cover = prof.active_cover(eps / m)
    if not cover:
        return np.zeros(0, dtype=np.int64), jmax
    u = np.array([c[0] for c in cover])
    v = np.array([c[1] for c in cover])
    lo = np.maximum(np.floor((u - eps - a) / step).astype(np.int64), 0)
    hi = np.minimum(np.ceil((v - a) / step).astype(np.int64), jmax)
    keep = hi >= lo
    lo, hi = lo[keep], hi[keep]
    if lo.size == 0:
        return np.zeros(0, dtype=np.int64), jmax
    # union of integer ranges [lo, hi]
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], np.maximum.accumulate(hi[order])
    new = np.concatenate([[True], lo[1:] > hi[:-1] + 1])
    starts = lo[new]
    ends = np.concatenate([hi[np.flatnonzero(new)[1:] - 1], [hi[-1]]])
    counts = ends - starts + 1
    offs = np.repeat(starts - np.concatenate([[0], np.cumsum(counts)[:-1]]), counts)
    return np.arange(int(counts.sum()), dtype=np.int64) + offs, jmax


def generate_candidates_1d(f, eps, m=DEFAULT_M, domain=None, drop_zero=False) -> CandidateSet:
    """Lattice candidates with starts ``a + j*eps/m`` plus one candidate
    centered on each jump (clamped into the domain).

    With ``drop_zero`` the lattice is restricted to intervals on which f is
    not constant, which leaves the packing optimum unchanged.
    """
    dom = f.domain if domain is None else domain
    a, b = dom.a, dom.b
    if not 0 < eps < b - a:
        raise ValueError(f"eps={eps} must lie in (0, {b - a})")
    if m < 1:
        raise ValueError("lattice resolution m must be positive")
    prof = f.profile
    if drop_zero:
        idx, jmax = _lattice_indices(prof, a, b, eps, m)
    else:
        jmax = int(math.floor((b - a - eps) / (eps / m) * (1 + 1e-14) + 1e-9))
        idx = np.arange(jmax + 1, dtype=np.int64)
    starts = np.minimum(a + idx * eps / m, b - eps)
    jumps = prof.jump_points()
    jumps = jumps[(jumps > a) & (jumps < b)]
    js = np.clip(jumps - 0.5 * eps, a, b - eps)
    all_starts = np.concatenate([starts, js])
    all_index = np.concatenate([idx, np.full(js.size, -1, dtype=np.int64)])
    order = np.lexsort((all_index, all_starts))
    all_starts, all_index = all_starts[order], all_index[order]
    values = oscillations_1d(prof, all_starts, eps)
    if drop_zero:
        keep = values > 0
        all_starts, all_index, values = all_starts[keep], all_index[keep], values[keep]
    return CandidateSet(all_starts, values, all_index, float(eps))


def max_disjoint_sum(candidates: CandidateSet, eps=None) -> CubeFamily:
    """Maximum-weight family of pairwise disjoint intervals among the
    candidates (sorted by start); ties prefer fewer intervals, then the
    leftmost choice."""
    eps = candidates.eps if eps is None else eps
    starts = np.asarray(candidates.starts, dtype=float)
    if starts.size and np.any(np.diff(starts) < 0):
        raise ValueError("candidates must be sorted by start")
    slack = TOUCH_SLACK * (1.0 + float(np.max(np.abs(starts)))) if starts.size else 0.0
    _, chosen = kernels.max_disjoint_sum(starts, np.asarray(candidates.values, dtype=float), float(eps), slack)
    fam = CubeFamily(weight=1.0)
    for i in chosen:
        s = float(starts[i])
        fam.cubes.append(Cube(s + 0.5 * eps, eps))
        fam.values.append(float(candidates.values[i]))
    return fam


def kappa_1d(f, eps, m=DEFAULT_M, tol=DEFAULT_TOL, domain=None) -> KappaEstimate:
    """Lower estimate of kappa_eps(f, domain) on the shift lattice of
    resolution ``m``."""
    cands = generate_candidates_1d(f, eps, m, domain, drop_zero=True)
    fam = max_disjoint_sum(cands, eps)
    return KappaEstimate(float(eps), fam.total, fam, int(m), float(tol), 1, len(cands), "dp")


def brute_force_kappa_1d(candidates: CandidateSet, eps=None) -> float:
    """Exhaustive maximum over disjoint subfamilies (at most 22 candidates);
    sums accumulate left to right like :func:`max_disjoint_sum`."""
    eps = candidates.eps if eps is None else eps
    n = len(candidates)
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LIMIT} candidates, got {n}")
    if n == 0:
        return 0.0
    s = np.asarray(candidates.starts, dtype=float)
    v = np.asarray(candidates.values, dtype=float)
    slack = TOUCH_SLACK * (1.0 + float(np.max(np.abs(s))))
    conflict = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i != j and s[i] < s[j] + eps - slack and s[j] < s[i] + eps - slack:
                conflict[i] |= 1 << j
    # grow the list of conflict-free subsets one candidate at a time, so each
    # subset sum is accumulated in index order
    masks = np.zeros(1, dtype=np.int64)
    total = np.zeros(1)
    for i in range(n):
        ok = (masks & conflict[i]) == 0
        masks = np.concatenate([masks, masks[ok] | (1 << i)])
        total = np.concatenate([total, total[ok] + v[i]])
    return float(np.max(total))


# -------------------------------------------------------------------------
# 2D


def _affine_factor_table(angles):
    return {float(t): affine_square_factor(t) for t in np.unique(angles)}


def _oscillations_2d(f, centers, side, angles, tol=DEFAULT_TOL, threads=1):
    """Mean oscillations of rotated squares, exact on cubes cut by at most
    one region boundary when the affine part vanishes or no boundary cuts
    the cube; other cubes fall back to adaptive subdivision."""
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    angles = np.broadcast_to(np.asarray(angles, dtype=float), centers.shape[:1])
    n = len(centers)
    out = np.zeros(n)
    if n == 0:
        return out
    a0, gx, gy = f.affine
    grad = math.hypot(gx, gy)
    verts = geometry.squares_vertices(centers, side, angles)
    area = side * side
    cut = np.zeros(n, dtype=np.int64)
    frac = np.zeros(n)
    height = np.zeros(n)
    reach = side * math.sqrt(0.5)
    for reg in f.regions:
        if reg.shape == "disk":
            dist = np.abs(np.hypot(centers[:, 0] - reg.center[0], centers[:, 1] - reg.center[1]) - reg.radius)
        else:
            dist = geometry.dist_to_polygon_boundary(centers, np.asarray(reg.vertices))
        near = np.flatnonzero(dist < reach)
        if near.size == 0:
            continue
        if reg.shape == "disk":
            a_in = geometry.polygons_disk_area(verts[near], reg.center, reg.radius)
        else:
            a_in = np.array([reg.area_in(verts[i]) for i in near])
        t = a_in / area
        is_cut = (t > 1e-15) & (t < 1 - 1e-15)
        idx = near[is_cut]
        cut[idx] += 1
        frac[idx] = t[is_cut]
        height[idx] = reg.height
    clean = cut == 0
    if grad > 0 and clean.any():
        phi = math.atan2(gy, gx)
        table = _affine_factor_table(angles[clean] - phi)
        fac = np.array([table[float(t)] for t in angles[clean] - phi])
        out[clean] = grad * side * fac
    simple = cut == 1
    if grad == 0:
        out[simple] = np.abs(height[simple]) * 2.0 * frac[simple] * (1.0 - frac[simple])
        slow = np.flatnonzero(cut > 1)
    else:
        slow = np.flatnonzero(cut >= 1)
    if slow.size:
        cubes = [Cube(tuple(centers[i]), side, float(angles[i])) for i in slow]
        fn = lambda q: mean_oscillation_2d(f, q, tol).value  # noqa: E731
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                vals = list(pool.map(fn, cubes))
        else:
            vals = [fn(q) for q in cubes]
        out[slow] = vals
    return out


def _grid(domain, eps, angle, shift):
    """Centers of the rotated eps-grid with offset ``shift`` (grid units)
    whose squares lie inside the box."""
    (x0, x1), (y0, y1) = domain.bounds
    c, s = math.cos(angle), math.sin(angle)
    corners = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]]) - np.array([x0, y0])
    # grid coordinates u = R^T p
    u = corners @ np.array([[c, -s], [s, c]])
    i0 = int(math.floor(u[:, 0].min() / eps)) - 1
    i1 = int(math.ceil(u[:, 0].max() / eps)) + 1
    j0 = int(math.floor(u[:, 1].min() / eps)) - 1
    j1 = int(math.ceil(u[:, 1].max() / eps)) + 1
    ii, jj = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1), indexing="ij")
    gu = (ii.ravel() + 0.5 + shift[0]) * eps
    gv = (jj.ravel() + 0.5 + shift[1]) * eps
    centers = np.stack([c * gu - s * gv + x0, s * gu + c * gv + y0], axis=1)
    # cheap prefilter on the circumscribed disk, then exact containment
    r = eps * math.sqrt(0.5)
    pre = (centers[:, 0] > x0 - r) & (centers[:, 0] < x1 + r) & (centers[:, 1] > y0 - r) & (centers[:, 1] < y1 + r)
    centers = centers[pre]
    verts = geometry.squares_vertices(centers, eps, np.full(len(centers), angle))
    ok = geometry.inside_box(verts, domain.bounds, TOUCH_SLACK)
    return centers[ok]


def _boundary_param(f, centers):
    """(region index, arclength) of the nearest region boundary point."""
    best = np.full(len(centers), np.inf)
    reg_idx = np.zeros(len(centers), dtype=np.int64)
    arc = np.zeros(len(centers))
    for k, reg in enumerate(f.regions):
        if reg.shape == "disk":
            dx = centers[:, 0] - reg.center[0]
            dy = centers[:, 1] - reg.center[1]
            dist = np.abs(np.hypot(dx, dy) - reg.radius)
            t = np.mod(np.arctan2(dy, dx), 2 * math.pi) * reg.radius
        else:
            v = np.asarray(reg.vertices)
            dist = np.full(len(centers), np.inf)
            t = np.zeros(len(centers))
            acc = 0.0
            for i in range(len(v)):
                p, q = v[i], v[(i + 1) % len(v)]
                e = q - p
                L = float(np.hypot(*e))
                s = np.clip(((centers - p) @ e) / (L * L), 0.0, 1.0)
                d = np.linalg.norm(centers - (p + s[:, None] * e), axis=1)
                better = d < dist
                dist = np.where(better, d, dist)
                t = np.where(better, acc + s * L, t)
                acc += L
        take = dist < best
        best = np.where(take, dist, best)
        reg_idx = np.where(take, k, reg_idx)
        arc = np.where(take, t, arc)
    return reg_idx, arc


def _tangent_angle(f, centers, reg_idx):
    out = np.zeros(len(centers))
    for k, reg in enumerate(f.regions):
        sel = reg_idx == k
        if not sel.any():
            continue
        if reg.shape == "disk":
            out[sel] = np.arctan2(centers[sel, 1] - reg.center[1], centers[sel, 0] - reg.center[0])
        else:
            v = np.asarray(reg.vertices)
            d = geometry.dist_to_polygon_boundary(centers[sel], v)
            ang = np.zeros(int(sel.sum()))
            for i in range(len(v)):
                e = v[(i + 1) % len(v)] - v[i]
                de = geometry.dist_to_polygon_boundary(centers[sel], np.array([v[i], v[(i + 1) % len(v)]]))
                ang = np.where(np.isclose(de, d), math.atan2(e[1], e[0]), ang)
            out[sel] = ang
    return out


class _Packer:
    """Disjointness bookkeeping for accepted rotated squares (spatial hash)."""

    def __init__(self, side):
        self.side = side
        self.cell = side * math.sqrt(2.0)
        self.grid = {}
        self.verts = []
        self.centers = []

    def _key(self, p):
        return (int(math.floor(p[0] / self.cell)), int(math.floor(p[1] / self.cell)))

    def fits(self, center, verts):
        kx, ky = self._key(center)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for k in self.grid.get((kx + dx, ky + dy), ()):
                    c = self.centers[k]
                    d = math.hypot(center[0] - c[0], center[1] - c[1])
                    if d >= self.cell:
                        continue
                    if d < self.side * (1 - 1e-12):
                        return False
                    if geometry.squares_overlap(verts, self.verts[k], TOUCH_SLACK * self.side):
                        return False
        return True

    def add(self, center, verts):
        self.grid.setdefault(self._key(center), []).append(len(self.centers))
        self.centers.append(center)
        self.verts.append(verts)


def _band_candidates(f, domain, eps, angles, density):
    """Lattice centers (spacing eps/density) whose squares can meet a region
    boundary, crossed with every sampled angle."""
    if not f.regions:
        return np.zeros((0, 2)), np.zeros(0)
    (x0, x1), (y0, y1) = domain.bounds
    h = eps / density
    reach = eps * math.sqrt(0.5)
    pts = []
    for reg in f.regions:
        bx0, bx1, by0, by1 = reg.bbox()
        xs = np.arange(math.floor((bx0 - reach - x0) / h), math.ceil((bx1 + reach - x0) / h) + 1) * h + x0
        ys = np.arange(math.floor((by0 - reach - y0) / h), math.ceil((by1 + reach - y0) / h) + 1) * h + y0
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        P = np.stack([X.ravel(), Y.ravel()], axis=1)
        if reg.shape == "disk":
            d = np.abs(np.hypot(P[:, 0] - reg.center[0], P[:, 1] - reg.center[1]) - reg.radius)
        else:
            d = geometry.dist_to_polygon_boundary(P, np.asarray(reg.vertices))
        pts.append(P[d < reach])
    P = np.unique(np.concatenate(pts), axis=0)
    C = np.repeat(P, len(angles), axis=0)
    A = np.tile(np.asarray(angles, dtype=float), len(P))
    verts = geometry.squares_vertices(C, eps, A)
    ok = geometry.inside_box(verts, domain.bounds, TOUCH_SLACK)
    return C[ok], A[ok]


def greedy_pack(f, centers, side, angles, values, order_keys=None, packer=None):
    """Accept squares in the given order (default: decreasing value) when
    disjoint from all previously accepted ones."""
    if order_keys is None:
        order = np.argsort(-values, kind="stable")
    else:
        order = np.lexsort(order_keys)
    packer = packer if packer is not None else _Packer(side)
    chosen = []
    verts = geometry.squares_vertices(centers, side, angles)
    for i in order:
        if values[i] <= 0:
            continue
        c = (float(centers[i, 0]), float(centers[i, 1]))
        if packer.fits(c, verts[i]):
            packer.add(c, verts[i])
            chosen.append(int(i))
    return chosen, packer


def kappa_2d(f, eps, shifts=DEFAULT_SHIFTS, angles=DEFAULT_ANGLES, tol=DEFAULT_TOL, domain=None, density=8, threads=1) -> KappaEstimate:
    """Certified lower estimate of kappa_eps for a 2D model: the better of
    the best shifted rotated grid and a greedy boundary-band packing."""
    dom = f.domain if domain is None else domain
    if f.dimension != 2:
        raise ValueError("kappa_2d needs a 2D model")
    if not 0 < eps < min(dom.sides):
        raise ValueError(f"eps={eps} too large for the domain")
    thetas = np.arange(angles) * (0.5 * math.pi / angles)
    weight = eps  # eps^(n-1), n = 2

    # (a) shifted rotated grids
    best_grid = (-1.0, None, None, 0.0)
    n_cand = 0
    for theta in thetas:
        for sx, sy in itertools.product(range(shifts), repeat=2):
            centers = _grid(dom, eps, theta, (sx / shifts, sy / shifts))
            vals = _oscillations_2d(f, centers, eps, theta, tol, threads)
            n_cand += len(centers)
            s = 0.0
            for v in vals:
                s += v
            if s > best_grid[0]:
                best_grid = (s, centers, vals, float(theta))
    gsum, gcent, gvals, gtheta = best_grid

    # (b) greedy: boundary band ordered by quantized value, then along the
    # boundary with the best-aligned angle first; then fill with grid cubes
    bc, ba = _band_candidates(f, dom, eps, thetas, density)
    chosen_c, chosen_a, chosen_v = [], [], []
    packer = None
    if len(bc):
        bv = _oscillations_2d(f, bc, eps, ba, tol, threads)
        n_cand += len(bc)
        vmax = float(bv.max()) if bv.size else 0.0
        if vmax > 0:
            bins = np.floor((vmax - bv) / (0.02 * vmax)).astype(np.int64)
            reg_idx, arc = _boundary_param(f, bc)
            tang = _tangent_angle(f, bc, reg_idx)
            mis = np.abs(np.mod(ba - tang + 0.25 * math.pi, 0.5 * math.pi) - 0.25 * math.pi)
            arc_q = np.round(arc / (1e-9 * eps)).astype(np.int64)
            chosen, packer = greedy_pack(f, bc, eps, ba, bv, order_keys=(mis, arc_q, reg_idx, bins))
            chosen_c = [tuple(bc[i]) for i in chosen]
            chosen_a = [float(ba[i]) for i in chosen]
            chosen_v = [float(bv[i]) for i in chosen]
    if gcent is not None and len(gcent):
        gangles = np.full(len(gcent), gtheta)
        if packer is None:
            packer = _Packer(eps)
        extra, packer = greedy_pack(f, gcent, eps, gangles, gvals, order_keys=(np.arange(len(gcent)),), packer=packer)
        chosen_c += [tuple(gcent[i]) for i in extra]
        chosen_a += [gtheta] * len(extra)
        chosen_v += [float(gvals[i]) for i in extra]
    gsum_greedy = 0.0
    for v in chosen_v:
        gsum_greedy += v

    if gsum_greedy > gsum:
        fam = CubeFamily([Cube(c, eps, a) for c, a in zip(chosen_c, chosen_a)], chosen_v, weight)
        strategy = "greedy"
    else:
        keep = np.flatnonzero(gvals > 0) if gvals is not None else []
        fam = CubeFamily([Cube(tuple(gcent[i]), eps, gtheta) for i in keep], [float(gvals[i]) for i in keep], weight)
        strategy = "grid"
    fam_total = max(gsum, gsum_greedy) * weight
    return KappaEstimate(float(eps), fam_total, fam, int(shifts), float(tol), int(angles), n_cand, strategy)


@dataclass(frozen=True)
class PackingParams:
    m: int = DEFAULT_M
    tol: float = DEFAULT_TOL
    angles: int = DEFAULT_ANGLES
    shifts: int = DEFAULT_SHIFTS
    threads: int = 1

    def __post_init__(self):
        if self.m < 1 or self.angles < 1 or self.shifts < 1 or self.threads < 1:
            raise ValueError("packing parameters m, angles, shifts, threads must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


def kappa(f, eps, params: PackingParams = PackingParams(), domain=None) -> KappaEstimate:
    """kappa_eps lower estimate in the model's dimension."""
    if f.dimension == 2:
        return kappa_2d(f, eps, params.shifts, params.angles, params.tol, domain, threads=params.threads)
    return kappa_1d(f, eps, params.m, params.tol, domain)

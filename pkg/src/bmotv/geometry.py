"""Planar geometry for rotated squares, convex polygons and disks.

Areas are exact (up to rounding): convex clipping for polygons and the
triangle-fan decomposition for polygon-disk intersections.
"""

import numpy as np


def cross(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def polygon_area(poly):
    poly = np.asarray(poly, dtype=float)
    if len(poly) < 3:
        return 0.0
    return 0.5 * float(np.sum(cross(poly, np.roll(poly, -1, axis=0))))


def polygon_moments(poly):
    """``(area, int x, int y)`` over a ccw polygon."""
    poly = np.asarray(poly, dtype=float)
    if len(poly) < 3:
        return 0.0, 0.0, 0.0
    p, q = poly, np.roll(poly, -1, axis=0)
    c = cross(p, q)
    area = 0.5 * np.sum(c)
    mx = np.sum((p[:, 0] + q[:, 0]) * c) / 6.0
    my = np.sum((p[:, 1] + q[:, 1]) * c) / 6.0
    return float(area), float(mx), float(my)


def ccw(poly):
    poly = np.asarray(poly, dtype=float)
    if polygon_area(poly) < 0:
        return poly[::-1].copy()
    return poly


def is_convex(poly):
    p = np.asarray(poly, dtype=float)
    e = np.roll(p, -1, axis=0) - p
    c = cross(e, np.roll(e, -1, axis=0))
    return bool(np.all(c >= -1e-14) or np.all(c <= 1e-14))


def square_vertices(center, side, angle):
    """Corners (ccw) of the square with given center, side and rotation."""
    cx, cy = center
    h = 0.5 * side
    c, s = np.cos(angle), np.sin(angle)
    local = np.array([[-h, -h], [h, -h], [h, h], [-h, h]])
    rot = np.array([[c, -s], [s, c]])
    return local @ rot.T + np.array([cx, cy])


def squares_vertices(centers, side, angles):
    """Vectorized :func:`square_vertices`: shape (n, 4, 2)."""
    centers = np.asarray(centers, dtype=float)
    angles = np.broadcast_to(np.asarray(angles, dtype=float), centers.shape[:1])
    h = 0.5 * side
    local = np.array([[-h, -h], [h, -h], [h, h], [-h, h]])
    c, s = np.cos(angles)[:, None], np.sin(angles)[:, None]
    x = local[None, :, 0] * c - local[None, :, 1] * s
    y = local[None, :, 0] * s + local[None, :, 1] * c
    return np.stack([x, y], axis=-1) + centers[:, None, :]


def clip_halfplane(poly, normal, offset):
    """Part of a convex polygon with ``normal . x <= offset``."""
    poly = np.asarray(poly, dtype=float)
    if len(poly) == 0:
        return poly
    d = poly @ np.asarray(normal, dtype=float) - offset
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        dp, dq = d[i], d[(i + 1) % n]
        if dp <= 0:
            out.append(p)
        if (dp < 0 < dq) or (dq < 0 < dp):
            t = dp / (dp - dq)
            out.append(p + t * (q - p))
    return np.array(out).reshape(-1, 2)


def clip_convex(subject, clipper):
    """Intersection of a polygon with a convex ccw ``clipper``."""
    out = np.asarray(subject, dtype=float)
    clipper = np.asarray(clipper, dtype=float)
    n = len(clipper)
    for i in range(n):
        a, b = clipper[i], clipper[(i + 1) % n]
        e = b - a
        normal = np.array([e[1], -e[0]])  # outward for ccw
        out = clip_halfplane(out, normal, float(normal @ a))
        if len(out) == 0:
            break
    return out


def points_in_convex(p, poly):
    p = np.asarray(p, dtype=float)
    poly = np.asarray(poly, dtype=float)
    inside = np.ones(p.shape[:-1], dtype=bool)
    for i in range(len(poly)):
        a, b = poly[i], poly[(i + 1) % len(poly)]
        inside &= cross(b - a, p - a) > 0
    return inside


def dist_to_polygon_boundary(p, poly):
    p = np.asarray(p, dtype=float)
    poly = np.asarray(poly, dtype=float)
    best = np.full(p.shape[:-1], np.inf)
    for i in range(len(poly)):
        a, b = poly[i], poly[(i + 1) % len(poly)]
        e = b - a
        t = np.clip(((p - a) @ e) / (e @ e), 0.0, 1.0)
        proj = a + t[..., None] * e
        best = np.minimum(best, np.linalg.norm(p - proj, axis=-1))
    return best


def _tri_disk(a, b, r):
    """Signed area of disk(0, r) intersected with triangle (0, a, b); vectorized."""
    def sector(u, v):
        return 0.5 * r * r * np.arctan2(cross(u, v), np.sum(u * v, axis=-1))

    d = b - a
    qa = np.sum(d * d, axis=-1)
    qb = 2.0 * np.sum(a * d, axis=-1)
    qc = np.sum(a * a, axis=-1) - r * r
    disc = qb * qb - 4.0 * qa * qc
    safe_qa = np.where(qa > 0, qa, 1.0)
    sq = np.sqrt(np.maximum(disc, 0.0))
    t1 = (-qb - sq) / (2.0 * safe_qa)
    t2 = (-qb + sq) / (2.0 * safe_qa)
    meets = (disc > 0) & (qa > 0) & (t2 > 0) & (t1 < 1)
    t1c = np.clip(t1, 0.0, 1.0)[..., None]
    t2c = np.clip(t2, 0.0, 1.0)[..., None]
    p1 = a + t1c * d
    p2 = a + t2c * d
    through = sector(a, p1) + 0.5 * cross(p1, p2) + sector(p2, b)
    return np.where(meets, through, sector(a, b))


def convex_disk_area(poly, center, radius):
    """Exact area of a polygon intersected with a disk."""
    poly = np.asarray(poly, dtype=float)
    return float(polygons_disk_area(poly[None], center, radius)[0])


def polygons_disk_area(polys, center, radius):
    """Vectorized over ``polys`` of shape (n, k, 2), ccw."""
    p = np.asarray(polys, dtype=float) - np.asarray(center, dtype=float)
    q = np.roll(p, -1, axis=1)
    return np.sum(_tri_disk(p, q, radius), axis=1)


def squares_overlap(a, b, tol=1e-12):
    """Whether two convex quadrilaterals have overlapping interiors (SAT)."""
    for poly in (a, b):
        e = np.roll(poly, -1, axis=0) - poly
        axes = np.stack([-e[:, 1], e[:, 0]], axis=1)
        for ax in axes[:2]:
            pa = a @ ax
            pb = b @ ax
            scale = np.linalg.norm(ax)
            if pa.max() <= pb.min() + tol * scale or pb.max() <= pa.min() + tol * scale:
                return False
    return True


def inside_box(polys, bounds, tol=1e-12):
    """Mask of polygons (n, k, 2) whose closures lie in the box."""
    (x0, x1), (y0, y1) = bounds
    xs = polys[..., 0]
    ys = polys[..., 1]
    return (xs.min(axis=1) >= x0 - tol) & (xs.max(axis=1) <= x1 + tol) & (ys.min(axis=1) >= y0 - tol) & (ys.max(axis=1) <= y1 + tol)


def _tri_disk_moments(a, b, r):
    """``(area, int x, int y)`` of disk(0, r) intersected with the signed
    triangle (0, a, b)."""

    def sector(u, v):
        t0 = np.arctan2(u[..., 1], u[..., 0])
        dt = np.arctan2(cross(u, v), np.sum(u * v, axis=-1))
        t1 = t0 + dt
        area = 0.5 * r * r * dt
        mx = r**3 / 3.0 * (np.sin(t1) - np.sin(t0))
        my = r**3 / 3.0 * (np.cos(t0) - np.cos(t1))
        return area, mx, my

    def tri(u, v):
        area = 0.5 * cross(u, v)
        return area, area * (u[..., 0] + v[..., 0]) / 3.0, area * (u[..., 1] + v[..., 1]) / 3.0

    d = b - a
    qa = np.sum(d * d, axis=-1)
    qb = 2.0 * np.sum(a * d, axis=-1)
    qc = np.sum(a * a, axis=-1) - r * r
    disc = qb * qb - 4.0 * qa * qc
    safe_qa = np.where(qa > 0, qa, 1.0)
    sq = np.sqrt(np.maximum(disc, 0.0))
    t1 = (-qb - sq) / (2.0 * safe_qa)
    t2 = (-qb + sq) / (2.0 * safe_qa)
    meets = (disc > 0) & (qa > 0) & (t2 > 0) & (t1 < 1)
    p1 = a + np.clip(t1, 0.0, 1.0)[..., None] * d
    p2 = a + np.clip(t2, 0.0, 1.0)[..., None] * d
    s1, s2, s3 = sector(a, p1), tri(p1, p2), sector(p2, b)
    s0 = sector(a, b)
    return tuple(np.where(meets, x1 + x2 + x3, x0) for x0, x1, x2, x3 in zip(s0, s1, s2, s3))


def convex_disk_moments(poly, center, radius):
    """``(area, int x, int y)`` of a polygon intersected with a disk."""
    c = np.asarray(center, dtype=float)
    p = np.asarray(poly, dtype=float) - c
    q = np.roll(p, -1, axis=0)
    area, mx, my = (float(np.sum(m)) for m in _tri_disk_moments(p, q, radius))
    return area, mx + c[0] * area, my + c[1] * area

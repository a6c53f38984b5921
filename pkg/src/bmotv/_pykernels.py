"""Pure numpy implementations of the hot kernels.

These are the reference versions; ``_ckernels`` (Cython) must agree with
them to rounding.  All Cantor routines work on the normalized staircase on
[0, 1] with side ratio ``r`` (each generation keeps two intervals of
relative length ``r``, 0 < r < 1/2) truncated at ``depth`` generations, below which the
measure is spread uniformly.  The truncated staircase is exactly the
generation-``depth`` piecewise-linear interpolant.
"""

from math import comb

import numpy as np


def cantor_moments(r, depth, degree):
    """Moment table ``mom[n, j]`` = int s^j dmu_n for the measure truncated
    ``n`` generations below an interval, in that interval's unit coordinates."""
    mom = np.zeros((depth + 1, degree + 1))
    mom[0] = 1.0 / np.arange(1, degree + 2)
    for n in range(1, depth + 1):
        prev = mom[n - 1]
        for j in range(degree + 1):
            right = sum(comb(j, i) * (1.0 - r) ** (j - i) * r**i * prev[i] for i in range(j + 1))
            mom[n, j] = 0.5 * r**j * prev[j] + 0.5 * right
    return mom


def cantor_eval(y, r, depth):
    y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0).copy()
    out = np.zeros_like(y)
    active = np.ones(y.shape, dtype=bool)
    scale = 1.0
    for _ in range(depth):
        left = active & (y <= r)
        right = active & (y >= 1.0 - r) & ~left
        mid = active & ~left & ~right
        out[mid | right] += 0.5 * scale
        y[left] /= r
        y[right] = (y[right] - (1.0 - r)) / r
        active &= ~mid
        scale *= 0.5
        if not active.any():
            break
    out[active] += scale * y[active]
    return out


def cantor_primitive(y, r, depth):
    """int_0^y C(s) ds for the truncated staircase; linear beyond 1."""
    y = np.asarray(y, dtype=float)
    over = np.maximum(y - 1.0, 0.0)
    y = np.clip(y, 0.0, 1.0).copy()
    out = np.zeros_like(y)
    mult = np.ones_like(y)
    active = np.ones(y.shape, dtype=bool)
    scale = 1.0
    # I(r) = r/4 by self-similarity and I(1) = 1/2
    i_r = r * 0.25
    for _ in range(depth):
        left = active & (y <= r)
        right = active & (y >= 1.0 - r) & ~left
        mid = active & ~left & ~right
        out[mid] += mult[mid] * scale * (i_r + 0.5 * (y[mid] - r))
        base = i_r + 0.5 * (1.0 - 2.0 * r)
        out[right] += mult[right] * scale * (base + 0.5 * (y[right] - (1.0 - r)))
        # the remaining self-similar term scales as r/2 relative to the parent
        mult[left | right] *= r
        y[left] /= r
        y[right] = (y[right] - (1.0 - r)) / r
        active &= ~mid
        scale *= 0.5
        if not active.any():
            break
    out[active] += mult[active] * scale * 0.5 * y[active] ** 2
    return out + over


def _poly_in_sigma(coefs, a, b):
    """Coefficients in sigma of P(a - b*sigma), vectorized over a, b."""
    deg = len(coefs) - 1
    out = np.zeros((deg + 1,) + np.shape(a))
    apow = [np.ones_like(a)]
    for _ in range(deg):
        apow.append(apow[-1] * a)
    mb = -b
    bpow = [np.ones_like(b)]
    for _ in range(deg):
        bpow.append(bpow[-1] * mb)
    for k, pk in enumerate(coefs):
        if pk == 0.0:
            continue
        for j in range(k + 1):
            out[j] += pk * comb(k, j) * apow[k - j] * bpow[j]
    return out


def _polyval(coefs, z):
    out = np.zeros_like(z)
    for c in coefs[::-1]:
        out = out * z + c
    return out


def cantor_window(lo, hi, w, d, coefs, r, depth):
    """int_{[lo, hi]} P((w - s)/d) dmu(s) for the truncated Cantor measure.

    ``coefs`` are ascending power coefficients of P.  The tree of generation
    intervals is walked level by level; at most two intervals per point
    straddle the window edges, and fully covered intervals are integrated
    through the moment table in local (well-conditioned) coordinates.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    w = np.asarray(w, dtype=float)
    d = np.asarray(d, dtype=float)
    lo, hi, w, d = np.broadcast_arrays(lo, hi, w, d)
    shape = lo.shape
    lo, hi, w, d = (a.ravel() for a in (lo, hi, w, d))
    n = lo.size
    coefs = np.asarray(coefs, dtype=float)
    deg = len(coefs) - 1
    mom = cantor_moments(r, depth, deg)
    anti = np.concatenate([[0.0], coefs / np.arange(1, deg + 2)])
    total = np.zeros(n)

    # frontier: (point index, left, length, mass)
    idx = np.arange(n)
    left = np.zeros(n)
    length = np.ones(n)
    mass = np.ones(n)
    for g in range(depth + 1):
        if idx.size == 0:
            break
        right_end = left + length
        plo = lo[idx]
        phi = hi[idx]
        keep = (right_end > plo) & (left < phi)
        idx, left, length, mass, right_end = idx[keep], left[keep], length[keep], mass[keep], right_end[keep]
        plo, phi = lo[idx], hi[idx]
        inside = (left >= plo) & (right_end <= phi)
        if g == depth:
            # uniform density on the remaining intervals
            s1 = np.maximum(left, plo)
            s2 = np.minimum(right_end, phi)
            dd = d[idx]
            ww = w[idx]
            val = (mass / length) * dd * (_polyval(anti, (ww - s1) / dd) - _polyval(anti, (ww - s2) / dd))
            np.add.at(total, idx, val)
            break
        if inside.any():
            ii = idx[inside]
            a = (w[ii] - left[inside]) / d[ii]
            b = length[inside] / d[ii]
            cs = _poly_in_sigma(coefs, a, b)
            val = mass[inside] * np.einsum("j...,j->...", cs, mom[depth - g])
            np.add.at(total, ii, val)
        strad = ~inside
        idx, left, length, mass = idx[strad], left[strad], length[strad], mass[strad]
        child = length * r
        idx = np.concatenate([idx, idx])
        left = np.concatenate([left, left + length - child])
        length = np.concatenate([child, child])
        mass = np.concatenate([mass, mass]) * 0.5
    return total.reshape(shape)


def max_disjoint_sum(starts, values, eps, slack):
    """Weighted interval scheduling over intervals (start, start + eps).

    Returns ``(best, chosen)`` with ``chosen`` the ascending indices of the
    optimal family.  Sums accumulate left to right; exact ties prefer fewer
    intervals, then the leftmost choice.
    """
    starts = np.asarray(starts, dtype=float)
    values = np.asarray(values, dtype=float)
    n = starts.size
    ends = starts + eps
    pred = np.searchsorted(ends, starts + slack, side="right")
    best = [0.0] * (n + 1)
    count = [0] * (n + 1)
    take = [False] * (n + 1)
    for j in range(1, n + 1):
        p = int(pred[j - 1])
        inc = best[p] + float(values[j - 1])
        inc_c = count[p] + 1
        exc = best[j - 1]
        exc_c = count[j - 1]
        if inc > exc or (inc == exc and inc_c < exc_c):
            best[j] = inc
            count[j] = inc_c
            take[j] = True
        else:
            best[j] = exc
            count[j] = exc_c
    chosen = []
    j = n
    while j > 0:
        if take[j]:
            chosen.append(j - 1)
            j = int(pred[j - 1])
        else:
            j -= 1
    chosen.reverse()
    return best[n], np.asarray(chosen, dtype=np.intp)

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fmax, fmin

cnp.import_array()

from bmotv._pykernels import cantor_moments


cdef inline double _clip01(double y) nogil:
    if y < 0.0:
        return 0.0
    if y > 1.0:
        return 1.0
    return y


cdef double _eval_one(double y, double r, int depth) nogil:
    cdef double out = 0.0, scale = 1.0
    cdef int k
    y = _clip01(y)
    for k in range(depth):
        if y <= r:
            y = y / r
        elif y >= 1.0 - r:
            out += 0.5 * scale
            y = (y - (1.0 - r)) / r
        else:
            return out + 0.5 * scale
        scale *= 0.5
    return out + scale * y


cdef double _prim_one(double y, double r, int depth) nogil:
    cdef double over = y - 1.0
    cdef double out = 0.0, mult = 1.0, scale = 1.0
    cdef double i_r = 0.25 * r
    cdef double base = i_r + 0.5 * (1.0 - 2.0 * r)
    cdef int k
    if over < 0.0:
        over = 0.0
    y = _clip01(y)
    for k in range(depth):
        if y <= r:
            mult *= r
            y = y / r
        elif y >= 1.0 - r:
            out += mult * scale * (base + 0.5 * (y - (1.0 - r)))
            mult *= r
            y = (y - (1.0 - r)) / r
        else:
            return out + mult * scale * (i_r + 0.5 * (y - r)) + over
        scale *= 0.5
    return out + mult * scale * 0.5 * y * y + over


def cantor_eval(y, double r, int depth):
    cdef cnp.ndarray[double, ndim=1] yy = np.ascontiguousarray(y, dtype=float).ravel()
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(yy)
    cdef Py_ssize_t i, n = yy.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _eval_one(yy[i], r, depth)
    return out.reshape(np.shape(y))


def cantor_primitive(y, double r, int depth):
    cdef cnp.ndarray[double, ndim=1] yy = np.ascontiguousarray(y, dtype=float).ravel()
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(yy)
    cdef Py_ssize_t i, n = yy.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _prim_one(yy[i], r, depth)
    return out.reshape(np.shape(y))


cdef double _moment_sum(const double[:] coefs, int deg, double a, double b,
                        double[:] mom, double[:, :] binom) nogil:
    # int P(a - b s) dnu(s) with nu given by its moments
    cdef double total = 0.0, apow, bpow, ck
    cdef int k, j
    cdef double ap[16]
    cdef double bp[16]
    ap[0] = 1.0
    bp[0] = 1.0
    for k in range(1, deg + 1):
        ap[k] = ap[k - 1] * a
        bp[k] = bp[k - 1] * (-b)
    for k in range(deg + 1):
        ck = coefs[k]
        if ck == 0.0:
            continue
        for j in range(k + 1):
            total += ck * binom[k, j] * ap[k - j] * bp[j] * mom[j]
    return total


cdef inline double _horner(double[:] c, int deg, double z) nogil:
    cdef double out = 0.0
    cdef int k
    for k in range(deg, -1, -1):
        out = out * z + c[k]
    return out


def cantor_window(lo, hi, w, d, coefs, double r, int depth):
    lo_b, hi_b, w_b, d_b = np.broadcast_arrays(
        np.asarray(lo, dtype=float), np.asarray(hi, dtype=float),
        np.asarray(w, dtype=float), np.asarray(d, dtype=float))
    shape = lo_b.shape
    cdef const double[:] plo = np.ascontiguousarray(lo_b).ravel()
    cdef const double[:] phi = np.ascontiguousarray(hi_b).ravel()
    cdef const double[:] pw = np.ascontiguousarray(w_b).ravel()
    cdef const double[:] pd = np.ascontiguousarray(d_b).ravel()
    cdef const double[:] c = np.ascontiguousarray(coefs, dtype=float)
    cdef int deg = c.shape[0] - 1
    if deg > 14:
        raise ValueError("kernel polynomial degree too large")
    cdef double[:, :] mom = cantor_moments(r, depth, deg)
    anti_np = np.concatenate([[0.0], np.asarray(coefs, dtype=float) / np.arange(1, deg + 2)])
    cdef double[:] anti = anti_np
    binom_np = np.zeros((deg + 1, deg + 1))
    from math import comb
    for k in range(deg + 1):
        for j in range(k + 1):
            binom_np[k, j] = comb(k, j)
    cdef double[:, :] binom = binom_np
    cdef Py_ssize_t n = plo.shape[0]
    out_np = np.zeros(n)
    cdef double[:] out = out_np
    cdef Py_ssize_t i
    cdef int g, m, nf, nn, q
    cdef double fl[4]
    cdef double fm[4]
    cdef double nl[4]
    cdef double nm[4]
    cdef double length, left, right, mass, a, b, s1, s2, total, child
    with nogil:
        for i in range(n):
            total = 0.0
            nf = 1
            fl[0] = 0.0
            fm[0] = 1.0
            length = 1.0
            for g in range(depth + 1):
                nn = 0
                for m in range(nf):
                    left = fl[m]
                    mass = fm[m]
                    right = left + length
                    if right <= plo[i] or left >= phi[i]:
                        continue
                    if g == depth:
                        s1 = fmax(left, plo[i])
                        s2 = fmin(right, phi[i])
                        total += (mass / length) * pd[i] * (
                            _horner(anti, deg + 1, (pw[i] - s1) / pd[i])
                            - _horner(anti, deg + 1, (pw[i] - s2) / pd[i]))
                        continue
                    if left >= plo[i] and right <= phi[i]:
                        a = (pw[i] - left) / pd[i]
                        b = length / pd[i]
                        total += mass * _moment_sum(c, deg, a, b, mom[depth - g], binom)
                        continue
                    child = length * r
                    if nn <= 2:
                        nl[nn] = left
                        nm[nn] = 0.5 * mass
                        nl[nn + 1] = right - child
                        nm[nn + 1] = 0.5 * mass
                        nn += 2
                if nn == 0:
                    break
                for q in range(nn):
                    fl[q] = nl[q]
                    fm[q] = nm[q]
                nf = nn
                length = length * r
            out[i] = total
    return out_np.reshape(shape)


def max_disjoint_sum(starts, values, double eps, double slack):
    cdef cnp.ndarray[double, ndim=1] s = np.ascontiguousarray(starts, dtype=float)
    cdef cnp.ndarray[double, ndim=1] v = np.ascontiguousarray(values, dtype=float)
    cdef Py_ssize_t n = s.shape[0]
    cdef cnp.ndarray[cnp.intp_t, ndim=1] pred = np.searchsorted(s + eps, s + slack, side="right").astype(np.intp)
    cdef cnp.ndarray[double, ndim=1] best = np.zeros(n + 1)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] count = np.zeros(n + 1, dtype=np.intp)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] take = np.zeros(n + 1, dtype=np.uint8)
    cdef Py_ssize_t j, p
    cdef double inc, exc
    cdef Py_ssize_t inc_c, exc_c
    with nogil:
        for j in range(1, n + 1):
            p = pred[j - 1]
            inc = best[p] + v[j - 1]
            inc_c = count[p] + 1
            exc = best[j - 1]
            exc_c = count[j - 1]
            if inc > exc or (inc == exc and inc_c < exc_c):
                best[j] = inc
                count[j] = inc_c
                take[j] = 1
            else:
                best[j] = exc
                count[j] = exc_c
    chosen = []
    j = n
    while j > 0:
        if take[j]:
            chosen.append(j - 1)
            j = pred[j - 1]
        else:
            j -= 1
    chosen.reverse()
    return float(best[n]), np.asarray(chosen, dtype=np.intp)

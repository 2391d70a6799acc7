# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled orbit kernels; same API and arithmetic order as ``_orbit_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, rint, fabs, INFINITY, M_PI

cnp.import_array()

cdef double TWO_PI = 2.0 * M_PI


cdef inline double reduce1(double y) noexcept nogil:
    cdef double r = y - rint(y)
    if r < 0.0:
        r += 1.0
    if r >= 1.0:
        r -= 1.0
    return r


cdef void lift(const double[::1] x, double[::1] y, const double[::1] t,
               const long long[:, ::1] L, const long long[::1] pc,
               const long long[:, ::1] pf, const double[::1] pr,
               const double[::1] pi) noexcept nogil:
    cdef Py_ssize_t d = t.shape[0], T = pc.shape[0], i, j, k
    cdef double acc, ph
    for i in range(d):
        acc = t[i]
        for j in range(d):
            acc += L[i, j] * x[j]
        y[i] = acc
    for k in range(T):
        ph = 0.0
        for j in range(d):
            ph += pf[k, j] * x[j]
        ph *= TWO_PI
        y[pc[k]] += pr[k] * cos(ph) - pi[k] * sin(ph)


def _arrays(t, L, pc, pf, pr, pi):
    d = len(t)
    return (np.ascontiguousarray(t, dtype=np.float64),
            np.ascontiguousarray(np.asarray(L).reshape(d, d), dtype=np.int64),
            np.ascontiguousarray(pc, dtype=np.int64),
            np.ascontiguousarray(np.asarray(pf).reshape(-1, d), dtype=np.int64),
            np.ascontiguousarray(pr, dtype=np.float64),
            np.ascontiguousarray(pi, dtype=np.float64))


def orbit(t, L, pc, pf, pr, pi, x0, Py_ssize_t N):
    cdef double[::1] tv
    cdef long long[:, ::1] Lv, pfv
    cdef long long[::1] pcv
    cdef double[::1] prv, piv
    tv, Lv, pcv, pfv, prv, piv = _arrays(t, L, pc, pf, pr, pi)
    cdef Py_ssize_t d = tv.shape[0], i, k
    out_arr = np.empty((N + 1, d))
    cdef double[:, ::1] out = out_arr
    cdef double[::1] x = np.array([reduce1(float(v)) for v in x0], dtype=np.float64)
    cdef double[::1] y = np.empty(d)
    with nogil:
        for i in range(d):
            out[0, i] = x[i]
        for k in range(N):
            lift(x, y, tv, Lv, pcv, pfv, prv, piv)
            for i in range(d):
                x[i] = reduce1(y[i])
                out[k + 1, i] = x[i]
    return out_arr


def ergodic_sum(t, L, pc, pf, pr, pi, x0, of, ore, oim, Py_ssize_t N):
    cdef double[::1] tv
    cdef long long[:, ::1] Lv, pfv
    cdef long long[::1] pcv
    cdef double[::1] prv, piv
    tv, Lv, pcv, pfv, prv, piv = _arrays(t, L, pc, pf, pr, pi)
    cdef Py_ssize_t d = tv.shape[0], F, i, j, k, m
    cdef long long[:, ::1] ofv = np.ascontiguousarray(np.asarray(of).reshape(-1, d), dtype=np.int64)
    cdef double[::1] orv = np.ascontiguousarray(ore, dtype=np.float64)
    cdef double[::1] oiv = np.ascontiguousarray(oim, dtype=np.float64)
    F = ofv.shape[0]
    cdef double[::1] x = np.array([reduce1(float(v)) for v in x0], dtype=np.float64)
    cdef double[::1] y = np.empty(d)
    cdef double s_re = 0.0, s_im = 0.0, c_re = 0.0, c_im = 0.0
    cdef double v_re, v_im, ph, cs, sn, yy, tmp
    with nogil:
        for k in range(N):
            v_re = 0.0
            v_im = 0.0
            for m in range(F):
                ph = 0.0
                for j in range(d):
                    ph += ofv[m, j] * x[j]
                ph *= TWO_PI
                cs = cos(ph)
                sn = sin(ph)
                v_re += orv[m] * cs - oiv[m] * sn
                v_im += orv[m] * sn + oiv[m] * cs
            yy = v_re - c_re
            tmp = s_re + yy
            c_re = (tmp - s_re) - yy
            s_re = tmp
            yy = v_im - c_im
            tmp = s_im + yy
            c_im = (tmp - s_im) - yy
            s_im = tmp
            lift(x, y, tv, Lv, pcv, pfv, prv, piv)
            for i in range(d):
                x[i] = reduce1(y[i])
    return complex(s_re, s_im)


cdef inline long long pmod(long long a, long long n) noexcept nogil:
    cdef long long r = a % n
    if r < 0:
        r += n
    return r


def winding_sums(t, L, pc, pf, pr, pi, x0, Py_ssize_t coord, long long N):
    cdef double[::1] tv
    cdef long long[:, ::1] Lv, pfv
    cdef long long[::1] pcv
    cdef double[::1] prv, piv
    tv, Lv, pcv, pfv, prv, piv = _arrays(t, L, pc, pf, pr, pi)
    cdef Py_ssize_t d = tv.shape[0], i, j, k
    cdef double[::1] x = np.array([reduce1(float(v)) for v in x0], dtype=np.float64)
    cdef double[::1] y = np.empty(d)
    cdef long long[::1] ell = np.zeros(d, dtype=np.int64)
    cdef long long[::1] nxt = np.zeros(d, dtype=np.int64)
    cdef double s = 0.0, comp = 0.0, inc, yy, tmp, xr
    cdef long long isum = 0, acc, jump
    with nogil:
        for k in range(N):
            lift(x, y, tv, Lv, pcv, pfv, prv, piv)
            inc = y[coord] - x[coord]
            yy = inc - comp
            tmp = s + yy
            comp = (tmp - s) - yy
            s = tmp
            acc = -ell[coord]
            for j in range(d):
                acc = pmod(acc + pmod(Lv[coord, j], N) * ell[j], N)
            isum = pmod(isum + acc, N)
            for i in range(d):
                xr = reduce1(y[i])
                jump = <long long> rint(y[i] - xr)
                acc = pmod(jump, N)
                for j in range(d):
                    acc = pmod(acc + pmod(Lv[i, j], N) * ell[j], N)
                nxt[i] = acc
                x[i] = xr
            for i in range(d):
                ell[i] = nxt[i]
    return s, isum


cdef inline double circle_dist(double a, double b) noexcept nogil:
    cdef double r = fabs(a - b)
    r = r - <double> (<long long> r)
    if 1.0 - r < r:
        return 1.0 - r
    return r


def distality_min(t, L, pc, pf, pr, pi, z1, z2, Py_ssize_t n_lo, Py_ssize_t n_hi):
    cdef double[::1] tv
    cdef long long[:, ::1] Lv, pfv
    cdef long long[::1] pcv
    cdef double[::1] prv, piv
    tv, Lv, pcv, pfv, prv, piv = _arrays(t, L, pc, pf, pr, pi)
    cdef Py_ssize_t d = tv.shape[0], i, n
    cdef double[::1] x = np.array([reduce1(float(v)) for v in z1], dtype=np.float64)
    cdef double[::1] y = np.array([reduce1(float(v)) for v in z2], dtype=np.float64)
    cdef double[::1] bx = np.empty(d)
    cdef double[::1] by = np.empty(d)
    cdef double best = INFINITY, dist, c
    with nogil:
        for n in range(n_hi + 1):
            if n >= n_lo:
                dist = 0.0
                for i in range(d):
                    c = circle_dist(x[i], y[i])
                    if c > dist:
                        dist = c
                if dist < best:
                    best = dist
            if n == n_hi:
                break
            lift(x, bx, tv, Lv, pcv, pfv, prv, piv)
            lift(y, by, tv, Lv, pcv, pfv, prv, piv)
            for i in range(d):
                x[i] = reduce1(bx[i])
                y[i] = reduce1(by[i])
    return best

"""Pure-Python orbit kernels (reference implementation and import fallback).

Signature conventions shared with the compiled ``_orbit_c`` module:

* ``t``  -- translation, float array (d,)
* ``L``  -- integer linear part, int array (d, d)
* ``pc`` -- coordinate index of each perturbation term, int array (T,)
* ``pf`` -- frequency of each term, int array (T, d)
* ``pr``, ``pi`` -- real/imaginary coefficient of each term, float arrays (T,)

The perturbation of coordinate ``i`` is ``Re sum_{pc == i} c exp(2 pi i <f, x>)``.
Points are kept reduced mod 1 with round-half-to-even before taking the
fractional part, identically in both implementations.
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def reduce1(y: float) -> float:
    r = y - round(y)  # round() is half-to-even, like rint
    if r < 0.0:
        r += 1.0
    if r >= 1.0:
        r -= 1.0
    return r


def _unpack(t, L, pc, pf, pr, pi):
    d = len(t)
    t = [float(v) for v in t]
    L = [[int(v) for v in row] for row in np.asarray(L).reshape(d, d)]
    terms = [(int(c), [int(v) for v in f], float(a), float(b))
             for c, f, a, b in zip(pc, np.asarray(pf).reshape(-1, d), pr, pi)]
    return d, t, L, terms


def _lift(x, d, t, L, terms):
    y = []
    for i in range(d):
        acc = t[i]
        for j in range(d):
            acc += L[i][j] * x[j]
        y.append(acc)
    for c, f, a, b in terms:
        ph = 0.0
        for fj, xj in zip(f, x):
            ph += fj * xj
        ph *= TWO_PI
        y[c] += a * math.cos(ph) - b * math.sin(ph)
    return y


def orbit(t, L, pc, pf, pr, pi, x0, N):
    d, t, L, terms = _unpack(t, L, pc, pf, pr, pi)
    x = [reduce1(float(v)) for v in x0]
    out = np.empty((N + 1, d))
    out[0] = x
    for k in range(N):
        x = [reduce1(v) for v in _lift(x, d, t, L, terms)]
        out[k + 1] = x
    return out


def ergodic_sum(t, L, pc, pf, pr, pi, x0, of, ore, oim, N):
    d, t, L, terms = _unpack(t, L, pc, pf, pr, pi)
    obs = [([int(v) for v in f], float(a), float(b))
           for f, a, b in zip(np.asarray(of).reshape(-1, d), ore, oim)]
    x = [reduce1(float(v)) for v in x0]
    s_re = s_im = 0.0
    c_re = c_im = 0.0  # Kahan compensation
    for _ in range(N):
        v_re = v_im = 0.0
        for f, a, b in obs:
            ph = 0.0
            for fj, xj in zip(f, x):
                ph += fj * xj
            ph *= TWO_PI
            cs, sn = math.cos(ph), math.sin(ph)
            v_re += a * cs - b * sn
            v_im += a * sn + b * cs
        y = v_re - c_re
        tmp = s_re + y
        c_re = (tmp - s_re) - y
        s_re = tmp
        y = v_im - c_im
        tmp = s_im + y
        c_im = (tmp - s_im) - y
        s_im = tmp
        x = [reduce1(v) for v in _lift(x, d, t, L, terms)]
    return complex(s_re, s_im)


def winding_sums(t, L, pc, pf, pr, pi, x0, coord, N):
    """Sum of lift increments of ``coord`` along the lifted orbit.

    Returns ``(fractional_part_sum, integer_part_sum mod N)``. The lifted
    orbit is ``X_k = x_k + l_k`` with ``x_k`` reduced; only ``l_k mod N``
    is tracked because the average is taken mod 1 after dividing by N.
    """
    d, t, L, terms = _unpack(t, L, pc, pf, pr, pi)
    x = [reduce1(float(v)) for v in x0]
    ell = [0] * d
    s = 0.0
    comp = 0.0
    isum = 0
    for _ in range(N):
        y = _lift(x, d, t, L, terms)
        inc = y[coord] - x[coord]
        yy = inc - comp
        tmp = s + yy
        comp = (tmp - s) - yy
        s = tmp
        isum = (isum + sum(L[coord][j] * ell[j] for j in range(d)) - ell[coord]) % N
        xr = [reduce1(v) for v in y]
        jumps = [int(round(yv - xv)) for yv, xv in zip(y, xr)]
        ell = [(sum(L[i][j] * ell[j] for j in range(d)) + jumps[i]) % N for i in range(d)]
        x = xr
    return s, isum


def _circle_dist(a, b):
    r = abs(a - b) % 1.0
    return min(r, 1.0 - r)


def distality_min(t, L, pc, pf, pr, pi, z1, z2, n_lo, n_hi):
    d, t, L, terms = _unpack(t, L, pc, pf, pr, pi)
    x = [reduce1(float(v)) for v in z1]
    y = [reduce1(float(v)) for v in z2]
    best = math.inf
    for n in range(n_hi + 1):
        if n >= n_lo:
            dist = max(_circle_dist(a, b) for a, b in zip(x, y))
            if dist < best:
                best = dist
        if n == n_hi:
            break
        x = [reduce1(v) for v in _lift(x, d, t, L, terms)]
        y = [reduce1(v) for v in _lift(y, d, t, L, terms)]
    return best

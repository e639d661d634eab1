# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled contour kernels (same contract as the functions in ``_contour_py``)."""

import numpy as np
from cython.parallel cimport prange
from libc.math cimport sinh, cosh, exp, cos, sin, hypot, fabs, M_PI


cdef inline void _point(double sh, double ch, double xv, double hv, double r, double c, int p,
                        double *lr, double *li, double *er, double *ei) noexcept nogil:
    # lambda(s) and the exponent i*psi = i(l^p/p + x l), given sinh(s), cosh(s)
    cdef double ar = r * sh
    cdef double ai_ = hv + c * r * (ch - 1.0)
    cdef double pr = ar, pi_ = ai_, tr
    cdef int e
    for e in range(p - 1):
        tr = pr * ar - pi_ * ai_
        pi_ = pr * ai_ + pi_ * ar
        pr = tr
    cdef double qr = pr / p + xv * ar
    cdef double qi = pi_ / p + xv * ai_
    lr[0] = ar
    li[0] = ai_
    er[0] = -qi
    ei[0] = qr


def truncation(x, int n, double c, hv, R, double log_cut, double smax, double ds):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] hvv = np.ascontiguousarray(hv, dtype=np.float64)
    cdef double[::1] Rv = np.ascontiguousarray(R, dtype=np.float64)
    cdef Py_ssize_t m = xv.shape[0], i
    out_a = np.empty(m)
    cdef double[::1] out = out_a
    cdef int p = 2 * n + 1, k, K = <int>(smax / ds + 0.5), last
    cdef double lr, li, er, ei, top, q, g, sh, ch, reach
    q = exp(ds)
    for i in prange(m, nogil=True, schedule="static"):
        # past |l| > reach the l^p term dominates and |exp(i psi)| only decays
        reach = 2.0 * (1.0 + fabs(xv[i])) ** (1.0 / (2 * n)) + 2.0 * hvv[i]
        top = -1e308
        last = 0
        g = 1.0
        for k in range(K + 1):
            sh = 0.5 * (g - 1.0 / g)
            ch = 0.5 * (g + 1.0 / g)
            _point(sh, ch, xv[i], hvv[i], Rv[i], c, p, &lr, &li, &er, &ei)
            if er > top:
                top = er
            if er >= top + log_cut:
                last = k
            elif lr > reach:
                break
            g = g * q
        if last < K:
            last = last + 1
        out[i] = last * ds + 0.02
    return out_a


def contour_sums(x, int j, int n, double c, hv, R, S, int N):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] hvv = np.ascontiguousarray(hv, dtype=np.float64)
    cdef double[::1] Rv = np.ascontiguousarray(R, dtype=np.float64)
    cdef double[::1] Sv = np.ascontiguousarray(S, dtype=np.float64)
    cdef Py_ssize_t m = xv.shape[0], i
    full_a = np.empty(m)
    half_a = np.empty(m)
    l1_a = np.empty(m)
    cdef double[::1] full = full_a
    cdef double[::1] half = half_a
    cdef double[::1] l1 = l1_a
    cdef int p = 2 * n + 1, k, e
    cdef double h, r, tw, hw, fr, fi, tr, mag, acc_f, acc_h, acc_a
    cdef double lr, li, er, ei, dr, di, gr, gi, q, g, sh, ch
    for i in prange(m, nogil=True, schedule="static"):
        h = Sv[i] / N
        r = Rv[i]
        q = exp(h)
        g = 1.0
        acc_f = 0.0
        acc_h = 0.0
        acc_a = 0.0
        for k in range(N + 1):
            sh = 0.5 * (g - 1.0 / g)
            ch = 0.5 * (g + 1.0 / g)
            g = g * q
            _point(sh, ch, xv[i], hvv[i], r, c, p, &lr, &li, &er, &ei)
            mag = exp(er)
            dr = r * ch
            di = r * c * sh
            fr = mag * (cos(ei) * dr - sin(ei) * di)
            fi = mag * (cos(ei) * di + sin(ei) * dr)
            # multiply by (i lambda)^j, i lambda = -li + i lr
            gr = -li
            gi = lr
            for e in range(j):
                tr = fr * gr - fi * gi
                fi = fr * gi + fi * gr
                fr = tr
            tw = 1.0
            if k == 0 or k == N:
                tw = 0.5
            hw = 0.0
            if k % 2 == 0:
                hw = 2.0 * tw
            acc_f = acc_f + tw * fr
            acc_h = acc_h + hw * fr
            acc_a = acc_a + tw * hypot(fr, fi)
        full[i] = acc_f * h / M_PI
        half[i] = acc_h * h / M_PI
        l1[i] = acc_a * h / M_PI
    return full_a, half_a, l1_a

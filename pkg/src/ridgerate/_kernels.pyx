# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; semantics mirror ``ridgerate._fallback`` exactly."""
import numpy as np

from libc.math cimport cos, sin, INFINITY, M_PI


cdef double _binom(int n, int r) noexcept nogil:
    cdef double out = 1.0
    cdef int i
    for i in range(r):
        out = out * (n - i) / (i + 1)
    return out


cdef double _fact(int n) noexcept nogil:
    cdef double out = 1.0
    cdef int i
    for i in range(2, n + 1):
        out *= i
    return out


cdef inline double _ipow(double t, int q) noexcept nogil:
    cdef double out = 1.0
    cdef int i
    for i in range(q):
        out *= t
    return out


cdef inline double _bspline(int k, int deriv, double u, bint right) noexcept nogil:
    cdef int q = k - deriv
    cdef int i
    cdef double t, term, acc = 0.0, sign = 1.0
    if q > 0:
        if u <= 0.0 or u >= k + 1:
            return 0.0
    elif right:
        if u < 0.0 or u >= k + 1:
            return 0.0
    else:
        if u <= 0.0 or u > k + 1:
            return 0.0
    for i in range(k + 2):
        t = u - i
        if q == 0:
            if right:
                term = 1.0 if t >= 0.0 else 0.0
            else:
                term = 1.0 if t > 0.0 else 0.0
        else:
            term = _ipow(t, q) if t > 0.0 else 0.0
        acc += sign * _binom(k + 1, i) * term
        sign = -sign
    return acc / _fact(q)


def bspline_values(int k, u, int deriv=0, bint right=False):
    cdef double[::1] uu = np.ascontiguousarray(u, dtype=float).ravel()
    out = np.empty(uu.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t p
    with nogil:
        for p in range(uu.shape[0]):
            o[p] = _bspline(k, deriv, uu[p], right)
    return out.reshape(np.shape(u))


def bspline_columns(proj, dir_index, scale, offset, int k, int deriv=0):
    cdef double[:, :] pr = np.asarray(proj, dtype=float)
    cdef long long[::1] di = np.ascontiguousarray(dir_index, dtype=np.int64)
    cdef double[::1] sc = np.ascontiguousarray(scale, dtype=float)
    cdef double[::1] of = np.ascontiguousarray(offset, dtype=float)
    out = np.empty((pr.shape[0], di.shape[0]), order="F")
    cdef double[::1, :] o = out
    cdef Py_ssize_t p, c
    cdef long long col
    with nogil:
        for c in range(di.shape[0]):
            col = di[c]
            for p in range(pr.shape[0]):
                o[p, c] = _bspline(k, deriv, sc[c] * pr[p, col] - of[c], False)
    return out


cdef inline double _relu_power(double t, int k) noexcept nogil:
    if t <= 0.0:
        return 0.0
    return _ipow(t, k)


def ridge_eval(amp, omega, bias, int k, x):
    cdef double complex[::1] a = np.ascontiguousarray(amp, dtype=complex)
    cdef double[:, ::1] w = np.ascontiguousarray(omega, dtype=float)
    cdef double[::1] b = np.ascontiguousarray(bias, dtype=float)
    cdef double[:, ::1] xx = np.ascontiguousarray(x, dtype=float)
    out = np.empty(xx.shape[0], dtype=complex)
    cdef double complex[::1] o = out
    cdef Py_ssize_t p, i, r
    cdef int d = xx.shape[1]
    cdef double t, v, re, im
    with nogil:
        for p in range(xx.shape[0]):
            re = 0.0
            im = 0.0
            for i in range(a.shape[0]):
                t = b[i]
                for r in range(d):
                    t = t + w[i, r] * xx[p, r]
                if t > 0.0:
                    v = _ipow(t, k)
                    re = re + a[i].real * v
                    im = im + a[i].imag * v
            o[p] = re + 1j * im
    return out


def ridge_eval_grad(amp, omega, bias, int k, x):
    cdef double complex[::1] a = np.ascontiguousarray(amp, dtype=complex)
    cdef double[:, ::1] w = np.ascontiguousarray(omega, dtype=float)
    cdef double[::1] b = np.ascontiguousarray(bias, dtype=float)
    cdef double[:, ::1] xx = np.ascontiguousarray(x, dtype=float)
    out = np.zeros((xx.shape[0], xx.shape[1]), dtype=complex)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t p, i, r
    cdef int d = xx.shape[1]
    cdef double t, ds
    with nogil:
        for p in range(xx.shape[0]):
            for i in range(a.shape[0]):
                t = b[i]
                for r in range(d):
                    t = t + w[i, r] * xx[p, r]
                if t > 0.0:
                    ds = k * _relu_power(t, k - 1)
                    for r in range(d):
                        o[p, r] = o[p, r] + a[i] * ds * w[i, r]
    return out


def exp_sum(amp, freq, x):
    cdef double complex[::1] a = np.ascontiguousarray(amp, dtype=complex)
    cdef double[:, ::1] f = np.ascontiguousarray(freq, dtype=float)
    cdef double[:, ::1] xx = np.ascontiguousarray(x, dtype=float)
    out = np.empty(xx.shape[0], dtype=complex)
    cdef double complex[::1] o = out
    cdef Py_ssize_t p, i, r
    cdef int d = xx.shape[1]
    cdef double ph, re, im
    with nogil:
        for p in range(xx.shape[0]):
            re = 0.0
            im = 0.0
            for i in range(a.shape[0]):
                ph = 0.0
                for r in range(d):
                    ph = ph + f[i, r] * xx[p, r]
                ph = 2.0 * M_PI * ph
                re = re + a[i].real * cos(ph) - a[i].imag * sin(ph)
                im = im + a[i].real * sin(ph) + a[i].imag * cos(ph)
            o[p] = re + 1j * im
    return out


def minplus_dp(cost, int n_layers):
    cdef double[:, :] c = np.asarray(cost, dtype=float)
    cdef Py_ssize_t g = c.shape[0]
    value = np.full((n_layers + 1, g), np.inf)
    arg = np.full((n_layers + 1, g), -1, dtype=np.int64)
    cdef double[:, ::1] v = value
    cdef long long[:, ::1] ag = arg
    cdef Py_ssize_t b, i, j
    cdef double best, cand
    cdef long long besti
    with nogil:
        for j in range(1, g):
            v[0, j] = c[0, j]
            ag[0, j] = 0
        for b in range(1, n_layers + 1):
            for j in range(g):
                best = INFINITY
                besti = -1
                for i in range(j):
                    cand = v[b - 1, i] + c[i, j]
                    if cand < best:
                        best = cand
                        besti = i
                v[b, j] = best
                ag[b, j] = besti
    return value, arg

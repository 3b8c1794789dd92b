# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror heckedist._fallback exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport acos, cos, sin, fabs

cnp.import_array()


cdef inline double _xn(double x, int n) nogil:
    cdef double a = 1.0, b = x, c
    cdef int j
    if n == 0:
        return 1.0
    for j in range(1, n):
        c = x * b - a
        a = b
        b = c
    return b


def cheb_values(const double[::1] x, int n):
    cdef Py_ssize_t i, m = x.shape[0]
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            o[i] = _xn(x[i], n)
    return out


def cheb_sum(const double[::1] x, int n):
    cdef Py_ssize_t i, m = x.shape[0]
    cdef double s = 0.0
    with nogil:
        for i in range(m):
            s += _xn(x[i], n)
    return s


def cheb_power_sums(const double[::1] x, int n_max):
    cdef Py_ssize_t i, m = x.shape[0]
    cdef int j
    cdef double a, b, c, xi
    out = np.zeros(n_max + 1, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            xi = x[i]
            a = 1.0
            o[0] += 1.0
            if n_max >= 1:
                b = xi
                o[1] += b
                for j in range(2, n_max + 1):
                    c = xi * b - a
                    a = b
                    b = c
                    o[j] += b
    return out


cdef inline double _weight(double t, double c, double A, double B) nogil:
    cdef double s = sin(t), co = cos(t)
    return c * s * s / (A - B * co * co)


cdef double _theta_integral(double lo, double hi, double c, double A, double B,
                            const double[::1] nodes, const double[::1] weights, int panels) nogil:
    cdef double h = (hi - lo) / panels, half = 0.5 * h, mid, s = 0.0
    cdef int k, j
    cdef Py_ssize_t q = nodes.shape[0]
    for k in range(panels):
        mid = lo + (k + 0.5) * h
        for j in range(q):
            s += weights[j] * _weight(mid + half * nodes[j], c, A, B)
    return s * half


cdef inline double _cdf1(double x, double c, double A, double B,
                         const double[::1] nodes, const double[::1] weights, int panels) nogil:
    if x <= -2.0:
        return 0.0
    if x >= 2.0:
        return 1.0
    return _theta_integral(acos(0.5 * x), 3.141592653589793, c, A, B, nodes, weights, panels)


def theta_cdf(const double[::1] x, double c, double A, double B,
              const double[::1] nodes, const double[::1] weights, int panels):
    cdef Py_ssize_t i, m = x.shape[0]
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            o[i] = _cdf1(x[i], c, A, B, nodes, weights, panels)
    return out


def inverse_cdf(const double[::1] u, double c, double A, double B,
                const double[::1] nodes, const double[::1] weights, int panels, double xtol):
    cdef Py_ssize_t i, m = u.shape[0]
    cdef double lo, hi, mid
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            lo = -2.0
            hi = 2.0
            while hi - lo > xtol:
                mid = 0.5 * (lo + hi)
                if _cdf1(mid, c, A, B, nodes, weights, panels) < u[i]:
                    lo = mid
                else:
                    hi = mid
            o[i] = 0.5 * (lo + hi)
    return out


def ks_from_cdf(const double[::1] F):
    cdef Py_ssize_t i, n = F.shape[0]
    cdef double d = 0.0, up, down
    with nogil:
        for i in range(n):
            up = (i + 1.0) / n - F[i]
            down = F[i] - (<double> i) / n
            if up > d:
                d = up
            if down > d:
                d = down
    return d

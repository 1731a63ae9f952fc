# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_fallback.py``.

Same algorithms, scalar loops in C: the Gamma integrand is evaluated in
one pass without numpy temporaries.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, sqrt, exp, fabs, M_PI

cnp.import_array()

cdef enum:
    SERIES_TERMS = 32
    TRAP_NODES = 64
    HANKEL_TERMS = 24

cdef double SERIES_MAX = 8.0
cdef double TRAP_MAX = 25.0
cdef double K_SMALL = 1e-10
cdef double HANKEL[HANKEL_TERMS]
cdef double TRAP_SIN[TRAP_NODES]


cdef void _init_tables():
    cdef int k
    HANKEL[0] = 1.0
    for k in range(1, HANKEL_TERMS):
        HANKEL[k] = HANKEL[k - 1] * (2 * k - 1) * (2 * k - 1) / (k * 8.0)
    for k in range(TRAP_NODES):
        TRAP_SIN[k] = sin(M_PI * (k + 0.5) / TRAP_NODES)


_init_tables()


cdef inline double _series_one_minus_j0(double x) nogil:
    cdef double q = -0.25 * x * x
    cdef double term = 1.0
    cdef double acc = 0.0
    cdef int k
    for k in range(1, SERIES_TERMS):
        term = term * q / (k * k)
        acc += term
    return -acc


cdef inline double _trap_j0(double x) nogil:
    cdef double acc = 0.0
    cdef int k
    for k in range(TRAP_NODES):
        acc += cos(x * TRAP_SIN[k])
    return acc / TRAP_NODES


cdef inline double _hankel_j0(double x) nogil:
    cdef double inv = 1.0 / x
    cdef double inv2 = inv * inv
    cdef double p = 0.0
    cdef double q = 0.0
    cdef double sign
    cdef int k
    for k in range(HANKEL_TERMS // 2 - 1, -1, -1):
        sign = -1.0 if k % 2 else 1.0
        p = p * inv2 + sign * HANKEL[2 * k]
        q = q * inv2 + sign * HANKEL[2 * k + 1]
    q = -q * inv
    cdef double c = cos(x)
    cdef double s = sin(x)
    cdef double r = sqrt(0.5)
    return sqrt(2.0 / (M_PI * x)) * (p * (c + s) * r - q * (s - c) * r)


cdef inline double c_j0(double x) nogil:
    x = fabs(x)
    if x < SERIES_MAX:
        return 1.0 - _series_one_minus_j0(x)
    if x < TRAP_MAX:
        return _trap_j0(x)
    return _hankel_j0(x)


cdef inline double c_one_minus_j0(double x) nogil:
    x = fabs(x)
    if x < SERIES_MAX:
        return _series_one_minus_j0(x)
    return 1.0 - c_j0(x)


cdef inline double c_one_minus_sinc(double y) nogil:
    cdef double ys
    if fabs(y) < 0.5:
        ys = y * y
        return ys * (1.0 / 6 - ys * (1.0 / 120 - ys * (1.0 / 5040 - ys * (1.0 / 362880
                     - ys * (1.0 / 39916800 - ys / 6227020800.0)))))
    return 1.0 - sin(y) / y


cdef inline double c_angular(int dim, double x) nogil:
    cdef double s
    if dim == 1:
        s = sin(x)
        return s * s
    if dim == 2:
        return M_PI * c_one_minus_j0(2.0 * x)
    return 2.0 * M_PI * c_one_minus_sinc(2.0 * x)


def j0(x):
    cdef cnp.ndarray[double, ndim=1] xa = np.ascontiguousarray(np.ravel(x), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i
    for i in range(xa.shape[0]):
        out[i] = c_j0(xa[i])
    return out.reshape(np.shape(x))


def one_minus_j0(x):
    cdef cnp.ndarray[double, ndim=1] xa = np.ascontiguousarray(np.ravel(x), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i
    for i in range(xa.shape[0]):
        out[i] = c_one_minus_j0(xa[i])
    return out.reshape(np.shape(x))


def one_minus_sinc(y):
    cdef cnp.ndarray[double, ndim=1] ya = np.ascontiguousarray(np.ravel(y), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(ya)
    cdef Py_ssize_t i
    for i in range(ya.shape[0]):
        out[i] = c_one_minus_sinc(ya[i])
    return out.reshape(np.shape(y))


def angular_factor(int dim, x):
    if dim not in (1, 2, 3):
        raise ValueError(f"dimension must be 1, 2 or 3, got {dim!r}")
    cdef cnp.ndarray[double, ndim=1] xa = np.ascontiguousarray(np.ravel(x), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i
    for i in range(xa.shape[0]):
        out[i] = c_angular(dim, xa[i])
    return out.reshape(np.shape(x))


def gamma_integrands(k, int dim, double ng, double m_b, double sigma, double L, double t):
    cdef cnp.ndarray[double, ndim=1] ka = np.ascontiguousarray(np.ravel(k), dtype=np.float64)
    cdef Py_ssize_t n = ka.shape[0]
    cdef cnp.ndarray[double, ndim=1] g = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] gd = np.empty(n)
    cdef double kk, eps, den, w, base, s, kpow
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            kk = ka[i]
            if kk < K_SMALL:
                # both integrands vanish as k -> 0 for every D, free or not
                g[i] = 0.0
                gd[i] = 0.0
                continue
            eps = kk * kk / (2.0 * m_b)
            den = 2.0 * ng + eps
            w = sqrt(eps * den)
            if dim == 1:
                kpow = 1.0
            elif dim == 2:
                kpow = kk
            else:
                kpow = kk * kk
            base = kpow * c_angular(dim, kk * L) * exp(-0.5 * kk * kk * sigma * sigma) / den
            s = sin(0.5 * w * t)
            g[i] = base * s * (s / w) if w > 0 else 0.0
            gd[i] = 0.5 * base * sin(w * t)
    shape = np.shape(k)
    return g.reshape(shape), gd.reshape(shape)

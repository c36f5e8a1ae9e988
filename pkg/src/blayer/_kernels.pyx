# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pairwise kernels for the particle energy, gradient and Hessian.

The O(n²) sums over particle pairs dominate the minimizer's runtime, so the
two analytic kernel families (wall and tempered power law) are provided as C
functions and the triple of pairwise reductions loops over pairs directly.
Raw sums are returned; scaling prefactors live in the caller.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, expm1, log, log1p, sinh, cosh, pow

cnp.import_array()


cdef inline double wall_v(double z, double c, double unused) nogil:
    cdef double em, t
    if z <= 0.0:
        return 1e308
    if z < 0.5:
        em = -expm1(-2.0 * z)
        return c * (2.0 * z * (1.0 - em) / em - log(em))
    t = exp(-2.0 * z)
    return c * (2.0 * z * t / (1.0 - t) - log1p(-t))


cdef inline double wall_d1(double z, double c, double unused) nogil:
    cdef double s
    if z <= 0.0:
        return -1e308
    if z < 18.0:
        s = sinh(z)
        return -c * z / (s * s)
    return -4.0 * c * z * exp(-2.0 * z)


cdef inline double wall_d2(double z, double c, double unused) nogil:
    cdef double s
    if z <= 0.0:
        return 1e308
    if z < 18.0:
        s = sinh(z)
        return c * (2.0 * z * cosh(z) - s) / (s * s * s)
    return 4.0 * c * (2.0 * z - 1.0) * exp(-2.0 * z)


cdef inline double power_v(double z, double a, double c) nogil:
    if z <= 0.0:
        return 1e308
    return c * pow(z, -a) * exp(-z)


cdef inline double power_d1(double z, double a, double c) nogil:
    if z <= 0.0:
        return -1e308
    return -c * exp(-z) * pow(z, -a - 1.0) * (a + z)


cdef inline double power_d2(double z, double a, double c) nogil:
    if z <= 0.0:
        return 1e308
    return c * exp(-z) * pow(z, -a - 2.0) * (a * (a + 1.0) + 2.0 * a * z + z * z)


ctypedef double (*kfun)(double, double, double) nogil


cdef kfun _pick(int kid, int deriv) nogil:
    if kid == 0:
        if deriv == 0:
            return wall_v
        elif deriv == 1:
            return wall_d1
        return wall_d2
    if deriv == 0:
        return power_v
    elif deriv == 1:
        return power_d1
    return power_d2


def pair_energy(const double[::1] x, double gamma, int kid, double p0, double p1):
    """sum over i > j of V(gamma (x_i - x_j))."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j
    cdef double total = 0.0
    cdef kfun f = _pick(kid, 0)
    with nogil:
        for i in range(1, n):
            for j in range(i):
                total += f(gamma * (x[i] - x[j]), p0, p1)
    return total


def pair_gradient(const double[::1] x, double gamma, int kid, double p0, double p1):
    """out[i] = sum_{j<i} V'(gamma(x_i-x_j)) - sum_{j>i} V'(gamma(x_j-x_i))."""
    cdef Py_ssize_t n = x.shape[0]
    out_arr = np.zeros(n)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double d
    cdef kfun f = _pick(kid, 1)
    with nogil:
        for i in range(1, n):
            for j in range(i):
                d = f(gamma * (x[i] - x[j]), p0, p1)
                out[i] += d
                out[j] -= d
    return out_arr


def pair_hessian(const double[::1] x, double gamma, int kid, double p0, double p1):
    """H[i,i] = sum_{j!=i} V''(gamma|x_i-x_j|), H[i,j] = -V''(gamma|x_i-x_j|)."""
    cdef Py_ssize_t n = x.shape[0]
    out_arr = np.zeros((n, n))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double w
    cdef kfun f = _pick(kid, 2)
    with nogil:
        for i in range(1, n):
            for j in range(i):
                w = f(gamma * (x[i] - x[j]), p0, p1)
                out[i, j] = -w
                out[j, i] = -w
                out[i, i] += w
                out[j, j] += w
    return out_arr

# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled prefix-curve kernels. Same arithmetic, in the same order, as _pykernels."""

import numpy as np


cdef inline double _arm_mean(double reward_sum, Py_ssize_t count,
                             double base_sum, Py_ssize_t k) noexcept nogil:
    if count > 0:
        return reward_sum / count
    return base_sum / k


def _as_base(base, Py_ssize_t n):
    if base is None:
        return np.zeros(n)
    return np.ascontiguousarray(base, dtype=np.float64)


def prefix_curve(const unsigned char[::1] t, const double[::1] reward, base0=None, base1=None):
    cdef Py_ssize_t n = t.shape[0]
    cdef const double[::1] b0 = _as_base(base0, n)
    cdef const double[::1] b1 = _as_base(base1, n)
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double r0 = 0.0, r1 = 0.0, s0 = 0.0, s1 = 0.0
    cdef Py_ssize_t i, n1 = 0
    with nogil:
        for i in range(n):
            if t[i]:
                r1 = r1 + reward[i]
                n1 += 1
            else:
                r0 = r0 + reward[i]
            s0 = s0 + b0[i]
            s1 = s1 + b1[i]
            ov[i] = (_arm_mean(r0, i + 1 - n1, s0, i + 1)
                     - _arm_mean(r1, n1, s1, i + 1)) * (i + 1)
    return out


def prefix_area(const unsigned char[::1] t, const double[::1] reward, base0=None, base1=None):
    cdef Py_ssize_t n = t.shape[0]
    cdef const double[::1] b0 = _as_base(base0, n)
    cdef const double[::1] b1 = _as_base(base1, n)
    cdef double r0 = 0.0, r1 = 0.0, s0 = 0.0, s1 = 0.0, total = 0.0
    cdef Py_ssize_t i, n1 = 0
    with nogil:
        for i in range(n):
            if t[i]:
                r1 = r1 + reward[i]
                n1 += 1
            else:
                r0 = r0 + reward[i]
            s0 = s0 + b0[i]
            s1 = s1 + b1[i]
            total = total + (_arm_mean(r0, i + 1 - n1, s0, i + 1)
                             - _arm_mean(r1, n1, s1, i + 1)) * (i + 1)
    return total

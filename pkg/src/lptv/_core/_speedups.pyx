# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython implementations of the hot kernels.

Same contracts as _numpy.py: 2-D float64 arrays in, float64 out. Single
fused pass per array instead of numpy's chain of temporaries.
"""

from libc.math cimport fabs, fmax, pow

import numpy as np


def shrink_weighted(v, double p, double lam, double eps):
    """Reweighted soft threshold, elementwise over v.

    tau = p*lam / (|v| + eps)^(1-p); returns sgn(v) * max(0, |v| - tau).
    """
    cdef double[:, ::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t h = vv.shape[0]
    cdef Py_ssize_t w = vv.shape[1]
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double x, mag, tau, s
    cdef double q = 1.0 - p
    cdef double pl = p * lam
    with nogil:
        for i in range(h):
            for j in range(w):
                x = vv[i, j]
                mag = fabs(x)
                tau = pl / pow(mag + eps, q)
                s = 0.0 if x == 0.0 else (1.0 if x > 0.0 else -1.0)
                out[i, j] = s * fmax(0.0, mag - tau)
    return out_arr


def lp_power_sum(dx, dy, double p):
    """Sum of |dx_i|^p + |dy_i|^p over all entries."""
    cdef double[:, ::1] a = np.ascontiguousarray(dx, dtype=np.float64)
    cdef double[:, ::1] b = np.ascontiguousarray(dy, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    with nogil:
        if p == 1.0:
            for i in range(a.shape[0]):
                for j in range(a.shape[1]):
                    acc += fabs(a[i, j])
            for i in range(b.shape[0]):
                for j in range(b.shape[1]):
                    acc += fabs(b[i, j])
        else:
            for i in range(a.shape[0]):
                for j in range(a.shape[1]):
                    acc += pow(fabs(a[i, j]), p)
            for i in range(b.shape[0]):
                for j in range(b.shape[1]):
                    acc += pow(fabs(b[i, j]), p)
    return acc

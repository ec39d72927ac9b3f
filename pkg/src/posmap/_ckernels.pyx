# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for blockwise map application and moment sums.

Every function mirrors one in :mod:`posmap._pykernels` with the same
signature and the same return values (up to round-off).
"""
import numpy as np

ctypedef double complex cplx


def partial_transpose(const cplx[:, ::1] rho, Py_ssize_t dA, Py_ssize_t dB, bint on_a):
    cdef Py_ssize_t n = dA * dB
    out = np.empty((n, n), dtype=np.complex128)
    cdef cplx[:, ::1] o = out
    cdef Py_ssize_t i, j, k, l
    for i in range(dA):
        for k in range(dB):
            for j in range(dA):
                for l in range(dB):
                    if on_a:
                        o[j * dB + k, i * dB + l] = rho[i * dB + k, j * dB + l]
                    else:
                        o[i * dB + l, j * dB + k] = rho[i * dB + k, j * dB + l]
    return out


def reduction_second(const cplx[:, ::1] rho, Py_ssize_t dA, Py_ssize_t dB, double k):
    cdef Py_ssize_t n = dA * dB
    out = np.empty((n, n), dtype=np.complex128)
    cdef cplx[:, ::1] o = out
    cdef Py_ssize_t i, j, a, b
    cdef cplx tr
    for i in range(dA):
        for j in range(dA):
            tr = 0
            for a in range(dB):
                tr = tr + rho[i * dB + a, j * dB + a]
            for a in range(dB):
                for b in range(dB):
                    o[i * dB + a, j * dB + b] = -k * rho[i * dB + a, j * dB + b]
                o[i * dB + a, j * dB + a] = o[i * dB + a, j * dB + a] + tr
    return out


def gen_choi_second(const cplx[:, ::1] rho, Py_ssize_t dA, Py_ssize_t dB, Py_ssize_t kk):
    cdef Py_ssize_t n = dA * dB
    out = np.empty((n, n), dtype=np.complex128)
    cdef cplx[:, ::1] o = out
    cdef Py_ssize_t i, j, a, b, s
    cdef cplx acc
    for i in range(dA):
        for j in range(dA):
            for a in range(dB):
                for b in range(dB):
                    o[i * dB + a, j * dB + b] = -rho[i * dB + a, j * dB + b]
                acc = (dB - kk) * rho[i * dB + a, j * dB + a]
                for s in range(1, kk + 1):
                    acc = acc + rho[i * dB + (a + s) % dB, j * dB + (a + s) % dB]
                o[i * dB + a, j * dB + a] = o[i * dB + a, j * dB + a] + acc
    return out


def breuer_hall_second(const cplx[:, ::1] rho, Py_ssize_t dA, Py_ssize_t dB, const cplx[:, ::1] U):
    cdef Py_ssize_t n = dA * dB
    out = np.empty((n, n), dtype=np.complex128)
    cdef cplx[:, ::1] o = out
    # tmp = U X^T for the current block; then U X^T U^dagger
    tmp_arr = np.empty((dB, dB), dtype=np.complex128)
    cdef cplx[:, ::1] tmp = tmp_arr
    cdef Py_ssize_t i, j, a, b, c
    cdef cplx tr, acc
    for i in range(dA):
        for j in range(dA):
            tr = 0
            for a in range(dB):
                tr = tr + rho[i * dB + a, j * dB + a]
            for a in range(dB):
                for b in range(dB):
                    acc = 0
                    for c in range(dB):
                        acc = acc + U[a, c] * rho[i * dB + b, j * dB + c]
                    tmp[a, b] = acc
            for a in range(dB):
                for b in range(dB):
                    acc = 0
                    for c in range(dB):
                        acc = acc + tmp[a, c] * U[b, c].conjugate()
                    o[i * dB + a, j * dB + b] = -rho[i * dB + a, j * dB + b] - acc
                o[i * dB + a, j * dB + a] = o[i * dB + a, j * dB + a] + tr
    return out


def power_sums(const double[::1] ev, Py_ssize_t n_max):
    cdef Py_ssize_t i, n
    cdef Py_ssize_t m = ev.shape[0]
    sums = np.zeros(n_max, dtype=np.float64)
    cdef double[::1] s = sums
    cdef double p
    for i in range(m):
        p = 1.0
        for n in range(n_max):
            p = p * ev[i]
            s[n] = s[n] + p
    return sums

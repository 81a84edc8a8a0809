# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython despreading kernel: per-symbol correlation against 16 references."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def despread(samples, refs, int period):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] s = np.ascontiguousarray(samples, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] r = np.ascontiguousarray(refs, dtype=np.complex128)
    cdef int width = r.shape[1]
    cdef int n_ref = r.shape[0]
    cdef Py_ssize_t n_sym = (s.shape[0] - (width - period)) // period
    if n_sym < 1:
        raise ValueError("frame shorter than one symbol window")

    # split into real/imag planes so the hot loop is pure double arithmetic
    cdef double[::1] s_re = np.ascontiguousarray(s.real)
    cdef double[::1] s_im = np.ascontiguousarray(s.imag)
    cdef double[:, ::1] r_re = np.ascontiguousarray(r.real)
    cdef double[:, ::1] r_im = np.ascontiguousarray(r.imag)

    cdef cnp.ndarray[cnp.int64_t, ndim=1] symbols = np.empty(n_sym, dtype=np.int64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] corrs = np.empty(n_sym, dtype=np.complex128)

    cdef Py_ssize_t k
    cdef int i, j, base, best
    cdef double best_mag, mag, acc_re, acc_im, best_re, best_im, a, b, c, d

    for k in range(n_sym):
        base = <int>(k * period)
        best = 0
        best_mag = -1.0
        best_re = 0.0
        best_im = 0.0
        for j in range(n_ref):
            acc_re = 0.0
            acc_im = 0.0
            # sum s * conj(ref)
            for i in range(width):
                a = s_re[base + i]
                b = s_im[base + i]
                c = r_re[j, i]
                d = r_im[j, i]
                acc_re += a * c + b * d
                acc_im += b * c - a * d
            mag = acc_re * acc_re + acc_im * acc_im
            if mag > best_mag:
                best_mag = mag
                best = j
                best_re = acc_re
                best_im = acc_im
        symbols[k] = best
        corrs[k].real = best_re
        corrs[k].imag = best_im
    return symbols, corrs

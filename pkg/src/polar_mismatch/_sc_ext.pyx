# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled successive-cancellation kernel.

Same contract as :func:`polar_mismatch._kernels.sc_decode_batch_py`.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, log1p, exp, expm1, isnan
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef unsigned char u8


cdef inline double _f(double a, double b) noexcept nogil:
    cdef double aa = fabs(a), ab = fabs(b)
    cdef double ea, eb, ma, mb, den, r
    if aa < 0.5:
        ma = expm1(-aa)
        ea = 1.0 + ma
    else:
        ea = exp(-aa)
        ma = ea - 1.0
    if ab < 0.5:
        mb = expm1(-ab)
        eb = 1.0 + mb
    else:
        eb = exp(-ab)
        mb = eb - 1.0
    den = ea + eb
    if den == 0.0:
        r = aa if aa < ab else ab
    else:
        r = log1p(ma * mb / den)
    if (a < 0) != (b < 0):
        return -r
    return r


cdef inline double _g(double a, double b, u8 u) noexcept nogil:
    cdef double r = b - a if u else b + a
    if isnan(r):
        return 0.0
    return r


cdef struct Ctx:
    const u8* known
    const u8* u
    u8* dec
    u8* uhat
    double* llr_out


cdef void _rec(double* llr, Py_ssize_t m, u8* x, Py_ssize_t off,
               double* s, u8* b, Ctx* c) noexcept nogil:
    cdef Py_ssize_t h, j
    cdef double v
    cdef u8 d, bit
    if m == 1:
        v = llr[0]
        d = 1 if v < 0 else 0
        c.dec[off] = d
        if c.llr_out != NULL:
            c.llr_out[off] = v
        bit = c.u[off] if c.known[off] else d
        c.uhat[off] = bit
        x[0] = bit
        return
    h = m // 2
    for j in range(h):
        s[j] = _f(llr[j], llr[j + h])
    _rec(s, h, b, off, s + h, b + 2 * h, c)
    for j in range(h):
        s[j] = _g(llr[j], llr[j + h], b[j])
    _rec(s, h, b + h, off + h, s + h, b + 2 * h, c)
    for j in range(h):
        x[j] = b[j] ^ b[h + j]
        x[j + h] = b[h + j]


def sc_decode_batch(double[:, ::1] leaf_llr, const u8[::1] known, const u8[:, ::1] u,
                    bint want_llr=False):
    """Decode every row of ``leaf_llr``; see the pure-Python reference."""
    cdef Py_ssize_t T = leaf_llr.shape[0]
    cdef Py_ssize_t N = leaf_llr.shape[1]
    cdef Py_ssize_t t, j
    if known.shape[0] != N or u.shape[0] != T or u.shape[1] != N:
        raise ValueError("dimension mismatch between LLRs, known mask and bit array")
    if N == 0 or (N & (N - 1)) != 0:
        raise ValueError("block length must be a power of two")
    dec_arr = np.zeros((T, N), dtype=np.uint8)
    uhat_arr = np.zeros((T, N), dtype=np.uint8)
    llr_arr = np.zeros((T if want_llr else 1, N if want_llr else 1), dtype=np.float64)
    cdef u8[:, ::1] dec = dec_arr
    cdef u8[:, ::1] uhat = uhat_arr
    cdef double[:, ::1] lo = llr_arr
    cdef double* s = <double*> malloc((N + 1) * sizeof(double))
    cdef double* top = <double*> malloc((N + 1) * sizeof(double))
    cdef u8* b = <u8*> malloc((2 * N + 2) * sizeof(u8))
    cdef u8* x = <u8*> malloc((N + 1) * sizeof(u8))
    cdef Ctx c
    if s == NULL or b == NULL or x == NULL or top == NULL:
        free(s); free(b); free(x); free(top)
        raise MemoryError()
    try:
        with nogil:
            for t in range(T):
                c.known = &known[0]
                c.u = &u[t, 0]
                c.dec = &dec[t, 0]
                c.uhat = &uhat[t, 0]
                c.llr_out = &lo[t, 0] if want_llr else NULL
                for j in range(N):
                    top[j] = leaf_llr[t, j]
                _rec(top, N, x, 0, s, b, &c)
    finally:
        free(s); free(b); free(x); free(top)
    return dec_arr, uhat_arr, (llr_arr if want_llr else None)

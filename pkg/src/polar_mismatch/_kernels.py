"""Successive-cancellation kernels with backend selection.

The compiled extension ``_sc_ext`` is used when it imports; otherwise the
vectorized NumPy implementation below.  Setting ``POLAR_MISMATCH_PURE=1``
forces the NumPy path.

Kernel contract
---------------
``sc_decode_batch(leaf_llr, known, u, want_llr=False)`` decodes ``T`` blocks
at once.  ``leaf_llr[t, j] = ln V(y_j|0) - ln V(y_j|1)``.  At index ``i`` the
hard decision is 0 when the synthetic log-ratio is ``>= 0`` (and when it is
NaN), 1 otherwise.  The bit fed back to later indices is ``u[t, i]`` where
``known[i]`` is set and the decision elsewhere.  Returns
``(decisions, uhat, llr)`` with ``llr`` only when requested.
"""

from __future__ import annotations

import os

import numpy as np


def _split(x):
    """``|x|``, ``exp(-|x|)`` and ``expm1(-|x|)``, each to full relative precision."""
    ax = np.abs(x)
    e = np.exp(-ax)
    m = e - 1.0
    small = ax < 0.5
    if small.any():
        m = np.where(small, np.expm1(-ax), m)
        e = np.where(small, 1.0 + m, e)
    return ax, e, m


def _f(a, b):
    """Exact check-node update ``2 atanh(tanh(a/2) tanh(b/2))``.

    Evaluated as ``log1p(expm1(-|a|) expm1(-|b|) / (exp(-|a|) + exp(-|b|)))``
    with the sign of ``ab``; accurate to a few ulp for tiny and huge results
    alike.
    """
    aa, ea, ma = _split(a)
    ab, eb, mb = _split(b)
    den = ea + eb
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        r = np.log1p(ma * mb / den)
    r = np.where(den == 0.0, np.minimum(aa, ab), r)
    return np.where((a < 0) ^ (b < 0), -r, r)


def _g(a, b, bits):
    with np.errstate(invalid="ignore"):
        r = np.where(bits.astype(bool), b - a, b + a)
    return np.where(np.isnan(r), 0.0, r)


def sc_decode_batch_py(leaf_llr, known, u, want_llr=False):
    leaf_llr = np.ascontiguousarray(leaf_llr, dtype=np.float64)
    known = np.ascontiguousarray(known, dtype=np.uint8)
    u = np.ascontiguousarray(u, dtype=np.uint8)
    T, N = leaf_llr.shape
    if known.shape != (N,) or u.shape != (T, N):
        raise ValueError("dimension mismatch between LLRs, known mask and bit array")
    if N == 0 or N & (N - 1):
        raise ValueError("block length must be a power of two")
    dec = np.zeros((T, N), dtype=np.uint8)
    uhat = np.zeros((T, N), dtype=np.uint8)
    llr_out = np.zeros((T, N)) if want_llr else None
    known_b = known.astype(bool)

    def rec(llr, off):
        m = llr.shape[1]
        if m == 1:
            v = llr[:, 0]
            d = (v < 0).astype(np.uint8)
            dec[:, off] = d
            if llr_out is not None:
                llr_out[:, off] = v
            bit = u[:, off] if known_b[off] else d
            uhat[:, off] = bit
            return bit[:, None]
        h = m // 2
        left, right = llr[:, :h], llr[:, h:]
        xl = rec(_f(left, right), off)
        xr = rec(_g(left, right, xl), off + h)
        return np.concatenate([xl ^ xr, xr], axis=1)

    rec(leaf_llr, 0)
    return dec, uhat, llr_out


try:
    if os.environ.get("POLAR_MISMATCH_PURE"):
        raise ImportError("pure-Python backend forced")
    from ._sc_ext import sc_decode_batch as _sc_decode_batch_ext
except ImportError:
    _sc_decode_batch_ext = None

BACKEND = "cython" if _sc_decode_batch_ext is not None else "numpy"


def sc_decode_batch(leaf_llr, known, u, want_llr=False, backend=None):
    """Dispatch to the selected backend (``'cython'``, ``'numpy'`` or default)."""
    backend = backend or BACKEND
    if backend == "cython":
        if _sc_decode_batch_ext is None:
            raise RuntimeError("compiled kernel is not available")
        return _sc_decode_batch_ext(
            np.ascontiguousarray(leaf_llr, dtype=np.float64),
            np.ascontiguousarray(known, dtype=np.uint8),
            np.ascontiguousarray(u, dtype=np.uint8),
            bool(want_llr),
        )
    if backend == "numpy":
        return sc_decode_batch_py(leaf_llr, known, u, want_llr)
    raise ValueError(f"unknown backend {backend!r}")


def polar_encode_batch(u):
    """``x = u F^{(x)n}`` over GF(2) for each row, natural order."""
    x = np.array(u, dtype=np.uint8, copy=True)
    T, N = x.shape
    h = 1
    while h < N:
        v = x.reshape(T, N // (2 * h), 2, h)
        v[:, :, 0, :] ^= v[:, :, 1, :]
        h *= 2
    return x

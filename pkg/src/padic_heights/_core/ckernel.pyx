# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled schoolbook convolution modulo an integer below 2**63."""

from libc.stdlib cimport malloc, free

from .pykernel import conv_mod as _py_conv_mod

ctypedef unsigned long long u64

cdef extern from *:
    """
    typedef unsigned __int128 u128;
    """
    ctypedef unsigned long long u128

cdef object _LIMIT = 1 << 63


def conv_mod(a, b, mod, n=None):
    """Same contract as the pure-Python kernel."""
    cdef Py_ssize_t la = len(a), lb = len(b), full, n_out, i, j, jmax, k
    if la == 0 or lb == 0:
        return [0] * (n or 0)
    if mod >= _LIMIT:
        return _py_conv_mod(a, b, mod, n)
    full = la + lb - 1
    if n is None:
        n = full
    n_out = full if n > full else n
    if la > n_out:
        la = n_out
    if lb > n_out:
        lb = n_out
    cdef u64 m = mod
    cdef u64 *pa = <u64 *> malloc(la * sizeof(u64))
    cdef u64 *pb = <u64 *> malloc(lb * sizeof(u64))
    cdef u128 *acc = <u128 *> malloc(n_out * sizeof(u128))
    cdef u128 prod
    cdef u128 cap
    cdef int small = mod < (1 << 31)
    cdef int count
    try:
        for i in range(la):
            pa[i] = a[i]
        for i in range(lb):
            pb[i] = b[i]
        for k in range(n_out):
            acc[k] = 0
        if small:
            for i in range(la):
                if pa[i] == 0:
                    continue
                jmax = lb if lb < n_out - i else n_out - i
                for j in range(jmax):
                    acc[i + j] += <u128> pa[i] * pb[j]
        else:
            # products are below 2**126; reduce before the accumulator could wrap
            for k in range(n_out):
                count = 0
                i = k - lb + 1 if k - lb + 1 > 0 else 0
                jmax = k if k < la - 1 else la - 1
                while i <= jmax:
                    acc[k] += <u128> pa[i] * pb[k - i]
                    count += 1
                    if count == 3:
                        acc[k] %= m
                        count = 0
                    i += 1
        return [<u64> (acc[k] % m) for k in range(n_out)] + [0] * (n - n_out)
    finally:
        free(pa)
        free(pb)
        free(acc)

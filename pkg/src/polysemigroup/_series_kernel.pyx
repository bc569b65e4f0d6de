# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled backend for truncated-series coefficient kernels.

Mirror of _series_kernel_py: object-valued coefficients, compiled index loops.
"""

BACKEND = "cython"


cpdef Py_ssize_t first_nonzero(list c):
    cdef Py_ssize_t i, n = len(c)
    for i in range(n):
        if c[i]:
            return i
    return -1


cpdef Py_ssize_t last_nonzero(list c):
    cdef Py_ssize_t i
    for i in range(len(c) - 1, -1, -1):
        if c[i]:
            return i
    return -1


def add_trunc(list a, list b, Py_ssize_t n, zero):
    cdef Py_ssize_t la = len(a), lb = len(b), i, top
    cdef list out = [zero] * (n + 1)
    top = la if la > lb else lb
    if top > n + 1:
        top = n + 1
    for i in range(top):
        if i < la and i < lb:
            out[i] = a[i] + b[i]
        elif i < la:
            out[i] = a[i]
        else:
            out[i] = b[i]
    return out


def sub_trunc(list a, list b, Py_ssize_t n, zero):
    cdef Py_ssize_t la = len(a), lb = len(b), i, top
    cdef list out = [zero] * (n + 1)
    top = la if la > lb else lb
    if top > n + 1:
        top = n + 1
    for i in range(top):
        if i < la and i < lb:
            out[i] = a[i] - b[i]
        elif i < la:
            out[i] = a[i]
        else:
            out[i] = -b[i]
    return out


def scale_trunc(list a, s, Py_ssize_t n, zero):
    cdef Py_ssize_t i, top = len(a)
    cdef list out = [zero] * (n + 1)
    if top > n + 1:
        top = n + 1
    for i in range(top):
        if a[i]:
            out[i] = s * a[i]
    return out


def mul_trunc(list a, list b, Py_ssize_t n, zero):
    cdef Py_ssize_t lo_a = first_nonzero(a), lo_b = first_nonzero(b)
    cdef Py_ssize_t hi_a, hi_b, k, i, i0, i1, top
    cdef list out = [zero] * (n + 1)
    cdef object s, ai, bj
    if lo_a < 0 or lo_b < 0 or lo_a + lo_b > n:
        return out
    hi_a = last_nonzero(a)
    if hi_a > n:
        hi_a = n
    hi_b = last_nonzero(b)
    if hi_b > n:
        hi_b = n
    top = hi_a + hi_b
    if top > n:
        top = n
    for k in range(lo_a + lo_b, top + 1):
        i0 = lo_a if k - hi_b < lo_a else k - hi_b
        i1 = hi_a if k - lo_b > hi_a else k - lo_b
        s = None
        for i in range(i0, i1 + 1):
            ai = a[i]
            if ai:
                bj = b[k - i]
                if bj:
                    if s is None:
                        s = ai * bj
                    else:
                        s = s + ai * bj
        if s is not None:
            out[k] = s
    return out


def compose_trunc(list outer, list inner, Py_ssize_t n, zero):
    cdef Py_ssize_t hi = last_nonzero(outer), j
    cdef list acc
    cdef object oj
    if hi < 0:
        return [zero] * (n + 1)
    acc = [zero] * (n + 1)
    acc[0] = outer[hi]
    for j in range(hi - 1, -1, -1):
        acc = mul_trunc(acc, inner, n, zero)
        oj = outer[j]
        if oj:
            acc[0] = acc[0] + oj
    return acc


def pow_trunc(list base, Py_ssize_t e, Py_ssize_t n, zero, one):
    cdef list out = [zero] * (n + 1)
    cdef list acc = None, b
    out[0] = one
    if e == 0:
        return out
    b = list(base[: n + 1])
    while len(b) < n + 1:
        b.append(zero)
    while e:
        if e & 1:
            acc = list(b) if acc is None else mul_trunc(acc, b, n, zero)
        e >>= 1
        if e:
            b = mul_trunc(b, b, n, zero)
    return acc if acc is not None else out

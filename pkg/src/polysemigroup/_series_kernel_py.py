"""Pure-Python backend for truncated-series coefficient kernels.

All functions operate on plain lists of scalar objects supporting +, * and
truthiness (exact zeros are falsy). Index i holds the coefficient of z^i and
lists have length trunc+1. Leading/trailing exact zeros are skipped, so costs
scale with the actual support windows rather than the truncation order.
"""

BACKEND = "python"


def first_nonzero(c):
    for i, x in enumerate(c):
        if x:
            return i
    return -1


def last_nonzero(c):
    for i in range(len(c) - 1, -1, -1):
        if c[i]:
            return i
    return -1


def add_trunc(a, b, n, zero):
    out = [zero] * (n + 1)
    la, lb = len(a), len(b)
    for i in range(min(n + 1, max(la, lb))):
        if i < la and i < lb:
            out[i] = a[i] + b[i]
        elif i < la:
            out[i] = a[i]
        else:
            out[i] = b[i]
    return out


def sub_trunc(a, b, n, zero):
    out = [zero] * (n + 1)
    la, lb = len(a), len(b)
    for i in range(min(n + 1, max(la, lb))):
        if i < la and i < lb:
            out[i] = a[i] - b[i]
        elif i < la:
            out[i] = a[i]
        else:
            out[i] = -b[i]
    return out


def scale_trunc(a, s, n, zero):
    out = [zero] * (n + 1)
    for i in range(min(n + 1, len(a))):
        if a[i]:
            out[i] = s * a[i]
    return out


def mul_trunc(a, b, n, zero):
    lo_a = first_nonzero(a)
    lo_b = first_nonzero(b)
    out = [zero] * (n + 1)
    if lo_a < 0 or lo_b < 0 or lo_a + lo_b > n:
        return out
    hi_a = min(last_nonzero(a), n)
    hi_b = min(last_nonzero(b), n)
    for k in range(lo_a + lo_b, min(n, hi_a + hi_b) + 1):
        i0 = lo_a if k - hi_b < lo_a else k - hi_b
        i1 = hi_a if k - lo_b > hi_a else k - lo_b
        s = None
        for i in range(i0, i1 + 1):
            ai = a[i]
            if ai:
                bj = b[k - i]
                if bj:
                    s = ai * bj if s is None else s + ai * bj
        if s is not None:
            out[k] = s
    return out


def compose_trunc(outer, inner, n, zero):
    """Horner evaluation outer(inner) truncated at n; inner[0] must be zero."""
    hi = last_nonzero(outer)
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


def pow_trunc(base, e, n, zero, one):
    out = [zero] * (n + 1)
    out[0] = one
    if e == 0:
        return out
    acc = None
    b = list(base[: n + 1]) + [zero] * max(0, n + 1 - len(base))
    while e:
        if e & 1:
            acc = list(b) if acc is None else mul_trunc(acc, b, n, zero)
        e >>= 1
        if e:
            b = mul_trunc(b, b, n, zero)
    return acc if acc is not None else out

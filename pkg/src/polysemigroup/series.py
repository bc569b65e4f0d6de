"""Truncated formal power series at 0 over a pluggable scalar field.

A series knows its coefficients 0..trunc exactly; indices above trunc are
unknown (not zero). Operations never extend the truncation silently: each op
returns the largest index up to which its output coefficients are certain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import kernels
from .fields import ScalarField, common_field, promote_scalar


class ZeroSeriesError(ValueError):
    """Order/gap of a series that vanishes identically within its truncation."""


class ComposeDomainError(ValueError):
    """Inner series of a composition has a nonzero constant term."""


class TruncationError(ValueError):
    """Requested output truncation exceeds the sound bound."""


@dataclass(frozen=True)
class OrderGap:
    """Order of vanishing at 0 and the gap to the second nonzero coefficient.

    gap is math.inf when at most one nonzero coefficient is visible; certain is
    False exactly when the truncation horizon prevents ruling out a later
    nonzero term (i.e. whenever gap is inf).
    """

    order: int
    gap: float  # positive int, or math.inf
    certain: bool


class TruncatedSeries:
    __slots__ = ("field", "coeffs", "trunc")

    def __init__(self, field: ScalarField, coeffs, trunc: int | None = None, coerce: bool = True):
        if trunc is None:
            trunc = len(coeffs) - 1
        if trunc < 0:
            raise ValueError("truncation order must be >= 0")
        zero = field.zero
        if coerce:
            vec = [field.coerce(c) for c in coeffs[: trunc + 1]]
        else:
            vec = list(coeffs[: trunc + 1])
        vec += [zero] * (trunc + 1 - len(vec))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(vec))
        object.__setattr__(self, "trunc", trunc)

    def __setattr__(self, *a):
        raise AttributeError("TruncatedSeries is immutable")

    @staticmethod
    def _raw(field, vec, trunc):
        obj = TruncatedSeries.__new__(TruncatedSeries)
        object.__setattr__(obj, "field", field)
        object.__setattr__(obj, "coeffs", tuple(vec[: trunc + 1]))
        object.__setattr__(obj, "trunc", trunc)
        return obj

    @staticmethod
    def zero(field, trunc):
        return TruncatedSeries._raw(field, [field.zero] * (trunc + 1), trunc)

    @staticmethod
    def identity(field, trunc):
        """The series z."""
        vec = [field.zero] * (trunc + 1)
        if trunc >= 1:
            vec[1] = field.one
        return TruncatedSeries._raw(field, vec, trunc)

    @staticmethod
    def monomial(field, coeff, power, trunc):
        vec = [field.zero] * (trunc + 1)
        if power <= trunc:
            vec[power] = field.coerce(coeff)
        return TruncatedSeries._raw(field, vec, trunc)

    def coefficient(self, i: int):
        if i > self.trunc:
            raise IndexError(f"index {i} beyond truncation {self.trunc}")
        return self.coeffs[i]

    def order(self) -> int | None:
        """Index of the first nonzero coefficient within trunc, or None."""
        fld = self.field
        if fld.is_exact:
            i = kernels.first_nonzero(list(self.coeffs))
            return None if i < 0 else i
        for i, c in enumerate(self.coeffs):
            if not fld.is_negligible(c):
                return i
        return None

    def truncate(self, n: int) -> "TruncatedSeries":
        if n > self.trunc:
            raise TruncationError(f"cannot extend truncation {self.trunc} to {n}")
        return TruncatedSeries._raw(self.field, list(self.coeffs[: n + 1]), n)

    def window(self, lo: int, width: int) -> "TruncatedSeries":
        """Keep indices [lo, lo+width], zero elsewhere; truncation becomes lo+width."""
        hi = min(lo + width, self.trunc)
        zero = self.field.zero
        vec = [zero] * (hi + 1)
        for i in range(lo, hi + 1):
            vec[i] = self.coeffs[i]
        return TruncatedSeries._raw(self.field, vec, hi)

    def promote(self, field: ScalarField) -> "TruncatedSeries":
        if field == self.field:
            return self
        vec = [promote_scalar(c, self.field, field) for c in self.coeffs]
        return TruncatedSeries._raw(field, vec, self.trunc)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.field == other.field and self.trunc == other.trunc
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.field, self.trunc, self.coeffs))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"({c!r})*z^{i}")
            if len(terms) > 6:
                terms.append("...")
                break
        body = " + ".join(terms) if terms else "0"
        return f"<series {body} + O(z^{self.trunc + 1})>"


def _join(a: TruncatedSeries, b: TruncatedSeries):
    fld = common_field(a.field, b.field)
    return a.promote(fld), b.promote(fld), fld


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a, b, fld = _join(a, b)
    n = min(a.trunc, b.trunc)
    with fld.context():
        vec = kernels.add_trunc(list(a.coeffs), list(b.coeffs), n, fld.zero)
    return TruncatedSeries._raw(fld, vec, n)


def sub(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a, b, fld = _join(a, b)
    n = min(a.trunc, b.trunc)
    with fld.context():
        vec = kernels.sub_trunc(list(a.coeffs), list(b.coeffs), n, fld.zero)
    return TruncatedSeries._raw(fld, vec, n)


def scale(a: TruncatedSeries, s) -> TruncatedSeries:
    fld = a.field
    with fld.context():
        vec = kernels.scale_trunc(list(a.coeffs), fld.coerce(s), a.trunc, fld.zero)
    return TruncatedSeries._raw(fld, vec, a.trunc)


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a, b, fld = _join(a, b)
    n = min(a.trunc, b.trunc)
    with fld.context():
        vec = kernels.mul_trunc(list(a.coeffs), list(b.coeffs), n, fld.zero)
    return TruncatedSeries._raw(fld, vec, n)


def power(a: TruncatedSeries, e: int, out_trunc: int | None = None) -> TruncatedSeries:
    if e < 0:
        raise ValueError("negative series power")
    fld = a.field
    n = a.trunc if out_trunc is None else min(out_trunc, a.trunc)
    with fld.context():
        vec = kernels.pow_trunc(list(a.coeffs), e, n, fld.zero, fld.one)
    return TruncatedSeries._raw(fld, vec, n)


def compose_bound(outer: TruncatedSeries, inner: TruncatedSeries) -> int:
    """Largest output index certain for outer(inner).

    Unknown outer terms (index > N_o) first affect index (N_o+1)*Ord(inner);
    unknown inner terms (index > N_i) first affect index
    N_i + (Ord(outer)-1)*Ord(inner) + 1.
    """
    w_i = inner.order()
    if w_i is None:
        w_i = inner.trunc + 1
    w_o = outer.order()
    if w_o is None:
        w_o = outer.trunc + 1
    a1 = (outer.trunc + 1) * w_i - 1
    a2 = inner.trunc + (w_o - 1) * w_i
    return min(a1, a2)


def compose(outer: TruncatedSeries, inner: TruncatedSeries,
            out_trunc: int | None = None) -> TruncatedSeries:
    """outer(inner(z)) truncated at the sound bound (or an explicit smaller order)."""
    outer, inner, fld = _join(outer, inner)
    c0 = inner.coeffs[0] if inner.trunc >= 0 else fld.zero
    if (fld.is_exact and c0) or (not fld.is_exact and not fld.is_negligible(c0)):
        raise ComposeDomainError("inner series has a nonzero constant term")
    bound = compose_bound(outer, inner)
    if out_trunc is None:
        n = bound
    else:
        if out_trunc > bound:
            raise TruncationError(f"requested truncation {out_trunc} exceeds sound bound {bound}")
        n = out_trunc
    inner_vec = list(inner.coeffs[: n + 1])
    if inner.trunc < n:
        inner_vec += [fld.zero] * (n - inner.trunc)
    if not fld.is_exact:
        # clamp the constant term so Horner stays in the admissible domain
        inner_vec[0] = fld.zero
    with fld.context():
        vec = kernels.compose_trunc(list(outer.coeffs), inner_vec, n, fld.zero)
    return TruncatedSeries._raw(fld, vec, n)


def derivative(a: TruncatedSeries) -> TruncatedSeries:
    fld = a.field
    n = max(0, a.trunc - 1)
    with fld.context():
        vec = [fld.coerce(i + 1) * a.coeffs[i + 1] for i in range(a.trunc)]
    if not vec:
        vec = [fld.zero]
    return TruncatedSeries._raw(fld, vec, n)


def reciprocal(a: TruncatedSeries) -> TruncatedSeries:
    """1/a for a with invertible constant term, to the same truncation (Newton)."""
    fld = a.field
    c0 = a.coeffs[0]
    if fld.is_exact and not c0:
        raise ZeroDivisionError("reciprocal of a series with zero constant term")
    with fld.context():
        r = _recip_raw(list(a.coeffs), a.trunc, fld)
    return TruncatedSeries._raw(fld, r, a.trunc)


def comp_inverse(s: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse t with s(t) = t(s) = z + O(z^{trunc+1}).

    Newton doubling on raw coefficient lists. After a round at order p the
    defect s(t)-z has order >= p+1, so the correction at order m <= 2p only
    consumes 1/s'(t) up to index m-p-1 < p; the one uncertain index of the
    derivative composite (index m, set to zero) never reaches the kept window.
    """
    fld = s.field
    n = s.trunc
    ord_s = s.order()
    if ord_s != 1:
        raise ComposeDomainError("compositional inverse needs order exactly 1")
    if n < 1:
        raise TruncationError("truncation too small for a compositional inverse")
    zero, one = fld.zero, fld.one
    with fld.context():
        sv = list(s.coeffs)
        sv[0] = zero
        dsv = [fld.coerce(i + 1) * sv[i + 1] for i in range(n)] + [zero]
        t = [zero, one / s.coeffs[1]]
        m = 1
        while m < n:
            m = min(n, 2 * m)
            tv = t + [zero] * (m + 1 - len(t))
            st = kernels.compose_trunc(sv[: m + 1], tv, m, zero)
            st[1] = st[1] - one
            dst = kernels.compose_trunc(dsv[: m + 1], tv, m, zero)
            r = _recip_raw(dst, m, fld)
            corr = kernels.mul_trunc(st, r, m, zero)
            t = kernels.sub_trunc(tv, corr, m, zero)
    return TruncatedSeries._raw(fld, t, n)


def _recip_raw(a, n, fld):
    zero = fld.zero
    inv0 = fld.one / a[0]
    r = [inv0]
    m = 0
    two = fld.coerce(2)
    while m < n:
        m = min(n, 2 * m + 1)
        ar = kernels.mul_trunc(a[: m + 1], r, m, zero)
        corr = kernels.scale_trunc(ar, fld.coerce(-1), m, zero)
        corr[0] = corr[0] + two
        r = kernels.mul_trunc(r + [zero] * (m + 1 - len(r)), corr, m, zero)
    return r + [zero] * (n + 1 - len(r))


def order_and_gap(s: TruncatedSeries) -> OrderGap:
    """Order of vanishing and gap to the second nonzero coefficient.

    Raises ZeroSeriesError when no nonzero coefficient is visible within trunc.
    """
    fld = s.field
    first = None
    for i, c in enumerate(s.coeffs):
        if not fld.is_negligible(c):
            first = i
            break
    if first is None:
        raise ZeroSeriesError("order/gap indeterminate: series is zero within truncation")
    for j in range(first + 1, s.trunc + 1):
        if not fld.is_negligible(s.coeffs[j]):
            return OrderGap(order=first, gap=j - first, certain=True)
    return OrderGap(order=first, gap=math.inf, certain=False)

"""Conjugation of a polynomial to its monomial model at infinity.

Everything is computed in the chart w = 1/z: the avatar of a degree-n
polynomial p is the order-n series germ of w -> 1/p(1/w) at 0, and the
coordinate change psi (order 1) satisfies psi(avatar(p)) = psi**n. Conjugating
another generator q through psi yields psi o avatar(q) o psi^{-1}; the test for
membership in the monomial model checks how far that composite is from a pure
power of w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from . import series as S
from .fields import BigComplexField, ScalarField, unity_order_exact
from .polynomials import Polynomial
from .series import TruncatedSeries


class BottcherConstructionError(ValueError):
    def __init__(self, residual, message="functional-equation residual exceeds tolerance"):
        super().__init__(f"{message}: {residual}")
        self.residual = residual


class HorizonError(ValueError):
    """Truncation horizon too short for the requested verdict."""


def to_zero_coordinate(p: Polynomial, trunc: int) -> TruncatedSeries:
    """Series germ of w -> 1/p(1/w) at w = 0; order = deg p, leading 1/lead(p)."""
    fld = p.field
    n = p.degree
    if n < 1:
        raise ValueError("need degree >= 1")
    unit = list(reversed(p.coeffs))  # p(1/w) = w^{-n} * (c_n + c_{n-1} w + ... + c_0 w^n)
    u = TruncatedSeries(fld, unit, trunc=max(trunc - n, len(unit) - 1), coerce=False)
    r = S.reciprocal(u)
    vec = [fld.zero] * n + list(r.coeffs)
    return TruncatedSeries._raw(fld, vec[: trunc + 1], trunc)


def _leading_root(fld: ScalarField, value, n_minus_1: int, branch: int):
    """A solution c of c**(n-1) = value, branch-shifted for BigComplex fields."""
    if isinstance(fld, BigComplexField):
        with fld.context():
            c = gmpy2.exp(gmpy2.log(value) / n_minus_1)
            if branch % n_minus_1:
                ang = 2 * gmpy2.const_pi() * (branch % n_minus_1) / n_minus_1
                c = c * gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang))
            return c
    if value == fld.one:
        return fld.one
    if isinstance(value, Fraction) or not fld.is_exact:
        pass
    # exact root extraction: try small rational candidates num/den from perfect powers
    cand = _exact_root(fld, value, n_minus_1)
    if cand is not None:
        return cand
    raise ValueError(
        f"leading coefficient {value!r} has no accessible {n_minus_1}-th root in {fld!r}; "
        "use a BigComplex field")


def _exact_root(fld, value, k):
    """Best-effort k-th root of an exact scalar (rational perfect powers, units)."""
    if value == -fld.one and k % 2 == 1:
        return -fld.one
    try:
        frac = value if isinstance(value, Fraction) else None
        if frac is None and hasattr(value, "re") and not value.im:
            frac = value.re
        if frac is None and hasattr(value, "coeffs") and not any(value.coeffs[1:]):
            frac = value.coeffs[0]
    except (AttributeError, IndexError):
        frac = None
    if frac is None or frac <= 0:
        return None
    num = _iroot(frac.numerator, k)
    den = _iroot(frac.denominator, k)
    if num is None or den is None:
        return None
    return fld.coerce(Fraction(num, den))


def _iroot(v: int, k: int):
    r = round(v ** (1.0 / k))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** k == v:
            return c
    return None


@dataclass
class BottcherData:
    base: Polynomial
    psi: TruncatedSeries
    psi_inv: TruncatedSeries
    branch_index: int
    residual: float

    @property
    def degree(self):
        return self.base.degree


def bottcher_series(p: Polynomial, trunc: int = 64, branch: int = 0,
                    tolerance: float | None = None) -> BottcherData:
    """Solve psi(avatar(p)) = psi**n coefficient by coefficient.

    One new coefficient per index: comparing index n+m-1 of both sides is
    linear in c_m with pivot n*c_1**(n-1). The functional-equation residual
    over the full horizon is recorded and gated against the tolerance.
    """
    fld = p.field
    n = p.degree
    if n < 2:
        raise ValueError("base polynomial must have degree >= 2")
    if tolerance is None:
        tolerance = fld.tolerance if isinstance(fld, BigComplexField) else 0.0
    horizon = n + trunc - 1
    avatar = to_zero_coordinate(p, horizon)
    zero, one = fld.zero, fld.one
    with fld.context():
        u_n = avatar.coeffs[n]  # = 1/lead(p)
        c1 = _leading_root(fld, u_n, n - 1, branch)
        # powers of the avatar that can reach index <= horizon
        av_pows = {}
        cur = avatar
        j = 1
        av_pows[1] = cur
        while (j + 1) * n <= horizon:
            cur = S.mul(cur, avatar)
            j += 1
            av_pows[j] = cur
        jmax = j
        # lhs accumulator: sum_j c_j * avatar^j, built as coefficients become known
        lhs = [zero] * (horizon + 1)
        for i in range(n, horizon + 1):
            lhs[i] = c1 * avatar.coeffs[i]
        # psi powers psi^t (t = 1..n) maintained under coefficient appends
        psi = [zero] * (horizon + 1)
        psi[1] = c1
        pw = [None] * (n + 1)  # pw[t] = psi^t coefficient lists
        pw[1] = list(psi)
        for t in range(2, n + 1):
            from . import kernels

            pw[t] = kernels.mul_trunc(pw[t - 1], pw[1], horizon, zero)
        binom = [[math.comb(t, s) for s in range(n + 1)] for t in range(n + 1)]
        pivot = fld.coerce(n) * c1 ** (n - 1)
        inv_pivot = one / pivot
        for m in range(2, trunc + 1):
            idx = n + m - 1
            rhs_known = pw[n][idx]
            c_m = (lhs[idx] - rhs_known) * inv_pivot
            if fld.is_exact and not c_m:
                continue  # zero coefficient: no updates needed
            psi[m] = c_m
            # update psi powers: (psi + c z^m)^t = sum_s C(t,s) psi^{t-s} c^s z^{ms}
            cpows = [one]
            smax = min(n, horizon // m)
            for _ in range(smax):
                cpows.append(cpows[-1] * c_m)
            for t in range(n, 1, -1):
                tgt = pw[t]
                for s in range(1, min(t, smax) + 1):
                    base = pw[t - s] if t - s >= 1 else None
                    coef = fld.coerce(binom[t][s]) * cpows[s]
                    off = m * s
                    if base is None:
                        if off <= horizon:
                            tgt[off] = tgt[off] + coef
                    else:
                        for i in range(off, horizon + 1):
                            b = base[i - off]
                            if b:
                                tgt[i] = tgt[i] + coef * b
            pw[1][m] = c_m
            # lhs gains c_m * avatar^m
            if m <= jmax:
                av = av_pows[m].coeffs
                for i in range(m * n, horizon + 1):
                    a = av[i]
                    if a:
                        lhs[i] = lhs[i] + c_m * a
        psi_series = TruncatedSeries._raw(fld, psi[: trunc + 1], trunc)
        # residual of psi(avatar) - psi^n over the sound horizon
        comp = S.compose(psi_series, avatar, out_trunc=horizon)
        residual = 0.0
        for i in range(horizon + 1):
            d = comp.coeffs[i] - pw[n][i]
            mag = fld.magnitude(d)
            if mag > residual:
                residual = mag
    if residual > max(tolerance, 0.0) and (tolerance or not fld.is_exact):
        raise BottcherConstructionError(residual)
    if fld.is_exact and residual != 0.0:
        raise BottcherConstructionError(residual, "exact construction left a nonzero residual")
    psi_inv = S.comp_inverse(psi_series)
    return BottcherData(base=p, psi=psi_series, psi_inv=psi_inv,
                        branch_index=branch, residual=residual)


def conjugate_generator(bd: BottcherData, q: Polynomial) -> TruncatedSeries:
    """psi o avatar(q) o psi^{-1}, order = deg q, at the psi truncation."""
    if q.degree < 2:
        raise ValueError("generators must have degree >= 2")
    fld = bd.psi.field
    trunc = bd.psi.trunc
    avatar = to_zero_coordinate(q.promote(fld), trunc)
    inner = S.compose(avatar, bd.psi_inv, out_trunc=trunc)
    return S.compose(bd.psi, inner, out_trunc=trunc)


@dataclass(frozen=True)
class MonomialityReport:
    is_monomial: bool
    order: int
    leading: object
    max_tail: float
    horizon: int

    @property
    def leading_at_infinity(self):
        """Reciprocal of the chart-at-zero leading coefficient."""
        return 1 / self.leading if not isinstance(self.leading, Fraction) else Fraction(1) / self.leading


def monomiality_test(q: TruncatedSeries, tol: float) -> MonomialityReport:
    """Is q a single power of w up to tol, over its whole known horizon?"""
    fld = q.field
    order = None
    for i, c in enumerate(q.coeffs):
        if fld.magnitude(c) > tol:
            order = i
            break
    if order is None:
        raise ValueError("series is zero within tolerance; monomiality undefined")
    if order < 2:
        raise ValueError("monomiality test expects order >= 2")
    if q.trunc < 2 * order:
        raise HorizonError(
            f"horizon {q.trunc} shorter than twice the order {order}; verdict inconclusive")
    max_tail = 0.0
    for i in range(order + 1, q.trunc + 1):
        m = fld.magnitude(q.coeffs[i])
        if m > max_tail:
            max_tail = m
    return MonomialityReport(is_monomial=max_tail <= tol, order=order,
                             leading=q.coeffs[order], max_tail=max_tail, horizon=q.trunc)


@dataclass(frozen=True)
class RootOfUnityReport:
    order: int | None
    power_error: float
    modulus_error: float


def root_of_unity_test(s, field: ScalarField, max_order: int, tol: float = 0.0) -> RootOfUnityReport:
    """Least l <= max_order with s**l = 1 (exactly, or within tol for BigComplex)."""
    if field.is_exact:
        l = unity_order_exact(field.coerce(s), field, max_order)
        mod_err = abs(abs(complex(field.to_complex(s))) - 1.0)
        return RootOfUnityReport(order=l, power_error=0.0 if l else math.inf,
                                 modulus_error=mod_err if l is None else 0.0)
    with field.context():
        mod_err = float(abs(abs(s) - 1))
        if mod_err > tol:
            return RootOfUnityReport(order=None, power_error=math.inf, modulus_error=mod_err)
        theta = gmpy2.atan2(s.imag, s.real) / (2 * gmpy2.const_pi())
        for q in _convergent_denominators(theta, max_order):
            err = float(abs(s ** q - 1))
            if err <= tol:
                # minimality: the true order divides q
                best = q
                for d in sorted(_divisors(q)):
                    if float(abs(s ** d - 1)) <= tol:
                        best = d
                        break
                return RootOfUnityReport(order=best, power_error=float(abs(s ** best - 1)),
                                         modulus_error=mod_err)
        return RootOfUnityReport(order=None, power_error=math.inf, modulus_error=mod_err)


def _convergent_denominators(theta, max_den):
    """Denominators of continued-fraction convergents of theta, ascending, <= max_den."""
    x = theta
    h0, h1 = 1, 0  # denominators k_{-2}, k_{-1}
    dens = []
    for _ in range(64):
        a = int(gmpy2.floor(x))
        h0, h1 = h1, a * h1 + h0
        if h1 > max_den:
            break
        if h1 >= 1:
            dens.append(h1)
        frac = x - a
        if frac == 0:
            break
        x = 1 / frac
    out = []
    seen = set()
    for d in dens:
        if d not in seen:
            seen.add(d)
            out.append(d)
    return out


def _divisors(q):
    out = set()
    d = 1
    while d * d <= q:
        if q % d == 0:
            out.add(d)
            out.add(q // d)
        d += 1
    return out

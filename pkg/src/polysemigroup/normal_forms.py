"""Special-family detection (simultaneous conjugacy into monomials or Chebyshev
polynomials) and best-effort extraction of a common compositional base of shape
z^r * R(z^l)."""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .fields import (RATIONAL, BigComplexField, GaussianRational, CyclotomicField,
                     Cyclotomic, ScalarField)
from .polynomials import AffineMap, Polynomial
from . import bottcher as B
from . import series as S


# ---------------------------------------------------------------------------
# Chebyshev polynomials, normalization T_n(cos t) = cos nt
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _cheb_coeffs(n: int) -> tuple:
    if n == 1:
        return (0, 1)
    if n == 2:
        return (-1, 0, 2)
    prev2 = _cheb_coeffs(n - 2)
    prev1 = _cheb_coeffs(n - 1)
    out = [0] * (n + 1)
    for i, c in enumerate(prev1):
        out[i + 1] += 2 * c
    for i, c in enumerate(prev2):
        out[i] -= c
    return tuple(out)


def chebyshev(n: int) -> Polynomial:
    """T_n over the rationals via T_{n+1} = 2z T_n - T_{n-1}."""
    if n < 1:
        raise ValueError("Chebyshev index must be >= 1")
    return Polynomial(RATIONAL, [Fraction(c) for c in _cheb_coeffs(n)], coerce=False)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _eq(fld: ScalarField, a, b) -> bool:
    if fld.is_exact:
        return a == b
    return fld.magnitude(a - b) <= fld.tolerance


def _is_zero(fld, a):
    return not a if fld.is_exact else fld.magnitude(a) <= fld.tolerance


def _center(p: Polynomial):
    """-p_{n-1}/(n p_n): the only candidate fixed translation for both families."""
    fld = p.field
    n = p.degree
    with fld.context():
        return -p.coeffs[n - 1] / (fld.coerce(n) * p.coeffs[n])


def _shift(p: Polynomial, v) -> Polynomial:
    lam = Polynomial(p.field, [v, p.field.one], coerce=False)
    return p.compose(lam)


def exact_sqrt(fld: ScalarField, x):
    """Square root inside the field when one exists, else None."""
    def _rat_sqrt(fr: Fraction):
        if fr < 0:
            return None
        num = _isqrt_exact(fr.numerator)
        den = _isqrt_exact(fr.denominator)
        if num is None or den is None:
            return None
        return Fraction(num, den)

    if isinstance(x, Fraction):
        r = _rat_sqrt(x)
        return fld.coerce(r) if r is not None else None
    if isinstance(x, GaussianRational):
        if not x.im:
            r = _rat_sqrt(x.re)
            if r is not None:
                return GaussianRational(r)
            r = _rat_sqrt(-x.re)
            return GaussianRational(0, r) if r is not None else None
        # (a+bi): norm must be a rational square, then solve 2 real equations
        nrm = _rat_sqrt(x.re * x.re + x.im * x.im)
        if nrm is None:
            return None
        re2 = (x.re + nrm) / 2
        r = _rat_sqrt(re2)
        if r is None or not r:
            return None
        return GaussianRational(r, x.im / (2 * r))
    if isinstance(x, Cyclotomic):
        if not any(x.coeffs[1:]):
            r = _rat_sqrt(x.coeffs[0])
            if r is not None:
                return fld.coerce(r)
        return None
    return None


def _isqrt_exact(v: int):
    from math import isqrt

    r = isqrt(v)
    return r if r * r == v else None


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerFamily:
    conjugator: AffineMap
    monomials: tuple  # (coefficient, degree) per generator, after conjugation


@dataclass(frozen=True)
class ChebyshevFamily:
    conjugator: AffineMap
    signs: tuple
    exact: bool  # conjugator scale lies in the scalar field


@dataclass(frozen=True)
class TPowerForm:
    base: Polynomial
    shape_l: int
    shape_r: int
    omegas: tuple
    exponents: tuple


@dataclass(frozen=True)
class NormalFormReport:
    kind: str  # 'power' | 'chebyshev' | 't-power' | 'none'
    power: PowerFamily | None = None
    chebyshev: ChebyshevFamily | None = None
    t_power: TPowerForm | None = None
    reason: str = ""


# ---------------------------------------------------------------------------
# power-family detection
# ---------------------------------------------------------------------------

def detect_power_conjugacy(generators) -> PowerFamily | None:
    """Affine map lambda with lambda^{-1} P_i lambda monomial for every i.

    The translation is forced: the center of P_1 must be a fixed point with
    fully degenerate critical structure, so lambda = z + v is the only
    candidate up to scale (which is free for monomials).
    """
    if not generators:
        return None
    fld = generators[0].field
    v = _center(generators[0])
    mons = []
    for p in generators:
        if not _eq(fld, _center(p), v):
            return None
        q = _shift(p, v)
        with fld.context():
            const_fixed = _eq(fld, q.coeffs[0], v)
        if not const_fixed:
            return None
        for i in range(1, p.degree):
            if not _is_zero(fld, q.coeffs[i]):
                return None
        mons.append((q.coeffs[p.degree], p.degree))
    lam = AffineMap(fld, fld.one, v)
    return PowerFamily(conjugator=lam, monomials=tuple(mons))


# ---------------------------------------------------------------------------
# Chebyshev-family detection
# ---------------------------------------------------------------------------

def _cheb_constraints(p: Polynomial, v, sign: int):
    """Power constraints u^m = rhs for P(uz+v) = sign*u*T_n(z) + v, or None."""
    fld = p.field
    n = p.degree
    t = chebyshev(n).promote(fld) if not isinstance(fld, BigComplexField) else \
        chebyshev(n).promote(fld)
    s = _shift(p, v)
    constraints = []
    with fld.context():
        for j in range(n, 0, -1):
            tj = t.coeffs[j] if j <= t.degree else fld.zero
            sj = s.coeffs[j]
            if _is_zero(fld, tj):
                if not _is_zero(fld, sj):
                    return None
                continue
            if _is_zero(fld, sj):
                return None
            rhs = fld.coerce(sign) * tj / sj
            m = j - 1
            if m == 0:
                if not _eq(fld, rhs, fld.one):
                    return None
                continue
            constraints.append((m, rhs))
        # constant term: s_0 = sign*u*t_0 + v
        t0 = t.coeffs[0]
        s0 = s.coeffs[0]
        if _is_zero(fld, t0):
            if not _eq(fld, s0, v):
                return None
        else:
            diff = s0 - v
            if _is_zero(fld, diff):
                return None
            constraints.append((1, diff / (fld.coerce(sign) * t0)))
    return constraints


def _solve_power_constraints(fld, constraints):
    """(g, u_g) with u^g = u_g consistent with all u^m = rhs, or None."""
    with fld.context():
        g = 0
        for (m, _) in constraints:
            g = gcd(g, m)
        # Bezout combination g = sum c_i m_i built pairwise
        cur_m, cur_val = constraints[0]
        for (m, rhs) in constraints[1:]:
            gg, x, y = _ext_gcd(cur_m, m)
            val = _powsigned(fld, cur_val, x) * _powsigned(fld, rhs, y)
            cur_m, cur_val = gg, val
        assert cur_m == g
        for (m, rhs) in constraints:
            if not _eq(fld, _powsigned(fld, cur_val, m // g), rhs):
                return None
        return (g, cur_val)


def _ext_gcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _powsigned(fld, x, e):
    if e >= 0:
        return x ** e
    with fld.context():
        return (fld.one / x) ** (-e)


def detect_chebyshev_conjugacy(generators):
    """ChebyshevFamily(lambda, signs) with lambda^{-1} P_i lambda = +-T_{n_i}, or None.

    The scale satisfies power constraints with field right-hand sides; it can
    live in a quadratic extension, in which case the family is reported with a
    numeric conjugator and exact=False.
    """
    if not generators:
        return None
    fld = generators[0].field
    v = _center(generators[0])
    for p in generators[1:]:
        if not _eq(fld, _center(p), v):
            return None

    choices = []  # per generator: list of (sign, constraints)
    for p in generators:
        opts = []
        for sign in (1, -1):
            cons = _cheb_constraints(p, v, sign)
            if cons is not None:
                opts.append((sign, cons))
        if not opts:
            return None
        choices.append(opts)

    import itertools

    for combo in itertools.product(*choices):
        all_cons = [c for (_, cons) in combo for c in cons]
        if not all_cons:
            continue
        solved = _solve_power_constraints(fld, all_cons)
        if solved is None:
            continue
        g, u_g = solved
        signs = tuple(sign for (sign, _) in combo)
        if g == 1:
            u = u_g
            exact = True
        else:
            u = None
            if g == 2:
                u = exact_sqrt(fld, u_g)
            elif g % 2 == 0:
                r = exact_sqrt(fld, u_g)
                u = exact_sqrt(fld, r) if (g == 4 and r is not None) else None
            exact = u is not None
            if u is None:
                # numeric scale: any complex g-th root certifies the family
                bc = BigComplexField(128)
                import gmpy2

                with bc.context():
                    u = gmpy2.exp(gmpy2.log(bc.coerce(u_g)) / g)
                lam = AffineMap(bc, u, bc.coerce(v))
                if _verify_cheb(generators, lam, signs, bc):
                    return ChebyshevFamily(conjugator=lam, signs=signs, exact=False)
                continue
        lam = AffineMap(fld, u, v)
        if _verify_cheb(generators, lam, signs, fld):
            return ChebyshevFamily(conjugator=lam, signs=signs, exact=exact)
    return None


def _verify_cheb(generators, lam, signs, work_field) -> bool:
    for p, sign in zip(generators, signs):
        target = chebyshev(p.degree)
        if sign < 0:
            target = -target
        conj = lam.conjugate(p.promote(work_field))
        target = target.promote(conj.field)
        if work_field.is_exact:
            if conj != target:
                return False
        else:
            n = max(conj.degree, target.degree)
            for i in range(n + 1):
                a = conj.coeffs[i] if i <= conj.degree else conj.field.zero
                b = target.coeffs[i] if i <= target.degree else conj.field.zero
                if conj.field.magnitude(a - b) > work_field.tolerance * 100:
                    return False
    return True


# ---------------------------------------------------------------------------
# common compositional base of shape z^r R(z^l)
# ---------------------------------------------------------------------------

def _power_exponent(n: int, t: int):
    e = 0
    while n > 1:
        if n % t:
            return None
        n //= t
        e += 1
    return e if e >= 1 else None


def common_power_base(degrees):
    """Smallest t >= 2 with every degree a positive power of t, plus exponents."""
    for t in range(2, min(degrees) + 1):
        exps = [_power_exponent(n, t) for n in degrees]
        if all(e is not None for e in exps):
            return t, tuple(exps)
    return None, None


def unity_scalar(fld: ScalarField, exponent: int, order: int):
    """zeta_order**exponent as a field element, or None when unrepresentable."""
    exponent %= order
    if exponent == 0:
        return fld.one
    if order % (order // gcd(exponent, order)) == 0:
        pass
    red_order = order // gcd(exponent, order)
    red_exp = exponent // gcd(exponent, order)
    if red_order == 1:
        return fld.one
    if red_order == 2:
        return -fld.one
    if isinstance(fld, BigComplexField):
        import gmpy2

        with fld.context():
            ang = 2 * gmpy2.const_pi() * red_exp / red_order
            return gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang))
    if red_order == 4 and fld.name == "gaussian":
        i = GaussianRational(0, 1)
        return i if red_exp == 1 else -i
    if isinstance(fld, CyclotomicField) and fld.m % red_order == 0:
        return fld.zeta((fld.m // red_order) * red_exp)
    return None


def shape_parameters(p: Polynomial):
    """(l, r) with p = z^r R(z^l), l maximal (l = 0 for a monomial)."""
    support = [i for i, c in enumerate(p.coeffs) if c] if p.field.is_exact else \
        [i for i, c in enumerate(p.coeffs) if p.field.magnitude(c) > p.field.tolerance]
    if len(support) <= 1:
        return 0, support[0] if support else 0
    l = 0
    for e in support[1:]:
        l = gcd(l, e - support[0])
    return l, support[0] % l if l else support[0]


def compositional_root(p: Polynomial, t: int, iterations: int) -> Polynomial | None:
    """Degree-t polynomial T with T^(o iterations) = p, by conjugation through the
    power coordinate of p; None when the root is not accessible over the field."""
    fld = p.field
    trunc = 4 * t + 4
    try:
        bd = B.bottcher_series(p, trunc=trunc)
    except (ValueError, B.BottcherConstructionError):
        return None
    with fld.context():
        wt = S.TruncatedSeries.monomial(fld, fld.one, t, trunc)
        cand = S.compose(bd.psi_inv, S.compose(wt, bd.psi, out_trunc=trunc), out_trunc=trunc)
        # avatar -> polynomial: T(1/w) = 1/avatar, so the unit part inverts
        unit = [cand.coeffs[t + s] for s in range(trunc - t + 1)]
        u = S.TruncatedSeries._raw(fld, unit, trunc - t)
        r = S.reciprocal(u)
        coeffs = [fld.zero] * (t + 1)
        for s in range(min(t, r.trunc) + 1):
            coeffs[t - s] = r.coeffs[s]
        for s in range(t + 1, r.trunc + 1):
            if not _is_zero(fld, r.coeffs[s]):
                return None  # not a polynomial: no compositional root this way
        T = Polynomial(fld, coeffs, coerce=False)
    chk = T.iterate(iterations)
    if fld.is_exact:
        return T if chk == p else None
    n = max(chk.degree, p.degree)
    for i in range(n + 1):
        a = chk.coeffs[i] if i <= chk.degree else fld.zero
        b = p.coeffs[i] if i <= p.degree else fld.zero
        if fld.magnitude(a - b) > fld.tolerance * 1000:
            return None
    return T


def extract_t_power_form(generators, decision_data) -> NormalFormReport:
    """Best-effort common base T with P_i = omega_i T^(o l_i) and T = z^r R(z^l).

    decision_data: per generator (unity_exponent, unity_order, degree) of the
    conjugated leading coefficient. Returns kind 'none' with a reason whenever
    the base is not accessible (composite exponent lattice, root outside the
    scalar field, non-polynomial root).
    """
    if not generators:
        return NormalFormReport(kind="none", reason="no generators")
    degrees = [p.degree for p in generators]
    t, exps = common_power_base(degrees)
    if t is None:
        return NormalFormReport(
            kind="none",
            reason=f"degrees {degrees} have no common power base; exponent lattice mixed")
    fld = generators[0].field
    omegas = []
    for p, (e, l, n) in zip(generators, decision_data):
        w = unity_scalar(fld, e, l)
        if w is None:
            return NormalFormReport(kind="none",
                                    reason=f"unity coefficient of order {l} not in {fld!r}")
        omegas.append(w)
    base_idx = min(range(len(generators)), key=lambda i: exps[i])
    with fld.context():
        p_base = generators[base_idx]
        w = omegas[base_idx]
        descaled = p_base.scale(fld.one / w)
        li = exps[base_idx]
        if li == 1:
            T = descaled
        else:
            T = compositional_root(descaled, t, li)
            if T is None:
                return NormalFormReport(kind="none",
                                        reason="compositional root extraction failed")
        shape_l, shape_r = shape_parameters(T)
        if shape_l == 0:
            # monomial base: any modulus works; take the lcm of the unity orders
            from math import lcm

            shape_l = 1
            for (e, l, n) in decision_data:
                red = l // gcd(e, l) if e % l else 1
                shape_l = lcm(shape_l, red)
            shape_r = T.degree % shape_l
        # verify every generator against omega_i T^(o l_i)
        for p, wgt, li in zip(generators, omegas, exps):
            expect = T.iterate(li).scale(wgt)
            if fld.is_exact:
                if expect != p:
                    return NormalFormReport(kind="none",
                                            reason="candidate base fails verification")
            else:
                n = max(expect.degree, p.degree)
                for i in range(n + 1):
                    a = expect.coeffs[i] if i <= expect.degree else fld.zero
                    b = p.coeffs[i] if i <= p.degree else fld.zero
                    if fld.magnitude(a - b) > fld.tolerance * 1000:
                        return NormalFormReport(kind="none",
                                                reason="candidate base fails verification")
        # unity orders must divide the shape modulus (monomial base: no constraint)
        if shape_l:
            for (e, l, n) in decision_data:
                red = l // gcd(e, l) if e % l else 1
                if shape_l % red:
                    return NormalFormReport(
                        kind="none",
                        reason=f"unity order {red} incompatible with shape modulus {shape_l}")
    return NormalFormReport(kind="t-power",
                            t_power=TPowerForm(base=T, shape_l=shape_l, shape_r=shape_r,
                                               omegas=tuple(omegas), exponents=exps))

"""Scalar coefficient fields: exact Gaussian rationals, exact cyclotomic numbers,
and arbitrary-precision complex floats backed by gmpy2.

Exact scalars guarantee a + b - b == a bit for bit; cyclotomic values are kept
reduced mod the m-th cyclotomic polynomial so equality is componentwise.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd

import gmpy2


# ---------------------------------------------------------------------------
# cyclotomic polynomial machinery
# ---------------------------------------------------------------------------

def _poly_divmod_int(num, den):
    # exact division in Z[x]; den monic
    num = list(num)
    d = len(den) - 1
    q = [0] * max(1, len(num) - d)
    for i in range(len(num) - 1, d - 1, -1):
        c = num[i]
        if c:
            q[i - d] = c
            for j, dj in enumerate(den):
                num[i - d + j] -= c * dj
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return q, num


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple:
    """Coefficients (ascending) of the m-th cyclotomic polynomial, monic over Z."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return (-1, 1)
    poly = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            poly, rem = _poly_divmod_int(poly, list(cyclotomic_polynomial(d)))
            assert all(r == 0 for r in rem)
    return tuple(poly)


@lru_cache(maxsize=None)
def _reduction_rows(m: int) -> tuple:
    """Rows k = d..2d-2: integer coefficient vectors of x^k mod Phi_m (length d)."""
    phi = cyclotomic_polynomial(m)
    d = len(phi) - 1
    rows = []
    cur = [-c for c in phi[:d]]  # x^d mod Phi (Phi monic)
    rows.append(tuple(cur))
    for _ in range(d - 2):
        nxt = [0] + cur[:-1]
        top = cur[-1]
        if top:
            for j in range(d):
                nxt[j] -= top * phi[j]
        cur = nxt
        rows.append(tuple(cur))
    return tuple(rows)


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

class GaussianRational:
    """Exact element of Q(i), stored as a pair of Fractions."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        acc = GaussianRational(1)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __repr__(self):
        if not self.im:
            return f"{self.re}"
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


# ---------------------------------------------------------------------------
# cyclotomic numbers
# ---------------------------------------------------------------------------

class Cyclotomic:
    """Exact element of Q(zeta_m), a Fraction vector reduced mod Phi_m.

    The order m is fixed per value; mixed-order arithmetic is rejected (promote
    explicitly with Cyclotomic.promoted or at parse time).
    """

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs=()):
        self.m = m
        d = phi_degree(m)
        vec = [Fraction(0)] * d
        for k, c in enumerate(coeffs):
            if c:
                vec[k] = c if isinstance(c, Fraction) else Fraction(c)
        self.coeffs = tuple(vec)

    @staticmethod
    def from_vector(m, vec):
        obj = Cyclotomic.__new__(Cyclotomic)
        obj.m = m
        obj.coeffs = tuple(vec)
        return obj

    @staticmethod
    def zeta(m: int, power: int = 1) -> "Cyclotomic":
        """zeta_m^power, reduced."""
        d = phi_degree(m)
        power %= m
        if power < d:
            vec = [Fraction(0)] * d
            vec[power] = Fraction(1)
            return Cyclotomic.from_vector(m, vec)
        acc = Cyclotomic(m, [1])
        z = Cyclotomic(m, [0, 1]) if d > 1 else Cyclotomic(m, [_zeta_in_deg1(m)])
        for _ in range(power):
            acc = acc * z
        return acc

    def _coerce(self, other):
        if isinstance(other, Cyclotomic):
            if other.m != self.m:
                raise ValueError(f"cyclotomic order mismatch: {self.m} vs {other.m}")
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.m, [other])
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Cyclotomic.from_vector(self.m, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Cyclotomic.from_vector(self.m, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        d = len(a)
        prod = [Fraction(0)] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        if d > 1:
            rows = _reduction_rows(self.m)
            out = prod[:d]
            for k in range(d, 2 * d - 1):
                c = prod[k]
                if c:
                    row = rows[k - d]
                    for j in range(d):
                        if row[j]:
                            out[j] += c * row[j]
        else:
            out = prod[:1]
        return Cyclotomic.from_vector(self.m, out)

    __rmul__ = __mul__

    def __neg__(self):
        return Cyclotomic.from_vector(self.m, [-a for a in self.coeffs])

    def inverse(self):
        """Inverse via extended Euclid in Q[x] mod Phi_m."""
        if not self:
            raise ZeroDivisionError("inverse of zero cyclotomic")
        d = len(self.coeffs)
        if d == 1:
            return Cyclotomic.from_vector(self.m, [1 / self.coeffs[0]])
        phi = [Fraction(c) for c in cyclotomic_polynomial(self.m)]
        r0, r1 = phi, list(self.coeffs)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while True:
            while len(r1) > 1 and not r1[-1]:
                r1.pop()
            if len(r1) == 1:
                inv = 1 / r1[0]
                vec = [c * inv for c in s1]
                vec += [Fraction(0)] * (d - len(vec))
                return Cyclotomic.from_vector(self.m, vec[:d])
            q, rem = _poly_divmod_frac(r0, r1)
            s_new = _poly_sub(s0, _poly_mul(q, s1))
            r0, r1 = r1, rem
            s0, s1 = s1, s_new

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        acc = Cyclotomic(self.m, [1])
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except ValueError:
            return False
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __bool__(self):
        return any(self.coeffs)

    def __hash__(self):
        if all(not c for c in self.coeffs[1:]):
            return hash(self.coeffs[0])
        return hash((self.m, self.coeffs))

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*z{self.m}^{k}")
        return "+".join(terms) if terms else "0"


def _zeta_in_deg1(m):
    # phi(m) == 1 only for m in {1, 2}
    return Fraction(1) if m == 1 else Fraction(-1)


@lru_cache(maxsize=None)
def phi_degree(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


def _poly_divmod_frac(num, den):
    num = list(num)
    while len(den) > 1 and not den[-1]:
        den = den[:-1]
    d = len(den) - 1
    lead = den[-1]
    q = [Fraction(0)] * max(1, len(num) - d)
    for i in range(len(num) - 1, d - 1, -1):
        c = num[i]
        if c:
            f = c / lead
            q[i - d] = f
            for j, dj in enumerate(den):
                num[i - d + j] -= f * dj
    while len(num) > 1 and not num[-1]:
        num.pop()
    return q, num


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


# ---------------------------------------------------------------------------
# field descriptors
# ---------------------------------------------------------------------------

class ScalarField:
    is_exact = True

    def coerce(self, x):
        raise NotImplementedError

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def is_negligible(self, x) -> bool:
        """Zero test used by order/gap scans; exact for exact fields."""
        return not x

    def magnitude(self, x) -> float:
        return abs(complex(self.to_complex(x)))

    def context(self):
        return _NULL_CTX


class _NullCtx:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


_NULL_CTX = _NullCtx()


class RationalField(ScalarField):
    name = "rational"

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into Q")

    def to_complex(self, x):
        return complex(x)

    def __repr__(self):
        return "Q"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("rational")


class GaussianRationalField(ScalarField):
    name = "gaussian"

    def coerce(self, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x)
        raise TypeError(f"cannot coerce {x!r} into Q(i)")

    def to_complex(self, x):
        x = self.coerce(x)
        return complex(x.re, x.im)

    def __repr__(self):
        return "Q(i)"

    def __eq__(self, other):
        return isinstance(other, GaussianRationalField)

    def __hash__(self):
        return hash("gaussian")


class CyclotomicField(ScalarField):
    name = "cyclotomic"

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("cyclotomic order must be >= 1")
        self.m = m

    def coerce(self, x):
        if isinstance(x, Cyclotomic):
            if x.m != self.m:
                raise TypeError(f"cyclotomic order mismatch: {x.m} into Q(zeta_{self.m})")
            return x
        if isinstance(x, (int, Fraction)):
            return Cyclotomic(self.m, [x])
        raise TypeError(f"cannot coerce {x!r} into Q(zeta_{self.m})")

    def zeta(self, power=1):
        return Cyclotomic.zeta(self.m, power)

    def to_complex(self, x):
        x = self.coerce(x)
        import cmath

        z = cmath.exp(2j * cmath.pi / self.m)
        return sum(complex(c) * z ** k for k, c in enumerate(x.coeffs))

    def __repr__(self):
        return f"Q(zeta_{self.m})"

    def __eq__(self, other):
        return isinstance(other, CyclotomicField) and other.m == self.m

    def __hash__(self):
        return hash(("cyclotomic", self.m))


class BigComplexField(ScalarField):
    """Arbitrary-precision complex scalars (gmpy2.mpc) at a fixed bit precision.

    Mixed-precision series operations run under the lower precision; the
    default zero tolerance is 2**(-precision/2).
    """

    name = "bigcomplex"
    is_exact = False

    def __init__(self, precision: int = 128, tolerance=None):
        if precision < 8:
            raise ValueError("precision too small")
        self.precision = precision
        self._ctx = gmpy2.context(precision=precision)
        self.tolerance = tolerance if tolerance is not None else float(
            gmpy2.mpfr(2) ** (-(precision // 2)))

    def context(self):
        return gmpy2.context(precision=self.precision)

    def coerce(self, x):
        if isinstance(x, type(gmpy2.mpc(0))):
            return x
        with self.context():
            if isinstance(x, (int, float)):
                return gmpy2.mpc(gmpy2.mpfr(x), 0)
            if isinstance(x, Fraction):
                return gmpy2.mpc(gmpy2.mpfr(x.numerator) / gmpy2.mpfr(x.denominator), 0)
            if isinstance(x, complex):
                return gmpy2.mpc(gmpy2.mpfr(x.real), gmpy2.mpfr(x.imag))
            if isinstance(x, GaussianRational):
                return gmpy2.mpc(
                    gmpy2.mpfr(x.re.numerator) / gmpy2.mpfr(x.re.denominator),
                    gmpy2.mpfr(x.im.numerator) / gmpy2.mpfr(x.im.denominator),
                )
            if isinstance(x, Cyclotomic):
                with self.context():
                    pi2 = 2 * gmpy2.const_pi()
                    acc = gmpy2.mpc(0, 0)
                    for k, c in enumerate(x.coeffs):
                        if c:
                            ang = pi2 * k / x.m
                            term = gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang))
                            acc += (gmpy2.mpfr(c.numerator) / gmpy2.mpfr(c.denominator)) * term
                    return acc
            if isinstance(x, str):
                return gmpy2.mpc(x)
        raise TypeError(f"cannot coerce {x!r} into C({self.precision} bits)")

    def is_negligible(self, x):
        return abs(x) <= self.tolerance

    def to_complex(self, x):
        return complex(x)

    def __repr__(self):
        return f"C[{self.precision}b]"

    def __eq__(self, other):
        return isinstance(other, BigComplexField) and other.precision == self.precision

    def __hash__(self):
        return hash(("bigcomplex", self.precision))


RATIONAL = RationalField()
GAUSSIAN = GaussianRationalField()


def common_field(a: ScalarField, b: ScalarField) -> ScalarField:
    """Join of two scalar fields; BigComplex joins take the lower precision."""
    if a == b:
        return a
    order = {"rational": 0, "gaussian": 1, "cyclotomic": 2, "bigcomplex": 3}
    if isinstance(a, BigComplexField) and isinstance(b, BigComplexField):
        return a if a.precision <= b.precision else b
    if isinstance(a, BigComplexField) or isinstance(b, BigComplexField):
        return a if isinstance(a, BigComplexField) else b
    if isinstance(a, CyclotomicField) and isinstance(b, CyclotomicField):
        from math import lcm

        return CyclotomicField(lcm(a.m, b.m))
    if isinstance(a, CyclotomicField) or isinstance(b, CyclotomicField):
        cyc = a if isinstance(a, CyclotomicField) else b
        other = b if cyc is a else a
        if isinstance(other, RationalField):
            return cyc
        from math import lcm

        return CyclotomicField(lcm(cyc.m, 4))
    if order[a.name] >= order[b.name]:
        return a
    return b


def promote_scalar(x, src: ScalarField, dst: ScalarField):
    """Map a scalar from src into dst (src must embed into dst)."""
    if src == dst:
        return x
    if isinstance(dst, BigComplexField):
        return dst.coerce(x)
    if isinstance(dst, CyclotomicField):
        if isinstance(src, RationalField):
            return Cyclotomic(dst.m, [x])
        if isinstance(src, GaussianRationalField):
            if dst.m % 4 != 0:
                raise TypeError(f"Q(i) does not embed in Q(zeta_{dst.m})")
            i_unit = Cyclotomic.zeta(dst.m, dst.m // 4)
            return Cyclotomic(dst.m, [x.re]) + i_unit * Cyclotomic(dst.m, [x.im])
        if isinstance(src, CyclotomicField):
            if dst.m % src.m != 0:
                raise TypeError(f"Q(zeta_{src.m}) does not embed in Q(zeta_{dst.m})")
            step = dst.m // src.m
            acc = Cyclotomic(dst.m, [0])
            for k, c in enumerate(x.coeffs):
                if c:
                    acc = acc + Cyclotomic.zeta(dst.m, step * k) * Cyclotomic(dst.m, [c])
            return acc
    if isinstance(dst, GaussianRationalField) and isinstance(src, RationalField):
        return GaussianRational(x)
    raise TypeError(f"no embedding {src!r} -> {dst!r}")


# ---------------------------------------------------------------------------
# parsing of coefficient strings
# ---------------------------------------------------------------------------

_RAT = r"[+-]?\d+(?:/\d+)?"
_FLOAT = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+[eE][+-]?\d+|\d+\.\d*[eE][+-]?\d+)$")
_TERM = re.compile(
    rf"^(?P<coef>{_RAT})?(?:(?<=\d)\*)?(?P<unit>i|zeta\((?P<m>\d+)\)(?:\^(?P<p>\d+))?)?$"
)


class ScalarParseError(ValueError):
    pass


def parse_scalar(text: str):
    """Parse a coefficient string into (value, field).

    Grammar per term: rational ["p/q"], imaginary unit ["3/4i", "i"], cyclotomic
    ["zeta(5)^2", "2*zeta(3)"], decimal floats ("1.25", "1e-3") force BigComplex.
    Terms may be summed: "1/2+3/4i", "zeta(3)-1".
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ScalarParseError("empty coefficient")
    if _FLOAT.match(s) or ("j" in s):
        return ("float", s)
    # split into signed terms at top level (no parens except zeta(m))
    terms = []
    depth = 0
    cur = ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur and cur[-1] not in "eE(^*/+-":
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    terms.append(cur)

    rat = Fraction(0)
    gauss_im = Fraction(0)
    cyc_parts = []  # (m, power, coef)
    for t in terms:
        if _FLOAT.match(t.lstrip("+-")):
            return ("float", s)
        m = _TERM.match(t if t not in ("+", "-") else t + "1")
        if not m or (m.group("coef") is None and m.group("unit") is None):
            raise ScalarParseError(f"cannot parse coefficient term {t!r} in {text!r}")
        coef = Fraction(m.group("coef")) if m.group("coef") not in (None, "+", "-") else (
            Fraction(-1) if m.group("coef") == "-" else Fraction(1))
        if t in ("+", "-"):
            coef = Fraction(1) if t == "+" else Fraction(-1)
        unit = m.group("unit")
        if unit is None:
            rat += coef
        elif unit == "i":
            gauss_im += coef
        else:
            order = int(m.group("m"))
            power = int(m.group("p") or 1)
            cyc_parts.append((order, power, coef))

    if cyc_parts:
        from math import lcm

        m_all = 1
        for (order, _, _) in cyc_parts:
            m_all = lcm(m_all, order)
        if gauss_im:
            m_all = lcm(m_all, 4)
        field = CyclotomicField(m_all)
        acc = Cyclotomic(m_all, [rat])
        if gauss_im:
            acc = acc + Cyclotomic.zeta(m_all, m_all // 4) * Cyclotomic(m_all, [gauss_im])
        for (order, power, coef) in cyc_parts:
            acc = acc + Cyclotomic.zeta(m_all, (m_all // order) * power) * Cyclotomic(m_all, [coef])
        return (acc, field)
    if gauss_im:
        return (GaussianRational(rat, gauss_im), GAUSSIAN)
    return (rat, RATIONAL)


def unity_order_exact(x, field: ScalarField, max_order: int):
    """Least l <= max_order with x**l == 1 in an exact field, else None."""
    if not field.is_exact:
        raise TypeError("unity_order_exact needs an exact field")
    one = field.one
    acc = x
    for l in range(1, max_order + 1):
        if acc == one:
            return l
        acc = acc * x
    return None

"""Exact polynomials over a scalar field, composition, and affine conjugation."""

from __future__ import annotations

from . import kernels
from .fields import ScalarField, common_field, promote_scalar


class DegreeCapError(ValueError):
    """A composition would exceed the configured degree cap."""


class Polynomial:
    """Coefficient vector indexed by power (ascending); leading coeff nonzero."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: ScalarField, coeffs, coerce: bool = True):
        vec = [field.coerce(c) for c in coeffs] if coerce else list(coeffs)
        while len(vec) > 1 and field.is_exact and not vec[-1]:
            vec.pop()
        if not vec:
            vec = [field.zero]
        self.field = field
        self.coeffs = tuple(vec)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    def __call__(self, x):
        """Horner evaluation at a scalar of the same field."""
        fld = self.field
        with fld.context():
            acc = self.coeffs[-1]
            for c in reversed(self.coeffs[:-1]):
                acc = acc * x + c
        return acc

    def promote(self, field: ScalarField) -> "Polynomial":
        if field == self.field:
            return self
        return Polynomial(field, [promote_scalar(c, self.field, field) for c in self.coeffs],
                          coerce=False)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.field != other.field:
            fld = common_field(self.field, other.field)
            return self.promote(fld).coeffs == other.promote(fld).coeffs
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __repr__(self):
        terms = [f"({c!r})z^{i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(reversed(terms)) if terms else "0"

    def __neg__(self):
        return Polynomial(self.field, [-c for c in self.coeffs], coerce=False)

    def __add__(self, other):
        fld = common_field(self.field, other.field)
        a, b = self.promote(fld), other.promote(fld)
        n = max(a.degree, b.degree)
        vec = kernels.add_trunc(list(a.coeffs), list(b.coeffs), n, fld.zero)
        return Polynomial(fld, vec, coerce=False)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        fld = common_field(self.field, other.field)
        a, b = self.promote(fld), other.promote(fld)
        n = a.degree + b.degree
        with fld.context():
            vec = kernels.mul_trunc(list(a.coeffs), list(b.coeffs), n, fld.zero)
        return Polynomial(fld, vec, coerce=False)

    def scale(self, s) -> "Polynomial":
        fld = self.field
        with fld.context():
            vec = kernels.scale_trunc(list(self.coeffs), fld.coerce(s), self.degree, fld.zero)
        return Polynomial(fld, vec, coerce=False)

    def derivative(self) -> "Polynomial":
        fld = self.field
        with fld.context():
            vec = [fld.coerce(i + 1) * c for i, c in enumerate(self.coeffs[1:])]
        return Polynomial(fld, vec or [fld.zero], coerce=False)

    def compose(self, inner: "Polynomial", degree_cap: int | None = None) -> "Polynomial":
        """self(inner), exact; raises DegreeCapError past the cap."""
        fld = common_field(self.field, inner.field)
        a, b = self.promote(fld), inner.promote(fld)
        out_deg = a.degree * b.degree if a.degree and b.degree else max(a.degree, b.degree, 0)
        if degree_cap is not None and out_deg > degree_cap:
            raise DegreeCapError(f"composition degree {out_deg} exceeds cap {degree_cap}")
        with fld.context():
            vec = kernels.compose_trunc(list(a.coeffs), list(b.coeffs), out_deg, fld.zero)
        return Polynomial(fld, vec, coerce=False)

    def iterate(self, k: int, degree_cap: int | None = None) -> "Polynomial":
        """k-fold compositional power (k >= 1)."""
        if k < 1:
            raise ValueError("iterate needs k >= 1")
        acc = self
        for _ in range(k - 1):
            acc = acc.compose(self, degree_cap=degree_cap)
        return acc

    def complex_coeffs(self):
        return [self.field.to_complex(c) for c in self.coeffs]


def monomial(field, coeff, degree) -> Polynomial:
    vec = [field.zero] * degree + [field.coerce(coeff)]
    return Polynomial(field, vec, coerce=False)


def identity_poly(field) -> Polynomial:
    return Polynomial(field, [field.zero, field.one], coerce=False)


class AffineMap:
    """z -> a*z + b with a invertible."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: ScalarField, a, b):
        self.field = field
        self.a = field.coerce(a)
        self.b = field.coerce(b)
        if field.is_exact and not self.a:
            raise ValueError("affine map must have a != 0")

    def __call__(self, x):
        return self.a * x + self.b

    def inverse(self) -> "AffineMap":
        fld = self.field
        with fld.context():
            ia = fld.one / self.a
            return AffineMap(fld, ia, -self.b * ia)

    def as_polynomial(self) -> Polynomial:
        return Polynomial(self.field, [self.b, self.a], coerce=False)

    def conjugate(self, p: Polynomial) -> Polynomial:
        """lambda^{-1} o p o lambda; preserves degree."""
        fld = common_field(self.field, p.field)
        lam = AffineMap(fld, promote_scalar(self.a, self.field, fld),
                        promote_scalar(self.b, self.field, fld))
        q = p.promote(fld).compose(lam.as_polynomial())
        inv = lam.inverse()
        with fld.context():
            vec = [inv.a * c for c in q.coeffs]
            vec[0] = vec[0] + inv.b
        return Polynomial(fld, vec, coerce=False)

    def __eq__(self, other):
        if not isinstance(other, AffineMap):
            return NotImplemented
        return self.field == other.field and self.a == other.a and self.b == other.b

    def __repr__(self):
        return f"AffineMap({self.a!r}*z + {self.b!r})"

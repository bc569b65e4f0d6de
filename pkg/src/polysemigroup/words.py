"""Word-level machinery: exact composition of words, witness search for
right-ideal intersection, the constructive pigeonhole witness over unity
monomials, relation verification/combination, and coefficient-identity
bookkeeping.

A word [i1, ..., im] denotes P_{i1} o ... o P_{im} (leftmost letter applied
last); a word "ends in" its innermost letter im, so a word ending in i is an
element of the principal right ideal S*P_i once its length is at least 2.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod

from .fields import (BigComplexField, Cyclotomic, CyclotomicField, GaussianRational,
                     ScalarField)
from .polynomials import DegreeCapError, Polynomial

DEFAULT_DEGREE_CAP = 10 ** 6
DEFAULT_WORD_LENGTH_CAP = 12


class InvariantViolationError(AssertionError):
    """A consequence the theory guarantees failed on concrete data."""


# ---------------------------------------------------------------------------
# words and exact composition
# ---------------------------------------------------------------------------

def word_degree(generators, word) -> int:
    return prod(generators[i - 1].degree for i in word)


def compose_word(generators, word, degree_cap: int = DEFAULT_DEGREE_CAP) -> Polynomial:
    """Exact composition of a word; degrees >= 2 enforced, degree cap guarded."""
    if not word:
        raise ValueError("empty word")
    for g in generators:
        if g.degree < 2:
            raise ValueError("generators must have degree >= 2")
    if word_degree(generators, word) > degree_cap:
        raise DegreeCapError(
            f"word degree {word_degree(generators, word)} exceeds cap {degree_cap}")
    acc = generators[word[-1] - 1]
    for letter in reversed(word[:-1]):
        acc = generators[letter - 1].compose(acc, degree_cap=degree_cap)
    return acc


@dataclass(frozen=True)
class RelationCheck:
    status: str  # 'exact' | 'numeric' | 'unequal'
    residual: float | None = None

    @property
    def holds(self):
        return self.status == "exact" or (self.status == "numeric")


def verify_relation(generators, lhs, rhs, degree_cap: int = DEFAULT_DEGREE_CAP) -> RelationCheck:
    """Compare two words: Exact/Unequal over exact fields, residual otherwise."""
    if word_degree(generators, lhs) != word_degree(generators, rhs):
        return RelationCheck("unequal")
    pl = compose_word(generators, lhs, degree_cap)
    pr = compose_word(generators, rhs, degree_cap)
    fld = pl.field
    if fld.is_exact:
        return RelationCheck("exact") if pl == pr else RelationCheck("unequal")
    resid = 0.0
    n = max(pl.degree, pr.degree)
    for i in range(n + 1):
        a = pl.coeffs[i] if i <= pl.degree else fld.zero
        b = pr.coeffs[i] if i <= pr.degree else fld.zero
        m = fld.magnitude(a - b)
        if m > resid:
            resid = m
    return RelationCheck("numeric", residual=resid)


# ---------------------------------------------------------------------------
# monomials with root-of-unity coefficient: exact composition model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialElement:
    """omega * z^degree with omega = zeta_l ** unity_exponent."""

    unity_exponent: int
    degree: int
    unity_order: int

    def __post_init__(self):
        object.__setattr__(self, "unity_exponent", self.unity_exponent % self.unity_order)

    def compose(self, other: "MonomialElement") -> "MonomialElement":
        if other.unity_order != self.unity_order:
            raise ValueError("unity order mismatch")
        return MonomialElement(
            (self.unity_exponent + self.degree * other.unity_exponent) % self.unity_order,
            self.degree * other.degree,
            self.unity_order,
        )


def monomial_word_value(elements, word) -> MonomialElement:
    acc = elements[word[-1] - 1]
    for letter in reversed(word[:-1]):
        acc = elements[letter - 1].compose(acc)
    return acc


@dataclass(frozen=True)
class WitnessCertificate:
    """k words, the i-th ending in letter i, all evaluating to one composite."""

    words: tuple
    composite_degree: int
    verification: str  # 'exact' | 'numeric' | 'monomial-model'
    residual: float | None = None

    @property
    def k(self):
        return len(self.words)


def monomial_witness(elements) -> WitnessCertificate:
    """Constructive witness for unity monomials via cyclic compositions.

    Iterates powers of F_1 = Q_1 o ... o Q_k against the other cyclic products
    and returns the first j1 < j2 with F_1^j2 = F_1^j1 o F_i^(j2-j1) for every
    i simultaneously; j2 is bounded by l^(k-1) + 1 collision slots.
    """
    k = len(elements)
    if k < 1:
        raise ValueError("need at least one element")
    l = elements[0].unity_order
    if any(e.unity_order != l for e in elements):
        raise ValueError("elements must share the unity order")
    if k == 1:
        w = (1, 1)
        return WitnessCertificate(words=(w,), composite_degree=elements[0].degree ** 2,
                                  verification="monomial-model")
    f_words = []
    f_elems = []
    for i in range(1, k + 1):
        word = tuple(((i - 1 + t) % k) + 1 for t in range(k))
        f_words.append(word)
        f_elems.append(monomial_word_value(elements, word))
    cap = l ** (k - 1) + 1
    pows = [[e] for e in f_elems]  # pows[i][j-1] = F_{i+1}^j

    def f_pow(i, j):
        while len(pows[i]) < j:
            pows[i].append(pows[i][-1].compose(f_elems[i]))
        return pows[i][j - 1]

    for j2 in range(2, cap + 1):
        target = f_pow(0, j2)
        for j1 in range(1, j2):
            head = f_pow(0, j1)
            if all(head.compose(f_pow(i, j2 - j1)) == target for i in range(1, k)):
                words_by_ending = {}
                base_word = f_words[0] * j2
                words_by_ending[base_word[-1]] = base_word  # ends in letter k
                for i in range(2, k + 1):
                    w = f_words[0] * j1 + f_words[i - 1] * (j2 - j1)
                    words_by_ending[w[-1]] = w
                ordered = tuple(words_by_ending[i] for i in range(1, k + 1))
                for i, w in enumerate(ordered, start=1):
                    got = monomial_word_value(elements, w)
                    if got != target:
                        raise InvariantViolationError(
                            f"pigeonhole witness failed en route: word {w} != target")
                    if w[-1] != i:
                        raise InvariantViolationError("certificate word ends in wrong letter")
                return WitnessCertificate(words=ordered, composite_degree=target.degree,
                                          verification="monomial-model")
    raise InvariantViolationError(
        f"no pigeonhole collision within {cap} powers; unity order data inconsistent")


def verify_relation_monomial(elements, lhs, rhs) -> RelationCheck:
    a = monomial_word_value(elements, lhs)
    b = monomial_word_value(elements, rhs)
    return RelationCheck("exact") if a == b else RelationCheck("unequal")


# ---------------------------------------------------------------------------
# pairwise-relation combiner
# ---------------------------------------------------------------------------

def combine_pairwise(relations) -> tuple:
    """Words from verified relations P1^t_i = P1^r_i o P_i^s_i (i = 2..k).

    With K = t_2 ... t_k the returned words are P1^K and, for each i,
    (P1^r_i o P_i^s_i)^(K/t_i); the i-th word ends in letter i.
    """
    ts = [t for (t, _, _) in relations]
    if any(t == 0 for t in ts):
        raise ValueError("relation exponent t must be >= 1")
    for (t, r, s) in relations:
        if s < 1 or r < 0 or t < 1:
            raise ValueError("need t >= 1, s >= 1, r >= 0")
    K = prod(ts)
    words = [tuple([1] * K)]
    for idx, (t, r, s) in enumerate(relations, start=2):
        block = tuple([1] * r + [idx] * s)
        words.append(block * (K // t))
    return tuple(words)


def find_iterate_relation(generators, i, max_t: int = 8,
                          degree_cap: int = DEFAULT_DEGREE_CAP):
    """Smallest (t, r, s) with P1^t = P1^r o P_i^s, or None within the bound."""
    n1 = generators[0].degree
    ni = generators[i - 1].degree
    for t in range(1, max_t + 1):
        for r in range(0, t):
            # degree equation n1^t = n1^r * ni^s
            target = n1 ** (t - r)
            s = 0
            acc = 1
            while acc < target:
                acc *= ni
                s += 1
            if acc != target or s < 1:
                continue
            lhs = tuple([1] * t)
            rhs = tuple([1] * r + [i] * s)
            chk = verify_relation(generators, lhs, rhs, degree_cap)
            if chk.status == "exact":
                return (t, r, s)
    return None


# ---------------------------------------------------------------------------
# coefficient-identity bookkeeping over monomial generators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentReport:
    matrix: tuple       # matrix[w][i] = exponent of a_{i+1} in the leading coeff of word w
    reduced: tuple      # matrix minus columnwise minima
    s: tuple            # reduced own-letter exponents, one per generator


def leading_exponent_vector(degrees, word) -> tuple:
    """Exponent of each symbolic leading coefficient in the word's leading coeff."""
    k = len(degrees)
    m = [0] * k
    d = 1
    for letter in word:
        m[letter - 1] += d
        d *= degrees[letter - 1]
    return tuple(m)


def extract_coefficient_identity(degrees, certificate: WitnessCertificate) -> ExponentReport:
    """Reduced leading-coefficient exponents across the certificate words.

    After cancelling the columnwise common factors the i-th word must retain
    its own symbol with exponent s_i >= 1, and strictly dominate every other
    word in its own column; a failure is a hard invariant violation.
    """
    k = len(degrees)
    if k < 2:
        raise ValueError("need at least two generators")
    if certificate.k != k:
        raise ValueError("certificate arity does not match generator count")
    matrix = [leading_exponent_vector(degrees, w) for w in certificate.words]
    mins = [min(row[i] for row in matrix) for i in range(k)]
    reduced = [tuple(row[i] - mins[i] for i in range(k)) for row in matrix]
    s = []
    for i in range(k):
        own = matrix[i][i]
        others = [matrix[j][i] for j in range(k) if j != i]
        if any(own <= o for o in others):
            raise InvariantViolationError(
                f"own-letter exponent not strictly maximal in column {i + 1}: {matrix}")
        si = reduced[i][i]
        if si < 1:
            raise InvariantViolationError(
                f"reduced exponent s_{i + 1} = {si} < 1; identities inconsistent")
        s.append(si)
    return ExponentReport(matrix=tuple(matrix), reduced=tuple(reduced), s=tuple(s))


# ---------------------------------------------------------------------------
# fingerprint machinery (exact fields): evaluation over 62-bit prime fields
# ---------------------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_factors(m: int):
    out = set()
    d = 2
    while d * d <= m:
        while m % d == 0:
            out.add(d)
            m //= d
        d += 1
    if m > 1:
        out.add(m)
    return out


def _find_embedding_prime(modulus: int, rng: random.Random) -> int:
    """A ~62-bit prime p with p = 1 (mod modulus)."""
    while True:
        k = rng.randrange(1 << 55, 1 << 56)
        p = k * modulus + 1
        if _is_prime(p):
            return p


def _unity_root_mod(p: int, order: int, rng: random.Random) -> int:
    """A primitive order-th root of unity mod p (order | p-1)."""
    assert (p - 1) % order == 0
    qs = _prime_factors(order)
    while True:
        g = rng.randrange(2, p - 1)
        z = pow(g, (p - 1) // order, p)
        if z != 1 and all(pow(z, order // q, p) != 1 for q in qs):
            return z


class _ExactEmbedding:
    """Field embedding F -> F_p for fingerprint evaluation."""

    def __init__(self, field: ScalarField, p: int, rng: random.Random):
        self.p = p
        if isinstance(field, CyclotomicField):
            order = field.m * 4 if field.m % 4 else field.m
            root = _unity_root_mod(p, order, rng)
            self.zeta = pow(root, order // field.m, p)
            self.i_unit = pow(root, order // 4, p) if order % 4 == 0 else None
        elif field.name == "gaussian":
            self.i_unit = _unity_root_mod(p, 4, rng)
        else:
            self.i_unit = None

    def scalar(self, x):
        p = self.p
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise ZeroDivisionError("denominator hits the fingerprint prime")
            return x.numerator % p * pow(x.denominator, -1, p) % p
        if isinstance(x, GaussianRational):
            return (self.scalar(x.re) + self.i_unit * self.scalar(x.im)) % p
        if isinstance(x, Cyclotomic):
            acc = 0
            zk = 1
            for c in x.coeffs:
                if c:
                    acc = (acc + self.scalar(c) * zk) % p
                zk = zk * self.zeta % p
            return acc
        if isinstance(x, int):
            return x % p
        raise TypeError(f"cannot embed {x!r}")


def _embedding_modulus(field: ScalarField) -> int:
    if isinstance(field, CyclotomicField):
        m = field.m
        return m * 4 if m % 4 else m
    if field.name == "gaussian":
        return 4
    return 2


# ---------------------------------------------------------------------------
# breadth-first witness search
# ---------------------------------------------------------------------------

@dataclass
class SearchStats:
    words_enumerated: int = 0
    max_degree: int = 0
    max_length: int = 0
    buckets: int = 0


def _enumerate_words(generators, max_degree, max_length, steppers, start_vals, key_fn):
    """DFS over words extended at the outermost letter; fingerprints incremental.

    steppers[i](letter, value) evaluates one generator application at sample
    point i, so each node costs one generator evaluation per point. Returns
    (degree, word, fingerprint) for every nonempty word within the caps.
    """
    k = len(generators)
    degs = [g.degree for g in generators]
    out = []
    stack = [((), 1, tuple(start_vals))]
    while stack:
        word, deg, vals = stack.pop()
        if len(word) >= max_length:
            continue
        for j in range(1, k + 1):
            nd = deg * degs[j - 1]
            if nd > max_degree:
                continue
            nw = (j,) + word
            nv = tuple(step(j, v) for step, v in zip(steppers, vals))
            out.append((nd, nw, key_fn(nv)))
            stack.append((nw, nd, nv))
    return out


def search_witness(generators, max_degree: int,
                   max_length: int = DEFAULT_WORD_LENGTH_CAP,
                   degree_cap: int = DEFAULT_DEGREE_CAP,
                   seed: int = 0,
                   n_points: int = 3,
                   with_stats: bool = False):
    """Breadth-first search for a right-ideal-intersection certificate.

    Words are ordered by composite degree then lexicographically and bucketed
    by degree; equal polynomials are detected by canonical evaluation
    fingerprints and every hit is re-verified by full composition, so false
    positives are impossible. Returns the first verified certificate, or None
    once max_degree is exhausted (search caps are in the stats).
    """
    k = len(generators)
    if k < 2:
        raise ValueError("witness search needs at least two generators")
    for g in generators:
        if g.degree < 2:
            raise ValueError("generators must have degree >= 2")
    if max_degree > degree_cap:
        raise DegreeCapError(f"max_degree {max_degree} exceeds degree cap {degree_cap}")
    fld = generators[0].field
    stats = SearchStats(max_degree=max_degree, max_length=max_length)

    rng = random.Random(seed)
    if fld.is_exact:
        steppers, starts, key_fn = _exact_steppers(generators, fld, rng, n_points)
    else:
        steppers, starts, key_fn = _numeric_steppers(generators, fld, rng, n_points)

    entries = _enumerate_words(generators, max_degree, max_length, steppers, starts, key_fn)
    stats.words_enumerated = len(entries)
    by_degree = defaultdict(list)
    for deg, word, fp in entries:
        if len(word) >= 2:  # membership in a right ideal needs a nonempty outer word
            by_degree[deg].append((word, fp))

    for deg in sorted(by_degree):
        stats.buckets += 1
        groups = defaultdict(dict)
        for word, fp in sorted(by_degree[deg]):
            groups[fp].setdefault(word[-1], word)
        for fp, endings in groups.items():
            if len(endings) < k or any(i not in endings for i in range(1, k + 1)):
                continue
            cert = _verify_candidate(generators, endings, deg, degree_cap, fld)
            if cert is not None:
                return (cert, stats) if with_stats else cert
    return (None, stats) if with_stats else None


def _verify_candidate(generators, endings, deg, degree_cap, fld):
    words = [endings[i] for i in range(1, len(generators) + 1)]
    polys = [compose_word(generators, w, degree_cap) for w in words]
    if fld.is_exact:
        if all(p == polys[0] for p in polys[1:]):
            return WitnessCertificate(words=tuple(words), composite_degree=deg,
                                      verification="exact")
        return None
    resid = 0.0
    base = polys[0]
    for p in polys[1:]:
        for i in range(max(base.degree, p.degree) + 1):
            a = base.coeffs[i] if i <= base.degree else fld.zero
            b = p.coeffs[i] if i <= p.degree else fld.zero
            m = fld.magnitude(a - b)
            resid = max(resid, m)
    tol = getattr(fld, "tolerance", 1e-12)
    if resid <= tol:
        return WitnessCertificate(words=tuple(words), composite_degree=deg,
                                  verification="numeric", residual=resid)
    return None


def _exact_steppers(generators, fld, rng, n_points):
    modulus = _embedding_modulus(fld)
    steppers = []
    starts = []
    while len(steppers) < n_points:
        p = _find_embedding_prime(modulus, rng)
        try:
            emb = _ExactEmbedding(fld, p, rng)
            tables = [[emb.scalar(c) for c in g.coeffs] for g in generators]
        except ZeroDivisionError:
            continue

        def step(letter, v, _tables=tables, _p=p):
            acc = 0
            for c in reversed(_tables[letter - 1]):
                acc = (acc * v + c) % _p
            return acc

        steppers.append(step)
        starts.append(rng.randrange(2, p - 1))
    return steppers, starts, lambda vals: vals


def _numeric_steppers(generators, fld, rng, n_points):
    import cmath

    tables = [[complex(fld.to_complex(c)) for c in g.coeffs] for g in generators]
    tol = getattr(fld, "tolerance", 1e-12)
    grid = max(tol, 1e-9)
    steppers = []
    starts = []
    for _ in range(n_points):
        ang = rng.uniform(0.0, 6.283185307179586)
        starts.append(cmath.rect(0.9, ang))

        def step(letter, v, _tables=tables):
            acc = 0j
            for c in reversed(_tables[letter - 1]):
                acc = acc * v + c
            if abs(acc.real) > 1e30 or abs(acc.imag) > 1e30:
                return complex(float("inf"), 0.0)
            return acc

        steppers.append(step)

    def key_fn(vals):
        out = []
        for v in vals:
            if v.real == float("inf"):
                out.append(("big",))
            else:
                out.append((round(v.real / grid), round(v.imag / grid)))
        return tuple(out)

    return steppers, starts, key_fn

"""The decision pipeline: does the generated composition semigroup have a
non-empty intersection of principal right ideals?

Route: (1) exact special-family gates (simultaneous power or Chebyshev
conjugacy); (2) power coordinate of the first generator at infinity;
(3) conjugation of every generator through it; (4) monomiality and
root-of-unity tests with measured margins; Yes verdicts carry a certificate
built by the pigeonhole construction and re-verified over the input field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from math import gcd, lcm, prod

import gmpy2

from . import bottcher as B
from . import normal_forms as NF
from . import words as W
from .fields import BigComplexField, ScalarField, common_field
from .polynomials import Polynomial
from .words import MonomialElement, WitnessCertificate


class InputError(ValueError):
    """Invalid semigroup input (wrong degrees, arity, parse problems)."""


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class DecideOptions:
    precision: int = 128
    trunc: int = 64
    tolerance: float | None = None
    clear_factor: float = 1e6
    max_unity_order: int | None = None
    degree_cap: int = W.DEFAULT_DEGREE_CAP
    word_length_cap: int = W.DEFAULT_WORD_LENGTH_CAP
    seed: int = 0

    def tol(self) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return float(gmpy2.mpfr(2) ** (-(self.precision // 2)))

    def unity_cap(self, degrees) -> int:
        if self.max_unity_order is not None:
            return self.max_unity_order
        return 4 * prod(degrees)


@dataclass
class Verdict:
    outcome: str                     # 'yes' | 'no' | 'special_case' | 'inconclusive'
    ideal_intersection: str          # 'yes' | 'no' | 'inconclusive'
    special_case: dict | None = None
    certificate: WitnessCertificate | None = None
    conjugated_leading: list = dfield(default_factory=list)
    normal_form: NF.NormalFormReport | None = None
    margins: dict = dfield(default_factory=dict)
    stage: str = ""
    advice: str = ""

    @property
    def exit_code(self) -> int:
        if self.outcome in ("yes", "special_case"):
            return 0
        if self.outcome == "no":
            return 1
        return 2


def _validate(generators):
    if not generators:
        raise InputError("no generators")
    for i, g in enumerate(generators, 1):
        if g.degree < 2:
            raise InputError(
                f"generator {i} has degree {g.degree}; all generators must have degree >= 2")


def _promote_generators(generators):
    fld = generators[0].field
    for g in generators[1:]:
        fld = common_field(fld, g.field)
    return [g.promote(fld) for g in generators], fld


def _unity_exponent_from_value(omega, order, bc: BigComplexField) -> int:
    with bc.context():
        theta = gmpy2.atan2(omega.imag, omega.real) / (2 * gmpy2.const_pi())
        e = int(gmpy2.floor(theta * order + gmpy2.mpfr("0.5")))
    return e % order


def _monomial_elements_from_numeric(omegas, orders, degrees, bc) -> list:
    l = 1
    for o in orders:
        l = lcm(l, o)
    elems = []
    for omega, o, n in zip(omegas, orders, degrees):
        e = _unity_exponent_from_value(omega, l, bc)
        elems.append(MonomialElement(e, n, l))
    return elems


def _certified_yes(generators, elements, opts, margins, special_case, stage, field_exact,
                   conjugated):
    cert_model = W.monomial_witness(elements)
    certificate = cert_model
    if cert_model.composite_degree <= opts.degree_cap:
        base = cert_model.words[0]
        statuses = [W.verify_relation(generators, base, w, opts.degree_cap)
                    for w in cert_model.words[1:]]
        if field_exact:
            if any(s.status != "exact" for s in statuses):
                raise W.InvariantViolationError(
                    "pigeonhole certificate failed exact re-verification")
            certificate = WitnessCertificate(words=cert_model.words,
                                             composite_degree=cert_model.composite_degree,
                                             verification="exact")
        else:
            resid = max((s.residual or 0.0) for s in statuses) if statuses else 0.0
            margins["certificate_residual"] = resid
            certificate = WitnessCertificate(words=cert_model.words,
                                             composite_degree=cert_model.composite_degree,
                                             verification="numeric", residual=resid)
    else:
        margins["certificate_note"] = (
            f"composite degree {cert_model.composite_degree} exceeds cap {opts.degree_cap}; "
            "certificate kept in the monomial model")
    return Verdict(outcome="yes", ideal_intersection="yes", special_case=special_case,
                   certificate=certificate, conjugated_leading=conjugated,
                   margins=margins, stage=stage)


def _power_route(generators, pf: NF.PowerFamily, opts: DecideOptions) -> Verdict:
    """Exact Theorem-1.1 verdict on a simultaneously monomializable family."""
    fld = generators[0].field
    mons = pf.monomials
    degrees = [n for (_, n) in mons]
    n1 = degrees[0]
    c1 = mons[0][0]
    special = {"family": "power", "conjugator": pf.conjugator,
               "note": "measure-sharing criterion does not apply to power families; "
                       "the answer below is the right-ideal intersection"}
    margins = {}
    cap = opts.unity_cap(degrees)
    bc = BigComplexField(max(opts.precision, 192))
    with fld.context():
        taus = []
        for (ci, ni) in mons:
            tau = ci ** (n1 - 1) * (fld.one / c1) ** (ni - 1) if fld.is_exact else \
                ci ** (n1 - 1) / c1 ** (ni - 1)
            taus.append(tau)
    worst = None
    for i, tau in enumerate(taus):
        rep = B.root_of_unity_test(tau, fld, cap,
                                   tol=0.0 if fld.is_exact else opts.tol())
        if rep.order is None:
            mag = abs(complex(fld.to_complex(tau)))
            margin = abs(mag - 1.0)
            if worst is None or margin > worst[1]:
                worst = (i, margin)
    if worst is not None:
        idx, margin = worst
        margins["unity_margin"] = margin
        margins["failing_generator"] = idx + 1
        if not fld.is_exact and margin <= opts.clear_factor * opts.tol():
            return Verdict(outcome="inconclusive", ideal_intersection="inconclusive",
                           special_case=special, margins=margins, stage="power-route",
                           advice="raise precision: unity margin inside the ambiguity band")
        return Verdict(outcome="no", ideal_intersection="no", special_case=special,
                       conjugated_leading=_power_leading_report(mons, taus),
                       margins=margins, stage="power-route")
    # Yes: honest branch data from a principal root at high precision
    with bc.context():
        gamma = gmpy2.exp(gmpy2.log(bc.coerce(c1)) / (n1 - 1))
        omegas = []
        orders = []
        for (ci, ni) in mons:
            omega = bc.coerce(ci) * gamma ** (1 - ni)
            rep = B.root_of_unity_test(omega, bc, cap, tol=bc.tolerance)
            if rep.order is None:
                raise W.InvariantViolationError(
                    "unity ratios passed exactly but branch value failed numerically")
            omegas.append(omega)
            orders.append(rep.order)
    elems = _monomial_elements_from_numeric(omegas, orders, degrees, bc)
    conjugated = _power_leading_report(mons, taus, elems)
    verdict = _certified_yes(generators, elems, opts, margins, special, "power-route",
                             fld.is_exact, conjugated)
    verdict.normal_form = _try_t_power(generators, elems)
    return verdict


def _power_leading_report(mons, taus, elems=None):
    out = []
    for i, (ci, ni) in enumerate(mons):
        entry = {"degree": ni, "monomial_coefficient": repr(ci)}
        if elems is not None:
            entry["unity_exponent"] = elems[i].unity_exponent
            entry["unity_order"] = elems[i].unity_order
        out.append(entry)
    return out


def _chebyshev_route(generators, cf: NF.ChebyshevFamily, opts: DecideOptions) -> Verdict:
    """Chebyshev-conjugate family: special-case outcome, exact sign-model witness."""
    elems = [MonomialElement(0 if s > 0 else 1, g.degree, 2)
             for g, s in zip(generators, cf.signs)]
    special = {"family": "chebyshev", "conjugator": cf.conjugator, "signs": cf.signs,
               "exact_conjugator": cf.exact,
               "note": "family excluded from the measure-sharing criterion; "
                       "right-ideal intersection answered in the sign model"}
    margins = {}
    fld = generators[0].field
    verdict = _certified_yes(generators, elems, opts, margins, special, "chebyshev-route",
                             fld.is_exact and cf.exact is not None, [])
    verdict.outcome = "special_case"
    verdict.normal_form = NF.NormalFormReport(kind="chebyshev", chebyshev=cf)
    return verdict


def _try_t_power(generators, elems) -> NF.NormalFormReport:
    data = [(e.unity_exponent, e.unity_order, g.degree)
            for e, g in zip(elems, generators)]
    try:
        return NF.extract_t_power_form(generators, data)
    except Exception as exc:  # best effort by contract
        return NF.NormalFormReport(kind="none", reason=f"extraction error: {exc}")


def decide(generators, opts: DecideOptions | None = None) -> Verdict:
    opts = opts or DecideOptions()
    _validate(generators)
    generators, fld = _promote_generators(generators)
    k = len(generators)

    if k == 1:
        verdict = Verdict(outcome="yes", ideal_intersection="yes",
                          certificate=WitnessCertificate(words=((1, 1),),
                                                         composite_degree=generators[0].degree ** 2,
                                                         verification="exact"),
                          stage="single-generator",
                          margins={"note": "k = 1: P1 o P1 witnesses the ideal"})
        pf = NF.detect_power_conjugacy(generators)
        if pf is not None:
            verdict.special_case = {"family": "power", "conjugator": pf.conjugator}
        return verdict

    try:
        pf = NF.detect_power_conjugacy(generators)
    except Exception as exc:
        raise StageError("power-gate", exc)
    if pf is not None:
        try:
            return _power_route(generators, pf, opts)
        except (W.InvariantViolationError, StageError):
            raise
        except Exception as exc:
            raise StageError("power-route", exc)

    try:
        cf = NF.detect_chebyshev_conjugacy(generators)
    except Exception as exc:
        raise StageError("chebyshev-gate", exc)
    if cf is not None:
        try:
            return _chebyshev_route(generators, cf, opts)
        except (W.InvariantViolationError, StageError):
            raise
        except Exception as exc:
            raise StageError("chebyshev-route", exc)

    return _bottcher_route(generators, fld, opts)


def _bottcher_route(generators, fld, opts: DecideOptions) -> Verdict:
    degrees = [g.degree for g in generators]
    tol = opts.tol()
    bc = fld if isinstance(fld, BigComplexField) else BigComplexField(opts.precision)
    numeric = [g.promote(bc) for g in generators]
    trunc = max(opts.trunc, 2 * max(degrees) + 2)
    margins = {"tolerance": tol, "truncation": trunc}

    try:
        bd = B.bottcher_series(numeric[0], trunc=trunc, tolerance=tol)
    except B.BottcherConstructionError as exc:
        raise StageError("bottcher-series", exc)
    margins["bottcher_residual"] = bd.residual

    reports = []
    conjugated = []
    try:
        for i, q in enumerate(numeric):
            series = B.conjugate_generator(bd, q)
            rep = B.monomiality_test(series, tol)
            reports.append(rep)
    except B.HorizonError as exc:
        return Verdict(outcome="inconclusive", ideal_intersection="inconclusive",
                       margins=margins, stage="monomiality",
                       advice=f"raise the truncation order: {exc}")
    except Exception as exc:
        raise StageError("conjugation", exc)

    max_tail = max(rep.max_tail for rep in reports)
    margins["max_conjugate_tail"] = max_tail
    if max_tail > tol:
        failing = max(range(len(reports)), key=lambda i: reports[i].max_tail)
        margins["failing_generator"] = failing + 1
        if max_tail <= opts.clear_factor * tol:
            return Verdict(outcome="inconclusive", ideal_intersection="inconclusive",
                           margins=margins, stage="monomiality",
                           advice="tail magnitude inside the ambiguity band; "
                                  "raise precision or truncation")
        return Verdict(outcome="no", ideal_intersection="no", margins=margins,
                       stage="monomiality")

    cap = opts.unity_cap(degrees)
    omegas = []
    orders = []
    with bc.context():
        for rep in reports:
            omega = 1 / rep.leading  # at-infinity leading coefficient
            omegas.append(omega)
    worst = None
    for i, omega in enumerate(omegas):
        rep = B.root_of_unity_test(omega, bc, cap, tol=tol)
        entry = {"degree": degrees[i], "omega": str(complex(omega)),
                 "unity_order": rep.order}
        conjugated.append(entry)
        if rep.order is None:
            margin = rep.modulus_error
            if worst is None or margin > worst[1]:
                worst = (i, margin)
        else:
            orders.append(rep.order)
    if worst is not None:
        idx, margin = worst
        margins["unity_margin"] = margin
        margins["failing_generator"] = idx + 1
        if margin > opts.clear_factor * tol:
            return Verdict(outcome="no", ideal_intersection="no",
                           conjugated_leading=conjugated, margins=margins,
                           stage="root-of-unity")
        return Verdict(outcome="inconclusive", ideal_intersection="inconclusive",
                       conjugated_leading=conjugated, margins=margins,
                       stage="root-of-unity",
                       advice="conjugated leading coefficient sits on the unit circle "
                              f"but matches no order <= {cap}; raise the order cap "
                              "or precision")

    elems = _monomial_elements_from_numeric(omegas, orders, degrees, bc)
    for entry, el in zip(conjugated, elems):
        entry["unity_exponent"] = el.unity_exponent
        entry["unity_order_common"] = el.unity_order
    verdict = _certified_yes(generators, elems, opts, margins, None, "bottcher-route",
                             fld.is_exact, conjugated)
    verdict.normal_form = _try_t_power(generators, elems)
    return verdict

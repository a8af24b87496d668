"""Different exponents of maximal models and the transitivity check for towers.

For the infinitesimal kinds the exponent is the valuation of D(T), the image
of the model generator under the invariant derivation read off the
coaction.  For Z/pZ it is v_L(g'(pi_L)).  Both are normalized so the model
uniformizer has valuation 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .classes import GroupKind, GroupSchemeSpec, normalize
from .errors import NonRegularStageError, PrecisionError, VerificationError
from .localfield.algebra import AlgebraElement, MonogenicAlgebra, RPolynomial
from .localfield.matrix import charpoly, rank_over_field, residue_matrix
from .localfield.series import DEFAULT_PRECISION, LaurentSeries
from .models import (
    CaseLabel,
    ModelPresentation,
    as_uniformizer_exponents,
    build_model,
    eisenstein_valuation,
)


class DifferentMethod(str, Enum):
    INVARIANT_DERIVATION = "InvariantDerivation"
    ETALE_MIN_POLY = "EtaleMinPolyDerivative"


@dataclass
class DifferentReport:
    exponent: int
    derivation_value: AlgebraElement | None
    method: DifferentMethod
    is_torsor_consistent: bool


def classical_as_different(p: int, m: int) -> int:
    """(p - 1)(m + 1), the different exponent of an Artin-Schreier extension with break m."""
    if m < 1:
        raise ValueError("break must be positive")
    if m % p == 0:
        raise ValueError(f"p = {p} divides the break m = {m}")
    return (p - 1) * (m + 1)


def invariant_derivation(model: ModelPresentation) -> AlgebraElement:
    """D(T): derivative of sigma(T) along the group coordinate at the identity.

    alpha_p and H_lambda: coefficient of the linear term in the group
    coordinate.  mu_p: z d/dz at z = 1, i.e. sum of k * (coefficient of z^k).
    """
    kind = model.group.kind
    if kind is GroupKind.Z_MOD_P:
        raise ValueError("Z/pZ is etale; use the minimal polynomial derivative")
    F = model.field
    A = model.algebra
    terms = {}
    for (k, l), c in model.coaction.terms.items():
        if kind is GroupKind.MU_P:
            w = k % model.p
            if w == 0:
                continue
            c = c.scale(F.from_int(w))
        elif k != 1:
            continue
        terms[(l,)] = terms[(l,)] + c if (l,) in terms else c
    return A.reduce(terms)


def is_unit(x: AlgebraElement) -> bool:
    """Units of the local ring R[T]/(g): multiplication is invertible mod t."""
    A = x.parent
    M = A.multiplication_matrix(x)
    n = len(M)
    return rank_over_field(residue_matrix(M, A.field), A.field) == n


def different_exponent(model: ModelPresentation) -> DifferentReport:
    label = model.case_label
    kind = model.group.kind
    if kind is GroupKind.Z_MOD_P:
        method = DifferentMethod.ETALE_MIN_POLY
        gp = model.relation.derivative()
        D = model.algebra.from_list(gp.coeffs)
        if label is CaseLabel.AS_RAMIFIED:
            exponent = eisenstein_valuation(model.algebra.to_list(D), model.p)
        elif is_unit(D):
            exponent = 0
        else:
            raise VerificationError("etale model with non-unit g'(T)")
    else:
        method = DifferentMethod.INVARIANT_DERIVATION
        D = invariant_derivation(model)
        if D.is_zero():
            raise PrecisionError(f"degenerate derivation at precision {model.precision}")
        if is_unit(D):
            exponent = 0
        elif model.relation.is_eisenstein():
            exponent = eisenstein_valuation(model.algebra.to_list(D), model.p)
        else:
            raise VerificationError("D(T) is neither a unit nor in a DVR")
    return DifferentReport(exponent, D, method, (exponent == 0) == model.is_torsor)


# -- base change to a regular model ring ----------------------------------------


def _require_eisenstein(model: ModelPresentation):
    if not model.is_regular:
        raise NonRegularStageError(f"stage model {model.case_label.value} is not regular")
    if not model.relation.is_eisenstein():
        raise NonRegularStageError(
            f"stage model {model.case_label.value} is regular but not Eisenstein in its generator"
        )


def t_in_model_uniformizer(model: ModelPresentation, prec: int) -> LaurentSeries:
    """t as a power series in the model generator T, for an Eisenstein relation.

    g(T) = T^p + sum c_j(t) T^j with c_0 = t w(t), w a unit, so
    t = -(T^p + sum_{0<j<p} c_j(t) T^j) / w(t), iterated to a fixed point.
    Each pass gains at least one T-adic digit.
    """
    _require_eisenstein(model)
    F = model.field
    g = model.relation
    p = g.degree
    s = LaurentSeries.gen(F)
    w = g.coeffs[0].shift(-1)
    lead = (s.pow(p)).truncate(prec)
    cur = (-(lead * LaurentSeries.constant(F, F.inv(w.coefficient(0))))).truncate(prec)
    for _ in range(prec + 5):
        num = lead
        for j in range(1, p):
            cj = g.coeffs[j]
            if cj.is_exact_zero():
                continue
            num = num + (cj.substitute(cur, prec) * s.pow(j)).truncate(prec)
        nxt = (-(num * w.substitute(cur, prec).inverse(prec))).truncate(prec)
        if nxt.agrees(cur) and nxt.prec is not None and nxt.prec >= prec:
            return nxt
        cur = nxt
    raise VerificationError("fixpoint failed to gain valuation")


def base_change_to_model(class2: LaurentSeries, stage_model: ModelPresentation,
                         prec: int | None = None) -> LaurentSeries:
    """Re-express a series in t as a series in the stage uniformizer T."""
    prec = prec or stage_model.precision
    t_of_T = t_in_model_uniformizer(stage_model, prec)
    return class2.substitute(t_of_T, prec)


def relation_residual(stage_model: ModelPresentation, t_of_T: LaurentSeries, prec: int) -> LaurentSeries:
    """g(T) with t replaced by t(T); zero mod T^prec when t(T) is correct."""
    F = stage_model.field
    s = LaurentSeries.gen(F)
    total = LaurentSeries.zero(F, prec)
    for j, c in enumerate(stage_model.relation.coeffs):
        total = total + (c.substitute(t_of_T, prec) * s.pow(j)).truncate(prec)
    return total


# -- towers ----------------------------------------------------------------------


@dataclass
class TowerStage:
    """One stage: group kind (and lambda) plus a class written over the previous stage.

    ``f`` is a series in that stage's base uniformizer, which is t for
    stage 0 and the previous model generator T afterwards.  With
    ``over_base=True`` a later stage's ``f`` is instead given in the
    original t and is base-changed first.
    """

    kind: GroupKind
    f: LaurentSeries
    lam: LaurentSeries | None = None
    over_base: bool = False


@dataclass
class TowerSpec:
    stages: list


@dataclass
class TowerReport:
    stage_cases: list
    stage_differents: list
    ramification: list
    formula_total: int
    direct_total: int | None
    mode: str
    verified: bool
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "stages": [
                {"case": c, "different": d, "e": e}
                for c, d, e in zip(self.stage_cases, self.stage_differents, self.ramification)
            ],
            "formula_total": self.formula_total,
            "direct_total": self.direct_total,
            "mode": self.mode,
            "verified": self.verified,
            "notes": list(self.notes),
        }


def _stage_ramification(model: ModelPresentation) -> int:
    return model.p if model.relation.is_eisenstein() else 1


def _inverse_generator(A: MonogenicAlgebra, prec: int) -> AlgebraElement:
    """T^(-1) in K[T]/(g): -(T^(d-1) + c_(d-1) T^(d-2) + ... + c_1) / c_0."""
    g = A.relation
    c0 = g.coeffs[0]
    quotient = A.from_list(list(g.coeffs[1:]))
    return quotient.scale(-c0.inverse(prec))


def _series_in_generator(A: MonogenicAlgebra, f: LaurentSeries, prec: int) -> AlgebraElement:
    """Evaluate a Laurent polynomial f(s) at s = T inside K[T]/(g)."""
    if f.prec is not None:
        raise ValueError("top-stage class must be an exact Laurent polynomial after normalization")
    T = A.gen(0)
    Tinv = _inverse_generator(A, prec)
    out = A.zero()
    for k, c in f.items():
        base = T if k >= 0 else Tinv
        out = out + (base ** abs(k)).scale(LaurentSeries.constant(A.field, c))
    return out.truncate(prec)


def direct_etale_total(stage1: ModelPresentation, f2: LaurentSeries, m2: int, prec: int) -> int:
    """Different of the composite of two ramified Artin-Schreier stages, computed over K.

    L2 = L1[y]/(y^p - y - f2(T)), uniformizer y^a T^b with -a m2 + b p = 1;
    its characteristic polynomial over K has degree p^2 and must be
    Eisenstein, and the exponent is v(g'(pi)) in L2.
    """
    A = stage1.algebra
    F = stage1.field
    p = stage1.p
    F2 = _series_in_generator(A, f2, prec)
    a, b = as_uniformizer_exponents(m2, p)

    def mul(x, y):
        raw = [A.zero() for _ in range(2 * p - 1)]
        for i, xi in enumerate(x):
            if xi.is_zero():
                continue
            for j, yj in enumerate(y):
                if not yj.is_zero():
                    raw[i + j] = raw[i + j] + xi * yj
        for k in range(len(raw) - 1, p - 1, -1):
            c = raw[k]
            if c.is_zero():
                continue
            # y^p = y + F2
            raw[k - p + 1] = raw[k - p + 1] + c
            raw[k - p] = raw[k - p] + c * F2
            raw[k] = A.zero()
        return [c.truncate(prec) for c in raw[:p]]

    one = [A.one()] + [A.zero()] * (p - 1)
    ygen = [A.zero(), A.one()] + [A.zero()] * (p - 2)
    pi = one
    for _ in range(a):
        pi = mul(pi, ygen)
    Tb = A.gen(0) ** b
    pi = [c * Tb for c in pi]

    n = p * p
    cols = []
    for j in range(p):
        for i in range(p):
            basis = [A.zero()] * p
            basis[j] = A.gen(0) ** i
            img = mul(pi, basis)
            cols.append([img[jj].coefficient((ii,)) for jj in range(p) for ii in range(p)])
    M = [[cols[c][r] for c in range(n)] for r in range(n)]
    cp = charpoly(M, prec)
    g = RPolynomial(F, [c.truncate(prec) for c in cp[:-1]] + [cp[-1]], integral=False)
    if not all(c.is_integral() for c in g.coeffs):
        raise VerificationError("composite minimal polynomial is not integral")
    g = RPolynomial(F, g.coeffs)
    if not g.is_eisenstein():
        raise VerificationError("composite minimal polynomial is not Eisenstein")
    return eisenstein_valuation(list(g.derivative().coeffs), n)


def verify_tower_transitivity(tower: TowerSpec, prec: int = 80) -> TowerReport:
    stages = tower.stages
    if len(stages) != 2:
        raise ValueError("transitivity is checked on two-stage towers")
    s1, s2 = stages
    F = s1.f.field
    g1 = GroupSchemeSpec(s1.kind, F, s1.lam)
    model1 = build_model(normalize(s1.f, g1, prec), prec)
    _require_eisenstein(model1)
    d1 = different_exponent(model1).exponent
    f2 = base_change_to_model(s2.f, model1, prec) if s2.over_base else s2.f
    g2 = GroupSchemeSpec(s2.kind, F, s2.lam)
    cls2 = normalize(f2, g2, prec)
    model2 = build_model(cls2, prec)
    d2 = different_exponent(model2).exponent
    e2 = _stage_ramification(model2)
    total = d2 + e2 * d1
    cases = [model1.case_label.value, model2.case_label.value]
    report = TowerReport(cases, [d1, d2], [_stage_ramification(model1), e2], total, None,
                         "formula-derived, not independently verified", False)
    etale = s1.kind is GroupKind.Z_MOD_P and s2.kind is GroupKind.Z_MOD_P
    if not etale:
        return report
    if model2.case_label is CaseLabel.AS_RAMIFIED:
        direct = direct_etale_total(model1, cls2.representative, cls2.normalized.m, prec)
        report.direct_total = direct
        report.mode = "etale-direct"
        report.verified = direct == total
    else:
        report.mode = "etale-unramified-top"
        report.verified = d2 == 0 and total == d1
        report.notes.append("top stage unramified or trivial: total equals the stage-1 different")
    return report

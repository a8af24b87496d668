"""Canonical representatives of torsor classes over K = F_q((t)).

mu_p classes live in K^x/(K^x)^p, alpha_p classes in K/K^p, Z/pZ classes
in K/P(K) with P(y) = y^p - y.  Each normalizer returns a record that is
identical for any two representatives of the same class (up to the
working precision), which is what the model construction dispatches on.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import NormalizationError, PrecisionError
from .localfield.field import FieldElement, FieldSpec
from .localfield.series import DEFAULT_PRECISION, LaurentSeries


class GroupKind(str, Enum):
    Z_MOD_P = "z_mod_p"
    MU_P = "mu_p"
    ALPHA_P = "alpha_p"
    H_LAMBDA = "h_lambda"


@dataclass(frozen=True)
class GroupSchemeSpec:
    kind: GroupKind
    field: FieldSpec
    lam: LaurentSeries | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GroupKind(self.kind))
        if self.kind is GroupKind.H_LAMBDA:
            if self.lam is None:
                raise ValueError("H_lambda needs a level lambda")
            v = self.lam.valuation()
            if v is None:
                raise ValueError("lambda must be nonzero (0 < v(lambda) < oo)")
            if v < 1:
                raise ValueError(f"lambda must have positive valuation, got {v}")
        elif self.lam is not None:
            raise ValueError(f"lambda given for {self.kind.value}")

    @property
    def p(self) -> int:
        return self.field.p

    def __str__(self):
        if self.kind is GroupKind.H_LAMBDA:
            return f"H_lambda(lambda={self.lam})"
        return self.kind.value


# -- normalized records ---------------------------------------------------


@dataclass(frozen=True)
class Trivial:
    def representative(self, group):
        F = group.field
        if group.kind is GroupKind.MU_P:
            return LaurentSeries.one(F)
        return LaurentSeries.zero(F)


@dataclass(frozen=True)
class UnitKummer:
    u: LaurentSeries

    def representative(self, group):
        return self.u


@dataclass(frozen=True)
class Ramified:
    """f ~ u * t^i with u a unit (mu_p: 0 < i < p; alpha_p: p does not divide i)."""

    u: LaurentSeries
    i: int

    def representative(self, group):
        return self.u.shift(self.i)


@dataclass(frozen=True)
class UnramifiedAS:
    c: FieldElement

    def representative(self, group):
        return LaurentSeries.constant(group.field, self.c.value)


@dataclass(frozen=True)
class RamifiedAS:
    """f ~ u * t^(-m), u a polynomial unit of degree <= m, p does not divide m."""

    u: LaurentSeries
    m: int

    def representative(self, group):
        return self.u.shift(-self.m)


@dataclass(frozen=True)
class HExtendable:
    f: LaurentSeries

    def representative(self, group):
        return self.f


@dataclass(frozen=True)
class HRamified:
    """f = delta * t^(-i), delta a unit, i > 0."""

    delta: LaurentSeries
    i: int

    def representative(self, group):
        return self.delta.shift(-self.i)


@dataclass(frozen=True)
class TorsorClass:
    group: GroupSchemeSpec
    raw: LaurentSeries
    normalized: object

    @property
    def representative(self) -> LaurentSeries:
        return self.normalized.representative(self.group)

    @property
    def label(self) -> str:
        return type(self.normalized).__name__

    def describe(self) -> dict:
        n = self.normalized
        out = {"kind": self.label}
        for name in ("u", "i", "m", "c", "f", "delta"):
            if hasattr(n, name):
                v = getattr(n, name)
                out[name] = v if isinstance(v, int) else str(v)
        out["representative"] = str(self.representative)
        return out


def records_agree(a, b) -> bool:
    """Equality of normalized records, with series compared on their common window."""
    if type(a) is not type(b):
        return False
    for name in ("u", "i", "m", "c", "f", "delta"):
        if not hasattr(a, name):
            continue
        x, y = getattr(a, name), getattr(b, name)
        if isinstance(x, LaurentSeries):
            if not x.agrees(y):
                return False
        elif x != y:
            return False
    return True


# -- helpers ----------------------------------------------------------------


def canonical_unit(w: LaurentSeries, prec: int = DEFAULT_PRECISION) -> LaurentSeries:
    """Representative of the unit w modulo (R^x)^p.

    Divides out the constant term and then every term whose exponent is
    divisible by p, smallest first; the result is 1 plus terms at exponents
    prime to p, which is unique in each class.
    """
    F = w.field
    p = F.p
    if w.valuation() != 0:
        raise ValueError("canonical_unit expects a unit")
    c0 = w.coefficient(0)
    u = w.scale(F.inv(c0)) if c0 != 1 else w
    top = prec if u.prec is None else min(prec, u.prec)
    j = p
    while j < top:
        c = u.terms.get(j, 0)
        if c:
            # 1 + c t^j = (1 + c^(1/p) t^(j/p))^p
            fix = LaurentSeries(F, {0: 1, j: c}).inverse(top)
            u = (u * fix).truncate(top)
        j += p
    return u


def as_transversal(field: FieldSpec, c: int) -> int:
    """Fixed representative of c in F_q / P(F_q), where P(F_q) = ker(trace)."""
    if field.e == 1:
        return c
    tr = field.trace(c)
    if tr == 0:
        return 0
    w0 = next(x for x in field.elements() if field.trace(x))
    return field.mul(field.mul(tr, field.inv(field.trace(w0))), w0)


def solve_as_tail(g: LaurentSeries, prec: int = DEFAULT_PRECISION) -> LaurentSeries:
    """y with y^p - y = g for g of positive valuation: y = -(g + g^p + g^p^2 + ...)."""
    v = g.valuation()
    if v is not None and v < 1:
        raise ValueError("tail must have positive valuation")
    top = prec if g.prec is None else min(prec, g.prec)
    g = g.truncate(top)
    y = LaurentSeries.zero(g.field)
    term = g
    while not term.is_zero():
        y = y - term
        term = term.frobenius().truncate(top)
    return y.truncate(top)


def _require_nonzero(f: LaurentSeries):
    if f.is_exact_zero():
        raise NormalizationError("class representative must be nonzero")
    if f.is_zero():
        raise PrecisionError(f"representative indistinguishable from 0 at precision {f.prec}")


# -- normalizers -----------------------------------------------------------


def normalize_mu(f: LaurentSeries, prec: int = DEFAULT_PRECISION) -> TorsorClass:
    group = GroupSchemeSpec(GroupKind.MU_P, f.field)
    _require_nonzero(f)
    w, v = f.unit_part()
    p = f.field.p
    i = v % p
    if i == 0 and w.prec is None and all(k % p == 0 for k in w.terms):
        # an exact polynomial with only p-divisible exponents is the p-th power of a polynomial
        return TorsorClass(group, f, Trivial())
    u = canonical_unit(w, prec)
    if i == 0:
        if u.terms == {0: 1}:
            if u.prec is None:
                return TorsorClass(group, f, Trivial())
            raise PrecisionError(f"triviality undecidable at precision {u.prec}")
        return TorsorClass(group, f, UnitKummer(u))
    return TorsorClass(group, f, Ramified(u, i))


def _drop_pth_powers(f: LaurentSeries) -> LaurentSeries:
    p = f.field.p
    return LaurentSeries(f.field, {k: c for k, c in f.terms.items() if k % p}, f.prec)


def normalize_alpha(f: LaurentSeries, prec: int = DEFAULT_PRECISION) -> TorsorClass:
    group = GroupSchemeSpec(GroupKind.ALPHA_P, f.field)
    r = _drop_pth_powers(f.truncate(None if f.prec is None else f.prec))
    if r.is_zero():
        if r.prec is None:
            return TorsorClass(group, f, Trivial())
        raise PrecisionError(f"triviality undecidable at precision {r.prec}")
    i = r.valuation()
    u = r.shift(-i)
    if u.prec is not None:
        u = u.truncate(prec)
    return TorsorClass(group, f, Ramified(u, i))


def normalize_as(f: LaurentSeries, prec: int = DEFAULT_PRECISION) -> TorsorClass:
    F = f.field
    p = F.p
    group = GroupSchemeSpec(GroupKind.Z_MOD_P, F)
    if f.prec is not None and f.prec < 1:
        raise PrecisionError(f"constant term unknown at precision {f.prec}")
    neg = {k: c for k, c in f.terms.items() if k < 0}
    while True:
        bad = [k for k in neg if k % p == 0]
        if not bad:
            break
        k = min(bad)
        c = neg.pop(k)
        # c t^k = P(c^(1/p) t^(k/p)) + c^(1/p) t^(k/p)
        j = k // p
        neg[j] = F.add(neg.get(j, 0), F.pth_root(c))
        if not neg[j]:
            del neg[j]
    c = as_transversal(F, f.terms.get(0, 0))
    if neg:
        m = -min(neg)
        terms = dict(neg)
        if c:
            terms[0] = c
        u = LaurentSeries(F, terms).shift(m)
        return TorsorClass(group, f, RamifiedAS(u, m))
    if c:
        return TorsorClass(group, f, UnramifiedAS(F.element(c)))
    return TorsorClass(group, f, Trivial())


def normalize_hlambda(f: LaurentSeries, group: GroupSchemeSpec, reduce: bool = False) -> TorsorClass:
    """Branch on v(f); with ``reduce`` first strip terms lying in K^p."""
    if group.kind is not GroupKind.H_LAMBDA:
        raise NormalizationError("normalize_hlambda needs an H_lambda group")
    g = _drop_pth_powers(f) if reduce else f
    if g.is_exact_zero():
        return TorsorClass(group, f, Trivial())
    if g.is_zero():
        raise PrecisionError(f"representative indistinguishable from 0 at precision {g.prec}")
    v = g.valuation()
    if v >= 0:
        return TorsorClass(group, f, HExtendable(g))
    return TorsorClass(group, f, HRamified(g.shift(-v), -v))


def normalize(f: LaurentSeries, group: GroupSchemeSpec, prec: int = DEFAULT_PRECISION,
              reduce: bool = False) -> TorsorClass:
    if f.field != group.field:
        raise NormalizationError("class and group over different fields")
    kind = group.kind
    if kind is GroupKind.MU_P:
        return normalize_mu(f, prec)
    if kind is GroupKind.ALPHA_P:
        return normalize_alpha(f, prec)
    if kind is GroupKind.Z_MOD_P:
        return normalize_as(f, prec)
    return normalize_hlambda(f, group, reduce=reduce)

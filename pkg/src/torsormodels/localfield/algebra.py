"""Polynomials over R = F_q[[t]] and quotients by monic univariate relations.

A ``QuotientAlgebra`` is K[x_1, ..., x_k] / (g_1(x_1), ..., g_k(x_k)) with
every g_i monic.  Its elements are kept in normal form: the exponent of x_i
is below deg g_i.  With one variable this is the monogenic model ring
R[T]/(g); with two it is O_G (x) O_X, where coactions live.
"""

from __future__ import annotations

from ..errors import FieldMismatchError
from .field import FieldSpec
from .series import LaurentSeries


def _series(field, c):
    if isinstance(c, LaurentSeries):
        return c
    return LaurentSeries.constant(field, field.from_int(int(c)))


def _is_one(c: LaurentSeries) -> bool:
    return c.prec is None and c.terms == {0: 1}


class RPolynomial:
    """Polynomial in one variable with Laurent-series coefficients (low -> high).

    ``integral=True`` enforces the R-coefficient invariant.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldSpec, coeffs, integral: bool = True):
        cs = [_series(field, c) for c in coeffs]
        while cs and cs[-1].is_exact_zero():
            cs.pop()
        for c in cs:
            if c.field != field:
                raise FieldMismatchError("coefficient over another field")
            if integral and not c.is_integral():
                raise ValueError(f"coefficient {c} is not in R")
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def monomial_minus(cls, field, degree: int, constant: LaurentSeries):
        """T^degree - constant."""
        return cls(field, [-constant] + [0] * (degree - 1) + [1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_monic(self) -> bool:
        return bool(self.coeffs) and _is_one(self.coeffs[-1])

    def is_eisenstein(self) -> bool:
        """Monic, lower coefficients in tR, constant term of valuation exactly 1."""
        if not self.is_monic() or self.degree < 1:
            return False
        for c in self.coeffs[:-1]:
            if c.valuation_bound() < 1:
                return False
        return self.coeffs[0].valuation() == 1

    def derivative(self) -> "RPolynomial":
        F = self.field
        return RPolynomial(F, [c.scale(F.from_int(k)) for k, c in enumerate(self.coeffs)][1:], integral=False)

    def __eq__(self, other):
        return isinstance(other, RPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def agrees(self, other: "RPolynomial") -> bool:
        if self.degree != other.degree:
            return False
        return all(a.agrees(b) for a, b in zip(self.coeffs, other.coeffs))

    def to_str(self, var: str = "T", coeff_var: str = "t") -> str:
        return render_univariate(self.coeffs, var, coeff_var)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"RPolynomial({self.to_str()})"


def _render_coeff(c: LaurentSeries, coeff_var: str) -> str:
    s = c.to_str(coeff_var)
    if len(c.terms) + (c.prec is not None) > 1:
        return f"({s})"
    return s


def render_monomial(coeff: LaurentSeries, mono: str, coeff_var: str = "t") -> str:
    if not mono:
        return coeff.to_str(coeff_var)
    if _is_one(coeff):
        return mono
    return f"{_render_coeff(coeff, coeff_var)}*{mono}"


def render_univariate(coeffs, var="T", coeff_var="t") -> str:
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c.is_exact_zero():
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        parts.append(render_monomial(c, mono, coeff_var))
    return " + ".join(parts) if parts else "0"


class QuotientAlgebra:
    """K[x_1..x_k]/(g_1(x_1), ..., g_k(x_k)) with monic g_i."""

    def __init__(self, field: FieldSpec, names, relations):
        names = tuple(names)
        rels = []
        for r in relations:
            if not isinstance(r, RPolynomial):
                r = RPolynomial(field, r, integral=False)
            if not r.is_monic() or r.degree < 1:
                raise ValueError(f"relation {r} is not monic of positive degree")
            rels.append(r)
        if len(names) != len(rels):
            raise ValueError("one relation per variable")
        self.field = field
        self.names = names
        self.relations = tuple(rels)
        self.degrees = tuple(r.degree for r in rels)
        self._powers = [self._initial_table(r) for r in rels]

    def __eq__(self, other):
        return (
            isinstance(other, QuotientAlgebra)
            and self.names == other.names
            and self.relations == other.relations
        )

    def __hash__(self):
        return hash((self.names, self.relations))

    def __repr__(self):
        rels = ", ".join(r.to_str(n) for n, r in zip(self.names, self.relations))
        return f"QuotientAlgebra({rels})"

    @staticmethod
    def _initial_table(rel):
        d = rel.degree
        table = [{k: LaurentSeries.one(rel.field)} for k in range(d)]
        table.append({k: -c for k, c in enumerate(rel.coeffs[:-1]) if not c.is_exact_zero()})
        return table

    def _reduced_power(self, i: int, e: int) -> dict:
        table = self._powers[i]
        rel = self.relations[i]
        d = rel.degree
        while len(table) <= e:
            prev = table[-1]
            nxt = {}
            top = prev.get(d - 1)
            for k, c in prev.items():
                if k + 1 < d:
                    nxt[k + 1] = nxt[k + 1] + c if k + 1 in nxt else c
            if top is not None:
                for k, c in table[d].items():
                    val = top * c
                    nxt[k] = nxt[k] + val if k in nxt else val
            table.append(nxt)
        return table[e]

    # -- element construction -------------------------------------------

    def reduce(self, terms: dict) -> "AlgebraElement":
        """Normal form of an arbitrary polynomial {exponent tuple: coefficient}."""
        work = {}
        F = self.field
        for exps, c in terms.items():
            c = _series(F, c)
            if len(exps) != len(self.names):
                raise ValueError("exponent tuple of wrong length")
            work[tuple(exps)] = work[tuple(exps)] + c if tuple(exps) in work else c
        for i, d in enumerate(self.degrees):
            if all(exps[i] < d for exps in work):
                continue
            nxt = {}
            for exps, c in work.items():
                e = exps[i]
                if e < d:
                    nxt[exps] = nxt[exps] + c if exps in nxt else c
                    continue
                for k, r in self._reduced_power(i, e).items():
                    key = exps[:i] + (k,) + exps[i + 1:]
                    val = c * r
                    nxt[key] = nxt[key] + val if key in nxt else val
            work = nxt
        return AlgebraElement(self, {k: v for k, v in work.items() if not v.is_exact_zero()})

    def element(self, terms: dict) -> "AlgebraElement":
        return self.reduce(terms)

    def scalar(self, c) -> "AlgebraElement":
        c = _series(self.field, c)
        zero = (0,) * len(self.names)
        return AlgebraElement(self, {} if c.is_exact_zero() else {zero: c})

    def one(self) -> "AlgebraElement":
        return self.scalar(1)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {})

    def gen(self, name) -> "AlgebraElement":
        i = self.names.index(name) if isinstance(name, str) else name
        exps = [0] * len(self.names)
        exps[i] = 1
        return self.reduce({tuple(exps): 1})

    def gens(self):
        return [self.gen(i) for i in range(len(self.names))]

    @property
    def rank(self) -> int:
        r = 1
        for d in self.degrees:
            r *= d
        return r

    def basis_exponents(self):
        out = [()]
        for d in self.degrees:
            out = [e + (k,) for e in out for k in range(d)]
        return out


class AlgebraElement:
    __slots__ = ("parent", "terms")

    def __init__(self, parent: QuotientAlgebra, terms: dict):
        self.parent = parent
        self.terms = terms

    def _coerce(self, other):
        if isinstance(other, AlgebraElement):
            if other.parent is not self.parent and other.parent != self.parent:
                raise ValueError("elements of different algebras")
            return other
        if isinstance(other, (int, LaurentSeries)):
            return self.parent.scalar(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return AlgebraElement(self.parent, {k: v for k, v in out.items() if not v.is_exact_zero()})

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.parent, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        raw = {}
        b_items = list(other.terms.items())
        for ea, ca in self.terms.items():
            for eb, cb in b_items:
                key = tuple(x + y for x, y in zip(ea, eb))
                val = ca * cb
                raw[key] = raw[key] + val if key in raw else val
        return self.parent.reduce(raw)

    __rmul__ = __mul__

    def scale(self, c: LaurentSeries) -> "AlgebraElement":
        return AlgebraElement(self.parent, {k: v * c for k, v in self.terms.items()})

    def truncate(self, n) -> "AlgebraElement":
        return AlgebraElement(self.parent, {k: v.truncate(n) for k, v in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power in a quotient algebra")
        result = self.parent.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def coefficient(self, exps) -> LaurentSeries:
        exps = tuple(exps)
        c = self.terms.get(exps)
        return c if c is not None else LaurentSeries.zero(self.parent.field)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.terms.values())

    def is_integral(self) -> bool:
        return all(c.is_integral() for c in self.terms.values())

    def min_precision(self):
        precs = [c.prec for c in self.terms.values() if c.prec is not None]
        return min(precs) if precs else None

    def agrees(self, other) -> bool:
        return (self - other).is_zero()

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if other.parent != self.parent:
            return False
        keys = set(self.terms) | set(other.terms)
        return all(self.coefficient(k) == other.coefficient(k) for k in keys)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def substitute(self, target: QuotientAlgebra, images) -> "AlgebraElement":
        """Apply the K-algebra map sending the i-th generator to images[i]."""
        images = list(images)
        if len(images) != len(self.parent.names):
            raise ValueError("one image per generator")
        maxe = [0] * len(images)
        for exps in self.terms:
            for i, e in enumerate(exps):
                maxe[i] = max(maxe[i], e)
        powers = []
        for img, m in zip(images, maxe):
            if not isinstance(img, AlgebraElement):
                img = target.scalar(img)
            pw = [target.one()]
            for _ in range(m):
                pw.append(pw[-1] * img)
            powers.append(pw)
        result = target.zero()
        for exps, c in self.terms.items():
            term = target.scalar(c)
            for i, e in enumerate(exps):
                if e:
                    term = term * powers[i][e]
            result = result + term
        return result

    def to_str(self, coeff_var: str = "t") -> str:
        names = self.parent.names
        parts = []
        for exps in sorted(self.terms, reverse=True):
            c = self.terms[exps]
            if c.is_zero():
                # exact zeros and O(t^N) placeholders carry no displayable term
                continue
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e
            )
            parts.append(render_monomial(c, mono, coeff_var))
        return " + ".join(parts) if parts else "0"

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"AlgebraElement({self.to_str()})"


class MonogenicAlgebra(QuotientAlgebra):
    """R[T]/(g(T)) with g monic."""

    def __init__(self, relation: RPolynomial, name: str = "T"):
        super().__init__(relation.field, (name,), (relation,))

    @property
    def relation(self) -> RPolynomial:
        return self.relations[0]

    @property
    def name(self) -> str:
        return self.names[0]

    def from_list(self, coeffs) -> AlgebraElement:
        return self.reduce({(k,): c for k, c in enumerate(coeffs)})

    def to_list(self, x: AlgebraElement) -> list:
        return [x.coefficient((k,)) for k in range(self.relation.degree)]

    def multiplication_matrix(self, x: AlgebraElement) -> list:
        """Matrix (rows = coordinates) of y -> x*y in the basis 1, T, ..., T^(d-1)."""
        d = self.relation.degree
        T = self.gen(0)
        cols = []
        cur = x
        for j in range(d):
            if j:
                cur = cur * T
            cols.append(self.to_list(cur))
        return [[cols[j][i] for j in range(d)] for i in range(d)]


class BiAlgebra(QuotientAlgebra):
    """O_G (x) O_X: group coordinate first, model generator second."""

    def __init__(self, group_relation: RPolynomial, model_relation: RPolynomial,
                 group_name: str = "a", model_name: str = "T"):
        super().__init__(group_relation.field, (group_name, model_name), (group_relation, model_relation))


def reduce_bialgebra(x: AlgebraElement) -> AlgebraElement:
    """Normal form of x; idempotent since elements are stored reduced."""
    return x.parent.reduce(dict(x.terms))

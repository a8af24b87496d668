"""Structural checks: coaction axioms, generic fibers, model morphisms, descent.

Everything is an identity between normal forms modulo the working precision.
The descent part works with finite free R-algebras given by structure
constants and decides membership questions through Smith forms over R.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .classes import GroupKind, GroupSchemeSpec
from .errors import PrecisionError
from .localfield.algebra import AlgebraElement, BiAlgebra, MonogenicAlgebra, QuotientAlgebra, RPolynomial
from .localfield.field import FieldSpec
from .localfield.matrix import determinant, identity, solve
from .localfield.series import DEFAULT_PRECISION, LaurentSeries
from .models import (
    GROUP_VARIABLE,
    ModelPresentation,
    group_identity,
    group_product,
    group_relation,
    standard_action,
)


# -- coaction axioms ---------------------------------------------------------------


@dataclass
class AxiomReport:
    relation: bool
    counit: bool
    coassociativity: bool
    generic_fiber: bool

    @property
    def ok(self) -> bool:
        return self.relation and self.counit and self.coassociativity and self.generic_fiber

    def as_dict(self) -> dict:
        return {
            "relation": self.relation,
            "counit": self.counit,
            "coassociativity": self.coassociativity,
            "generic_fiber": self.generic_fiber,
        }


def evaluate_relation(rel: RPolynomial, x: AlgebraElement) -> AlgebraElement:
    """rel(x) by Horner's rule inside x's algebra."""
    out = x.parent.zero()
    for c in reversed(rel.coeffs):
        out = out * x + c
    return out


def _three_fold(model: ModelPresentation) -> QuotientAlgebra:
    grel = model.bialgebra.relations[0]
    g = model.bialgebra.names[0]
    return QuotientAlgebra(model.field, (g + "1", g + "2", model.algebra.name),
                           (grel, grel, model.relation))


def check_generic_fiber(model: ModelPresentation) -> bool:
    """sigma(X) equals the standard action on the torsor coordinate X over K."""
    B = model.bialgebra
    g, T = B.gens()
    X = model.generic_coordinate
    acted = X.substitute(B, [model.coaction])
    expected = standard_action(model.group, g, X.substitute(B, [T]))
    return acted.agrees(expected)


def check_coaction_axioms(model: ModelPresentation) -> AxiomReport:
    B = model.bialgebra
    sigma = model.coaction
    relation_ok = evaluate_relation(model.relation, sigma).is_zero()
    A = model.algebra
    T = A.gen(0)
    counit_ok = sigma.substitute(A, [group_identity(model.group), T]).agrees(T)
    A3 = _three_fold(model)
    g1, g2, T3 = A3.gens()
    inner = sigma.substitute(A3, [g2, T3])
    lhs = sigma.substitute(A3, [g1, inner])
    rhs = sigma.substitute(A3, [group_product(model.group, g1, g2), T3])
    coassoc_ok = lhs.agrees(rhs)
    return AxiomReport(relation_ok, counit_ok, coassoc_ok, check_generic_fiber(model))


# -- model morphisms ---------------------------------------------------------------


@dataclass
class ModelMorphismCandidate:
    """R-algebra map O_target -> O_source given by the image of the target generator.

    A model morphism source -> target goes the other way on schemes.
    """

    source: ModelPresentation
    target: ModelPresentation
    image: AlgebraElement


def check_model_morphism(candidate: ModelMorphismCandidate) -> bool:
    src, tgt, img = candidate.source, candidate.target, candidate.image
    if src.group.kind is not tgt.group.kind or src.group.lam != tgt.group.lam:
        return False
    if img.parent != src.algebra or not img.is_integral():
        return False
    if not evaluate_relation(tgt.relation, img).is_zero():
        return False
    B = src.bialgebra
    lhs = img.substitute(B, [src.coaction])
    rhs = tgt.coaction.substitute(B, [B.gen(0), img.substitute(B, [B.gen(1)])])
    if not lhs.agrees(rhs):
        return False
    return tgt.generic_coordinate.substitute(src.algebra, [img]).agrees(src.generic_coordinate)


def custom_model(group: GroupSchemeSpec, relation: RPolynomial, name: str, coaction_fn, generic_fn,
                 precision: int = DEFAULT_PRECISION, is_torsor: bool = False,
                 is_regular: bool = False) -> ModelPresentation:
    """A hand-built integral model, for morphism checks against maximal models."""
    A = MonogenicAlgebra(relation, name)
    B = BiAlgebra(group_relation(group), relation, GROUP_VARIABLE[group.kind], name)
    g, T = B.gens()
    return ModelPresentation(
        group=group, klass=None, algebra=A, bialgebra=B, coaction=coaction_fn(B, g, T),
        case_label=None, is_torsor=is_torsor, is_regular=is_regular,
        generic_coordinate=generic_fn(A), precision=precision,
    )


def split_example(field: FieldSpec, precision: int = DEFAULT_PRECISION):
    """The trivial Z/pZ torsor, its maximal model Z/pZ and the model R[a]/(a^p - t^(p-1) a).

    Returns (maximal, other, candidate) with candidate a -> e t, e the
    coordinate of the maximal model.
    """
    from .classes import normalize
    from .models import build_model

    group = GroupSchemeSpec(GroupKind.Z_MOD_P, field)
    maximal = build_model(normalize(LaurentSeries.zero(field), group, precision), precision)
    p = field.p
    t = LaurentSeries.gen(field)
    zero = LaurentSeries.zero(field)
    rel = RPolynomial(field, [zero, -t.pow(p - 1)] + [zero] * (p - 2) + [LaurentSeries.one(field)])
    other = custom_model(
        group, rel, "a",
        lambda B, e, a: a + e.scale(t),
        lambda A: A.gen(0).scale(t.inverse()),
        precision,
    )
    image = maximal.algebra.gen(0).scale(t)
    return maximal, other, ModelMorphismCandidate(maximal, other, image)


def mutate_image(image: AlgebraElement, rng: random.Random) -> AlgebraElement:
    """Add c t^k to one coefficient of the image (c nonzero, 0 <= k <= 4)."""
    A = image.parent
    F = A.field
    j = rng.randrange(A.degrees[0])
    k = rng.randrange(5)
    c = rng.randrange(1, F.q)
    bump = A.reduce({(j,): LaurentSeries.monomial(F, c, k)})
    return image + bump


# -- Smith normal form over R ---------------------------------------------------------


def smith_normal_form(M, prec: int = DEFAULT_PRECISION, margin: int = 5, strict: bool = True,
                      track: bool = True):
    """U, D, V with U M V = D over R, D diagonal with entries t^(a_1), t^(a_2), ... nondecreasing.

    The pivot is an entry of least valuation; its valuation must be known
    with ``margin`` digits to spare.  An entry that is zero only to its
    precision makes the rank undecidable: ``strict`` raises, otherwise it
    is read as zero (arithmetic in R/t^prec).
    """
    n = len(M)
    m = len(M[0]) if n else 0
    F = M[0][0].field if n and m else None
    for row in M:
        for x in row:
            if not x.is_integral():
                raise ValueError("Smith form needs integral entries")
    # exact zeros stay exact so that a genuinely zero column is recognised as such
    A = [[x if x.is_exact_zero() else x.truncate(prec if x.prec is None else min(x.prec, prec))
          for x in r] for r in M]
    U = identity(F, n) if track else None
    V = identity(F, m) if track else None
    for k in range(min(n, m)):
        best = None
        ambiguous = False
        for i in range(k, n):
            for j in range(k, m):
                x = A[i][j]
                v = x.valuation()
                if v is None:
                    if x.prec is not None and not x.is_exact_zero():
                        ambiguous = True
                    continue
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best is None:
            if ambiguous and strict:
                raise PrecisionError(f"pivot valuation undecidable at precision {prec}")
            break
        v, pi, pj = best
        piv = A[pi][pj]
        if piv.prec is not None and piv.prec - v < margin:
            raise PrecisionError(f"pivot t^{v} not determined with margin {margin} at precision {piv.prec}")
        if strict and ambiguous:
            floor = min(A[i][j].prec for i in range(k, n) for j in range(k, m)
                        if A[i][j].valuation() is None and A[i][j].prec is not None
                        and not A[i][j].is_exact_zero())
            if floor <= v:
                raise PrecisionError(f"pivot valuation undecidable at precision {prec}")
        A[k], A[pi] = A[pi], A[k]
        if track:
            U[k], U[pi] = U[pi], U[k]
        for r in A:
            r[k], r[pj] = r[pj], r[k]
        if track:
            for r in V:
                r[k], r[pj] = r[pj], r[k]
        unit_inv = A[k][k].shift(-v).inverse(prec)
        A[k] = [x if x.is_exact_zero() else (x * unit_inv).truncate(prec) for x in A[k]]
        if track:
            U[k] = [(x * unit_inv).truncate(prec) for x in U[k]]
        A[k][k] = LaurentSeries.monomial(F, 1, v)
        for i in range(n):
            if i == k or A[i][k].is_exact_zero():
                continue
            f = A[i][k].shift(-v)
            A[i] = [x if y.is_exact_zero() else (x - f * y).truncate(prec) for x, y in zip(A[i], A[k])]
            A[i][k] = LaurentSeries.zero(F)
            if track:
                U[i] = [(x - f * y).truncate(prec) for x, y in zip(U[i], U[k])]
        for j in range(m):
            if j == k or A[k][j].is_exact_zero():
                continue
            f = A[k][j].shift(-v)
            A[k][j] = LaurentSeries.zero(F)
            if track:
                for r in V:
                    r[j] = (r[j] - f * r[k]).truncate(prec)
    D = [[A[i][j] if i == j else LaurentSeries.zero(F) for j in range(m)] for i in range(n)]
    for i in range(min(n, m)):
        if D[i][i].is_zero():
            D[i][i] = LaurentSeries.zero(F)
    return U, D, V


def elementary_divisors(D) -> list:
    """Valuations of the nonzero diagonal entries of a Smith form."""
    out = []
    for i in range(min(len(D), len(D[0]) if D else 0)):
        v = D[i][i].valuation()
        if v is not None:
            out.append(v)
    return out


# -- finite free algebras and descent -------------------------------------------------


@dataclass
class FiniteFreeAlgebra:
    """Free R-module with basis e_0..e_(n-1); table[i][j] = coordinates of e_i e_j."""

    field: FieldSpec
    table: list
    unit: list
    labels: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.unit)

    def multiply(self, x, y):
        n = self.rank
        F = self.field
        out = [LaurentSeries.zero(F) for _ in range(n)]
        for i, xi in enumerate(x):
            if xi.is_exact_zero():
                continue
            for j, yj in enumerate(y):
                if yj.is_exact_zero():
                    continue
                c = xi * yj
                for k, s in enumerate(self.table[i][j]):
                    if not s.is_exact_zero():
                        out[k] = out[k] + c * s
        return out

    def basis_vector(self, i):
        F = self.field
        return [LaurentSeries.one(F) if k == i else LaurentSeries.zero(F) for k in range(self.rank)]

    def check_axioms(self) -> bool:
        n = self.rank
        for i in range(n):
            e = self.basis_vector(i)
            if not _vec_agree(self.multiply(self.unit, e), e) or not _vec_agree(self.multiply(e, self.unit), e):
                return False
            for j in range(n):
                if not all(c.is_integral() for c in self.table[i][j]):
                    return False
                for k in range(n):
                    ei, ej, ek = e, self.basis_vector(j), self.basis_vector(k)
                    if not _vec_agree(self.multiply(self.multiply(ei, ej), ek),
                                      self.multiply(ei, self.multiply(ej, ek))):
                        return False
        return True

    @classmethod
    def monogenic(cls, relation: RPolynomial, name: str = "x"):
        A = MonogenicAlgebra(relation, name)
        d = relation.degree
        T = A.gen(0)
        pw = [A.one()]
        for _ in range(2 * d):
            pw.append(pw[-1] * T)
        table = [[A.to_list(pw[i + j]) for j in range(d)] for i in range(d)]
        F = relation.field
        unit = [LaurentSeries.one(F)] + [LaurentSeries.zero(F)] * (d - 1)
        labels = ["1"] + [name if k == 1 else f"{name}^{k}" for k in range(1, d)]
        return cls(F, table, unit, labels)

    @classmethod
    def split(cls, field: FieldSpec, n: int):
        """R^n with orthogonal idempotents."""
        one, zero = LaurentSeries.one(field), LaurentSeries.zero(field)
        table = [[[one if (i == j == k) else zero for k in range(n)] for j in range(n)] for i in range(n)]
        return cls(field, table, [one] * n, [f"e{i}" for i in range(n)])


def _vec_agree(x, y) -> bool:
    return all(a.agrees(b) for a, b in zip(x, y))


@dataclass
class AlgebraMap:
    """matrix[r][c]: coordinate r of the image of source basis vector c."""

    source: FiniteFreeAlgebra
    target: FiniteFreeAlgebra
    matrix: list

    def apply(self, x):
        F = self.target.field
        out = [LaurentSeries.zero(F) for _ in range(self.target.rank)]
        for c, xc in enumerate(x):
            if xc.is_exact_zero():
                continue
            for r in range(self.target.rank):
                out[r] = out[r] + self.matrix[r][c] * xc
        return out

    def check_multiplicative(self) -> bool:
        S = self.source
        if not _vec_agree(self.apply(S.unit), self.target.unit):
            return False
        for i in range(S.rank):
            for j in range(S.rank):
                ei, ej = S.basis_vector(i), S.basis_vector(j)
                lhs = self.apply(S.multiply(ei, ej))
                rhs = self.target.multiply(self.apply(ei), self.apply(ej))
                if not _vec_agree(lhs, rhs):
                    return False
        return True


class NotSchematicallyDominant(ValueError):
    pass


@dataclass
class EqualizerReport:
    equal: bool
    divisors: list
    equalizer_rank: int
    extra_generators: int
    witness: list | None = None


def _column_echelon(cols, prec, margin):
    """Basis of the R-span of the given column vectors (Hermite-style column reduction)."""
    if not cols:
        return []
    n = len(cols[0])
    M = [[c[r] for c in cols] for r in range(n)]
    _, D, V = smith_normal_form(M, prec, margin, strict=False, track=True)
    # span = M V restricted to the pivot columns
    basis = []
    rank = len(elementary_divisors(D))
    for k in range(rank):
        vec = []
        for r in range(n):
            s = LaurentSeries.zero(cols[0][0].field)
            for j, c in enumerate(cols):
                if not c[r].is_exact_zero() and not V[j][k].is_exact_zero():
                    s = s + c[r] * V[j][k]
            vec.append(s.truncate(prec))
        basis.append(vec)
    return basis


def _in_span(x, B_smith, prec):
    """Is the vector x in the column span of B (given its Smith data U, D)?"""
    U, D = B_smith
    divs = [D[i][i].valuation() for i in range(min(len(D), len(D[0])))]
    for i, row in enumerate(U):
        s = LaurentSeries.zero(x[0].field)
        for u, xv in zip(row, x):
            if not u.is_exact_zero() and not xv.is_exact_zero():
                s = s + u * xv
        s = s.truncate(prec)
        need = divs[i] if i < len(divs) and divs[i] is not None else None
        if need is None:
            if not s.is_zero():
                return False
            continue
        v = s.valuation()
        if v is not None and v < need:
            return False
        if v is None and s.prec is not None and s.prec < need:
            raise PrecisionError("membership undecidable at working precision")
    return True


RELATION_MODES = ("full", "span")


def equalizer_report(A: FiniteFreeAlgebra, Ap: FiniteFreeAlgebra, incl: AlgebraMap,
                     prec: int = DEFAULT_PRECISION, margin: int = 5,
                     relations: str = "full") -> EqualizerReport:
    """Compare A with the equalizer of A' => A' (x)_A A'.

    ``relations="full"`` presents A' (x)_A A' as A' (x)_R A' modulo the
    R-span of (x a) (x) y - x (x) (a y), x, y running over a basis of A' and
    a over a basis of A; that span is the ideal generated by a (x) 1 - 1 (x) a.
    ``relations="span"`` keeps only the elements a (x) 1 - 1 (x) a themselves
    (equivalently t^(a_i)(e_i (x) 1 - 1 (x) e_i) in a Smith basis).  The
    equalizer is the kernel of x -> x (x) 1 - 1 (x) x into the quotient,
    read off the kernel of [Delta | relations] via a Smith form.
    """
    if relations not in RELATION_MODES:
        raise ValueError(f"relations must be one of {RELATION_MODES}")
    n, r = Ap.rank, A.rank
    M = incl.matrix
    U_B, D_B, _ = smith_normal_form(M, prec, margin, strict=True, track=True)
    divisors = elementary_divisors(D_B)
    if len(divisors) < r:
        raise NotSchematicallyDominant("inclusion is not injective: not schematically dominant")

    def tensor(x, y):
        return [x[i] * y[j] for i in range(n) for j in range(n)]

    images = [[M[row][c] for row in range(n)] for c in range(r)]
    rels = []
    for a in images:
        if _vec_agree(a, Ap.unit):
            continue
        if relations == "span":
            pairs = [(a, Ap.unit, Ap.unit, a)]
        else:
            pairs = []
            for i in range(n):
                ei = Ap.basis_vector(i)
                xa = Ap.multiply(ei, a)
                for j in range(n):
                    ej = Ap.basis_vector(j)
                    pairs.append((xa, ej, ei, Ap.multiply(a, ej)))
        for x1, y1, x2, y2 in pairs:
            vec = [(u - w).truncate(prec) for u, w in zip(tensor(x1, y1), tensor(x2, y2))]
            if not all(v.is_exact_zero() for v in vec):
                rels.append(vec)
    rel_basis = _column_echelon(rels, prec, margin) if rels else []
    delta = [[(u - w).truncate(prec) for u, w in zip(tensor(Ap.basis_vector(j), Ap.unit),
                                                     tensor(Ap.unit, Ap.basis_vector(j)))]
             for j in range(n)]
    cols = delta + rel_basis
    C = [[c[row] for c in cols] for row in range(n * n)]
    _, D, V = smith_normal_form(C, prec, margin, strict=False, track=True)
    rank = len(elementary_divisors(D))
    kernel = [[V[row][k] for row in range(n)] for k in range(rank, len(cols))]
    kernel = [kv for kv in kernel if not all(x.is_zero() for x in kv)]
    extra = 0
    witness = None
    for kv in kernel:
        if not _in_span(kv, (U_B, D_B), prec - margin):
            extra += 1
            witness = witness or kv
    return EqualizerReport(extra == 0, [d for d in divisors if d], len(kernel), extra, witness)


def equalizer_check(A: FiniteFreeAlgebra, Ap: FiniteFreeAlgebra, incl: AlgebraMap,
                    prec: int = DEFAULT_PRECISION, relations: str = "full") -> bool:
    return equalizer_report(A, Ap, incl, prec, relations=relations).equal


def split_equalizer_matches(incl: AlgebraMap) -> bool:
    """Decide E = A for split A' = R^n by a direct formula, independent of Smith forms.

    A' (x)_A A' is then the product over pairs (i, j) of R / t^(m_ij) with
    m_ij the least valuation of a_i - a_j over a in A (m_ij = oo when the
    coordinates agree on all of A), so E = {x : x_i = x_j mod t^(m_ij)}.
    After identifying coordinates at distance oo, the m_ij form an
    ultrametric and the index of E is the weight of a maximum spanning
    tree; A = E iff the ranks and the indices agree.
    """
    M = incl.matrix
    n = len(M)
    r = len(M[0])
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            vals = [(M[i][c] - M[j][c]).valuation() for c in range(r)]
            vals = [v for v in vals if v is not None]
            if vals:
                edges.append((min(vals), i, j))
            else:
                parent[find(i)] = find(j)
    reps = sorted({find(i) for i in range(n)})
    if len(reps) != r:
        return False
    total = 0
    for v, i, j in sorted(edges, reverse=True):
        a, b = find(i), find(j)
        if a != b:
            parent[a] = b
            total += v
    sub = [M[i] for i in reps]
    return determinant(sub).valuation() == total


# -- random schematically dominant inclusions ------------------------------------------


def _random_poly(field: FieldSpec, rng: random.Random, degree: int, low: int = 0):
    return LaurentSeries(field, {k: rng.randrange(field.q) for k in range(low, degree + 1)})


def subalgebra_generated(Ap: FiniteFreeAlgebra, beta, r: int):
    """R[beta] inside A' with basis 1, beta, ..., beta^(r-1) (beta integral, min poly of degree r)."""
    F = Ap.field
    powers = [list(Ap.unit)]
    for _ in range(r):
        powers.append(Ap.multiply(powers[-1], beta))
    inclusion = [[powers[c][row] for c in range(r)] for row in range(Ap.rank)]
    return powers, inclusion


def _coords_in_powers(powers, target, r, prec):
    """Solve sum_{k<r} c_k powers[k] = target over K, using r rows with an invertible minor."""
    n = len(target)
    M = [[powers[k][row] for k in range(r)] for row in range(n)]
    for rows in itertools.combinations(range(n), r):
        sub = [M[i] for i in rows]
        det = determinant(sub)
        if not det.is_zero():
            sol = solve(sub, [[target[i]] for i in rows], prec)
            return [s[0] for s in sol]
    raise NotSchematicallyDominant("powers are dependent")


def random_inclusion(field: FieldSpec, rng: random.Random, prec: int = DEFAULT_PRECISION):
    """A random schematically dominant inclusion A = R[t^c b] -> A' of rank <= 4.

    A' is either monogenic R[x]/(h) or split R^n; b is random in A'.  The
    sampler retries until the powers of beta are independent over K, so
    the inclusion is injective.
    """
    while True:
        n = rng.randint(1, 4)
        if rng.random() < 0.5:
            h = [_random_poly(field, rng, 2) for _ in range(n)] + [LaurentSeries.one(field)]
            Ap = FiniteFreeAlgebra.monogenic(RPolynomial(field, h), "x")
        else:
            Ap = FiniteFreeAlgebra.split(field, n)
        mode = rng.random()
        if mode < 0.15 or n == 1:
            r = 1
            beta = list(Ap.unit)
        else:
            r = n
            c = rng.randint(0, 3)
            beta = [_random_poly(field, rng, 2).shift(c) if rng.random() < 0.8 else LaurentSeries.zero(field)
                    for _ in range(n)]
        powers, inclusion = subalgebra_generated(Ap, beta, r)
        if r > 1:
            sq = [row[:r] for row in inclusion]
            if determinant(sq).is_zero():
                continue
        # multiplication table of A in the basis 1, beta, ..., beta^(r-1)
        table = []
        for i in range(r):
            row = []
            for j in range(r):
                prod = Ap.multiply(powers[i], powers[j])
                row.append(_coords_in_powers(powers, prod, r, prec))
            table.append(row)
        A = FiniteFreeAlgebra(field, table, [LaurentSeries.one(field)] + [LaurentSeries.zero(field)] * (r - 1),
                              ["1"] + [f"b^{k}" for k in range(1, r)])
        return A, Ap, AlgebraMap(A, Ap, inclusion)

"""Maximal models of torsors under order-p group schemes over R = F_q[[t]].

``build_model`` turns a normalized class into a monogenic presentation
R[T]/(g(T)) together with the extended coaction T -> sigma(T), stored as a
normal form in O_G (x) O_X.  The case split follows the classification
for Z/pZ (Artin-Schreier), mu_p and alpha_p (Kummer-type, char p) and the
congruence group schemes H_lambda with mu = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import comb

from .classes import (
    GroupKind,
    GroupSchemeSpec,
    HExtendable,
    HRamified,
    Ramified,
    RamifiedAS,
    TorsorClass,
    Trivial,
    UnitKummer,
    UnramifiedAS,
)
from .errors import NormalizationError, PrecisionError, VerificationError
from .localfield.algebra import (
    AlgebraElement,
    BiAlgebra,
    MonogenicAlgebra,
    QuotientAlgebra,
    RPolynomial,
)
from .localfield.matrix import charpoly, rank_over_field, residue_matrix, solve
from .localfield.series import DEFAULT_PRECISION, LaurentSeries


class CaseLabel(str, Enum):
    MU_CASE_I = "MuCaseI"
    MU_CASE_II = "MuCaseII"
    ALPHA_CASE_I = "AlphaCaseI"
    ALPHA_CASE_II = "AlphaCaseII"
    AS_UNRAMIFIED = "ASUnramified"
    AS_RAMIFIED = "ASRamified"
    AS_TRIVIAL = "ASTrivial"
    H_TORSOR = "HTorsor"
    H_RAMIFIED = "HRamified"
    TRIVIAL = "TrivialTorsor"


TORSOR_MATRIX = {
    CaseLabel.MU_CASE_I: True,
    CaseLabel.MU_CASE_II: False,
    CaseLabel.ALPHA_CASE_I: True,
    CaseLabel.ALPHA_CASE_II: False,
    CaseLabel.AS_UNRAMIFIED: True,
    CaseLabel.AS_RAMIFIED: False,
    CaseLabel.AS_TRIVIAL: True,
    CaseLabel.H_TORSOR: True,
    CaseLabel.H_RAMIFIED: False,
    CaseLabel.TRIVIAL: True,
}


class PthPowerError(ValueError):
    """The input is exactly a p-th power, so no maximal r exists."""


@dataclass(frozen=True)
class BezoutPair:
    m: int
    n: int


def bezout_mp(i: int, p: int) -> BezoutPair:
    """Least m > 0 with m*|i| = 1 mod p, and n = (m*|i| - 1)/p."""
    j = abs(i)
    if j % p == 0:
        raise ValueError(f"p = {p} divides i = {i}")
    m = pow(j, -1, p)
    return BezoutPair(m, (m * j - 1) // p)


def extract_pth_power_part(u: LaurentSeries):
    """Write an integral u as alpha^p + t^r * beta with r maximal.

    Returns (alpha, r, beta).  Since k is perfect every term at an exponent
    divisible by p is a p-th power, so r is the least exponent prime to p
    in the support of u and alpha collects the p-th roots below it.
    """
    F = u.field
    p = F.p
    if not u.is_integral():
        raise ValueError("extract_pth_power_part expects an integral series")
    r = next((k for k, _ in u.items() if k % p), None)
    if r is None:
        if u.prec is None:
            raise PthPowerError("series is a p-th power")
        raise PrecisionError(f"triviality undecidable at precision {u.prec}")
    below = LaurentSeries(F, {k: c for k, c in u.terms.items() if k < r})
    alpha = below.pth_root()
    beta = (u - below).shift(-r)
    return alpha, r, beta


# -- group laws ----------------------------------------------------------


GROUP_VARIABLE = {
    GroupKind.ALPHA_P: "a",
    GroupKind.MU_P: "z",
    GroupKind.Z_MOD_P: "e",
    GroupKind.H_LAMBDA: "x",
}


def group_relation(group: GroupSchemeSpec) -> RPolynomial:
    F, p = group.field, group.p
    one = LaurentSeries.one(F)
    coeffs = [LaurentSeries.zero(F)] * p + [one]
    if group.kind is GroupKind.MU_P:
        coeffs[0] = -one
    elif group.kind is GroupKind.Z_MOD_P:
        coeffs[1] = -one
    # alpha_p: a^p; H_lambda: ((1 + lam x)^p - 1)/lam^p = x^p in characteristic p.
    return RPolynomial(F, coeffs)


def group_identity(group: GroupSchemeSpec) -> LaurentSeries:
    F = group.field
    return LaurentSeries.one(F) if group.kind is GroupKind.MU_P else LaurentSeries.zero(F)


def group_product(group: GroupSchemeSpec, g1: AlgebraElement, g2: AlgebraElement) -> AlgebraElement:
    """Comultiplication of the group coordinate, as an element of O_G (x) O_G (x) ..."""
    if group.kind is GroupKind.MU_P:
        return g1 * g2
    if group.kind is GroupKind.H_LAMBDA:
        return g1 + g2 + (g1 * g2).scale(group.lam)
    return g1 + g2


def standard_action(group: GroupSchemeSpec, g: AlgebraElement, x: AlgebraElement) -> AlgebraElement:
    """The defining action on the torsor coordinate over K."""
    kind = group.kind
    if kind is GroupKind.MU_P:
        return g * x
    if kind is GroupKind.H_LAMBDA:
        return g + x + (g * x).scale(group.lam)
    return x + g


# -- presentations ---------------------------------------------------------


@dataclass
class ModelPresentation:
    group: GroupSchemeSpec
    klass: TorsorClass | None
    algebra: MonogenicAlgebra
    bialgebra: BiAlgebra
    coaction: AlgebraElement
    case_label: CaseLabel | None
    is_torsor: bool
    is_regular: bool
    generic_coordinate: AlgebraElement
    precision: int
    bezout: BezoutPair | None = None
    uniformizer_data: dict | None = None
    extra: dict = field(default_factory=dict)

    @property
    def relation(self) -> RPolynomial:
        return self.algebra.relation

    @property
    def p(self) -> int:
        return self.group.p

    @property
    def field(self):
        return self.group.field

    def relation_str(self) -> str:
        return self.relation.to_str(self.algebra.name)

    def coaction_str(self) -> str:
        return self.coaction.to_str()


def _monogenic(F, p, constant: LaurentSeries, name="T", linear=None) -> MonogenicAlgebra:
    coeffs = [-constant] + [LaurentSeries.zero(F)] * (p - 1) + [LaurentSeries.one(F)]
    if linear is not None:
        coeffs[1] = coeffs[1] + linear
    return MonogenicAlgebra(RPolynomial(F, coeffs), name)


def _cap(x: LaurentSeries, prec: int) -> LaurentSeries:
    """Truncate inexact series; exact ones stay exact."""
    return x if x.prec is None else x.truncate(prec)


def _neg_binomial(m: int, k: int, p: int) -> int:
    """binom(-m, k) mod p."""
    return ((-1) ** k * comb(m + k - 1, k)) % p


def _inverse_power_coaction(B: BiAlgebra, T: AlgebraElement, inner: AlgebraElement, m: int, p: int):
    """T * (1 + inner)^(-m), where inner is nilpotent of order p (a multiple of the group coordinate)."""
    F = B.field
    total = B.zero()
    power = B.one()
    for k in range(p):
        if k:
            power = power * inner
        c = _neg_binomial(m, k, p)
        if c:
            total = total + power.scale(LaurentSeries.constant(F, F.from_int(c)))
    return T * total


def _inverse_of_gen(A: MonogenicAlgebra, prec: int) -> AlgebraElement:
    """T^(-1) in K[T]/(T^p - c): T^(p-1) / c."""
    rel = A.relation
    p = rel.degree
    c = -rel.coeffs[0]
    return A.gen(0) ** (p - 1) * c.inverse(prec)


def _regular_by_extraction(f: LaurentSeries) -> tuple[bool, int | None]:
    """R[T]/(T^p - f) is regular iff the maximal r in f = alpha^p + t^r beta is 1."""
    try:
        _, r, _ = extract_pth_power_part(f)
    except PthPowerError:
        return False, None
    return r == 1, r


def build_model(cls: TorsorClass, prec: int = DEFAULT_PRECISION) -> ModelPresentation:
    group = cls.group
    F, p = group.field, group.p
    kind = group.kind
    n = cls.normalized
    gvar = GROUP_VARIABLE[kind]
    grel = group_relation(group)

    def finish(A, coaction_fn, label, torsor, regular, generic_fn, **kw):
        B = BiAlgebra(grel, A.relation, gvar, A.name)
        g, T = B.gens()
        sigma = coaction_fn(B, g, T)
        generic = generic_fn(A)
        return ModelPresentation(
            group=group, klass=cls, algebra=A, bialgebra=B, coaction=sigma,
            case_label=label, is_torsor=torsor, is_regular=regular,
            generic_coordinate=generic, precision=prec, **kw,
        )

    identity_gen = lambda A: A.gen(0)
    t = LaurentSeries.gen(F)

    if isinstance(n, Trivial):
        if kind is GroupKind.Z_MOD_P:
            A = _monogenic(F, p, LaurentSeries.zero(F), linear=-LaurentSeries.one(F))
            return finish(A, lambda B, g, T: T + g, CaseLabel.AS_TRIVIAL, True, True, identity_gen,
                          uniformizer_data={"uniformizer": "t", "ramification_index": 1})
        if kind is GroupKind.MU_P:
            A = _monogenic(F, p, LaurentSeries.one(F))
            return finish(A, lambda B, g, T: g * T, CaseLabel.TRIVIAL, True, False, identity_gen)
        name = "W" if kind is GroupKind.H_LAMBDA else "T"
        A = _monogenic(F, p, LaurentSeries.zero(F), name=name)
        return finish(A, lambda B, g, T: standard_action(group, g, T), CaseLabel.TRIVIAL, True, False,
                      identity_gen)

    if kind is GroupKind.MU_P:
        if isinstance(n, UnitKummer):
            A = _monogenic(F, p, n.u)
            regular, r = _regular_by_extraction(n.u)
            return finish(A, lambda B, g, T: g * T, CaseLabel.MU_CASE_I, True, regular, identity_gen,
                          extra={"r": r})
        if isinstance(n, Ramified):
            bz = bezout_mp(n.i, p)
            A = _monogenic(F, p, _cap(n.u.pow(bz.m) * t, prec))

            def generic(A):
                return A.gen(0) ** n.i * n.u.pow(bz.n).inverse(prec)

            return finish(A, lambda B, g, T: g ** bz.m * T, CaseLabel.MU_CASE_II, False, True, generic,
                          bezout=bz, uniformizer_data={"uniformizer": "T", "ramification_index": p})

    if kind is GroupKind.ALPHA_P and isinstance(n, Ramified):
        if n.i > 0:
            f = n.u.shift(n.i)
            A = _monogenic(F, p, f)
            regular, r = _regular_by_extraction(f)
            return finish(A, lambda B, g, T: T + g, CaseLabel.ALPHA_CASE_I, True, regular, identity_gen,
                          extra={"r": r})
        j = -n.i
        bz = bezout_mp(j, p)
        A = _monogenic(F, p, _cap(n.u.pow(bz.m).inverse(prec) * t, prec))
        un = n.u.pow(bz.n)

        def coaction(B, a, T):
            return _inverse_power_coaction(B, T, a * T ** j * un, bz.m, p)

        def generic(A):
            return _inverse_of_gen(A, prec) ** j * un.inverse(prec)

        return finish(A, coaction, CaseLabel.ALPHA_CASE_II, False, True, generic, bezout=bz,
                      uniformizer_data={"uniformizer": "T", "ramification_index": p})

    if kind is GroupKind.Z_MOD_P:
        if isinstance(n, UnramifiedAS):
            c = LaurentSeries.constant(F, n.c.value)
            A = _monogenic(F, p, c, linear=-LaurentSeries.one(F))
            return finish(A, lambda B, g, T: T + g, CaseLabel.AS_UNRAMIFIED, True, True, identity_gen,
                          uniformizer_data={"uniformizer": "t", "ramification_index": 1})
        if isinstance(n, RamifiedAS):
            return _as_ramified_model(cls, grel, prec)

    if kind is GroupKind.H_LAMBDA:
        lam = group.lam
        if isinstance(n, HExtendable):
            A = _monogenic(F, p, n.f, name="W")
            regular, r = _regular_by_extraction(n.f)
            return finish(A, lambda B, x, W: standard_action(group, x, W), CaseLabel.H_TORSOR, True,
                          regular, identity_gen, extra={"r": r})
        if isinstance(n, HRamified):
            try:
                bz = bezout_mp(n.i, p)
            except ValueError as exc:
                raise NormalizationError(
                    f"{exc}; strip p-th powers from the class (reduce) before building the model"
                ) from None
            A = _monogenic(F, p, _cap(n.delta.pow(bz.m).inverse(prec) * t, prec))
            dn = n.delta.pow(bz.n)

            def coaction(B, x, T):
                inner = x * (T ** n.i * dn + B.scalar(lam))
                return _inverse_power_coaction(B, T, inner, bz.m, p)

            def generic(A):
                return _inverse_of_gen(A, prec) ** n.i * dn.inverse(prec)

            return finish(A, coaction, CaseLabel.H_RAMIFIED, False, True, generic, bezout=bz,
                          uniformizer_data={"uniformizer": "T", "ramification_index": p})

    raise NormalizationError(f"class {cls.label} is not a normalized {kind.value} class")


# -- Artin-Schreier, ramified ------------------------------------------------


def as_uniformizer_exponents(m: int, p: int) -> tuple[int, int]:
    """Least a > 0 and b with -a*m + b*p = 1, so y^a t^b has valuation 1."""
    if m % p == 0:
        raise ValueError(f"p = {p} divides the break m = {m}")
    a = (-pow(m, -1, p)) % p
    return a, (1 + a * m) // p


def eisenstein_valuation(coeffs, e: int) -> int:
    """Valuation, normalized by v(T) = 1, of sum c_j T^j (j < e) in R[T]/(g), g Eisenstein of degree e.

    The terms have pairwise distinct valuations e*v(c_j) + j, so the minimum
    is attained once; it must be certified against unknown coefficients.
    """
    best = None
    floor = None
    for j, c in enumerate(coeffs):
        if c.is_exact_zero():
            continue
        v = c.valuation()
        if v is not None:
            val = e * v + j
            best = val if best is None else min(best, val)
        if c.prec is not None:
            lower = e * c.prec + j
            floor = lower if floor is None else min(floor, lower)
    if best is None or (floor is not None and floor <= best):
        raise PrecisionError("valuation not determined at working precision")
    return best


def minimal_polynomial_via_resultant(expr: AlgebraElement, prec: int | None = None) -> RPolynomial:
    """Res_y(P(y), Z - expr(y)) for the monic relation P of expr's algebra.

    For monic P the resultant is prod over roots of (Z - expr(root)),
    i.e. det(Z - M) with M the matrix of multiplication by expr; it is
    evaluated with the division-free Berkowitz recursion.
    """
    A = expr.parent
    if not isinstance(A, MonogenicAlgebra):
        raise TypeError("expected an element of a monogenic algebra")
    M = A.multiplication_matrix(expr)
    cp = charpoly(M, prec)
    F = A.field
    poly = RPolynomial(F, cp, integral=False)
    if not all(c.is_integral() for c in poly.coeffs):
        raise VerificationError("minimal polynomial is not integral; wrong branch or lost precision")
    g = RPolynomial(F, poly.coeffs)
    if not g.is_eisenstein():
        raise VerificationError(f"minimal polynomial {g} is not Eisenstein")
    return g


def as_generic_algebra(f: LaurentSeries) -> MonogenicAlgebra:
    """K[y]/(y^p - y - f)."""
    F = f.field
    p = F.p
    one = LaurentSeries.one(F)
    coeffs = [-f, -one] + [LaurentSeries.zero(F)] * (p - 2) + [one]
    return MonogenicAlgebra(RPolynomial(F, coeffs, integral=False), "y")


def _as_ramified_model(cls: TorsorClass, grel: RPolynomial, prec: int) -> ModelPresentation:
    group = cls.group
    F, p = group.field, group.p
    f = cls.representative
    if f.valuation() is None or f.valuation() >= 0:
        raise ValueError("Artin-Schreier class is not ramified")
    m = cls.normalized.m
    a, b = as_uniformizer_exponents(m, p)
    L = as_generic_algebra(f)
    y = L.gen(0)
    t = LaurentSeries.gen(F)
    pi = y ** a * t.pow(b)
    g = minimal_polynomial_via_resultant(pi)
    A = MonogenicAlgebra(g, "T")

    # Coordinates of y in the basis 1, pi, ..., pi^(p-1): solve B c = y.
    work = prec + 2 * p * (m + 1) + 10
    cols = []
    cur = L.one()
    for _ in range(p):
        cols.append(L.to_list(cur))
        cur = cur * pi
    Bmat = [[cols[j][i] for j in range(p)] for i in range(p)]

    def in_pi_basis(x: AlgebraElement):
        rhs = [[c] for c in L.to_list(x)]
        sol = solve(Bmat, rhs, work)
        return [r[0] for r in sol]

    y_coords = in_pi_basis(y)
    images = []
    for j in range(p):
        shifted = (y + LaurentSeries.constant(F, F.from_int(j))) ** a * t.pow(b)
        coords = [c.truncate(prec) for c in in_pi_basis(shifted)]
        if not all(c.is_integral() for c in coords):
            raise VerificationError("Galois conjugate of the uniformizer is not integral")
        images.append(A.from_list(coords))

    B = BiAlgebra(grel, g, "e", "T")
    e = B.gen(0)
    sigma = B.zero()
    for j, img in enumerate(images):
        # indicator of e = j on F_p: 1 - (e - j)^(p-1)
        ind = B.one() - (e - LaurentSeries.constant(F, F.from_int(j))) ** (p - 1)
        sigma = sigma + ind * img.substitute(B, [B.gen(1)])
    generic = A.from_list([c.truncate(prec) for c in y_coords])
    return ModelPresentation(
        group=group, klass=cls, algebra=A, bialgebra=B, coaction=sigma,
        case_label=CaseLabel.AS_RAMIFIED, is_torsor=False, is_regular=True,
        generic_coordinate=generic, precision=prec,
        uniformizer_data={"uniformizer": f"y^{a}*t^{b}", "ramification_index": p, "a": a, "b": b},
        extra={"m": m},
    )


# -- torsor test --------------------------------------------------------------


def action_matrix(model: ModelPresentation):
    """Matrix over R of O_X (x) O_X -> O_G (x) O_X, W1 -> sigma(T), W2 -> T.

    Columns are indexed by the basis W1^i W2^j, rows by a^k T^l.
    """
    B = model.bialgebra
    sigma = model.coaction
    T = B.gen(1)
    d = model.relation.degree
    dg = B.degrees[0]
    spow = [B.one()]
    tpow = [B.one()]
    for _ in range(d - 1):
        spow.append(spow[-1] * sigma)
        tpow.append(tpow[-1] * T)
    rows = [(k, l) for k in range(dg) for l in range(d)]
    cols = []
    for i in range(d):
        for j in range(d):
            img = spow[i] * tpow[j]
            cols.append([img.coefficient(r) for r in rows])
    return [[cols[c][r] for c in range(len(cols))] for r in range(len(rows))]


def torsor_test(model: ModelPresentation) -> bool:
    """True iff the action map G x X -> X x X is an isomorphism.

    Both sides are free of the same rank over the complete local ring R,
    so the R-linear map is bijective iff it is invertible modulo t.
    """
    M = action_matrix(model)
    for row in M:
        for c in row:
            if not c.is_integral():
                raise VerificationError("coaction is not integral")
            if c.prec is not None and c.prec < 1:
                raise PrecisionError("coaction residue unknown")
    n = len(M)
    return rank_over_field(residue_matrix(M, model.field), model.field) == n


def hlambda_explicit_inverse(model: ModelPresentation, prec: int = 50) -> bool:
    """Invert H_lambda x X -> X x X by W -> W2, x -> (W1 - W2)/(1 + lam W2).

    1/(1 + lam W2) = sum_i (sum_k (-lam)^(i+kp) f^k) W2^i; each inner sum
    converges because its terms gain v(f) + p v(lam) > 0 per step.  Returns
    True iff both composites are the identity modulo t^prec.
    """
    group = model.group
    if group.kind is not GroupKind.H_LAMBDA or model.case_label is not CaseLabel.H_TORSOR:
        raise ValueError("explicit inverse applies to H_lambda torsor models")
    F, p = group.field, group.p
    lam = group.lam
    f = -model.relation.coeffs[0]
    step = f.valuation_bound() + p * lam.valuation()
    if step <= 0:
        raise ValueError("series for 1/(1 + lam W) does not converge")
    XX = QuotientAlgebra(F, ("W1", "W2"), (model.relation, model.relation))
    W1, W2 = XX.gens()
    neg_lam = -lam
    coeffs = []
    for i in range(p):
        s = LaurentSeries.zero(F, prec)
        k = 0
        while True:
            term = (neg_lam.pow(i + k * p) * f.pow(k)).truncate(prec)
            if term.is_zero():
                break
            s = s + term
            k += 1
        coeffs.append(s)
    inv = XX.reduce({(0, i): c for i, c in enumerate(coeffs)})
    if not ((W2.scale(lam) + 1) * inv).truncate(prec).agrees(XX.one().truncate(prec)):
        return False
    x_img = ((W1 - W2) * inv).truncate(prec)
    B = model.bialgebra
    # psi: O_G (x) O_X -> O_X (x) O_X
    psi_sigma = model.coaction.substitute(XX, [x_img, W2]).truncate(prec)
    if not psi_sigma.agrees(W1.truncate(prec)):
        return False
    if not (x_img ** p).truncate(prec).is_zero():
        return False
    # phi o psi on the generators x and W of O_G (x) O_X
    sigma = model.coaction
    x_back = x_img.substitute(B, [sigma, B.gen(1)]).truncate(prec)
    return x_back.agrees(B.gen(0).truncate(prec))

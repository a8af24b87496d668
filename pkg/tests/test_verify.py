import random

import pytest

from torsormodels.classes import GroupKind, GroupSchemeSpec, normalize
from torsormodels.localfield.algebra import RPolynomial
from torsormodels.localfield.field import FieldSpec
from torsormodels.localfield.matrix import determinant, mat_mul
from torsormodels.localfield.series import LaurentSeries, parse_series
from torsormodels.models import build_model
from torsormodels.errors import PrecisionError
from torsormodels.verify import (
    NotSchematicallyDominant,
    AlgebraMap, FiniteFreeAlgebra, ModelMorphismCandidate, check_coaction_axioms, check_model_morphism,
    elementary_divisors, equalizer_check, equalizer_report, mutate_image, random_inclusion,
    smith_normal_form, split_equalizer_matches, split_example,
)


def S(text, F):
    return parse_series(text, F)


def test_axioms_on_every_case(F3):
    for kind, text, lam in [(GroupKind.MU_P, "1 + t", None), (GroupKind.MU_P, "t", None),
                            (GroupKind.ALPHA_P, "t^-2", None), (GroupKind.Z_MOD_P, "t^-1", None),
                            (GroupKind.H_LAMBDA, "t^-1", "t")]:
        group = GroupSchemeSpec(kind, F3, S(lam, F3) if lam else None)
        M = build_model(normalize(S(text, F3), group), 40)
        assert check_coaction_axioms(M).ok, (kind, text)


def test_axioms_catch_a_perturbation(F3):
    group = GroupSchemeSpec(GroupKind.ALPHA_P, F3)
    M = build_model(normalize(S("t^-1", F3), group), 40)
    M.coaction = M.coaction + M.bialgebra.gen(0).scale(LaurentSeries.gen(F3))
    assert not check_coaction_axioms(M).ok


@pytest.mark.parametrize("p", [2, 3, 5])
def test_split_morphism(p):
    maximal, other, cand = split_example(FieldSpec(p))
    assert check_model_morphism(cand)


def test_mutations_rejected(F2):
    maximal, other, cand = split_example(F2)
    rng = random.Random(0)
    for _ in range(20):
        assert not check_model_morphism(ModelMorphismCandidate(maximal, other, mutate_image(cand.image, rng)))


def test_smith_example(F2):
    t = LaurentSeries.gen(F2)
    M = [[t, t], [t, t + t * t]]
    U, D, V = smith_normal_form(M)
    assert elementary_divisors(D) == [1, 2]
    UMV = mat_mul(mat_mul(U, M), V)
    assert all(UMV[i][j].agrees(D[i][j]) for i in range(2) for j in range(2))
    assert determinant(U).valuation() == 0 and determinant(V).valuation() == 0


def test_monogenic_algebra_axioms(F3):
    t = LaurentSeries.gen(F3)
    A = FiniteFreeAlgebra.monogenic(RPolynomial.monomial_minus(F3, 3, t))
    assert A.rank == 3 and A.check_axioms()


def hand_counterexample(F):
    """A' = R^3 and A = R[beta], beta = (0, t^2 + t^3, t).

    A' (x)_A A' is the product of R / t^v(beta_i - beta_j) over i, j; the
    element (0, 0, t) is constant on the factors linking coordinates 0 and 2
    (t = 0 mod t) and 1 and 2 (t = t^2 + t^3 mod t), so it lies in the
    equalizer, but no polynomial in beta over R hits it.
    """
    t = LaurentSeries.gen(F)
    one, zero = LaurentSeries.one(F), LaurentSeries.zero(F)
    b = [zero, t * t + t ** 3, t]
    rel = RPolynomial(F, [zero, b[1] * b[2], -(b[1] + b[2]), one])
    A = FiniteFreeAlgebra.monogenic(rel)
    Ap = FiniteFreeAlgebra.split(F, 3)
    matrix = [[one, x, x * x] for x in b]
    return A, Ap, AlgebraMap(A, Ap, matrix)


def test_descent_counterexample(F2):
    A, Ap, incl = hand_counterexample(F2)
    assert incl.check_multiplicative()
    rep = equalizer_report(A, Ap, incl)
    assert not rep.equal and rep.extra_generators >= 1
    # E has index t^3 in R^3 and A has index t^(2+1+1) (Vandermonde), so E / A has length 1
    Ad = incl.matrix
    assert determinant(Ad).valuation() == 4
    assert split_equalizer_matches(incl) == rep.equal


def test_span_shortcut_misses_counterexample(F2):
    A, Ap, incl = hand_counterexample(F2)
    assert equalizer_check(A, Ap, incl, relations="span")


def test_trivial_inclusion_passes(F2):
    # A = A': the equalizer is A
    A = FiniteFreeAlgebra.split(F2, 2)
    one, zero = LaurentSeries.one(F2), LaurentSeries.zero(F2)
    incl = AlgebraMap(A, A, [[one, zero], [zero, one]])
    assert equalizer_check(A, A, incl)


def test_split_oracle_agrees_on_random_instances(F2):
    rng = random.Random(7)
    seen = 0
    while seen < 8:
        A, Ap, incl = random_inclusion(F2, rng, 40)
        if Ap.labels[0] != "e0":
            continue
        seen += 1
        assert split_equalizer_matches(incl) == equalizer_check(A, Ap, incl)


def test_alpha_coaction_p2(F2):
    group = GroupSchemeSpec(GroupKind.ALPHA_P, F2)
    M = build_model(normalize(S("t^-1", F2), group), 40)
    a, T = M.bialgebra.gens()
    assert M.coaction == T + a * T * T


def test_h_torsor_coaction(F3):
    group = GroupSchemeSpec(GroupKind.H_LAMBDA, F3, S("t", F3))
    M = build_model(normalize(S("t", F3), group), 40)
    x, W = M.bialgebra.gens()
    assert M.coaction == x + W + (x * W).scale(LaurentSeries.gen(F3))


def test_morphism_without_t_fails(F3):
    maximal, other, cand = split_example(F3)
    assert not check_model_morphism(ModelMorphismCandidate(maximal, other, maximal.algebra.gen(0)))


def test_smith_diagonal_and_errors(F2):
    t = LaurentSeries.gen(F2)
    one, zero = LaurentSeries.one(F2), LaurentSeries.zero(F2)
    _, D, _ = smith_normal_form([[one, zero], [zero, t * t]])
    assert elementary_divisors(D) == [0, 2]
    with pytest.raises(PrecisionError):
        smith_normal_form([[one, zero], [LaurentSeries.zero(F2, 40), LaurentSeries.zero(F2, 40)]])


def test_equalizer_idempotent_example(F2):
    # A' = R e0 + R e1, e = e1, A = span{1, t e}
    Ap = FiniteFreeAlgebra.split(F2, 2)
    t = LaurentSeries.gen(F2)
    one, zero = LaurentSeries.one(F2), LaurentSeries.zero(F2)
    A = FiniteFreeAlgebra.monogenic(RPolynomial(F2, [zero, -t, one]))  # x = t e, x^2 = t x
    incl = AlgebraMap(A, Ap, [[one, zero], [one, t]])
    assert incl.check_multiplicative()
    rep = equalizer_report(A, Ap, incl)
    assert rep.equal and rep.divisors == [1]


def test_equalizer_constants_in_split_etale(F2):
    Ap = FiniteFreeAlgebra.split(F2, 2)
    one = LaurentSeries.one(F2)
    A = FiniteFreeAlgebra(F2, [[[one]]], [one], ["1"])
    assert equalizer_check(A, Ap, AlgebraMap(A, Ap, [[one], [one]]))


def test_not_schematically_dominant(F2):
    Ap = FiniteFreeAlgebra.split(F2, 2)
    one, zero = LaurentSeries.one(F2), LaurentSeries.zero(F2)
    # x -> 0 with x^2 = 0 is not injective
    A = FiniteFreeAlgebra.monogenic(RPolynomial(F2, [zero, zero, one]))
    with pytest.raises(NotSchematicallyDominant):
        equalizer_report(A, Ap, AlgebraMap(A, Ap, [[one, zero], [one, zero]]))

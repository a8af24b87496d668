import pytest

from torsormodels.classes import GroupKind, GroupSchemeSpec, normalize
from torsormodels.errors import PrecisionError
from torsormodels.localfield.algebra import RPolynomial
from torsormodels.localfield.field import FieldSpec
from torsormodels.localfield.series import LaurentSeries, parse_series
from torsormodels.models import (
    CaseLabel, PthPowerError, as_generic_algebra, as_uniformizer_exponents, bezout_mp, build_model,
    extract_pth_power_part, hlambda_explicit_inverse, minimal_polynomial_via_resultant, torsor_test,
)
from torsormodels.verify import check_coaction_axioms


def model(text, p, kind, lam=None, e=1, prec=40, **kw):
    F = FieldSpec(p, e)
    group = GroupSchemeSpec(kind, F, parse_series(lam, F) if lam else None)
    return build_model(normalize(parse_series(text, F), group, prec, **kw), prec)


CASES = [
    ("1 + t", 3, GroupKind.MU_P, None, CaseLabel.MU_CASE_I, True),
    ("t^2", 3, GroupKind.MU_P, None, CaseLabel.MU_CASE_II, False),
    ("t^2", 3, GroupKind.ALPHA_P, None, CaseLabel.ALPHA_CASE_I, True),
    ("t^-2", 3, GroupKind.ALPHA_P, None, CaseLabel.ALPHA_CASE_II, False),
    ("1", 3, GroupKind.Z_MOD_P, None, CaseLabel.AS_UNRAMIFIED, True),
    ("t^-2", 3, GroupKind.Z_MOD_P, None, CaseLabel.AS_RAMIFIED, False),
    ("t", 3, GroupKind.Z_MOD_P, None, CaseLabel.AS_TRIVIAL, True),
    ("t", 2, GroupKind.H_LAMBDA, "t", CaseLabel.H_TORSOR, True),
    ("t^-1", 2, GroupKind.H_LAMBDA, "t", CaseLabel.H_RAMIFIED, False),
    ("t^3", 3, GroupKind.MU_P, None, CaseLabel.TRIVIAL, True),
    ("t^3", 3, GroupKind.ALPHA_P, None, CaseLabel.TRIVIAL, True),
    ("0", 2, GroupKind.H_LAMBDA, "t", CaseLabel.TRIVIAL, True),
]


@pytest.mark.parametrize("text,p,kind,lam,label,is_torsor", CASES)
def test_case_dispatch(text, p, kind, lam, label, is_torsor):
    m = model(text, p, kind, lam)
    assert m.case_label is label
    assert m.is_torsor is is_torsor
    assert torsor_test(m) is is_torsor
    assert check_coaction_axioms(m).ok


def test_alpha_t_inverse_p3():
    m = model("t^-1", 3, GroupKind.ALPHA_P)
    assert m.relation_str() == "T^3 + 2*t"
    assert m.coaction_str() == "t*a^2 + 2*a*T^2 + T"


def test_mu_case_two_bezout():
    m = model("t^2", 5, GroupKind.MU_P)
    assert (m.bezout.m, m.bezout.n) == (3, 1)
    z, T = m.bialgebra.gens()
    assert m.coaction == z ** 3 * T


def test_bezout():
    for p in (2, 3, 5, 7):
        for i in range(1, 3 * p):
            if i % p:
                b = bezout_mp(i, p)
                assert b.m * i - b.n * p == 1 and 0 < b.m < p
    with pytest.raises(ValueError):
        bezout_mp(3, 3)


def test_regularity_mu_case_one():
    assert model("1 + t", 3, GroupKind.MU_P).is_regular
    assert not model("1 + t^2", 3, GroupKind.MU_P).is_regular


def test_extract_pth_power_part(F3):
    u = parse_series("1 + t^3 + 2*t^4", F3)
    alpha, r, beta = extract_pth_power_part(u)
    assert r == 4
    assert (alpha.pow(3) + beta.shift(4)) == u
    with pytest.raises(PthPowerError):
        extract_pth_power_part(parse_series("1 + t^3", F3))
    with pytest.raises(PrecisionError, match="undecidable at precision 6"):
        extract_pth_power_part(parse_series("1 + t^3 + O(t^6)", F3))


def test_as_ramified_uniformizer():
    for p, m in [(2, 1), (2, 3), (3, 1), (3, 2), (5, 3)]:
        a, b = as_uniformizer_exponents(m, p)
        assert -a * m + b * p == 1
        M = model(f"t^-{m}", p, GroupKind.Z_MOD_P)
        assert M.relation.is_eisenstein()


def test_resultant_minpoly(F2):
    # y^2 - y = 1/t; pi = t*y satisfies pi^2 - t*pi - t = 0 (clear denominators by hand)
    t = LaurentSeries.gen(F2)
    L = as_generic_algebra(t.inverse())
    pi = L.gen(0).scale(t)
    g = minimal_polynomial_via_resultant(pi)
    assert g == RPolynomial(F2, [t, t, LaurentSeries.one(F2)])


def test_h_explicit_inverse():
    for p in (2, 3):
        m = model("t", p, GroupKind.H_LAMBDA, "t", prec=50)
        assert hlambda_explicit_inverse(m, 50)


def test_precision_error_on_zero_window(F2):
    with pytest.raises(PrecisionError):
        model("O(t^5)", 2, GroupKind.ALPHA_P)

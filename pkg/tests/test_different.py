import pytest

from torsormodels.classes import GroupKind, GroupSchemeSpec, normalize
from torsormodels.different import (
    DifferentMethod, TowerSpec, TowerStage, base_change_to_model, classical_as_different,
    different_exponent, relation_residual, t_in_model_uniformizer, verify_tower_transitivity,
)
from torsormodels.errors import NonRegularStageError
from torsormodels.localfield.field import FieldSpec
from torsormodels.localfield.series import LaurentSeries, parse_series
from torsormodels.models import build_model


def model(text, p, kind, lam=None, prec=40):
    F = FieldSpec(p)
    group = GroupSchemeSpec(kind, F, parse_series(lam, F) if lam else None)
    return build_model(normalize(parse_series(text, F), group, prec), prec)


@pytest.mark.parametrize("p,i", [(2, 1), (3, 1), (3, 2), (5, 3), (3, 4)])
def test_alpha_case_two(p, i):
    rep = different_exponent(model(f"t^-{i}", p, GroupKind.ALPHA_P))
    assert rep.exponent == i + 1
    assert rep.method is DifferentMethod.INVARIANT_DERIVATION


@pytest.mark.parametrize("p,i", [(2, 1), (3, 2), (5, 4)])
def test_mu_case_two(p, i):
    assert different_exponent(model(f"t^{i}", p, GroupKind.MU_P)).exponent == 1


@pytest.mark.parametrize("p,m", [(2, 1), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2)])
def test_as_ramified_matches_classical(p, m):
    rep = different_exponent(model(f"t^-{m}", p, GroupKind.Z_MOD_P, prec=60))
    assert rep.exponent == classical_as_different(p, m) == (p - 1) * (m + 1)
    assert rep.method is DifferentMethod.ETALE_MIN_POLY


@pytest.mark.parametrize("i,lam,want", [(1, "t", 2), (3, "t", 3), (3, "t^2", 4)])
def test_h_ramified(i, lam, want):
    # 1 + min(i, p v(lambda)) with p = 2
    assert different_exponent(model(f"t^-{i}", 2, GroupKind.H_LAMBDA, lam)).exponent == want


@pytest.mark.parametrize("text,kind", [("1 + t", GroupKind.MU_P), ("t", GroupKind.ALPHA_P),
                                       ("1", GroupKind.Z_MOD_P), ("t^3", GroupKind.MU_P)])
def test_torsors_have_zero_different(text, kind):
    rep = different_exponent(model(text, 3, kind))
    assert rep.exponent == 0 and rep.is_torsor_consistent


def test_t_in_uniformizer():
    M = model("t^-1", 2, GroupKind.Z_MOD_P)
    t_of_T = t_in_model_uniformizer(M, 30)
    assert t_of_T.valuation() == 2
    assert relation_residual(M, t_of_T, 30).is_zero()


def test_base_change_valuation():
    F = FieldSpec(2)
    M = model("t^-1", 2, GroupKind.Z_MOD_P)
    f2 = base_change_to_model(parse_series("t^-1", F), M, 30)
    assert f2.valuation() == -2


def _tower(*stages, p=2):
    F = FieldSpec(p)
    out = []
    for k, (kind, text) in enumerate(stages):
        out.append(TowerStage(kind, parse_series(text, F)))
    return TowerSpec(out)


@pytest.mark.parametrize("m2,total", [(1, 6), (3, 8)])
def test_tower_direct(m2, total):
    rep = verify_tower_transitivity(_tower((GroupKind.Z_MOD_P, "t^-1"), (GroupKind.Z_MOD_P, f"t^-{m2}")))
    assert rep.verified and rep.direct_total == total == rep.formula_total
    assert rep.mode == "etale-direct"


def test_tower_rejects_non_regular_stage():
    with pytest.raises(NonRegularStageError):
        verify_tower_transitivity(_tower((GroupKind.MU_P, "1 + t^2"), (GroupKind.Z_MOD_P, "t^-1")))


def test_tower_needs_two_stages():
    with pytest.raises(ValueError):
        verify_tower_transitivity(_tower((GroupKind.Z_MOD_P, "t^-1")))

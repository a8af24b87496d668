import pytest
from hypothesis import given, settings, strategies as st

from torsormodels.classes import (
    GroupKind, GroupSchemeSpec, HExtendable, HRamified, Ramified, RamifiedAS, Trivial,
    UnitKummer, UnramifiedAS, canonical_unit, normalize, records_agree, solve_as_tail,
)
from torsormodels.errors import NormalizationError, PrecisionError
from torsormodels.localfield.field import FieldSpec
from torsormodels.localfield.series import LaurentSeries, parse_series

FIELDS = [FieldSpec(2), FieldSpec(3), FieldSpec(5), FieldSpec(2, 2)]


def norm(text, F, kind, lam=None, **kw):
    group = GroupSchemeSpec(kind, F, parse_series(lam, F) if lam else None)
    return normalize(parse_series(text, F), group, 40, **kw).normalized


def test_mu_ramified(F3):
    rec = norm("2*t^4 + t^5", F3, GroupKind.MU_P)
    assert isinstance(rec, Ramified) and rec.i == 1
    assert rec.u.coefficient(0) == 1


def test_mu_unit_and_trivial(F3):
    assert isinstance(norm("1 + t", F3, GroupKind.MU_P), UnitKummer)
    assert isinstance(norm("2 + 2*t^3", F3, GroupKind.MU_P), Trivial)
    assert isinstance(norm("t^3", F3, GroupKind.MU_P), Trivial)


def test_mu_precision_error(F2):
    with pytest.raises(PrecisionError):
        norm("1 + O(t^5)", F2, GroupKind.MU_P)
    with pytest.raises(NormalizationError):
        norm("0", F2, GroupKind.MU_P)


def test_alpha_drops_pth_powers(F2):
    rec = norm("t^-4 + t^-3 + t^2", F2, GroupKind.ALPHA_P)
    assert isinstance(rec, Ramified) and rec.i == -3
    assert isinstance(norm("t^-4 + 1", F2, GroupKind.ALPHA_P), Trivial)


def test_as_cases(F2, F3):
    rec = norm("t^-4", F2, GroupKind.Z_MOD_P)
    assert isinstance(rec, RamifiedAS) and rec.m == 1
    assert isinstance(norm("1 + t", F3, GroupKind.Z_MOD_P), UnramifiedAS)
    assert isinstance(norm("t + t^2", F3, GroupKind.Z_MOD_P), Trivial)


def test_as_unramified_over_extension():
    F = FieldSpec(2, 2)
    # the trace form decides the class of a constant
    classes = {type(norm(f"[{a},{b}]", F, GroupKind.Z_MOD_P)).__name__ for a in (0, 1) for b in (0, 1)}
    assert classes == {"Trivial", "UnramifiedAS"}


def test_h_lambda(F2):
    assert isinstance(norm("t", F2, GroupKind.H_LAMBDA, lam="t"), HExtendable)
    rec = norm("t^-2 + t^-1", F2, GroupKind.H_LAMBDA, lam="t")
    assert isinstance(rec, HRamified) and rec.i == 2
    rec = norm("t^-2 + t^-1", F2, GroupKind.H_LAMBDA, lam="t", reduce=True)
    assert rec.i == 1


def test_group_validation(F2):
    with pytest.raises(ValueError):
        GroupSchemeSpec(GroupKind.H_LAMBDA, F2)
    with pytest.raises(ValueError):
        GroupSchemeSpec(GroupKind.H_LAMBDA, F2, parse_series("1 + t", F2))
    with pytest.raises(ValueError):
        GroupSchemeSpec(GroupKind.MU_P, F2, parse_series("t", F2))


def test_canonical_unit_shape(F3):
    u = canonical_unit(parse_series("2 + t^3 + t^4", F3), 30)
    assert u.coefficient(0) == 1
    assert all(k % 3 for k, _ in u.items() if k)


def test_solve_as_tail(F3):
    g = parse_series("t + t^2", F3)
    y = solve_as_tail(g, 30)
    assert (y.frobenius() - y).agrees(g)


def laurent(F, lo=-8, hi=6):
    return st.dictionaries(st.integers(lo, hi), st.integers(1, F.q - 1), min_size=1, max_size=6).map(
        lambda d: LaurentSeries(F, d))


@st.composite
def class_pair(draw):
    F = draw(st.sampled_from(FIELDS))
    kind = draw(st.sampled_from([GroupKind.MU_P, GroupKind.ALPHA_P, GroupKind.Z_MOD_P]))
    f = draw(laurent(F))
    y = draw(laurent(F, -4, 4))
    p = F.p
    if kind is GroupKind.MU_P:
        g = f * y.pow(p)
    elif kind is GroupKind.ALPHA_P:
        g = f + y.pow(p)
    else:
        g = f + y.pow(p) - y
    return F, kind, f, g


@given(class_pair())
@settings(max_examples=150, deadline=None)
def test_normalization_is_a_class_invariant(data):
    F, kind, f, g = data
    group = GroupSchemeSpec(kind, F)
    a = normalize(f, group, 40).normalized
    b = normalize(g, group, 40).normalized
    assert records_agree(a, b)

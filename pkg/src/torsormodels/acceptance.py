"""The acceptance grid: every criterion as a function returning a CriterionResult.

Shared by ``torsormodels suite`` and tests/test_acceptance.py.  Each check
compares the pipeline against an oracle computed a different way (direct
expansion, multiplication instead of division, a classical formula, a
recomputation at doubled precision).
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .classes import GroupKind, GroupSchemeSpec, normalize, records_agree
from .different import (
    TowerSpec,
    TowerStage,
    classical_as_different,
    different_exponent,
)
from .different import verify_tower_transitivity
from .localfield.algebra import AlgebraElement, RPolynomial
from .localfield.field import FieldSpec
from .localfield.matrix import determinant, mat_mul
from .localfield.series import LaurentSeries
from .models import (
    CaseLabel,
    bezout_mp,
    build_model,
    hlambda_explicit_inverse,
    torsor_test,
)
from .verify import (
    ModelMorphismCandidate,
    check_coaction_axioms,
    check_model_morphism,
    equalizer_report,
    mutate_image,
    random_inclusion,
    smith_normal_form,
    split_equalizer_matches,
    split_example,
)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    reproducer: str | None = None
    expected_failure: bool = False

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = f"[{status}] criterion {self.number}: {self.title} ({self.seconds:.2f}s) - {self.detail}"
        if self.reproducer and not self.passed:
            out += f"\n        reproduce: {self.reproducer}"
        return out


@dataclass
class Instance:
    """A classify call that criteria 7 and 11 can replay."""

    p: int
    kind: GroupKind
    f: LaurentSeries
    lam: LaurentSeries | None = None
    reduce: bool = False
    e: int = 1

    def reproducer(self, prec: int) -> str:
        lam = f" --lambda '{self.lam}'" if self.lam is not None else ""
        ext = f" --e {self.e}" if self.e != 1 else ""
        red = " --reduce" if self.reduce else ""
        return (f"torsormodels classify --p {self.p}{ext} --group {self.kind.value}{lam} "
                f"--f '{self.f}' --precision {prec}{red}")


@dataclass
class GridState:
    """Models and replayable instances gathered while the criteria run."""

    corrupt: bool = False
    instances: list = field(default_factory=list)
    rows: list = field(default_factory=list)


def _field(p, e=1):
    return FieldSpec(p, e)


def corrupt_model(model):
    """Negative control: perturb the coaction by t * (group coordinate)."""
    B = model.bialgebra
    t = LaurentSeries.gen(model.field)
    model.coaction = model.coaction + B.gen(0).scale(t)
    return model


def run_instance(inst: Instance, prec: int, state: GridState | None = None):
    F = inst.f.field
    group = GroupSchemeSpec(inst.kind, F, inst.lam)
    cls = normalize(inst.f, group, prec, reduce=inst.reduce)
    model = build_model(cls, prec)
    if state is not None and state.corrupt:
        corrupt_model(model)
    report = different_exponent(model)
    if state is not None:
        state.instances.append(inst)
        state.rows.append((model.case_label.value, model.is_torsor, model.is_regular, report.exponent))
    return model, report


def _series_map(x) -> dict:
    if isinstance(x, AlgebraElement):
        return dict(x.terms)
    return dict(enumerate(x.coeffs))


def _maps_agree(a: dict, b: dict) -> bool:
    F = next(iter(a.values())).field if a else None
    for k in set(a) | set(b):
        x = a.get(k)
        y = b.get(k)
        if x is None:
            x = LaurentSeries.zero(y.field)
        if y is None:
            y = LaurentSeries.zero(x.field)
        if not x.agrees(y):
            return False
    return True


def snapshot(model, report) -> dict:
    return {
        "case": model.case_label.value,
        "is_torsor": model.is_torsor,
        "is_regular": model.is_regular,
        "different": report.exponent,
        "bezout": None if model.bezout is None else (model.bezout.m, model.bezout.n),
        "relation": _series_map(model.relation),
        "coaction": _series_map(model.coaction),
    }


def snapshots_agree(a: dict, b: dict) -> bool:
    """Discrete fields equal; series fields equal on their common window."""
    for key in ("case", "is_torsor", "is_regular", "different", "bezout"):
        if a[key] != b[key]:
            return False
    return _maps_agree(a["relation"], b["relation"]) and _maps_agree(a["coaction"], b["coaction"])


def random_unit(F: FieldSpec, rng: random.Random, degree: int = 6) -> LaurentSeries:
    terms = {0: rng.randrange(1, F.q)}
    for k in range(1, degree + 1):
        terms[k] = rng.randrange(F.q)
    return LaurentSeries(F, terms)


def random_laurent(F: FieldSpec, rng: random.Random, lo: int = -8, hi: int = 6) -> LaurentSeries:
    while True:
        f = LaurentSeries(F, {k: rng.randrange(F.q) for k in range(lo, hi + 1) if rng.random() < 0.5})
        if not f.is_exact_zero():
            return f


def _axioms_ok(model) -> bool:
    return check_coaction_axioms(model).ok


# -- criteria -------------------------------------------------------------------------------


def criterion_1(state: GridState, prec: int = 40) -> CriterionResult:
    start = time.perf_counter()
    failures = []
    slowest = 0.0
    for p in (2, 3, 5):
        t0 = time.perf_counter()
        F = _field(p)
        t = LaurentSeries.gen(F)
        inst = Instance(p, GroupKind.ALPHA_P, t.inverse())
        model, rep = run_instance(inst, prec, state)
        B = model.bialgebra
        a, T = B.gens()
        expected = B.zero()
        for k in range(p):
            expected = expected + (a ** k * T ** (k + 1)).scale(LaurentSeries.constant(F, F.from_int((-1) ** k)))
        ok = (
            model.relation == RPolynomial.monomial_minus(F, p, t)
            and model.coaction == expected
            and model.case_label is CaseLabel.ALPHA_CASE_II
            and not model.is_torsor
            and model.is_regular
            and rep.exponent == 2
            and _axioms_ok(model)
        )
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        if not ok or dt >= 1.0:
            failures.append(inst.reproducer(prec))
    return CriterionResult(
        1, "alpha_p class t^-1 reproduces T^p - t, T/(1+aT), non-torsor, regular, different 2",
        not failures, f"p in (2,3,5), slowest case {slowest:.3f}s", time.perf_counter() - start,
        failures[0] if failures else None,
    )


def criterion_2(state: GridState, prec: int = 40, seed: int = 2) -> CriterionResult:
    start = time.perf_counter()
    rng = random.Random(seed)
    accepted = []
    rejected = 0
    total = 0
    for p in (2, 3, 5):
        maximal, other, cand = split_example(_field(p), prec)
        if state.corrupt:
            corrupt_model(maximal)
        accepted.append(check_model_morphism(cand))
    maximal, other, cand = split_example(_field(2), prec)
    for _ in range(20):
        total += 1
        mutated = ModelMorphismCandidate(maximal, other, mutate_image(cand.image, rng))
        rejected += not check_model_morphism(mutated)
    identity_ok = check_model_morphism(ModelMorphismCandidate(maximal, maximal, maximal.algebra.gen(0)))
    ok = all(accepted) and rejected == total and identity_ok
    dt = time.perf_counter() - start
    return CriterionResult(
        2, "a -> e t is a model morphism; single-coefficient mutations are rejected",
        ok and dt < 1.0 * 3,
        f"accepted for p=2,3,5: {accepted}; mutations rejected {rejected}/{total}; identity accepted {identity_ok}",
        dt, "torsormodels suite --only 2",
    )


def criterion_3(state: GridState, prec: int = 40, seed: int = 3) -> CriterionResult:
    start = time.perf_counter()
    rng = random.Random(seed)
    count = 0
    failures = []
    for p in (2, 3, 5):
        F = _field(p)
        t = LaurentSeries.gen(F)
        for i in range(1, p):
            for _ in range(5):
                u = random_unit(F, rng)
                inst = Instance(p, GroupKind.MU_P, u.shift(i))
                model, rep = run_instance(inst, prec, state)
                count += 1
                bz = model.bezout
                uc = model.klass.normalized.u
                z, T = model.bialgebra.gens()
                ratio = (uc * u.inverse(prec)).truncate(prec)
                ok = (
                    model.case_label is CaseLabel.MU_CASE_II
                    and bz is not None and (bz.m * i) % p == 1 and bz.m * i - bz.n * p == 1
                    and model.relation.coeffs[0].agrees(-(uc.pow(bz.m) * t))
                    and all(c.is_exact_zero() for c in model.relation.coeffs[1:-1])
                    and ratio.is_pth_power()
                    and model.coaction == z ** bz.m * T
                    and rep.exponent == 1
                    and model.relation.is_eisenstein() and model.is_regular and not model.is_torsor
                    and _axioms_ok(model)
                )
                if not ok:
                    failures.append(inst.reproducer(prec))
    dt = time.perf_counter() - start
    return CriterionResult(
        3, "mu_p Case II grid: T^p - u^m t, z^m, different 1, Eisenstein",
        not failures and dt < 10, f"{count - len(failures)}/{count} cases", dt,
        failures[0] if failures else None,
    )


def criterion_4(state: GridState, prec: int = 40, seed: int = 4) -> CriterionResult:
    start = time.perf_counter()
    rng = random.Random(seed)
    count = 0
    failures = []
    for p in (2, 3, 5):
        F = _field(p)
        for r in (1, 2, 3):
            for _ in range(3):
                beta = random_unit(F, rng)
                u = LaurentSeries.one(F) + beta.shift(r)
                inst = Instance(p, GroupKind.MU_P, u)
                model, rep = run_instance(inst, prec, state)
                count += 1
                ok = (
                    model.is_torsor
                    and model.is_regular == (r == 1)
                    and rep.exponent == 0
                    and torsor_test(model)
                    and _axioms_ok(model)
                )
                if not ok:
                    failures.append(inst.reproducer(prec))
    dt = time.perf_counter() - start
    return CriterionResult(
        4, "mu_p Case I: torsor, regular iff r = 1, different 0",
        not failures, f"{count - len(failures)}/{count} cases", dt, failures[0] if failures else None,
    )


def criterion_5(state: GridState, prec: int = 40, seed: int = 5) -> CriterionResult:
    start = time.perf_counter()
    rng = random.Random(seed)
    failures = []
    notes = []
    # v(f) >= 0: torsor and regular, and the explicit inverse closes up mod t^50
    for p in (2, 3):
        F = _field(p)
        t = LaurentSeries.gen(F)
        inst = Instance(p, GroupKind.H_LAMBDA, t, lam=t)
        model, rep = run_instance(inst, prec, state)
        ok = (model.case_label is CaseLabel.H_TORSOR and model.is_regular and model.is_torsor
              and rep.exponent == 0 and _axioms_ok(model))
        inverse_ok = hlambda_explicit_inverse(build_model(model.klass, 50), 50)
        if not (ok and inverse_ok):
            failures.append(inst.reproducer(prec))
    count = 0
    for p in (2, 3):
        F = _field(p)
        t = LaurentSeries.gen(F)
        for i in (1, 2):
            for lam in (t, t.pow(2)):
                delta = random_unit(F, rng, 3)
                if i % p == 0:
                    # keep a term prime to p so the reduced class stays ramified
                    delta = delta + LaurentSeries.monomial(F, 1, 1)
                    if delta.coefficient(1) == 0:
                        delta = delta + LaurentSeries.monomial(F, 1, 1)
                inst = Instance(p, GroupKind.H_LAMBDA, delta.shift(-i), lam=lam, reduce=(i % p == 0))
                model, rep = run_instance(inst, prec, state)
                count += 1
                cls = model.klass.normalized
                if inst.reduce:
                    notes.append(f"p={p}, i={i}: reduced to i={cls.i}")
                bz = bezout_mp(cls.i, p)
                B = model.bialgebra
                x, T = B.gens()
                inner = x * (T ** cls.i * cls.delta.pow(bz.n) + B.scalar(lam))
                # oracle by multiplication: sigma * (1 + inner)^m == T
                back = model.coaction * (B.one() + inner) ** bz.m
                expected_c0 = -(cls.delta.pow(bz.m).inverse(prec) * t)
                ok = (
                    model.case_label is CaseLabel.H_RAMIFIED
                    and model.relation.coeffs[0].agrees(expected_c0)
                    and back.agrees(T)
                    and rep.exponent == 1 + min(cls.i, p * lam.valuation())
                    and _axioms_ok(model)
                )
                if not ok:
                    failures.append(inst.reproducer(prec))
    dt = time.perf_counter() - start
    detail = f"HTorsor f=t regular with explicit inverse mod t^50; {count} ramified cases"
    if notes:
        detail += "; " + ", ".join(notes)
    return CriterionResult(5, "H_lambda: HTorsor for f = t; HRamified relation and coaction formula",
                           not failures and dt < 10, detail, dt, failures[0] if failures else None)


def criterion_6(state: GridState, prec: int = 60) -> CriterionResult:
    start = time.perf_counter()
    failures = []
    seen = []
    slowest = 0.0
    for p in (2, 3):
        F = _field(p)
        t = LaurentSeries.gen(F)
        for m in (1, 2, 4, 5):
            if m % p == 0:
                continue
            t0 = time.perf_counter()
            inst = Instance(p, GroupKind.Z_MOD_P, t.inverse().pow(m))
            model, rep = run_instance(inst, prec, state)
            dt = time.perf_counter() - t0
            slowest = max(slowest, dt)
            want = classical_as_different(p, m)
            seen.append(f"({p},{m})->{rep.exponent}")
            if not (model.case_label is CaseLabel.AS_RAMIFIED and rep.exponent == want
                    and model.relation.is_eisenstein() and _axioms_ok(model)) or dt >= 10:
                failures.append(inst.reproducer(prec))
    return CriterionResult(6, "Artin-Schreier different v_L(g'(pi_L)) = (p-1)(m+1)", not failures,
                           " ".join(seen) + f"; slowest {slowest:.2f}s", time.perf_counter() - start,
                           failures[0] if failures else None)


def trivial_instances():
    out = []
    for p in (2, 3):
        F = _field(p)
        t = LaurentSeries.gen(F)
        out.append(Instance(p, GroupKind.MU_P, t.pow(p)))
        out.append(Instance(p, GroupKind.ALPHA_P, t.pow(p)))
        out.append(Instance(p, GroupKind.Z_MOD_P, t))
        out.append(Instance(p, GroupKind.Z_MOD_P, LaurentSeries.one(F)))
        out.append(Instance(p, GroupKind.H_LAMBDA, LaurentSeries.zero(F), lam=t))
        out.append(Instance(p, GroupKind.ALPHA_P, t))
    return out


def criterion_7(state: GridState, prec: int = 40) -> CriterionResult:
    start = time.perf_counter()
    extra = trivial_instances()
    for inst in extra:
        run_instance(inst, prec, state)
    bad = []
    for inst in state.instances:
        model, rep = run_instance(inst, prec, None)
        if state.corrupt:
            corrupt_model(model)
            rep = different_exponent(model)
        if (rep.exponent == 0) != model.is_torsor or torsor_test(model) != model.is_torsor:
            bad.append(inst.reproducer(prec))
    n = len(state.instances)
    return CriterionResult(7, "different exponent 0 iff torsor (and the action-map test agrees)", not bad,
                           f"{n - len(bad)}/{n} models, zero exceptions required", time.perf_counter() - start,
                           bad[0] if bad else None)


def tower_instances():
    F = _field(2)
    t = LaurentSeries.gen(F)
    return [
        TowerSpec([TowerStage(GroupKind.Z_MOD_P, t.inverse()), TowerStage(GroupKind.Z_MOD_P, t.inverse())]),
        TowerSpec([TowerStage(GroupKind.Z_MOD_P, t.inverse()), TowerStage(GroupKind.Z_MOD_P, t.inverse().pow(3))]),
    ]


def criterion_8(state: GridState, prec: int = 80) -> CriterionResult:
    start = time.perf_counter()
    results = []
    ok = True
    for tower in tower_instances():
        rep = verify_tower_transitivity(tower, prec)
        d1, d2 = rep.stage_differents
        e = rep.ramification[1]
        good = rep.verified and rep.direct_total == d2 + e * d1 and e == 2
        ok = ok and good
        results.append(f"{d2}+{e}*{d1}={rep.formula_total} direct {rep.direct_total}")
    dt = time.perf_counter() - start
    return CriterionResult(8, "Z/2 towers (1,1), (1,3): direct total = d2 + e*d1", ok and dt < 60,
                           "; ".join(results), dt, "torsormodels tower --p 2 --stage z_mod_p:t^-1 --stage z_mod_p:T^-3")


def criterion_9(state: GridState, prec: int = 40, seed: int = 9, trials: int = 100) -> CriterionResult:
    start = time.perf_counter()
    rng = random.Random(seed)
    failures = []
    counts = {}
    fields = [(2, 1), (3, 1), (5, 1), (2, 2)]
    for kind in (GroupKind.MU_P, GroupKind.ALPHA_P, GroupKind.Z_MOD_P):
        ok_count = 0
        for k in range(trials):
            p, e = fields[k % len(fields)]
            F = _field(p, e)
            group = GroupSchemeSpec(kind, F)
            f = random_laurent(F, rng)
            y = random_laurent(F, rng, -4, 4)
            if kind is GroupKind.MU_P:
                g = f * y.pow(p)
            elif kind is GroupKind.ALPHA_P:
                g = f + y.pow(p)
            else:
                g = f + y.pow(p) - y
            try:
                a = normalize(f, group, prec).normalized
                b = normalize(g, group, prec).normalized
            except Exception as exc:  # a record must come out either way
                failures.append(f"{kind.value} p={p} e={e} f={f} y={y}: {exc}")
                continue
            if records_agree(a, b):
                ok_count += 1
            else:
                failures.append(f"{kind.value} p={p} e={e} f={f} y={y}")
        counts[kind.value] = ok_count
    detail = ", ".join(f"{k}: {v}/{trials}" for k, v in counts.items())
    return CriterionResult(9, "class normalization is invariant under the class relation", not failures, detail,
                           time.perf_counter() - start, failures[0] if failures else None)


def _smith_identity_ok(M, prec) -> bool:
    U, D, V = smith_normal_form(M, prec)
    UMV = mat_mul(mat_mul(U, M, prec), V, prec)
    same = all(x.agrees(y) for rx, ry in zip(UMV, D) for x, y in zip(rx, ry))
    units = determinant(U, prec).valuation() == 0 and determinant(V, prec).valuation() == 0
    diag = [D[i][i].valuation() for i in range(min(len(D), len(D[0])))]
    known = [v for v in diag if v is not None]
    return same and units and known == sorted(known)


def criterion_10(state: GridState, prec: int = 40, seed: int = 10, trials: int = 50) -> CriterionResult:
    """Run on the true tensor product A' (x)_A A'.

    Failures here are expected and genuine: for non-flat inclusions the
    equalizer can be strictly larger than A.  Each counterexample on a
    split A' is confirmed by the closed-form oracle.
    """
    start = time.perf_counter()
    F = _field(2)
    rng = random.Random(seed)
    passed = 0
    span_passed = 0
    smith_ok = 0
    split_total = 0
    split_confirmed = 0
    for _ in range(trials):
        A, Ap, incl = random_inclusion(F, rng, prec)
        rep = equalizer_report(A, Ap, incl, prec)
        passed += rep.equal
        span_passed += equalizer_report(A, Ap, incl, prec, relations="span").equal
        smith_ok += _smith_identity_ok(incl.matrix, prec)
        if Ap.labels and Ap.labels[0] == "e0":
            split_total += 1
            split_confirmed += split_equalizer_matches(incl) == rep.equal
    ok = passed == trials and smith_ok == trials
    detail = (f"equalizer = A in {passed}/{trials} (true tensor product); "
              f"span-only relations {span_passed}/{trials}; Smith U*M*V = D with unit dets {smith_ok}/{trials}; "
              f"split-algebra oracle agrees {split_confirmed}/{split_total}")
    return CriterionResult(10, "descent: equalizer of A' => A' (x)_A A' equals A on random inclusions", ok, detail,
                           time.perf_counter() - start, f"torsormodels suite --only 10 --seed {seed}",
                           expected_failure=True)


def criterion_11(state: GridState, prec: int = 40) -> CriterionResult:
    start = time.perf_counter()
    bad = []
    for inst in state.instances:
        base = prec if inst.kind is not GroupKind.Z_MOD_P else 60
        m1, r1 = run_instance(inst, base, None)
        m2, r2 = run_instance(inst, 2 * base, None)
        if not snapshots_agree(snapshot(m1, r1), snapshot(m2, r2)):
            bad.append(inst.reproducer(base))
    morph = []
    for pr in (prec, 2 * prec):
        maximal, other, cand = split_example(_field(2), pr)
        morph.append(check_model_morphism(cand))
    towers = []
    for tower in tower_instances():
        a = verify_tower_transitivity(tower, 80).as_dict()
        b = verify_tower_transitivity(tower, 160).as_dict()
        towers.append(a == b)
    ok = not bad and len(set(morph)) == 1 and all(towers)
    n = len(state.instances)
    return CriterionResult(11, "reports unchanged at doubled precision", ok,
                           f"{n - len(bad)}/{n} models, morphism check stable {len(set(morph)) == 1}, "
                           f"towers stable {all(towers)}", time.perf_counter() - start, bad[0] if bad else None)


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11,
}


def run_grid(only=None, corrupt: bool = False, seed: int | None = None) -> tuple[list, GridState]:
    """Run the criteria in order; 7 and 11 replay the models gathered by 1-6."""
    state = GridState(corrupt=corrupt)
    results = []
    wanted = sorted(only) if only else sorted(CRITERIA)
    needs_models = any(n in (7, 11) for n in wanted)
    for n in sorted(CRITERIA):
        if n not in wanted and not (needs_models and n <= 6):
            continue
        fn = CRITERIA[n]
        kwargs = {}
        if seed is not None and n in (2, 3, 4, 5, 9, 10):
            kwargs["seed"] = seed
        try:
            res = fn(state, **kwargs)
        except Exception as exc:
            res = CriterionResult(n, fn.__name__, False, f"error: {type(exc).__name__}: {exc}", 0.0,
                                  f"torsormodels suite --only {n}")
        if n in wanted:
            results.append(res)
    return results, state


def summary_table(state: GridState) -> list:
    """Distinct (case label, torsor, regular, different) rows seen during the run."""
    seen = []
    for row in state.rows:
        if row not in seen:
            seen.append(row)
    return sorted(seen, key=lambda r: (r[0], r[3], r[1], r[2]))

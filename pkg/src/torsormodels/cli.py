"""Command line interface: classify, tower, descent-check, suite."""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor

from .classes import GroupKind, GroupSchemeSpec, normalize
from .different import TowerSpec, TowerStage, different_exponent, verify_tower_transitivity
from .errors import NonRegularStageError, ParseError, PrecisionError, VerificationError
from .localfield.algebra import RPolynomial
from .localfield.field import FieldSpec
from .localfield.series import parse_series
from .models import build_model, torsor_test
from .verify import AlgebraMap, FiniteFreeAlgebra, check_coaction_axioms, equalizer_report

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECISION = 3
EXIT_VERIFICATION = 4
EXIT_NON_REGULAR = 5

MIN_PRECISION = 10

DEFAULTS = {
    "p": None,
    "e": 1,
    "modulus": None,
    "precision": 40,
    "group": None,
    "lambda": None,
    "f": None,
    "format": "text",
    "seed": 0,
    "relations": "full",
}


class UsageError(ValueError):
    pass


def _add_common(sp: argparse.ArgumentParser):
    # defaults stay None so a config file can fill in what the flags leave out
    sp.add_argument("--p", type=int, help="residue characteristic")
    sp.add_argument("--e", type=int, help="residue field degree, q = p^e")
    sp.add_argument("--modulus", help="comma-separated coefficients of the F_q modulus, constant term first")
    sp.add_argument("--precision", type=int, help=f"t-adic working precision (>= {MIN_PRECISION})")
    sp.add_argument("--format", choices=("text", "json"))
    sp.add_argument("--seed", type=int)
    sp.add_argument("--config", help="file of key=value lines; explicit flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torsormodels",
                                     description="Integral models of torsors under order-p group schemes over F_q((t)).")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("classify", help="normalize a class and build its maximal model")
    _add_common(sp)
    sp.add_argument("--group", choices=[k.value for k in GroupKind])
    sp.add_argument("--lambda", dest="lambda", help="level of H_lambda")
    sp.add_argument("--f", help="class representative, e.g. 't^-1 + 2*t^3'")
    sp.add_argument("--reduce", action="store_true", help="H_lambda: strip p-th power terms first")
    sp.add_argument("--batch", help="file with one set of classify flags per line, run concurrently")

    sp = sub.add_parser("tower", help="check transitivity of the different on a two-stage tower")
    _add_common(sp)
    sp.add_argument("--stage", action="append", default=[],
                    help="group:f[:lambda]; later stages are written in T, or in t to base-change")

    sp = sub.add_parser("descent-check", help="compare A with the equalizer of A' => A' (x)_A A'")
    _add_common(sp)
    sp.add_argument("file", help="JSON description of the inclusion A -> A'")
    sp.add_argument("--relations", choices=("full", "span"))

    sp = sub.add_parser("suite", help="run the acceptance grid")
    _add_common(sp)
    sp.add_argument("--only", type=int, action="append", help="criterion number (repeatable)")
    sp.add_argument("--inject-fault", action="store_true", help="perturb every model; the grid must go red")
    return parser


def read_config(path: str) -> dict:
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        out[key] = value
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Flags, then config file, then defaults."""
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        opts.update(read_config(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            opts[key] = v
    for key in ("p", "e", "precision", "seed"):
        if opts[key] is not None:
            try:
                opts[key] = int(opts[key])
            except ValueError as exc:
                raise UsageError(f"--{key} must be an integer") from exc
    if opts["precision"] < MIN_PRECISION:
        raise UsageError(f"--precision must be at least {MIN_PRECISION}")
    if opts["format"] not in ("text", "json"):
        raise UsageError("--format must be text or json")
    return opts


def make_field(opts: dict) -> FieldSpec:
    if opts["p"] is None:
        raise UsageError("--p is required")
    modulus = None
    if opts["modulus"]:
        try:
            modulus = tuple(int(c) for c in str(opts["modulus"]).split(","))
        except ValueError as exc:
            raise UsageError("--modulus takes comma-separated integers") from exc
    try:
        return FieldSpec(opts["p"], opts["e"], modulus)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _series(text: str, F: FieldSpec, var: str = "t"):
    try:
        return parse_series(text, F, var)
    except ParseError as exc:
        raise UsageError(str(exc)) from exc


# -- classify ---------------------------------------------------------------------------


def classify(opts: dict, reduce: bool = False) -> tuple[dict, int]:
    F = make_field(opts)
    if opts["group"] is None or opts["f"] is None:
        raise UsageError("classify needs --group and --f")
    kind = GroupKind(opts["group"])
    lam = _series(opts["lambda"], F) if opts["lambda"] is not None else None
    try:
        group = GroupSchemeSpec(kind, F, lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    f = _series(opts["f"], F)
    prec = opts["precision"]
    cls = normalize(f, group, prec, reduce=reduce)
    model = build_model(cls, prec)
    diff = different_exponent(model)
    axioms = check_coaction_axioms(model)
    checks = axioms.as_dict()
    checks["torsor_test"] = torsor_test(model) == model.is_torsor
    checks["different_vs_torsor"] = (diff.exponent == 0) == model.is_torsor
    report = {
        "field": repr(F),
        "group": str(group),
        "class": cls.describe(),
        "case": model.case_label.value,
        "relation": model.relation_str(),
        "coaction": model.coaction_str(),
        "is_torsor": model.is_torsor,
        "is_regular": model.is_regular,
        "different": diff.exponent,
        "checks": checks,
        "precision": prec,
    }
    return report, EXIT_OK if all(checks.values()) else EXIT_VERIFICATION


def render_text(report: dict) -> str:
    lines = []
    for key, value in report.items():
        if isinstance(value, dict):
            inner = ", ".join(f"{k}={v}" for k, v in value.items())
            lines.append(f"{key}: {inner}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2)
    return render_text(report)


def _classify_line(line: str, base: argparse.Namespace) -> tuple[str, int]:
    parser = build_parser()
    try:
        args = parser.parse_args(["classify", *shlex.split(line)])
    except SystemExit:
        return f"error: cannot parse {line!r}", EXIT_USAGE
    for key in DEFAULTS:
        if getattr(args, key, None) is None and getattr(base, key, None) is not None:
            setattr(args, key, getattr(base, key))
    if args.config is None:
        args.config = base.config
    return _guarded(lambda: _run_classify(args))


def _run_classify(args) -> tuple[str, int]:
    opts = resolve(args)
    report, code = classify(opts, args.reduce)
    return render(report, opts["format"]), code


def _guarded(fn) -> tuple[str, int]:
    try:
        return fn()
    except UsageError as exc:
        return f"error: {exc}", EXIT_USAGE
    except PrecisionError as exc:
        return f"precision error: {exc}", EXIT_PRECISION
    except NonRegularStageError as exc:
        return f"non-regular stage: {exc}", EXIT_NON_REGULAR
    except VerificationError as exc:
        return f"verification failed: {exc}", EXIT_VERIFICATION
    except (ValueError, ArithmeticError) as exc:
        return f"error: {exc}", EXIT_USAGE


def run_batch(path: str, base: argparse.Namespace) -> tuple[str, int]:
    try:
        with open(path) as fh:
            lines = [(n, s.strip()) for n, s in enumerate(fh, 1)]
    except OSError as exc:
        return f"error: cannot read batch file: {exc}", EXIT_USAGE
    lines = [(n, s) for n, s in lines if s and not s.startswith("#")]
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(lambda item: _classify_line(item[1], base), lines))
    chunks = []
    code = EXIT_OK
    for (n, _), (text, c) in zip(lines, results):
        chunks.append("\n".join(f"[line {n}] {row}" for row in text.splitlines()))
        code = max(code, c)
    return "\n".join(chunks), code


# -- tower ------------------------------------------------------------------------------


def parse_stage(text: str, F: FieldSpec, index: int) -> TowerStage:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"stage {text!r}: expected group:f[:lambda]")
    try:
        kind = GroupKind(parts[0])
    except ValueError as exc:
        raise UsageError(f"unknown group {parts[0]!r}") from exc
    lam = _series(parts[2], F) if len(parts) == 3 else None
    if index == 0:
        return TowerStage(kind, _series(parts[1], F), lam)
    try:
        return TowerStage(kind, parse_series(parts[1], F, "T"), lam)
    except ParseError:
        return TowerStage(kind, _series(parts[1], F), lam, over_base=True)


def run_tower(args) -> tuple[str, int]:
    opts = resolve(args)
    F = make_field(opts)
    if len(args.stage) < 2:
        raise UsageError("tower needs at least two --stage options")
    stages = [parse_stage(s, F, k) for k, s in enumerate(args.stage)]
    rep = verify_tower_transitivity(TowerSpec(stages), opts["precision"])
    out = rep.as_dict()
    # infinitesimal towers have no independent total to compare against; that is not a failure
    formula_only = out["direct_total"] is None and not out["verified"] and out["mode"].startswith("formula")
    if opts["format"] == "json":
        text = json.dumps(out, indent=2)
    else:
        rows = [f"stage {k + 1}: {s['case']}, different {s['different']}, e = {s['e']}"
                for k, s in enumerate(out["stages"])]
        rows.append(f"formula total: {out['formula_total']}")
        rows.append(f"direct total: {out['direct_total']}")
        rows.append(f"mode: {out['mode']}")
        if formula_only:
            rows.append("transitivity: formula only, not independently verified")
        else:
            rows.append(f"transitivity: {'PASS' if out['verified'] else 'FAIL'}")
        rows += [f"note: {n}" for n in out["notes"]]
        text = "\n".join(rows)
    return text, EXIT_OK if out["verified"] or formula_only else EXIT_VERIFICATION


# -- descent-check -----------------------------------------------------------------------


def _algebra_from_json(spec, F: FieldSpec, what: str) -> FiniteFreeAlgebra:
    if not isinstance(spec, dict):
        raise UsageError(f"{what}: expected an object")
    if "split" in spec:
        return FiniteFreeAlgebra.split(F, int(spec["split"]))
    if "relation" in spec:
        coeffs = [_series(str(c), F) for c in spec["relation"]]
        return FiniteFreeAlgebra.monogenic(RPolynomial(F, coeffs), spec.get("name", "x"))
    if "table" in spec and "unit" in spec:
        table = [[[_series(str(c), F) for c in cell] for cell in row] for row in spec["table"]]
        unit = [_series(str(c), F) for c in spec["unit"]]
        alg = FiniteFreeAlgebra(F, table, unit, list(spec.get("labels", [])))
        if not alg.check_axioms():
            raise UsageError(f"{what}: table does not define an associative unital R-algebra")
        return alg
    raise UsageError(f"{what}: give one of 'split', 'relation' or 'table'+'unit'")


def load_inclusion(path: str, opts: dict):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    for key in ("p", "e", "modulus"):
        if key in data and getattr(opts, "get")(key) in (None, DEFAULTS[key]):
            opts[key] = data[key] if key != "modulus" else ",".join(map(str, data[key]))
    F = make_field(opts)
    A = _algebra_from_json(data.get("source"), F, "source")
    Ap = _algebra_from_json(data.get("target"), F, "target")
    matrix = [[_series(str(c), F) for c in row] for row in data.get("matrix", [])]
    if len(matrix) != Ap.rank or any(len(row) != A.rank for row in matrix):
        raise UsageError(f"matrix must be {Ap.rank} x {A.rank}")
    incl = AlgebraMap(A, Ap, matrix)
    if not incl.check_multiplicative():
        raise UsageError("matrix is not a unital algebra map")
    return A, Ap, incl


def run_descent(args) -> tuple[str, int]:
    opts = resolve(args)
    A, Ap, incl = load_inclusion(args.file, opts)
    rep = equalizer_report(A, Ap, incl, opts["precision"], relations=opts["relations"])
    # nonzero elementary divisors, all of the form t^k
    divisors = [f"t^{d}" for d in rep.divisors]
    if opts["format"] == "json":
        text = json.dumps({
            "equal": rep.equal,
            "divisors": divisors,
            "equalizer_rank": rep.equalizer_rank,
            "extra_generators": rep.extra_generators,
            "witness": None if rep.witness is None else [str(c) for c in rep.witness],
            "relations": opts["relations"],
            "precision": opts["precision"],
        }, indent=2)
    else:
        text = f"equalizer = A: {'PASS' if rep.equal else 'FAIL'}, divisors [{', '.join(divisors)}]"
        if rep.witness is not None:
            text += "\nwitness outside A: (" + ", ".join(str(c) for c in rep.witness) + ")"
    return text, EXIT_OK if rep.equal else EXIT_VERIFICATION


# -- suite ------------------------------------------------------------------------------


def run_suite(args) -> tuple[str, int]:
    from .acceptance import run_grid, summary_table

    opts = resolve(args)
    seed = args.seed if args.seed is not None else None
    results, state = run_grid(args.only, corrupt=args.inject_fault, seed=seed)
    if opts["format"] == "json":
        text = json.dumps([{
            "criterion": r.number, "title": r.title, "passed": r.passed, "detail": r.detail,
            "seconds": round(r.seconds, 3), "reproducer": r.reproducer,
        } for r in results], indent=2)
    else:
        rows = [r.line() for r in results]
        table = summary_table(state)
        if table:
            rows.append("")
            rows.append(f"{'case':<14} {'torsor':<7} {'regular':<8} different")
            rows += [f"{c:<14} {str(t):<7} {str(g):<8} {d}" for c, t, g, d in table]
        text = "\n".join(rows)
    return text, EXIT_OK if all(r.passed for r in results) else EXIT_VERIFICATION


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "classify":
        if args.batch:
            text, code = _guarded(lambda: run_batch(args.batch, args))
        else:
            text, code = _guarded(lambda: _run_classify(args))
    elif args.command == "tower":
        text, code = _guarded(lambda: run_tower(args))
    elif args.command == "descent-check":
        text, code = _guarded(lambda: run_descent(args))
    else:
        text, code = _guarded(lambda: run_suite(args))
    # a batch report is tagged per line, so it always goes to stdout
    batch = args.command == "classify" and args.batch
    stream = sys.stdout if batch or code in (EXIT_OK, EXIT_VERIFICATION) else sys.stderr
    print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())

import json

import pytest

from torsormodels.cli import main

JSON_KEYS = ["field", "group", "class", "case", "relation", "coaction", "is_torsor", "is_regular",
             "different", "checks", "precision"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", "--p", "3", "--group", "alpha_p", "--f", "t^-1")
    assert code == 0
    assert "relation: T^3 + 2*t" in out and "different: 2" in out


def test_classify_json_key_order(capsys):
    code, out, _ = run(capsys, "classify", "--p", "2", "--group", "z_mod_p", "--f", "t^-1", "--format", "json")
    data = json.loads(out)
    assert code == 0 and list(data) == JSON_KEYS
    assert data["case"] == "ASRamified" and data["different"] == 2


def test_classify_h_lambda(capsys):
    code, out, _ = run(capsys, "classify", "--p", "2", "--group", "h_lambda", "--lambda", "t", "--f", "t^-3")
    assert code == 0 and "HRamified" in out


def test_extension_field(capsys):
    code, out, _ = run(capsys, "classify", "--p", "2", "--e", "2", "--group", "mu_p", "--f", "[0,1]*t")
    assert code == 0 and "F_2^2" in out


@pytest.mark.parametrize("argv", [
    ["classify", "--p", "3", "--group", "mu_p", "--f", "t^^2"],
    ["classify", "--p", "4", "--group", "mu_p", "--f", "t"],
    ["classify", "--p", "3", "--group", "mu_p", "--f", "t", "--precision", "5"],
    ["classify", "--p", "3", "--group", "h_lambda", "--f", "t"],
    ["classify", "--p", "3", "--group", "mu_p"],
    ["tower", "--p", "2", "--stage", "z_mod_p:t^-1"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_argparse_usage_exit():
    with pytest.raises(SystemExit) as exc:
        main(["classify", "--group", "nonsense"])
    assert exc.value.code == 2


def test_precision_exit(capsys):
    code, _, err = run(capsys, "classify", "--p", "2", "--group", "mu_p", "--f", "1 + O(t^12)")
    assert code == 3 and "precision" in err


def test_non_regular_stage_exit(capsys):
    code, _, _ = run(capsys, "tower", "--p", "2", "--stage", "mu_p:1+t^2", "--stage", "z_mod_p:T^-1")
    assert code == 5


def test_tower(capsys):
    code, out, _ = run(capsys, "tower", "--p", "2", "--stage", "z_mod_p:t^-1", "--stage", "z_mod_p:T^-3")
    assert code == 0 and "direct total: 8" in out and "PASS" in out


def test_config_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("p = 3\ngroup = alpha_p\nprecision = 20\n# comment\n")
    code, out, _ = run(capsys, "classify", "--config", str(cfg), "--f", "t^-1", "--precision", "30")
    assert code == 0 and "precision: 30" in out
    cfg.write_text("bogus = 1\n")
    code, _, _ = run(capsys, "classify", "--config", str(cfg), "--p", "2", "--group", "mu_p", "--f", "t")
    assert code == 2


def test_batch_is_ordered(capsys, tmp_path):
    batch = tmp_path / "batch.txt"
    lines = [f"--group alpha_p --f t^-{i}" for i in (1, 2, 4, 5, 7)] + ["--group mu_p --f oops^"]
    batch.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "classify", "--p", "3", "--batch", str(batch))
    tags = [row.split("]")[0] for row in out.splitlines() if row.startswith("[line")]
    order = [int(tag.split()[1]) for tag in tags]
    assert order == sorted(order) and order[-1] == 6
    assert code == 2


def _inclusion_file(tmp_path, counterexample: bool):
    if counterexample:
        data = {"p": 2, "source": {"relation": ["0", "t^3+t^4", "t+t^2+t^3", "1"]}, "target": {"split": 3},
                "matrix": [["1", "0", "0"], ["1", "t^2+t^3", "t^4+t^6"], ["1", "t", "t^2"]]}
    else:
        data = {"p": 2, "source": {"relation": ["0", "t^3+t^2", "1"]}, "target": {"split": 2},
                "matrix": [["1", "0"], ["1", "t^2+t^3"]]}
    path = tmp_path / "incl.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_descent_check_pass(capsys, tmp_path):
    code, out, _ = run(capsys, "descent-check", _inclusion_file(tmp_path, False))
    assert code == 0 and out.startswith("equalizer = A: PASS, divisors [t^2]")


def test_descent_check_counterexample(capsys, tmp_path):
    path = _inclusion_file(tmp_path, True)
    code, out, _ = run(capsys, "descent-check", path)
    assert code == 4 and "FAIL" in out
    code, out, _ = run(capsys, "descent-check", path, "--relations", "span")
    assert code == 0


def test_descent_check_bad_matrix(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"p": 2, "source": {"split": 1}, "target": {"split": 2}, "matrix": [["1"], ["t"]]}))
    code, _, _ = run(capsys, "descent-check", str(path))
    assert code == 2


def test_suite_subset_and_fault(capsys):
    code, out, _ = run(capsys, "suite", "--only", "1", "--only", "4")
    assert code == 0 and out.count("[PASS]") == 2
    code, out, _ = run(capsys, "suite", "--only", "1", "--only", "4", "--inject-fault")
    assert code == 4 and "[FAIL]" in out


def test_infinitesimal_tower_is_formula_only(capsys):
    code, out, _ = run(capsys, "tower", "--p", "2", "--stage", "mu_p:t", "--stage", "alpha_p:T^-1")
    assert code == 0 and "formula total: 4" in out and "not independently verified" in out

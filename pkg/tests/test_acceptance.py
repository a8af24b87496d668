"""Acceptance criteria 1-11, one pass/fail line each.

Run directly (``python3 tests/test_acceptance.py``) or under pytest, where
the lines are printed in the terminal summary.  Criterion 10 is red: on the
true tensor product the equalizer is strictly larger than A for some
random inclusions.  That assertion is marked xfail(strict=True) and the
counterexamples themselves are checked by passing tests below.
"""

import random
import sys

import pytest

from torsormodels.acceptance import run_grid
from torsormodels.localfield.field import FieldSpec
from torsormodels.verify import equalizer_report, random_inclusion, split_equalizer_matches

RESULT_LINES: list[str] = []


@pytest.fixture(scope="module")
def grid():
    results, state = run_grid()
    RESULT_LINES[:] = [r.line() for r in results]
    return {r.number: r for r in results}


@pytest.mark.parametrize("number", [1, 2, 3, 4, 5, 6, 7, 8, 9, 11])
def test_criterion(grid, number):
    res = grid[number]
    assert res.passed, res.line()


@pytest.mark.xfail(strict=True, reason="equalizer exceeds A for some non-flat inclusions; see the counterexample tests")
def test_criterion_10(grid):
    assert grid[10].passed, grid[10].line()


def test_criterion_10_side_checks(grid):
    # Smith identities and the split-algebra oracle are green even though the equality is not
    detail = grid[10].detail
    assert "Smith U*M*V = D with unit dets 50/50" in detail
    agree = detail.split("split-algebra oracle agrees ")[1]
    hits, total = map(int, agree.split("/"))
    assert hits == total > 0


def test_criterion_10_failures_are_genuine():
    """Every red instance on a split A' is confirmed by the closed-form oracle."""
    F = FieldSpec(2)
    rng = random.Random(10)
    red = 0
    for _ in range(50):
        A, Ap, incl = random_inclusion(F, rng, 40)
        rep = equalizer_report(A, Ap, incl)
        if rep.equal:
            continue
        red += 1
        # the witness is in the equalizer but outside the image of A
        assert rep.witness is not None
        if Ap.labels[0] == "e0":
            assert not split_equalizer_matches(incl)
    assert red > 0


def test_inject_fault_turns_grid_red():
    results, _ = run_grid(only=[1, 3, 4, 5, 6], corrupt=True)
    assert not any(r.passed for r in results)


if __name__ == "__main__":
    results, _ = run_grid()
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)

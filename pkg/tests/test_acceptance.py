"""Acceptance suite: every criterion must hold exactly.

Run with ``pytest -s tests/test_acceptance.py`` to see one PASS/FAIL line per criterion.
"""
import pytest

from artifact.acceptance import CRITERIA, run_all, run_criterion

NUMBERS = [n for n, _, _ in CRITERIA]


def test_thirteen_criteria():
    assert NUMBERS == list(range(1, 14))


@pytest.mark.parametrize("number", NUMBERS)
def test_criterion(number):
    result = run_criterion(number)
    print(result.line())
    assert result.passed is True, result.line()


@pytest.mark.parametrize("seed", [1, 2])
def test_criteria_hold_for_other_seeds(seed):
    failed = [r.line() for r in run_all(seed=seed) if not r.passed]
    assert failed == []


def test_summary(capsys):
    results = run_all()
    with capsys.disabled():
        print()
        for r in results:
            print(r.line())
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    assert all(r.passed for r in results)

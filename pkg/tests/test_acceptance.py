"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The same checks back ``spinomit validate``.  Failing criteria are reported
as failures; their analysis lives with the project notes.
"""
import pytest

from spinomit import acceptance


@pytest.fixture
def report(capsys):
    def emit(result):
        with capsys.disabled():
            print("\n" + result.line())
        return result
    return emit


@pytest.mark.parametrize("number", [n for n in sorted(acceptance.CRITERIA) if n != 11])
def test_criterion(number, report):
    result = report(acceptance.CRITERIA[number]())
    if not result.passed:
        pytest.fail(result.line(), pytrace=False)


@pytest.mark.oracle
def test_criterion_11_oracle_equivalence(report):
    result = report(acceptance.criterion_11())
    if not result.passed:
        pytest.fail(result.line(), pytrace=False)

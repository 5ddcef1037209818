"""Acceptance criteria at their prescribed tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line straight to the terminal.
Criteria 3, 4 and 11 cannot be met as stated in double precision or at the
prescribed parameters; they are run unchanged and fail, and the analysis is
recorded in the project's decision notes and the README.
"""
import pytest

from hyperlorentz.acceptance import CRITERIA, format_line, run_all


@pytest.fixture(scope="module")
def results():
    return {r.number: r for r in run_all()}


@pytest.mark.parametrize("number", list(CRITERIA) + [13])
def test_criterion(number, results, capsys):
    r = results[number]
    with capsys.disabled():
        print("\n" + format_line(r))
    assert r.passed, format_line(r)

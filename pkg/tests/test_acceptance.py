"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines inline;
they are also echoed in the terminal summary.
"""

import pytest

from partoracle import acceptance

LINES = {}


@pytest.fixture(scope="module", autouse=True)
def report(request):
    yield
    tr = request.config.pluginmanager.get_plugin("terminalreporter")
    if tr is not None and LINES:
        tr.write_sep("=", "acceptance criteria")
        for n in sorted(LINES):
            tr.write_line(LINES[n])


@pytest.mark.parametrize("number", range(1, 11), ids=[f"C{i}" for i in range(1, 11)])
def test_criterion(number):
    result = acceptance.CRITERIA[number - 1]()
    LINES[number] = result.line()
    print(result.line())
    assert result.passed, result.line()

"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` to see the lines inline; they are
also listed in the terminal summary.
"""

import pytest

from toric_ih.cli.corpus import CRITERIA, run_corpus


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, acceptance_log):
    (result,) = run_corpus([number])
    print(result.line)
    acceptance_log.append(result.line)
    assert result.passed, result.line

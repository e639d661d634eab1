"""Acceptance criteria 1-10 at their stated tolerances, one line of output each."""

import pytest

from hoairy import acceptance


@pytest.mark.parametrize("number,title", [(n, t) for n, t, _ in acceptance.CRITERIA],
                         ids=[f"criterion_{n:02d}" for n, _, _ in acceptance.CRITERIA])
def test_criterion(number, title, capsys):
    outcome = acceptance.evaluate(number)
    with capsys.disabled():
        print("\n" + outcome.line())
    assert outcome.passed, outcome.detail

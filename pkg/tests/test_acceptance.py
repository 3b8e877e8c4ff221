"""One test per acceptance criterion; the summary prints one pass/fail line each."""

import pytest

from dermod.suite import CRITERIA, run_criterion
from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("number", [num for num, _, _ in CRITERIA],
                         ids=[f"{num:02d}-{name.replace(' ', '-')}" for num, name, _ in CRITERIA])
def test_criterion(number):
    result = run_criterion(number, seed=0)
    ACCEPTANCE_LINES[number] = result.line()
    print(result.line())
    assert result.passed, result.detail

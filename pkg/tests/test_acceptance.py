"""The twelve acceptance criteria, one test each, with their time limits.

Every run prints a ``[PASS]``/``[FAIL]`` line per criterion; under pytest the
lines are repeated in the terminal summary.  ``python tests/test_acceptance.py``
runs them without pytest.
"""

import sys

import pytest

from ordlab.suites import DEFAULT_SEED, SUITES

LINES: dict[int, str] = {}


@pytest.mark.parametrize("suite", SUITES, ids=[f"criterion_{s.number:02d}" for s in SUITES])
def test_criterion(suite):
    res = suite(DEFAULT_SEED)
    LINES[res.number] = res.line()
    print(res.line())
    assert res.passed, res.failures
    if res.time_limit is not None:
        assert res.elapsed < res.time_limit


if __name__ == "__main__":
    ok = True
    for suite in SUITES:
        res = suite(DEFAULT_SEED)
        print(res.line(), flush=True)
        ok &= res.passed
    sys.exit(0 if ok else 1)

"""Numbered acceptance criteria at their stated tolerances and runtime budgets.

Each run prints one PASS/FAIL line per criterion (visible with ``-s`` or in
the captured-output section of the report).
"""
import pytest

from hypentropy.acceptance import CRITERIA

pytestmark = pytest.mark.acceptance


@pytest.mark.parametrize("fn", CRITERIA, ids=[f"criterion_{k:02d}" for k in range(1, 11)])
def test_criterion(fn):
    res = fn()
    print(res.line())
    for name, ok in res.checks.items():
        print(f"    {'ok  ' if ok else 'FAIL'} {name}")
    assert res.passed, res.line()

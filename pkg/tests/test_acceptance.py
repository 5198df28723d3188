"""Acceptance suite: one pass/fail line per criterion.

Slow criteria run only with SYMCHECK_SLOW=1.
"""

import os

import pytest

from symcheck.acceptance import CRITERIA, run_criterion, summary_line

SLOW = bool(os.environ.get("SYMCHECK_SLOW"))


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{c.id:02d}" for c in CRITERIA])
def test_criterion(criterion, capsys):
    if criterion.slow and not SLOW:
        with capsys.disabled():
            print(f"\n[SKIP] criterion {criterion.id:>2}: {criterion.title} (set SYMCHECK_SLOW=1)")
        pytest.skip("slow criterion")
    r = run_criterion(criterion, seed=0)
    with capsys.disabled():
        print("\n" + summary_line(r))
    assert r["pass"], r.get("error") or r["details"]

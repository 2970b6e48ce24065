"""The eleven acceptance criteria, run exactly as ``latvoa verify-all`` runs them.

Each test prints the same one-line PASS/FAIL summary as the CLI.
"""

import pytest

from latvoa.acceptance import CRITERIA


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"criterion_{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(num, title, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num:2d} ({title}): {detail}")
    assert ok, detail

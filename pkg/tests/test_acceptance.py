"""Acceptance criteria; a PASS/FAIL line per criterion is added to the terminal summary."""

import pytest

from oscindex import acceptance as acc

RESULTS = []


@pytest.mark.parametrize("num, name, fn", acc.CRITERIA, ids=[f"criterion_{n:02d}" for n, _, _ in acc.CRITERIA])
def test_criterion(num, name, fn):
    ok, detail = fn()
    line = f"[{'PASS' if ok else 'FAIL'}] {num:2d} {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, detail


def test_tolerances_pinned():
    assert acc.OPNUM_TOL == 1e-10
    assert acc.DET_TOL == 1e-10
    assert acc.TOEPLITZ_TRUNCATION == 256
    assert acc.MIXED_DECAY == 10.0
    assert acc.QUANT_TOL == pytest.approx(1e-6 * 2 * 3.141592653589793)
    assert acc.CERT_TOL == 1e-8
    assert acc.DEFECT_TOL == 1e-3

import time

import pytest

from caustix.verify import CHECKS, Check, CheckResult, Status, VerifyReport, checks_for, run_check, verify


def _slow(scale, seed):
    time.sleep(30)


def _boom(scale, seed):
    raise RuntimeError("boom")


def test_every_suite_is_covered():
    assert {c.suite for c in CHECKS} == {"core", "caustics", "dynamics", "locking"}
    assert len(checks_for("all")) == len(CHECKS)
    with pytest.raises(ValueError):
        checks_for("everything")


def test_timeouts_are_failures_not_hangs():
    start = time.monotonic()
    res = run_check(Check("slow", "core", _slow, 0.5))
    assert res.status is Status.FAIL
    assert "timed out" in res.detail
    assert time.monotonic() - start < 10


def test_exceptions_are_failures():
    res = run_check(Check("boom", "core", _boom, 10))
    assert res.status is Status.FAIL
    assert "RuntimeError: boom" in res.detail


def test_core_suite_passes_quickly_and_tightening_fails_it():
    start = time.monotonic()
    report = verify("core")
    assert report.status is Status.PASS
    assert time.monotonic() - start < 10
    assert verify("core", tol_scale=1e-9).status is Status.FAIL


def test_report_status_ignores_skips():
    ok = CheckResult("a", Status.PASS, 1, 1, 0)
    skip = CheckResult("b", Status.SKIP, None, None, None)
    bad = CheckResult("c", Status.FAIL, 2, 1, 0)
    assert VerifyReport("x", (ok, skip)).status is Status.PASS
    assert VerifyReport("x", (ok, skip, bad)).status is Status.FAIL
    assert "overall: FAIL" in VerifyReport("x", (ok, bad)).table()


def test_invalid_tolerance_scale():
    with pytest.raises(ValueError):
        verify("core", tol_scale=0.0)

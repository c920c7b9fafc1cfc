import pytest

from lrkm import fracops
from lrkm.verify import SUITES, inject_fault, run_suite


@pytest.mark.parametrize("suite", list(SUITES))
def test_suites_pass(suite):
    failed = [r for r in run_suite(suite) if not r.passed]
    assert not failed, failed


def test_fault_is_detected_and_undone():
    original = fracops.gamma
    with inject_fault("gamma"):
        results = {r.name: r.passed for r in run_suite("fracops")}
    assert results["fracops: gamma accuracy"] is False
    assert fracops.gamma is original


def test_crashing_check_is_failure(monkeypatch):
    def boom():
        raise RuntimeError("broken")

    monkeypatch.setitem(SUITES, "fracops", [("boom", boom)])
    (res,) = run_suite("fracops")
    assert not res.passed and "RuntimeError" in res.detail

import pytest

from free_products import enumeration
from free_products.selftest import CHECKS, run_selftest


def _only(*names):
    return [(name, check) for name, check in CHECKS if name in names]


def test_selftest_passes():
    report = run_selftest()

    assert report.passed, report.failures()
    assert [r.name for r in report.results] == [name for name, _ in CHECKS]


def test_selftest_detects_wrong_closed_form(monkeypatch):
    monkeypatch.setattr(enumeration, "count_k_equal", lambda k, n: 0)

    report = run_selftest(_only("k-equal-count", "catalan-count"))

    assert not report.passed
    assert report.failures() == ["k-equal-count"]
    assert "closed form 0" in report.results[1].detail


def test_selftest_reports_exceptions():
    def broken():
        raise RuntimeError("boom")

    report = run_selftest([("broken", broken)])

    assert report.failures() == ["broken"]
    assert report.results[0].detail == "RuntimeError: boom"


@pytest.mark.parametrize("name", ["kreweras", "insertions", "mobius", "type-counts"])
def test_individual_checks(name):
    assert run_selftest(_only(name)).passed

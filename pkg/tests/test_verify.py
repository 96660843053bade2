import pytest

from elliptic_rmatrix.verify import (
    DEFAULT_SEED,
    SUITE_NAMES,
    SUITES,
    run_suite,
    thread_count,
)


def test_suite_catalog():
    assert len(SUITE_NAMES) == 15
    assert set(SUITE_NAMES) == set(SUITES)
    for name in SUITE_NAMES:
        assert SUITES[name].header  # every suite describes itself


@pytest.mark.parametrize("name", SUITE_NAMES)
def test_every_suite_passes_smoke(name):
    report = run_suite(name, samples=3)
    assert report.passed, f"{name}: max residual {report.max_residual:.3e}"
    assert report.failures == []
    assert report.samples == 3
    assert report.seed == DEFAULT_SEED


def test_reports_are_deterministic():
    a = run_suite("cdybe", samples=4, seed=11)
    b = run_suite("cdybe", samples=4, seed=11)
    assert a == b
    c = run_suite("cdybe", samples=4, seed=12)
    assert c.max_residual != a.max_residual


def test_thread_count_env(monkeypatch):
    monkeypatch.delenv("ELLIPTIC_RMATRIX_THREADS", raising=False)
    assert thread_count() == 1
    monkeypatch.setenv("ELLIPTIC_RMATRIX_THREADS", "4")
    assert thread_count() == 4


def test_threaded_run_matches_serial(monkeypatch):
    monkeypatch.delenv("ELLIPTIC_RMATRIX_THREADS", raising=False)
    serial = run_suite("shift", samples=6, seed=2)
    monkeypatch.setenv("ELLIPTIC_RMATRIX_THREADS", "4")
    threaded = run_suite("shift", samples=6, seed=2)
    # the sampling plan is drawn before any evaluation, so the report is
    # independent of how the evaluations are scheduled
    assert serial == threaded


def test_unknown_suite_rejected():
    with pytest.raises(ValueError):
        run_suite("nope")


def test_failures_are_recorded():
    report = run_suite("fay", samples=3, tol=1e-30)
    assert not report.passed
    assert len(report.failures) == 3
    for inputs, residual in report.failures:
        assert residual > 1e-30
        assert inputs  # the offending sample is reported

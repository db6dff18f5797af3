import pytest

from submig.verify import Check, run_verification


def test_fast_level_passes_all_gating_checks():
    report = run_verification("fast")
    failed = [c.name for c in report.checks if c.gating and not c.passed]
    assert not failed
    assert report.ok
    assert "gating failures" in report.render()


def test_check_status_labels():
    assert Check("a", 1.0, 0.5).line().startswith("[FAIL]")
    assert Check("a", 1.0, 0.5, gating=False).line().startswith("[INFO]")
    assert Check("a", 0.1, 0.5).line().startswith("[PASS]")


def test_unknown_level():
    with pytest.raises(ValueError):
        run_verification("medium")

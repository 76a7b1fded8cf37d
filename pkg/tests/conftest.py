import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_T0 = {}
SUITE_BUDGET_S = 60.0


def pytest_sessionstart(session):
    import time
    _T0["t"] = time.perf_counter()


def _acceptance_lines():
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    return list(getattr(mod, "RESULTS", []))


def pytest_sessionfinish(session, exitstatus):
    import time
    elapsed = time.perf_counter() - _T0.get("t", time.perf_counter())
    _T0["elapsed"] = elapsed
    if _acceptance_lines() and elapsed >= SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    lines = _acceptance_lines()
    if not lines:
        return
    elapsed = _T0.get("elapsed", 0.0)
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
    ok = elapsed < SUITE_BUDGET_S
    terminalreporter.write_line(
        f"[{'PASS' if ok else 'FAIL'}] criterion 8 (suite runtime): {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s)")

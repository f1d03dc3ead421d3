"""Shared pytest hooks: the acceptance verdict table.

``test_acceptance`` records one verdict per criterion as it runs; this hook
prints them as a single PASS/FAIL line each after the normal summary, so a
full run ends with the complete scorecard in one place.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for r in sorted(mod.RESULTS, key=lambda r: r["id"]):
        flag = "PASS" if r["ok"] else "FAIL"
        terminalreporter.write_line(
            f"[{flag}] {r['id']:>2}. {r['title']}: {r['detail']}")
    if len(mod.RESULTS) < len(mod.CRITERIA):
        terminalreporter.write_line(
            f"({len(mod.RESULTS)} of {len(mod.CRITERIA)} criteria ran)")

"""Acceptance summary for bridge-only runs.

When pytest runs from the repository root its conftest owns the summary;
these hooks then stay quiet to avoid double reporting.
"""

import pytest

_ACCEPTANCE = {}


def _owned(config):
    return getattr(config, "_acceptance_summary_owner", False)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    out = yield
    rep = out.get_result()
    if _owned(item.config) or "test_acceptance" not in item.nodeid:
        return
    if rep.when == "call":
        _ACCEPTANCE[item.name] = rep.passed
    elif rep.when == "setup" and not rep.passed:
        _ACCEPTANCE[item.name] = False


def pytest_terminal_summary(terminalreporter):
    if _owned(terminalreporter.config) or not _ACCEPTANCE:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, ok in _ACCEPTANCE.items():
        label = name.removeprefix("test_").replace("_", "-")
        terminalreporter.write_line(
            "  %-24s %s" % (label, "PASS" if ok else "FAIL")
        )

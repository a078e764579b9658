import pytest

_ACCEPTANCE = {}


def pytest_configure(config):
    # bridge/conftest.py defers to this summary when both are loaded
    config._acceptance_summary_owner = True


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    out = yield
    rep = out.get_result()
    if "test_acceptance" not in item.nodeid:
        return
    if rep.when == "call":
        _ACCEPTANCE[item.name] = rep.passed
    elif rep.when == "setup" and not rep.passed:
        _ACCEPTANCE[item.name] = False


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, ok in _ACCEPTANCE.items():
        label = name.removeprefix("test_").replace("_", "-")
        terminalreporter.write_line(
            "  %-24s %s" % (label, "PASS" if ok else "FAIL")
        )

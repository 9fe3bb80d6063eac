import _acceptance


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance.lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in _acceptance.lines:
        terminalreporter.write_line(line)

from tests._report import LINES


def pytest_terminal_summary(terminalreporter):
    if not LINES:
        return
    terminalreporter.write_sep("=", "release gate")
    for line in LINES:
        terminalreporter.write_line(line)

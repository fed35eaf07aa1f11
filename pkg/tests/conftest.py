from _suites import CRITERIA


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[n])

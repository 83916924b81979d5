# (number, title, passed, seconds, note) recorded by the acceptance suite
ACCEPTANCE_RESULTS: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, seconds, note in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number:>2} {status}  {title} ({seconds:.1f}s)"
        if note:
            line += f"  [{note}]"
        terminalreporter.write_line(line)


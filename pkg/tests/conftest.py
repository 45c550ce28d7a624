# acceptance criteria report one line each at the end of the run
CRITERIA: dict[int, str] = {}


def record(number: int, ok: bool, text: str):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"
    CRITERIA[number] = CRITERIA[number] + "\n" + line if number in CRITERIA else line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(CRITERIA):
            for line in CRITERIA[number].splitlines():
                terminalreporter.write_line(line)

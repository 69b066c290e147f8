import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA: dict = {}


def record(n: int, ok: bool, detail: str = "") -> None:
    CRITERIA[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())

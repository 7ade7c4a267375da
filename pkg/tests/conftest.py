import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    reports = [r for key in ("passed", "failed", "error") for r in terminalreporter.stats.get(key, [])]
    found = {}
    for r in reports:
        if "test_acceptance.py::test_criterion_" in r.nodeid and r.when in ("call", "setup"):
            n = int(r.nodeid.split("test_criterion_")[1].split("_")[0])
            if r.failed or n not in found:
                found[n] = "FAIL" if r.failed else "PASS"
    if not found:
        return
    from test_acceptance import CRITERIA
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(f"C{n} {found.get(n, 'NOT RUN')}: {CRITERIA[n]}")

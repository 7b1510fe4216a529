import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(results):
        ok, detail, dt = results[i]
        terminalreporter.write_line(f"criterion {i}: {'PASS' if ok else 'FAIL'} ({dt:.1f} s) {detail}")

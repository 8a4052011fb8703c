"""Shared registry for acceptance lines, printed in the terminal summary."""

import os

ACCEPTANCE = {}
LOG = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "acceptance_log.txt")


def record(number: int, ok: bool, detail: str) -> str:
    line = f"CRITERION {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance")
    lines = [ACCEPTANCE[k] for k in sorted(ACCEPTANCE)]
    for line in lines:
        terminalreporter.write_line(line)
    if len(ACCEPTANCE) == 11:
        with open(LOG, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

import math

import pytest

from hardy_extremal.modulus import default_tables

# acceptance criterion -> list of (label, passed, detail)
ACCEPTANCE: dict[str, list[tuple[str, bool, str]]] = {}


def record(criterion: str, label: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE.setdefault(criterion, []).append((label, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE, key=lambda c: (int(c.rstrip("ab")), c)):
        parts = ACCEPTANCE[crit]
        ok = all(p for _, p, _ in parts)
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}")
        for label, passed, detail in parts:
            terminalreporter.write_line(f"    [{'ok' if passed else 'FAIL'}] {label} {detail}")


@pytest.fixture(scope="session")
def tables():
    return default_tables()



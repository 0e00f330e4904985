import numpy as np
import pytest

from gowerslab.group import GroupSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def brute_closure(g: GroupSpec, gens):
    """Closure by repeated addition, no numpy tricks."""
    elems = {g.zero}
    frontier = [g.zero]
    while frontier:
        nxt = []
        for e in frontier:
            for v in gens:
                for s in (e + v, e - v):
                    if s not in elems:
                        elems.add(s)
                        nxt.append(s)
        frontier = nxt
    return elems


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

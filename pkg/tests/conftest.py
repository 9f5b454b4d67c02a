"""Shared fixtures and the acceptance summary printed at the end of a run."""

from __future__ import annotations

import re
from importlib import resources
from typing import Dict, List, Tuple

import pytest

from pathalg.lang import Program, load_program
from pathalg.lradom import TransFormula, formula, make_cube
from pathalg.poly import Poly

_TOKEN = re.compile(r"(?P<sym>[A-Za-z_%][A-Za-z0-9_]*'*)|(?P<num>\d+)")


def poly(text: str) -> Poly:
    """Read a polynomial such as ``"r' - r + 2*t"`` (primed symbols allowed)."""

    def sub(m: re.Match) -> str:
        if m.group("sym"):
            return f"S({m.group('sym')!r})"
        return f"C({m.group('num')})"

    return eval(_TOKEN.sub(sub, text), {"S": Poly.sym, "C": Poly.const})


def tf(text: str) -> TransFormula:
    """Read a formula in DNF: atoms ``a = b``, ``a >= b``, ``a <= b``, ``a > b``, ``a < b``
    joined by ``/\\`` and ``\\/``; ``false`` and ``true`` are accepted."""
    text = text.strip()
    if text == "false":
        return formula([])
    cubes = []
    for disjunct in text.split("\\/"):
        eqs, ges = [], []
        for atom in disjunct.split("/\\"):
            atom = atom.strip()
            if atom == "true":
                continue
            lhs, op, rhs = re.split(r"(>=|<=|=|>|<)", atom, maxsplit=1)
            d = poly(lhs) - poly(rhs)
            if op == "=":
                eqs.append(d)
            elif op == ">=":
                ges.append(d)
            elif op == "<=":
                ges.append(-d)
            elif op == ">":
                ges.append(d - Poly.const(1))
            else:
                ges.append(-d - Poly.const(1))
        cubes.append(make_cube(eqs, ges))
    return formula(cubes, cap=max(16, len(cubes)))


def fixture_program(name: str) -> Program:
    path = resources.files("pathalg") / "programs" / name
    return load_program(str(path))


@pytest.fixture
def div_program() -> Program:
    return fixture_program("div.prog")


@pytest.fixture
def interproc_program() -> Program:
    return fixture_program("interproc.prog")


@pytest.fixture
def bar_program() -> Program:
    return fixture_program("bar.prog")


# ---------------------------------------------------------------------------
# Acceptance summary: one line per criterion, printed after the run.

_GATE: Dict[int, Tuple[str, str, float]] = {}


def pytest_configure(config) -> None:
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.outcome == "passed" else "FAIL"
        _GATE[n] = (title, status, report.duration)


def pytest_terminal_summary(terminalreporter) -> None:
    if not _GATE:
        return
    lines: List[str] = []
    for n in sorted(_GATE):
        title, status, duration = _GATE[n]
        lines.append(f"criterion {n}: {status}  {title} ({duration:.1f} s)")
    terminalreporter.write_sep("=", "acceptance gate")
    for line in lines:
        terminalreporter.write_line(line)

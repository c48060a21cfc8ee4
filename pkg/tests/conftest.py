import random

import pytest

from qlt.errors import DomainError
from qlt.expr import evaluate, parse

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion of the toolkit")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call" and not report.failed:
        return
    number, title = marker.args
    ok = report.passed if report.when == "call" else False
    prev = _ACCEPTANCE.get(number, (title, True))
    _ACCEPTANCE[number] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"AC{number:02d} {'PASS' if ok else 'FAIL'}  {title}")


# --------------------------------------------------------------------------
# random expressions drawn from the grammar

_CONSTS = ["0.7", "1.3", "2", "i", "(0.3 + 0.2*i)", "(0.5 - i)", "0.25"]


def random_source(rng: random.Random, names, depth: int = 3) -> str:
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.7:
            return rng.choice(names)
        return rng.choice(_CONSTS)
    a = random_source(rng, names, depth - 1)
    kind = rng.randrange(10)
    if kind < 4:
        b = random_source(rng, names, depth - 1)
        return f"({a} {'+-*'[kind % 3]} {b})"
    if kind == 4:
        b = random_source(rng, names, depth - 1)
        return f"({a} / exp({b}))"
    if kind == 5:
        return f"({a})^{rng.choice([2, 3])}"
    if kind == 6:
        return f"-{a}"
    if kind == 7:
        return f"{rng.choice(['exp', 'sin', 'cos'])}({a} / 2)"
    if kind == 8:
        return f"log(3 + ({a})^2)"
    return f"({a} * {rng.choice(_CONSTS)})"


def random_exprs(seed: int, count: int, names=("x", "y"), depth: int = 3):
    """Pairs (expr, point) with a finite, moderate value at the point."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        e = parse(random_source(rng, list(names), depth), names)
        p = [rng.uniform(-1, 1) for _ in names]
        try:
            v = evaluate(e, p)
        except DomainError:
            continue
        if abs(v) < 1e3:
            out.append((e, p))
    return out

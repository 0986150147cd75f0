from fractions import Fraction

import pytest


def frac_pow(x: Fraction, k: int) -> Fraction:
    return x ** k


def exact_term(xs, i, alpha: int) -> Fraction:
    """Exact rational term of the cyclic sum for an integer exponent."""
    xs = [Fraction(v) for v in xs]
    xi = xs[i]
    xa = frac_pow(xi, alpha)
    return (xa - xi) / (xa + sum(xs) - xi)


def exact_sum(xs, alpha: int) -> Fraction:
    return sum(exact_term(xs, i, alpha) for i in range(len(xs)))


@pytest.fixture
def exact():
    class Oracle:
        term = staticmethod(exact_term)
        sum = staticmethod(exact_sum)

    return Oracle


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: dict = {}


def record_criterion(label, ok: bool, detail: str) -> str:
    line = f"criterion {label}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[str(label)] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES.values():
            terminalreporter.write_line(line)

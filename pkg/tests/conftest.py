import random
from fractions import Fraction

import pytest

from streamcsp.core import Constraint, Instance

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def report(number: int, ok: bool, label: str, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}  [{number:2d}] {label}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


def random_constraint(rng: random.Random, n: int, k: int) -> Constraint:
    return Constraint(tuple(rng.sample(range(n), k)), tuple(rng.choice((-1, 1)) for _ in range(k)))


def random_instance(rng: random.Random, n: int, k: int, m: int, max_w: int = 3) -> Instance:
    items = [(random_constraint(rng, n, k), Fraction(rng.randint(1, max_w))) for _ in range(m)]
    return Instance.build(n, items)


@pytest.fixture
def rng():
    return random.Random(20240607)

import itertools

import pytest

from hiddencsp import Relation, make_instance

ID = Relation.of("Id", [(1,)])
NEG = Relation.of("Neg", [(0,)])


def one_sat(ell, literals):
    """1-SAT instance from signed literals (+i means x_i, -i means not x_i)."""
    cons = [(1 if lit > 0 else 2, (abs(lit),)) for lit in literals]
    return make_instance(2, ell, 1, [ID, NEG], cons)


def cube(w, ell):
    return list(itertools.product(range(w), repeat=ell))


@pytest.fixture
def onesat():
    return one_sat


# acceptance criteria record one verdict line each; printed after the run
ACCEPTANCE: dict = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])

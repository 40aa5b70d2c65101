import sys
from fractions import Fraction

import pytest

from robxp import ExplanationProblem, Instance, build_kappa1, build_kappa2
from robxp.oracle import Solver


def projected_models(formula, literals):
    """Every distinct valuation of ``literals`` that extends to a model of ``formula``."""
    n, clauses = formula.to_cnf()
    clauses = [list(c) for c in clauses]
    found = set()
    while True:
        res = Solver(n, clauses).solve()
        if not res.sat:
            return found
        proj = tuple(res.model[abs(l)] == (l > 0) for l in literals)
        found.add(proj)
        clauses.append([-l if b else l for l, b in zip(literals, proj)])


@pytest.fixture
def kappa1():
    return build_kappa1()


@pytest.fixture
def kappa2():
    return build_kappa2()


@pytest.fixture
def e1(kappa1):
    return ExplanationProblem(kappa1, Instance((Fraction("0.7"),), 1))


@pytest.fixture
def e2(kappa2):
    return ExplanationProblem(kappa2, Instance((0, 1), 0))


@pytest.fixture
def self_solver():
    """Command line for this package's own DIMACS/OPB front end."""
    return f"{sys.executable} -m robxp.solver"


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

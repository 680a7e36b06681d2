import random
from itertools import product

import pytest

from bcfl.grammar import HOLE, parse_grammar, to_cnf

DYCK = "S -> S S | ( S ) | ( )"
EXPR = "E -> E + E | E * E | x"


@pytest.fixture(scope="session")
def dyck():
    return to_cnf(parse_grammar(DYCK))


@pytest.fixture(scope="session")
def expr():
    return to_cnf(parse_grammar(EXPR))


def porous_instances(g, max_len=6, reps=2, seed=0):
    """Every hole placement up to ``max_len``; fixed positions drawn at random.

    Duplicates are dropped, so short lengths yield fewer than ``reps`` strings.
    """
    rng = random.Random(seed)
    alphabet = sorted(g.terminals)
    out = {}
    for n in range(1, max_len + 1):
        for mask in product((True, False), repeat=n):
            for _ in range(reps if not all(mask) else 1):
                out[tuple(HOLE if hole else rng.choice(alphabet) for hole in mask)] = None
    return list(out)


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        verdict = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")

"""Shared test data: two small fixed 3-SAT instances.

SAMPLE_10 has 10 clauses over 60 variables (sparse, one clearly fittest
clause).  SAMPLE_20 has 20 clauses over 20 variables (dense, several hubs).
Both are used as hand-checkable oracles across the module tests.
"""

import pytest

from satbec.cnf import Clause, Formula

SAMPLE_10 = (
    (59, -55, 52),
    (-46, 31, 41),
    (-56, -44, 18),
    (-42, -10, 27),
    (-14, -54, -22),
    (-40, 52, -27),
    (42, -55, -29),
    (9, -53, 39),
    (48, 19, 27),
    (-34, 25, 11),
)

SAMPLE_20 = (
    (5, 3, 17),
    (-3, -20, -5),
    (6, -13, 11),
    (-16, 11, 9),
    (-17, -19, 2),
    (4, 14, 18),
    (-10, -2, -5),
    (-6, -11, -8),
    (-11, -1, -9),
    (6, -15, 13),
    (9, 18, -17),
    (-8, -14, -20),
    (-9, -19, -8),
    (-10, 5, -20),
    (-13, 9, 6),
    (-5, 4, 6),
    (-19, -3, -10),
    (14, 8, 15),
    (-12, 5, -4),
    (-4, 15, -2),
)


def formula_from_signed(signed_clauses, n):
    clauses = tuple(Clause.from_signed(c) for c in signed_clauses)
    return Formula(n=n, k=clauses[0].k, clauses=clauses)


@pytest.fixture
def sample10():
    return formula_from_signed(SAMPLE_10, 60)


@pytest.fixture
def sample20():
    return formula_from_signed(SAMPLE_20, 20)

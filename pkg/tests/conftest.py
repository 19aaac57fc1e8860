from fractions import Fraction

import pytest

from tropmedian.trees import parse_newick

EXAMPLE_V = (
    (14, -7, -7),
    (13, -14, 1),
    (11, -13, 2),
    (10, 1, -11),
    (3, -3, 0),
)

T1 = "(D:10,(C:4,(B:2,A:2):2):6)"
T2 = "(A:10,(B:4,(C:2,D:2):2):6)"
T3 = "(A:10,((B:4,C:4):3,D:7):3)"

NINE_A = "(A:8,((B:2,(C:1,D:1):1):5,((E:1,F:1):3,(G:2,(H:1,I:1):1):2):3):1)"
NINE_B = "((A:3,(C:2,(B:1,D:1):1):1):5,((E:1,F:1):3,(G:2,(H:1,I:1):1):2):4)"
NINE_C = "((A:2,(C:1,D:1):1):6,(E:2,(B:1,F:1):1):6,(G:2,H:2,I:2):6)"


@pytest.fixture
def example_v():
    return [[Fraction(c) for c in row] for row in EXAMPLE_V]


@pytest.fixture
def small_trees():
    return [parse_newick(s) for s in (T1, T2, T3)]


@pytest.fixture
def nine_taxa_trees():
    return [parse_newick(s) for s in (NINE_A, NINE_B, NINE_C)]

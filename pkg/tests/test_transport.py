import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import transport_lp_value
from tropmedian.transport import (
    InfeasibleMarginals,
    northwest_corner,
    recover_primal,
    solve_transportation,
)
from tropmedian.tropical import covector_of, d_asym, fw_objective


def test_northwest_corner_staircase_six_by_nine():
    plan = northwest_corner([Fraction(1, 6)] * 6, [Fraction(1, 9)] * 9)
    # in units of 1/18 rows carry 3 and columns 2; rows and columns run out
    # together after cells (1, 2) and (3, 5), where the East move adds a zero cell
    assert plan.basis == (
        (0, 0), (0, 1), (1, 1), (1, 2), (1, 3), (2, 3), (2, 4),
        (3, 4), (3, 5), (3, 6), (4, 6), (4, 7), (5, 7), (5, 8),
    )
    # positive cells are exactly the overlapping intervals [3i, 3i+3) and [2j, 2j+2)
    overlap = {(i, j) for i in range(6) for j in range(9) if max(3 * i, 2 * j) < min(3 * i + 3, 2 * j + 2)}
    assert plan.support() == overlap
    assert all(sum(row) == Fraction(1, 6) for row in plan.flow)
    assert all(sum(col) == Fraction(1, 9) for col in zip(*plan.flow))


def test_northwest_corner_trivial_cases():
    plan = northwest_corner([5], [5])
    assert plan.flow == ((5,),) and plan.basis == ((0, 0),)
    plan = northwest_corner([1, 1], [1, 1])
    assert plan.basis == ((0, 0), (0, 1), (1, 1))
    assert plan.flow == ((1, 0), (0, 1))


def test_northwest_corner_rejects_unbalanced():
    with pytest.raises(InfeasibleMarginals):
        northwest_corner([1, 2], [2, 2])
    with pytest.raises(InfeasibleMarginals):
        northwest_corner([0, 2], [1, 1])


def test_example_plan(example_v):
    plan = solve_transportation(example_v)
    assert plan.objective == 72
    assert [list(col) for col in zip(*plan.flow)] == [
        [3, 2, 0, 0, 0],
        [0, 0, 0, 3, 2],
        [0, 1, 3, 0, 1],
    ]
    assert plan.support() == covector_of((9, -6, -3), example_v).edges
    assert set(plan.basis) == plan.support()


def test_example_primal_recovery(example_v):
    sol = recover_primal(solve_transportation(example_v), example_v)
    assert sol.t == (5, 4, 5, 7, 3)
    assert sol.x == (9, -6, -3)
    assert sol.value == 72
    assert all(3 * ti == d_asym(v, sol.x) for ti, v in zip(sol.t, example_v))


def test_single_site():
    v = (Fraction(7, 2), 1, -2, 0)
    plan = solve_transportation([v])
    assert plan.flow == ((1, 1, 1, 1),)
    sol = recover_primal(plan, [v])
    assert sol.value == 0
    assert d_asym(v, sol.x) == 0


def test_plan_json_shape(example_v):
    data = solve_transportation(example_v).to_json()
    assert data["objective"] == "72"
    assert data["basis"][0] == [0, 0]
    assert data["flow"][0] == ["3", "0", "0"]


def random_sites(rng, m, n, spread=12):
    return [[Fraction(rng.randint(-spread, spread), rng.choice((1, 2, 3))) for _ in range(n)] for _ in range(m)]


def test_random_four_by_three_against_lp_oracle():
    rng = random.Random(11)
    for _ in range(100):
        V = random_sites(rng, 4, 3)
        assert solve_transportation(V).objective == transport_lp_value(V)


sites = st.integers(min_value=1, max_value=5).flatmap(
    lambda m: st.integers(min_value=2, max_value=4).flatmap(
        lambda n: st.lists(
            st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=4), min_size=n, max_size=n),
            min_size=m,
            max_size=m,
        )
    )
)


@settings(max_examples=100, deadline=None)
@given(sites)
def test_plan_is_feasible_integral_and_complementary(V):
    m, n = len(V), len(V[0])
    plan = solve_transportation(V)
    assert all(y >= 0 and y.denominator == 1 for row in plan.flow for y in row)
    assert all(sum(row) == n for row in plan.flow)
    assert all(sum(col) == m for col in zip(*plan.flow))
    assert len(plan.basis) == m + n - 1
    sol = recover_primal(plan, V)
    assert sum(sol.x) == 0
    # dual feasibility on normalized rows, equality on the support
    for i, row in enumerate(V):
        mean = sum(row) / n
        for j in range(n):
            slack = sol.t[i] + sol.x[j] - (row[j] - mean)
            assert slack >= 0
            if plan.flow[i][j]:
                assert slack == 0
    # strong duality, and the value is the total distance at x
    assert sol.value == plan.objective == fw_objective(sol.x, V)


@settings(max_examples=60, deadline=None)
@given(sites, st.data())
def test_objective_invariances(V, data):
    n = len(V[0])
    base = solve_transportation(V).objective
    shifts = data.draw(st.lists(st.fractions(-5, 5, max_denominator=3), min_size=len(V), max_size=len(V)))
    shifted = [[c + s for c in row] for row, s in zip(V, shifts)]
    assert solve_transportation(shifted).objective == base
    perm = data.draw(st.permutations(range(len(V))))
    assert solve_transportation([V[i] for i in perm]).objective == base
    cols = data.draw(st.permutations(range(n)))
    assert solve_transportation([[row[j] for j in cols] for row in V]).objective == base
    lam = data.draw(st.integers(min_value=1, max_value=4))
    assert solve_transportation([[lam * c for c in row] for row in V]).objective == lam * base


@settings(max_examples=50, deadline=None)
@given(sites, st.data())
def test_weights_equal_repetition(V, data):
    w = data.draw(st.lists(st.integers(1, 3), min_size=len(V), max_size=len(V)))
    repeated = [row for row, k in zip(V, w) for _ in range(k)]
    weighted = solve_transportation(V, w)
    assert weighted.objective == solve_transportation(repeated).objective
    sol = recover_primal(weighted, V)
    assert sol.value == weighted.objective == fw_objective(sol.x, V, w)

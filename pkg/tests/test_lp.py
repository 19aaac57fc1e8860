from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import lp_by_vertices
from tropmedian import lp
from tropmedian.fw import primal_program


def test_single_variable_max():
    prog = lp.LinearProgram([1], "max")
    prog.add([1], "<=", 1)
    result = lp.solve(prog)
    assert result.optimal and result.value == 1 and result.x == (1,)


def test_infeasible_and_unbounded():
    prog = lp.LinearProgram([1], "min")
    prog.add([1], ">=", 2)
    prog.add([1], "<=", 1)
    assert lp.solve(prog).status == lp.INFEASIBLE

    prog = lp.LinearProgram([1, 1], "max")
    prog.add([1, -1], "<=", 1)
    assert lp.solve(prog).status == lp.UNBOUNDED


def test_free_and_bounded_variables():
    # min x - y with -3 <= x, y <= 2 and x + y = 1/2
    prog = lp.LinearProgram([1, -1], "min", bounds=[(-3, None), (None, 2)])
    prog.add([1, 1], "=", Fraction(1, 2))
    result = lp.solve(prog)
    assert result.value == Fraction(-7, 2)
    assert result.x == (Fraction(-3, 2), 2)
    assert prog.is_feasible_point(result.x)


def test_redundant_equalities_are_dropped():
    prog = lp.LinearProgram([1, 2], "min")
    prog.add([1, 1], "=", 3)
    prog.add([2, 2], "=", 6)
    result = lp.solve(prog)
    assert result.value == 3 and result.x == (3, 0)


def test_degenerate_cycling_example_terminates():
    # Beale's example, which cycles under the largest-coefficient rule
    prog = lp.LinearProgram([Fraction(-3, 4), 150, Fraction(-1, 50), 6], "min")
    prog.add([Fraction(1, 4), -60, Fraction(-1, 25), 9], "<=", 0)
    prog.add([Fraction(1, 2), -90, Fraction(-1, 50), 3], "<=", 0)
    prog.add([0, 0, 1, 0], "<=", 1)
    result = lp.solve(prog)
    assert result.optimal and result.value == Fraction(-1, 20)


def test_fermat_weber_program_on_example(example_v):
    result = lp.solve(primal_program(example_v))
    assert result.value == 72
    t, x = result.x[:5], result.x[5:]
    assert x == (9, -6, -3)
    assert t == (5, 4, 5, 7, 3)


small = st.fractions(min_value=-6, max_value=6, max_denominator=3)


@st.composite
def bounded_programs(draw):
    n = draw(st.integers(min_value=1, max_value=3))
    c = draw(st.lists(small, min_size=n, max_size=n))
    rows = []
    for _ in range(draw(st.integers(min_value=0, max_value=4))):
        rows.append((draw(st.lists(small, min_size=n, max_size=n)), draw(small)))
    box = draw(st.integers(min_value=1, max_value=5))
    return n, c, rows, box


@settings(max_examples=120, deadline=None)
@given(bounded_programs())
def test_matches_vertex_enumeration(case):
    n, c, rows, box = case
    prog = lp.LinearProgram(c, "max", bounds=[(-box, box)] * n)
    for coeffs, rhs in rows:
        prog.add(coeffs, "<=", rhs)
    all_rows = list(rows)
    for k in range(n):
        unit = [0] * n
        unit[k] = 1
        all_rows.append((unit, box))
        all_rows.append(([-u for u in unit], box))
    expected = lp_by_vertices(c, all_rows, "max")
    result = lp.solve(prog)
    if expected is None:
        assert result.status == lp.INFEASIBLE
    else:
        assert result.optimal and result.value == expected
        assert prog.is_feasible_point(result.x)


@settings(max_examples=80, deadline=None)
@given(
    st.integers(min_value=1, max_value=3).flatmap(
        lambda m: st.integers(min_value=1, max_value=3).flatmap(
            lambda n: st.tuples(
                st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m),
                st.lists(st.fractions(min_value=0, max_value=5, max_denominator=2), min_size=m, max_size=m),
                st.lists(small, min_size=n, max_size=n),
            )
        )
    )
)
def test_strong_duality(case):
    # max c.x, A x <= b, x >= 0  versus  min b.y, A^T y >= c, y >= 0
    A, b, c = case
    m, n = len(A), len(c)
    primal = lp.LinearProgram(c, "max")
    for row, rhs in zip(A, b):
        primal.add(row, "<=", rhs)
    dual = lp.LinearProgram(b, "min")
    for j in range(n):
        dual.add([A[i][j] for i in range(m)], ">=", c[j])
    p, d = lp.solve(primal), lp.solve(dual)
    # b >= 0 keeps the primal feasible at the origin
    assert p.status in (lp.OPTIMAL, lp.UNBOUNDED)
    if p.optimal:
        assert d.optimal and p.value == d.value
        # complementary slackness
        for i in range(m):
            slack = b[i] - sum(A[i][j] * p.x[j] for j in range(n))
            assert slack * d.x[i] == 0
    else:
        assert d.status == lp.INFEASIBLE

import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_minimum, objective
from tropmedian.fw import (
    contains,
    dimension,
    dimension_bound,
    fw_point,
    fw_polytrope,
    staircase,
    tropical_vertices,
)
from tropmedian.tropical import evenly_splits, normalize


def random_sites(rng, m, n, spread=10):
    return [[Fraction(rng.randint(-spread, spread), rng.choice((1, 2))) for _ in range(n)] for _ in range(m)]


def test_example_point_and_polytrope(example_v):
    assert fw_point(example_v) == (9, -6, -3)
    poly = fw_polytrope(example_v)
    x = (9, -6, -3)
    assert poly.bounds == tuple(tuple(Fraction(x[k] - x[l]) for l in range(3)) for k in range(3))
    assert poly.bounds[0][1] == 15 and poly.bounds[1][0] == -15
    assert poly.optimal_value == 72
    assert dimension(poly) == 0
    assert tropical_vertices(poly) == [(9, -6, -3)]


def test_single_site_is_its_own_median():
    v = (5, 1, 0)
    assert fw_point([v]) == normalize(v)
    poly = fw_polytrope([v])
    assert tropical_vertices(poly) == [normalize(v)]
    assert dimension(poly) == 0


def test_two_by_two_staircase_is_a_segment():
    poly = fw_polytrope(staircase(2, 2))
    assert dimension(poly) == 1
    verts = sorted(tropical_vertices(poly))
    # objective minimizers among pseudovertex candidates are exactly the endpoints
    best, args = brute_force_minimum(staircase(2, 2))
    assert best == poly.optimal_value
    assert verts == sorted(args)
    assert verts == [(Fraction(-1, 2), Fraction(1, 2)), (0, 0)]


def test_staircase_four_by_two_point_is_optimal():
    V = staircase(4, 2)
    best, _ = brute_force_minimum(V)
    assert objective(fw_point(V), V) == best


@pytest.mark.parametrize("m,n", [(2, 2), (4, 2), (3, 3), (6, 4), (6, 9)])
def test_staircase_dimension_is_tight(m, n):
    poly = fw_polytrope(staircase(m, n))
    assert dimension(poly) == gcd(m, n) - 1 == dimension_bound(m, n)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_staircase_cube_vertices_are_members(d):
    poly = fw_polytrope(staircase(d, d))
    verts = tropical_vertices(poly)
    assert dimension(poly) == d - 1
    assert len(verts) <= d
    for v in verts:
        assert contains(poly, v)
        assert objective(v, staircase(d, d)) == poly.optimal_value


def test_contains_rejects_moved_point(example_v):
    poly = fw_polytrope(example_v)
    assert contains(poly, (9, -6, -3))
    # x_1 - x_2 grows from 15 to 17
    assert not contains(poly, (10, -7, -3))
    with pytest.raises(ValueError):
        contains(poly, (0, 0))


def test_average_of_vertices_is_contained():
    rng = random.Random(5)
    for _ in range(30):
        V = random_sites(rng, 4, 4)
        poly = fw_polytrope(V)
        verts = tropical_vertices(poly)
        avg = [sum(col) / len(verts) for col in zip(*verts)]
        assert contains(poly, avg)


def test_slackness_and_lp_routes_agree():
    rng = random.Random(3)
    for _ in range(25):
        m, n = rng.randint(1, 5), rng.randint(2, 4)
        V = random_sites(rng, m, n)
        w = [rng.randint(1, 3) for _ in range(m)]
        assert fw_polytrope(V, w).bounds == fw_polytrope(V, w, method="lp").bounds


def test_lp_route_with_worker_pool(example_v):
    assert fw_polytrope(example_v, method="lp", threads=2).bounds == fw_polytrope(example_v).bounds


def test_unknown_method(example_v):
    with pytest.raises(ValueError):
        fw_polytrope(example_v, method="guess")


def test_coprime_sizes_give_a_unique_point():
    rng = random.Random(9)
    for _ in range(40):
        m, n = rng.choice([(2, 3), (3, 4), (5, 3), (5, 4), (3, 2)])
        assert dimension(fw_polytrope(random_sites(rng, m, n))) == 0


sites = st.integers(min_value=1, max_value=5).flatmap(
    lambda m: st.integers(min_value=2, max_value=4).flatmap(
        lambda n: st.lists(
            st.lists(st.fractions(min_value=-8, max_value=8, max_denominator=2), min_size=n, max_size=n),
            min_size=m,
            max_size=m,
        )
    )
)


@settings(max_examples=60, deadline=None)
@given(sites)
def test_polytrope_equals_minimizer_set(V):
    poly = fw_polytrope(V)
    best, minimizers = brute_force_minimum(V)
    assert poly.optimal_value == best
    # every optimal candidate lies in the set and every tropical vertex is optimal
    for x in minimizers:
        assert contains(poly, x)
    for v in tropical_vertices(poly):
        assert objective(v, V) == best
        assert evenly_splits(v, V)
    assert dimension(poly) <= gcd(len(V), len(V[0])) - 1


@settings(max_examples=60, deadline=None)
@given(sites, st.data())
def test_membership_matches_objective(V, data):
    poly = fw_polytrope(V)
    n = len(V[0])
    x = normalize(data.draw(st.lists(st.fractions(-8, 8, max_denominator=2), min_size=n, max_size=n)))
    assert contains(poly, x) == (objective(x, V) == poly.optimal_value)

"""Exact tropical arithmetic on the projective torus R^n / R1.

Points are tuples of :class:`~fractions.Fraction`. The canonical representative
of a torus point is the one whose coordinates sum to zero; every public
function that returns a point returns that representative.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import networkx as nx

from .rational import to_vector

TropicalPoint = tuple[Fraction, ...]
SiteMatrix = tuple[tuple[Fraction, ...], ...]

#: evenly_splits enumerates all 2^n coordinate subsets up to this dimension
ENUMERATION_LIMIT = 12


class DimensionError(ValueError):
    pass


def normalize(raw: Iterable) -> TropicalPoint:
    """Project ``raw`` onto the hyperplane where coordinates sum to zero."""
    vec = to_vector(raw)
    if len(vec) < 2:
        raise DimensionError(f"need at least 2 coordinates, got {len(vec)}")
    shift = sum(vec, Fraction(0)) / len(vec)
    return tuple(c - shift for c in vec)


def site_matrix(rows: Iterable[Iterable]) -> SiteMatrix:
    """Validate and convert ``rows`` into an exact m x n site matrix (m >= 1, n >= 2)."""
    mat = tuple(to_vector(r) for r in rows)
    if not mat:
        raise DimensionError("site matrix has no rows")
    n = len(mat[0])
    if n < 2:
        raise DimensionError(f"sites need at least 2 coordinates, got {n}")
    for i, row in enumerate(mat):
        if len(row) != n:
            raise DimensionError(f"row {i} has {len(row)} entries, expected {n}")
    return mat


def normalize_rows(V: Iterable[Iterable]) -> SiteMatrix:
    return tuple(normalize(row) for row in site_matrix(V))


def _check_same_dim(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise DimensionError(f"dimension mismatch: {len(a)} vs {len(b)}")


def d_asym(a: Sequence, b: Sequence) -> Fraction:
    """Asymmetric tropical distance from ``a`` to ``b``.

    ``sum(b - a) - n * min(b - a)``; invariant under adding constants to
    either argument and zero exactly when the two torus points coincide.
    """
    a, b = to_vector(a), to_vector(b)
    _check_same_dim(a, b)
    diff = [bi - ai for ai, bi in zip(a, b)]
    return sum(diff, Fraction(0)) - len(diff) * min(diff)


def d_sym(a: Sequence, b: Sequence) -> Fraction:
    """Symmetric tropical distance ``max(a - b) - min(a - b)``."""
    a, b = to_vector(a), to_vector(b)
    _check_same_dim(a, b)
    diff = [ai - bi for ai, bi in zip(a, b)]
    return max(diff) - min(diff)


def fw_objective(x: Sequence, V: Iterable[Iterable], weights: Sequence[int] | None = None) -> Fraction:
    """Weighted sum of asymmetric distances from every site to ``x``."""
    V = site_matrix(V)
    weights = _weights(weights, len(V))
    return sum((w * d_asym(v, x) for v, w in zip(V, weights)), Fraction(0))


def _weights(weights: Sequence[int] | None, m: int) -> tuple[int, ...]:
    if weights is None:
        return (1,) * m
    weights = tuple(weights)
    if len(weights) != m:
        raise DimensionError(f"{len(weights)} weights for {m} sites")
    for w in weights:
        if isinstance(w, bool) or int(w) != w or w < 1:
            raise ValueError(f"weights must be positive integers, got {w!r}")
    return tuple(int(w) for w in weights)


@dataclass(frozen=True)
class Covector:
    """Bipartite graph between sites (rows) and coordinates (columns).

    ``edges`` holds 0-based ``(row, column)`` pairs.
    """

    m: int
    n: int
    edges: frozenset[tuple[int, int]]

    def row_neighbors(self, i: int) -> frozenset[int]:
        return frozenset(j for (r, j) in self.edges if r == i)

    def is_spanning_tree(self) -> bool:
        if len(self.edges) != self.m + self.n - 1:
            return False
        graph = nx.Graph()
        graph.add_nodes_from(("r", i) for i in range(self.m))
        graph.add_nodes_from(("c", j) for j in range(self.n))
        graph.add_edges_from((("r", i), ("c", j)) for i, j in self.edges)
        return nx.is_tree(graph)


def covector_of(x: Sequence, V: Iterable[Iterable]) -> Covector:
    """Tight pairs ``(i, j)`` where ``v_ij - x_j`` attains ``max_k (v_ik - x_k)``."""
    V = site_matrix(V)
    x = to_vector(x)
    _check_same_dim(x, V[0])
    edges = set()
    for i, row in enumerate(V):
        slack = [v - xj for v, xj in zip(row, x)]
        top = max(slack)
        edges.update((i, j) for j, s in enumerate(slack) if s == top)
    return Covector(len(V), len(x), frozenset(edges))


def column_degrees(c: Covector) -> tuple[int, ...]:
    degrees = [0] * c.n
    for _, j in c.edges:
        degrees[j] += 1
    return tuple(degrees)


def in_sector(point: Sequence[Fraction], apex: Sequence[Fraction], J: frozenset[int]) -> bool:
    """Membership of ``point`` in the max-tropical halfspace with apex ``apex`` on index set ``J``."""
    shifted = [p - a for p, a in zip(point, apex)]
    inside = [s for k, s in enumerate(shifted) if k in J]
    outside = [s for k, s in enumerate(shifted) if k not in J]
    if not inside:
        return False
    if not outside:
        return True
    return max(inside) >= max(outside)


def evenly_splits(
    u: Sequence,
    V: Iterable[Iterable],
    weights: Sequence[int] | None = None,
    method: str = "auto",
) -> bool:
    """Whether every union of sectors at ``u`` holds its fair share of the sites.

    The condition is ``n * (sites in S_J(u)) >= m * |J|`` for every subset ``J``
    of coordinates, with sites counted by multiplicity. ``method`` is
    ``"enumerate"`` (all subsets), ``"flow"`` (transport plan on the tight
    edges) or ``"auto"``, which enumerates up to :data:`ENUMERATION_LIMIT`.
    """
    V = site_matrix(V)
    u = to_vector(u)
    _check_same_dim(u, V[0])
    weights = _weights(weights, len(V))
    n = len(u)
    if method == "auto":
        method = "enumerate" if n <= ENUMERATION_LIMIT else "flow"
    if method == "enumerate":
        return _evenly_splits_enumerate(u, V, weights)
    if method == "flow":
        return _evenly_splits_flow(u, V, weights)
    raise ValueError(f"unknown method {method!r}")


def _evenly_splits_enumerate(u, V, weights) -> bool:
    n = len(u)
    total = sum(weights)
    for size in range(1, n):
        for J in combinations(range(n), size):
            J = frozenset(J)
            count = sum(w for v, w in zip(V, weights) if in_sector(v, u, J))
            if n * count < total * size:
                return False
    return True


def _evenly_splits_flow(u, V, weights) -> bool:
    # Hall's condition for this bipartite supply/demand problem is exactly the
    # even-split inequality, so feasibility of a saturating flow decides it.
    m, n = len(V), len(u)
    total = sum(weights)
    cov = covector_of(u, V)
    graph = nx.DiGraph()
    for i in range(m):
        graph.add_edge("source", ("r", i), capacity=n * weights[i])
    for j in range(n):
        graph.add_edge(("c", j), "sink", capacity=total)
    for i, j in cov.edges:
        graph.add_edge(("r", i), ("c", j), capacity=n * total)
    value = nx.maximum_flow_value(graph, "source", "sink")
    return value == n * total

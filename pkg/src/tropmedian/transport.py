"""Exact network simplex for the central transportation problem.

For sites ``V`` (m x n, rows normalized to sum zero) and integer site
multiplicities ``w`` we solve

    maximize   sum_ij v_ij * y_ij
    subject to sum_j y_ij = n * w_i,   sum_i y_ij = sum(w),   y >= 0,

whose dual is the Fermat-Weber linear program

    minimize   n * sum_i w_i * t_i
    subject to t_i + x_j >= v_ij,   sum_j x_j = 0.

Unit multiplicities give the usual central transportation polytope with row
sums ``n`` and column sums ``m``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .rational import to_vector
from .tropical import SiteMatrix, TropicalPoint, _weights, normalize_rows

Cell = tuple[int, int]


class InfeasibleMarginals(ValueError):
    pass


class BasisError(RuntimeError):
    """Raised when a plan's basis is not a spanning tree of the bipartite graph."""


@dataclass(frozen=True)
class TransportPlan:
    flow: tuple[tuple[Fraction, ...], ...]
    basis: tuple[Cell, ...]
    objective: Fraction
    weights: tuple[int, ...] | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.flow), len(self.flow[0])

    def support(self) -> frozenset[Cell]:
        return frozenset((i, j) for i, row in enumerate(self.flow) for j, y in enumerate(row) if y)

    def to_json(self) -> dict:
        from .rational import format_rational

        return {
            "flow": [[format_rational(y) for y in row] for row in self.flow],
            "basis": [[i, j] for i, j in self.basis],
            "objective": format_rational(self.objective),
        }


@dataclass(frozen=True)
class PrimalSolution:
    t: tuple[Fraction, ...]
    x: TropicalPoint
    value: Fraction


def northwest_corner(row_sums: Sequence, col_sums: Sequence) -> TransportPlan:
    """Basic feasible plan from the northwest corner rule.

    When a row and a column are exhausted simultaneously the rule moves East,
    keeping a zero-flow cell in the basis so that it stays a spanning tree.
    The returned objective is zero since no cost matrix is involved.
    """
    rows = list(to_vector(row_sums))
    cols = list(to_vector(col_sums))
    m, n = len(rows), len(cols)
    if m == 0 or n == 0:
        raise InfeasibleMarginals("marginals must be nonempty")
    if any(r <= 0 for r in rows) or any(c <= 0 for c in cols):
        raise InfeasibleMarginals("marginals must be positive")
    if sum(rows) != sum(cols):
        raise InfeasibleMarginals(f"row total {sum(rows)} differs from column total {sum(cols)}")
    flow = [[Fraction(0)] * n for _ in range(m)]
    basis = []
    i = j = 0
    while True:
        q = min(rows[i], cols[j])
        flow[i][j] = q
        basis.append((i, j))
        rows[i] -= q
        cols[j] -= q
        if i == m - 1 and j == n - 1:
            break
        if cols[j] == 0 and j < n - 1:
            j += 1
        else:
            i += 1
    return TransportPlan(tuple(map(tuple, flow)), tuple(basis), Fraction(0))


def _tree_adjacency(m: int, n: int, basis: Iterable[Cell]) -> list[list[int]]:
    # nodes 0..m-1 are rows, m..m+n-1 are columns
    adj: list[list[int]] = [[] for _ in range(m + n)]
    for i, j in basis:
        adj[i].append(m + j)
        adj[m + j].append(i)
    return adj


def _potentials(V: SiteMatrix, basis: Sequence[Cell], root_col: int = 0):
    """Solve ``t_i + x_j = v_ij`` on the basis tree with ``x[root_col] = 0``."""
    m, n = len(V), len(V[0])
    if len(basis) != m + n - 1:
        raise BasisError(f"basis has {len(basis)} cells, a spanning tree needs {m + n - 1}")
    adj = _tree_adjacency(m, n, basis)
    t: list[Fraction | None] = [None] * m
    x: list[Fraction | None] = [None] * n
    x[root_col] = Fraction(0)
    stack = [m + root_col]
    seen = {m + root_col}
    while stack:
        node = stack.pop()
        for nb in adj[node]:
            if nb in seen:
                continue
            seen.add(nb)
            if node < m:
                x[nb - m] = V[node][nb - m] - t[node]
            else:
                t[nb] = V[nb][node - m] - x[node - m]
            stack.append(nb)
    if len(seen) != m + n:
        raise BasisError("basis does not span all rows and columns")
    return t, x


def _tree_path(adj: list[list[int]], start: int, goal: int) -> list[int]:
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        for nb in adj[node]:
            if nb not in parent:
                parent[nb] = node
                queue.append(nb)
    path = [goal]
    while path[-1] != start:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def solve_transportation(V: Iterable[Iterable], weights: Sequence[int] | None = None) -> TransportPlan:
    """Optimal transport plan for the (weighted) central transportation problem.

    Rows of ``V`` are normalized to sum zero first, so the objective equals the
    minimum total asymmetric distance ``sum_i w_i * d(v_i, x)``.
    """
    V = normalize_rows(V)
    m, n = len(V), len(V[0])
    w = _weights(weights, m)
    total = sum(w)
    start = northwest_corner([n * wi for wi in w], [total] * n)
    flow = [list(row) for row in start.flow]
    basis = list(start.basis)

    while True:
        t, x = _potentials(V, basis)
        in_basis = set(basis)
        entering = None
        for i in range(m):
            for j in range(n):
                if (i, j) not in in_basis and V[i][j] - t[i] - x[j] > 0:
                    entering = (i, j)
                    break
            if entering:
                break
        if entering is None:
            break
        ei, ej = entering
        adj = _tree_adjacency(m, n, basis)
        path = _tree_path(adj, m + ej, ei)
        cycle_cells = []
        for a, b in zip(path, path[1:]):
            cycle_cells.append((a, b - m) if a < m else (b, a - m))
        # entering cell gains flow; cells alternate -, +, -, ... from column ej back to row ei
        minus = cycle_cells[0::2]
        plus = cycle_cells[1::2]
        theta = min(flow[i][j] for i, j in minus)
        leaving = min(c for c in minus if flow[c[0]][c[1]] == theta)
        for i, j in minus:
            flow[i][j] -= theta
        for i, j in plus:
            flow[i][j] += theta
        flow[ei][ej] += theta
        basis[basis.index(leaving)] = entering

    objective = sum((V[i][j] * flow[i][j] for i in range(m) for j in range(n)), Fraction(0))
    return TransportPlan(
        tuple(map(tuple, flow)),
        tuple(sorted(basis)),
        objective,
        None if weights is None else w,
    )


def recover_primal(plan: TransportPlan, V: Iterable[Iterable]) -> PrimalSolution:
    """Optimal ``(t, x)`` of the Fermat-Weber program from an optimal plan.

    Equalities ``t_i + x_j = v_ij`` are propagated along the basis tree from
    column 0 with ``x_0 = 0``; then ``x`` is shifted onto the zero-sum
    hyperplane and ``t`` is shifted the opposite way.
    """
    V = normalize_rows(V)
    m, n = len(V), len(V[0])
    if plan.shape != (m, n):
        raise ValueError(f"plan shape {plan.shape} does not match sites {(m, n)}")
    t, x = _potentials(V, plan.basis)
    shift = sum(x, Fraction(0)) / n
    x = tuple(xj - shift for xj in x)
    t = tuple(ti + shift for ti in t)
    w = _weights(plan.weights, m)
    value = n * sum((wi * ti for wi, ti in zip(w, t)), Fraction(0))
    return PrimalSolution(t, x, value)

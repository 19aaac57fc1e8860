"""Fermat-Weber points and polytropes for the asymmetric tropical distance."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from . import lp as lpmod
from .rational import format_rational, to_vector
from .tropical import TropicalPoint, _weights, normalize, normalize_rows
from .transport import recover_primal, solve_transportation


@dataclass(frozen=True)
class Polytrope:
    """``{x : x_k - x_l <= bounds[k][l]}`` inside the zero-sum hyperplane.

    ``bounds`` is shortest-path closed with a zero diagonal, so every entry is
    attained. ``optimal_value`` is the Fermat-Weber objective on the set.
    """

    n: int
    bounds: tuple[tuple[Fraction, ...], ...]
    optimal_value: Fraction

    def to_json(self) -> dict:
        return {
            "p_star": format_rational(self.optimal_value),
            "bounds": [[format_rational(a) for a in row] for row in self.bounds],
            "tropical_vertices": [[format_rational(c) for c in v] for v in tropical_vertices(self)],
            "dimension": dimension(self),
        }


def fw_point(V: Iterable[Iterable], weights: Sequence[int] | None = None) -> TropicalPoint:
    """One Fermat-Weber point, recovered from an optimal transport plan."""
    plan = solve_transportation(V, weights)
    return recover_primal(plan, V).x


def _close(bounds: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(bounds)
    a = [row[:] for row in bounds]
    for j in range(n):
        aj = a[j]
        for k in range(n):
            akj = a[k][j]
            ak = a[k]
            for l in range(n):
                via = akj + aj[l]
                if via < ak[l]:
                    ak[l] = via
    return a


def fw_polytrope(
    V: Iterable[Iterable],
    weights: Sequence[int] | None = None,
    method: str = "slackness",
    threads: int = 1,
) -> Polytrope:
    """Facet description of the Fermat-Weber set.

    ``method="slackness"`` reads the optimal face off one optimal transport
    plan: complementary slackness forces ``v_ij - x_j >= v_ik - x_k`` for every
    support cell ``(i, j)`` and every ``k``, and a shortest-path closure of
    these difference bounds yields the tight facet values.
    ``method="lp"`` instead maximizes ``x_k - x_l`` over the optimal face for
    each of the ``n^2 - n`` ordered pairs with the generic simplex; ``threads``
    caps the number of worker processes used for those programs.
    """
    sites = normalize_rows(V)
    m, n = len(sites), len(sites[0])
    w = _weights(weights, m)
    plan = solve_transportation(sites, weights)
    p_star = plan.objective
    if method == "slackness":
        inf = None
        raw: list[list[Fraction | None]] = [[inf] * n for _ in range(n)]
        for i, j in plan.support():
            row = sites[i]
            for k in range(n):
                bound = row[j] - row[k]
                if raw[j][k] is None or bound < raw[j][k]:
                    raw[j][k] = bound
        # every column carries flow, so each x_j - x_k is bounded
        for k in range(n):
            raw[k][k] = Fraction(0)
        bounds = _close(raw)
    elif method == "lp":
        pairs = [(k, l) for k in range(n) for l in range(n) if k != l]
        jobs = [(sites, w, p_star, k, l) for k, l in pairs]
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                values = list(pool.map(_facet_value, jobs))
        else:
            values = [_facet_value(job) for job in jobs]
        bounds = [[Fraction(0)] * n for _ in range(n)]
        for (k, l), value in zip(pairs, values):
            bounds[k][l] = value
    else:
        raise ValueError(f"unknown method {method!r}")
    return Polytrope(n, tuple(map(tuple, bounds)), p_star)


def facet_program(sites, weights, p_star: Fraction, k: int, l: int) -> lpmod.LinearProgram:
    """Maximize ``x_k - x_l`` over the optimal face; variables are ``(t_1..t_m, x_1..x_n)``."""
    m, n = len(sites), len(sites[0])
    objective = [0] * (m + n)
    objective[m + k] = 1
    objective[m + l] = -1
    prog = lpmod.LinearProgram(objective, "max", bounds=[(None, None)] * (m + n))
    for i in range(m):
        for j in range(n):
            row = [0] * (m + n)
            row[i] = 1
            row[m + j] = 1
            prog.add(row, ">=", sites[i][j])
    prog.add([0] * m + [1] * n, "=", 0)
    prog.add(list(weights) + [0] * n, "=", p_star / n)
    return prog


def _facet_value(job) -> Fraction:
    sites, w, p_star, k, l = job
    result = lpmod.solve(facet_program(sites, w, p_star, k, l))
    if not result.optimal:
        raise RuntimeError(f"facet program ({k}, {l}) ended {result.status}")
    return result.value


def primal_program(V: Iterable[Iterable], weights: Sequence[int] | None = None) -> lpmod.LinearProgram:
    """The Fermat-Weber program ``min n * sum w_i t_i`` as a generic LP."""
    sites = normalize_rows(V)
    m, n = len(sites), len(sites[0])
    w = _weights(weights, m)
    prog = lpmod.LinearProgram([n * wi for wi in w] + [0] * n, "min", bounds=[(None, None)] * (m + n))
    for i in range(m):
        for j in range(n):
            row = [0] * (m + n)
            row[i] = 1
            row[m + j] = 1
            prog.add(row, ">=", sites[i][j])
    prog.add([0] * m + [1] * n, "=", 0)
    return prog


def tropical_vertices(p: Polytrope) -> list[TropicalPoint]:
    """Rows of ``-bounds`` as normalized points, duplicates dropped (first kept)."""
    seen = set()
    out = []
    for row in p.bounds:
        vertex = normalize(-a for a in row)
        if vertex not in seen:
            seen.add(vertex)
            out.append(vertex)
    return out


def contains(p: Polytrope, x: Sequence) -> bool:
    x = to_vector(x)
    if len(x) != p.n:
        raise ValueError(f"point has dimension {len(x)}, polytrope {p.n}")
    return all(x[k] - x[l] <= p.bounds[k][l] for k in range(p.n) for l in range(p.n))


def dimension(p: Polytrope) -> int:
    """Number of classes of coordinates whose differences are pinned, minus one."""
    n = p.n
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for k in range(n):
        for l in range(k + 1, n):
            if p.bounds[k][l] + p.bounds[l][k] == 0:
                parent[find(k)] = find(l)
    return len({find(k) for k in range(n)}) - 1


def dimension_bound(m: int, n: int) -> int:
    return gcd(m, n) - 1


def staircase(m: int, n: int) -> tuple[tuple[Fraction, ...], ...]:
    """Sites ``v_ij = (i-1)(j-1)`` on the tropical moment curve."""
    return tuple(tuple(Fraction(i * j) for j in range(n)) for i in range(m))

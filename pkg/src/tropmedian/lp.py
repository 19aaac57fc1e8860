"""Dense two-phase primal simplex over exact rationals.

Bland's smallest-index rule is used for both the entering and the leaving
variable, so the method terminates on degenerate problems and is fully
deterministic. Intended for small dense programs (a few hundred rows).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .rational import to_rational, to_vector

RELATIONS = ("<=", "=", ">=")

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction


@dataclass
class LinearProgram:
    """``sense`` (``"min"``/``"max"``) of ``objective . x`` subject to ``constraints``.

    ``bounds`` holds one ``(lower, upper)`` pair per variable, ``None`` meaning
    unbounded on that side. Without explicit bounds every variable is ``>= 0``.
    """

    objective: Sequence
    sense: str = "min"
    constraints: list[Constraint] = field(default_factory=list)
    bounds: Optional[list[tuple[Optional[Fraction], Optional[Fraction]]]] = None

    def __post_init__(self):
        self.objective = to_vector(self.objective)
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        if self.bounds is None:
            self.bounds = [(Fraction(0), None)] * self.num_vars
        else:
            self.bounds = [
                (None if lo is None else to_rational(lo), None if up is None else to_rational(up))
                for lo, up in self.bounds
            ]
            if len(self.bounds) != self.num_vars:
                raise ValueError("one (lower, upper) bound pair per variable is required")

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def add(self, coeffs: Sequence, relation: str, rhs) -> None:
        if relation not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}, got {relation!r}")
        coeffs = to_vector(coeffs)
        if len(coeffs) != self.num_vars:
            raise ValueError(f"constraint has {len(coeffs)} coefficients, expected {self.num_vars}")
        self.constraints.append(Constraint(coeffs, relation, to_rational(rhs)))

    def is_feasible_point(self, x: Sequence[Fraction]) -> bool:
        for (lo, up), xi in zip(self.bounds, x):
            if (lo is not None and xi < lo) or (up is not None and xi > up):
                return False
        for con in self.constraints:
            lhs = sum((a * xi for a, xi in zip(con.coeffs, x)), Fraction(0))
            if con.relation == "<=" and lhs > con.rhs:
                return False
            if con.relation == ">=" and lhs < con.rhs:
                return False
            if con.relation == "=" and lhs != con.rhs:
                return False
        return True


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Optional[Fraction] = None
    x: Optional[tuple[Fraction, ...]] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Canonical-form tableau; the last column is the right-hand side."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows
        self.basis = basis

    def pivot(self, r: int, c: int, objective: list[Fraction]) -> None:
        prow = self.rows[r]
        inv = 1 / prow[c]
        if inv != 1:
            prow[:] = [a * inv for a in prow]
        support = [k for k, a in enumerate(prow) if a]
        for other in self.rows:
            if other is prow:
                continue
            f = other[c]
            if f:
                for k in support:
                    other[k] -= f * prow[k]
        f = objective[c]
        if f:
            for k in support:
                objective[k] -= f * prow[k]
        self.basis[r] = c

    def run(self, objective: list[Fraction], allowed: Sequence[bool]) -> bool:
        """Minimize with reduced-cost row ``objective``; False if unbounded."""
        ncols = len(objective) - 1
        while True:
            entering = next((j for j in range(ncols) if allowed[j] and objective[j] < 0), None)
            if entering is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], entering, objective)


def solve(lp: LinearProgram) -> LPResult:
    """Solve ``lp`` exactly. Infeasibility and unboundedness are returned, not raised."""
    # Substitute every variable by nonnegative columns: x = offset + sum(sign * col).
    columns = 0
    subst: list[tuple[Fraction, list[tuple[int, int]]]] = []
    extra_rows: list[tuple[dict[int, Fraction], str, Fraction]] = []
    for lo, up in lp.bounds:
        if lo is not None:
            subst.append((lo, [(columns, 1)]))
            if up is not None:
                if up < lo:
                    return LPResult(INFEASIBLE)
                extra_rows.append(({columns: Fraction(1)}, "<=", up - lo))
            columns += 1
        elif up is not None:
            subst.append((up, [(columns, -1)]))
            columns += 1
        else:
            subst.append((Fraction(0), [(columns, 1), (columns + 1, -1)]))
            columns += 2

    row_data: list[tuple[dict[int, Fraction], str, Fraction]] = []
    for con in lp.constraints:
        coeffs: dict[int, Fraction] = {}
        rhs = con.rhs
        for a, (offset, terms) in zip(con.coeffs, subst):
            if not a:
                continue
            rhs -= a * offset
            for col, sign in terms:
                coeffs[col] = coeffs.get(col, Fraction(0)) + sign * a
        row_data.append((coeffs, con.relation, rhs))
    row_data.extend(extra_rows)

    cost = [Fraction(0)] * columns
    sign = 1 if lp.sense == "min" else -1
    for c, (_, terms) in zip(lp.objective, subst):
        for col, s in terms:
            cost[col] += sign * s * c

    # slack/surplus columns, then artificial columns
    normalized = []
    for coeffs, rel, rhs in row_data:
        if rhs < 0:
            coeffs = {k: -v for k, v in coeffs.items()}
            rhs = -rhs
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        normalized.append((coeffs, rel, rhs))
    num_slack = sum(1 for _, rel, _ in normalized if rel != "=")
    num_art = sum(1 for _, rel, _ in normalized if rel != "<=")
    width = columns + num_slack + num_art
    rows: list[list[Fraction]] = []
    basis: list[int] = []
    slack_col = columns
    art_col = columns + num_slack
    for coeffs, rel, rhs in normalized:
        row = [Fraction(0)] * (width + 1)
        for k, v in coeffs.items():
            row[k] = v
        row[-1] = rhs
        if rel == "<=":
            row[slack_col] = Fraction(1)
            basis.append(slack_col)
            slack_col += 1
        else:
            if rel == ">=":
                row[slack_col] = Fraction(-1)
                slack_col += 1
            row[art_col] = Fraction(1)
            basis.append(art_col)
            art_col += 1
        rows.append(row)
    tab = _Tableau(rows, basis)
    first_art = columns + num_slack

    if num_art:
        phase1 = [Fraction(0)] * (width + 1)
        for j in range(first_art, width):
            phase1[j] = Fraction(1)
        for row, b in zip(rows, basis):
            if b >= first_art:
                for k in range(width + 1):
                    if row[k]:
                        phase1[k] -= row[k]
        tab.run(phase1, [True] * width)
        if -phase1[-1] != 0:
            return LPResult(INFEASIBLE)
        # drive remaining (zero-valued) artificials out of the basis
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= first_art:
                row = tab.rows[r]
                col = next((k for k in range(first_art) if row[k]), None)
                if col is None:
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, col, phase1)
            r += 1

    objective = [Fraction(0)] * (width + 1)
    for j in range(columns):
        objective[j] = cost[j]
    for row, b in zip(tab.rows, tab.basis):
        cb = objective[b]
        if cb:
            for k in range(width + 1):
                if row[k]:
                    objective[k] -= cb * row[k]
    allowed = [j < first_art for j in range(width)]
    if not tab.run(objective, allowed):
        return LPResult(UNBOUNDED)

    values = [Fraction(0)] * width
    for row, b in zip(tab.rows, tab.basis):
        values[b] = row[-1]
    x = tuple(
        offset + sum((s * values[col] for col, s in terms), Fraction(0)) for offset, terms in subst
    )
    value = sum((c * xi for c, xi in zip(lp.objective, x)), Fraction(0))
    return LPResult(OPTIMAL, value, x)

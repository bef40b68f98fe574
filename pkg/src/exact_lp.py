"""
Geodesic Growth Toolkit - Exact Linear Programming

Two-phase tableau simplex over Fractions with Bland's rule, for the small
programs behind translation lengths and hemisphere tests.

Problem form: minimize c·x subject to A x = b, x >= 0.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InfeasibleError, UnboundedError


@dataclass
class LPResult:
    x: list[Fraction]
    value: Fraction


def _pivot(tableau: list[list[Fraction]], basis: list[int], row: int, col: int):
    pivot = tableau[row][col]
    tableau[row] = [v / pivot for v in tableau[row]]
    for r, other in enumerate(tableau):
        if r != row and other[col] != 0:
            factor = other[col]
            tableau[r] = [v - factor * p for v, p in zip(other, tableau[row])]
    basis[row] = col


def _run_simplex(tableau, basis, cost, columns: int):
    """Minimize cost over the current tableau; Bland's rule on both choices."""
    while True:
        entering = None
        for j in range(columns):
            if j in basis:
                continue
            reduced = cost[j] - sum(cost[basis[r]] * tableau[r][j] for r in range(len(tableau)))
            if reduced < 0:
                entering = j
                break
        if entering is None:
            return

        leaving = None
        best = None
        for r, row in enumerate(tableau):
            if row[entering] > 0:
                ratio = row[-1] / row[entering]
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leaving]):
                    best, leaving = ratio, r
        if leaving is None:
            raise UnboundedError("Objective is unbounded below")
        _pivot(tableau, basis, leaving, entering)


def solve_lp(
    c: Sequence,
    a_eq: Sequence[Sequence],
    b_eq: Sequence,
) -> LPResult:
    """
    Solve min c·x, A x = b, x >= 0 exactly.

    Raises:
        InfeasibleError: no feasible x
        UnboundedError: objective unbounded below
    """
    n = len(c)
    m = len(a_eq)
    rows = []
    for i in range(m):
        row = [Fraction(v) for v in a_eq[i]]
        rhs = Fraction(b_eq[i])
        if len(row) != n:
            raise ValueError(f"Constraint row {i} has {len(row)} entries, expected {n}")
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        rows.append(row + [Fraction(int(k == i)) for k in range(m)] + [rhs])
    basis = [n + i for i in range(m)]

    # Phase 1: minimize the sum of artificials
    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    _run_simplex(rows, basis, phase1, n + m)
    infeasibility = sum(rows[r][-1] for r in range(m) if basis[r] >= n)
    if infeasibility > 0:
        raise InfeasibleError("Constraints have no nonnegative solution")

    # Drive remaining artificials out of the basis, dropping redundant rows
    r = 0
    while r < len(rows):
        if basis[r] >= n:
            col = next((j for j in range(n) if rows[r][j] != 0), None)
            if col is None:
                rows.pop(r)
                basis.pop(r)
                continue
            _pivot(rows, basis, r, col)
        r += 1
    rows = [row[:n] + [row[-1]] for row in rows]

    cost = [Fraction(v) for v in c]
    _run_simplex(rows, basis, cost, n)

    x = [Fraction(0)] * n
    for r, j in enumerate(basis):
        x[j] = rows[r][-1]
    return LPResult(x=x, value=sum((cj * xj for cj, xj in zip(cost, x)), Fraction(0)))


def feasible_point(a_eq: Sequence[Sequence], b_eq: Sequence, n: Optional[int] = None) -> Optional[list[Fraction]]:
    """Some x >= 0 with A x = b, or None."""
    n = n if n is not None else (len(a_eq[0]) if a_eq else 0)
    try:
        return solve_lp([0] * n, a_eq, b_eq).x
    except InfeasibleError:
        return None

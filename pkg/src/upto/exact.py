"""Exact rational linear algebra: Gaussian elimination and phase-1 simplex.

Both solvers work on dense lists of :class:`fractions.Fraction` and return an
explicit solution vector (or None) so callers can re-verify it by plain
substitution.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

Matrix = list  # list of rows, each a list of Fractions


def solve_linear(a: Sequence[Sequence], b: Sequence) -> Optional[list]:
    """Some x with A x = b over the rationals, or None if inconsistent.

    Free variables are set to zero.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    rows = [[Fraction(v) for v in a[i]] + [Fraction(b[i])] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [vi - f * vr for vi, vr in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = rows[i][n]
    return x


def feasible_nonneg(a: Sequence[Sequence], b: Sequence) -> Optional[list]:
    """Some x >= 0 with A x = b, via phase-1 simplex with Bland's rule, or None.

    Rows are sign-normalised so b >= 0, one artificial variable per row is
    added, and the sum of artificials is minimised.  Bland's smallest-index
    rule rules out cycling, so this always terminates.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    if m == 0:
        return [Fraction(0)] * n
    rows = []
    for i in range(m):
        row = [Fraction(v) for v in a[i]]
        rhs = Fraction(b[i])
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        rows.append(row + [Fraction(1) if j == i else Fraction(0) for j in range(m)] + [rhs])
    width = n + m
    basis = [n + i for i in range(m)]
    # objective: minimise sum of artificials  ->  reduced costs row
    cost = [Fraction(0)] * n + [Fraction(1)] * m
    obj = [Fraction(0)] * (width + 1)
    for j in range(width + 1):
        obj[j] = (cost[j] if j < width else Fraction(0)) - sum(rows[i][j] for i in range(m))
    # obj[j] for j < width is the reduced cost; obj[width] is -(current objective)

    while True:
        entering = next((j for j in range(width) if obj[j] < 0), None)
        if entering is None:
            break
        best = None
        leaving = None
        for i in range(m):
            coef = rows[i][entering]
            if coef > 0:
                ratio = rows[i][width] / coef
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    best, leaving = ratio, i
        if leaving is None:  # unbounded; cannot happen for a phase-1 objective bounded below by 0
            break
        _pivot(rows, obj, leaving, entering)
        basis[leaving] = entering

    if obj[width] != 0:
        return None
    x = [Fraction(0)] * width
    for i, var in enumerate(basis):
        x[var] = rows[i][width]
    return x[:n]


def _pivot(rows: Matrix, obj: list, r: int, c: int) -> None:
    inv = 1 / rows[r][c]
    rows[r] = [v * inv for v in rows[r]]
    for i in range(len(rows)):
        if i != r and rows[i][c] != 0:
            f = rows[i][c]
            rows[i] = [vi - f * vr for vi, vr in zip(rows[i], rows[r])]
    if obj[c] != 0:
        f = obj[c]
        for j in range(len(obj)):
            obj[j] -= f * rows[r][j]


def residual_zero(a: Sequence[Sequence], x: Sequence, b: Sequence) -> bool:
    return all(sum(Fraction(aij) * xj for aij, xj in zip(row, x)) == bi for row, bi in zip(a, b))

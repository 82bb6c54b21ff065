"""Dense two-phase simplex over ``Fraction`` with Bland's anti-cycling rule.

Solves ``max c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)


class Infeasible(ValueError):
    pass


class Unbounded(ValueError):
    pass


@dataclass(frozen=True)
class LPResult:
    x: tuple[Fraction, ...]
    value: Fraction
    pivots: int


def _pivot(T: list[list[Fraction]], obj: list[Fraction], basis: list[int], r: int, c: int) -> None:
    row = T[r]
    piv = row[c]
    if piv != 1:
        T[r] = row = [v / piv for v in row]
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f:
                T[i] = [a - f * b for a, b in zip(other, row)]
    f = obj[c]
    if f:
        obj[:] = [a - f * b for a, b in zip(obj, row)]
    basis[r] = c


def _run(T, obj, basis, allowed: int) -> int:
    """Optimize until no reduced cost is negative; ``obj`` holds reduced costs."""
    pivots = 0
    while True:
        enter = next((j for j in range(allowed) if obj[j] < 0), None)
        if enter is None:
            return pivots
        best = None
        for i, row in enumerate(T):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise Unbounded("objective is unbounded")
        _pivot(T, obj, basis, best[1], enter)
        pivots += 1


def linprog(c: Sequence, A_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
            A_eq: Sequence[Sequence] = (), b_eq: Sequence = ()) -> LPResult:
    n = len(c)
    c = [Fraction(v) for v in c]
    rows = [([Fraction(v) for v in a], Fraction(b), True) for a, b in zip(A_ub, b_ub)]
    rows += [([Fraction(v) for v in a], Fraction(b), False) for a, b in zip(A_eq, b_eq)]
    if any(len(a) != n for a, _, _ in rows):
        raise ValueError("constraint rows must match the objective length")
    n_slack = sum(1 for _, _, ub in rows if ub)
    m = len(rows)
    width = n + n_slack + m
    T = []
    s = 0
    for i, (a, b, ub) in enumerate(rows):
        row = a + [ZERO] * (n_slack + m) + [b]
        if ub:
            row[n + s] = Fraction(1)
            s += 1
        if b < 0:
            row = [-v for v in row]
        row[n + n_slack + i] = Fraction(1)
        T.append(row)
    basis = [n + n_slack + i for i in range(m)]

    # phase 1: maximize -sum(artificials)
    obj = [ZERO] * (width + 1)
    for row in T:
        for j in range(n + n_slack):
            obj[j] -= row[j]
        obj[-1] -= row[-1]
    pivots = _run(T, obj, basis, n + n_slack)
    if obj[-1] != 0:
        raise Infeasible("constraints are infeasible")

    real = n + n_slack
    for i in reversed(range(len(T))):
        if basis[i] >= real:
            j = next((j for j in range(real) if T[i][j] != 0), None)
            if j is None:
                del T[i], basis[i]
            else:
                _pivot(T, obj, basis, i, j)
                pivots += 1
    T = [row[:real] + [row[-1]] for row in T]

    cost = c + [ZERO] * n_slack
    obj = [-v for v in cost] + [ZERO]
    for i, row in enumerate(T):
        cb = cost[basis[i]]
        if cb:
            obj = [a + cb * b for a, b in zip(obj, row)]
    pivots += _run(T, obj, basis, real)

    x = [ZERO] * real
    for i, row in enumerate(T):
        x[basis[i]] = row[-1]
    return LPResult(tuple(x[:n]), obj[-1], pivots)

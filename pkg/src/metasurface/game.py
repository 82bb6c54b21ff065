"""The family game: a learner mixes over classes, an adversary picks a realizable domain.

The value is computed exactly with a double-oracle loop.  Each round solves
the matrix game restricted to a finite pool of adversary domains and then
asks for the adversary's best response over *all* realizable domains; the
loop stops when the best response does no better than the restricted value.

The adversary may restrict itself to single domains (point-mass
meta-distributions): the payoff is linear in ``Q``, and every domain in the
support of a realizable ``Q`` is realized by one common class, so each such
domain is itself a realizable point mass.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lp import linprog
from .universe import Domain, LabeledExample, MetaFamily, class_loss


class IterationCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class MixedStrategy:
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(Fraction(v) for v in self.weights)
        object.__setattr__(self, "weights", w)
        if not w or any(v < 0 for v in w) or sum(w) != 1:
            raise ValueError(f"not a probability vector: {w}")

    @classmethod
    def pure(cls, i: int, size: int) -> "MixedStrategy":
        return cls(tuple(Fraction(int(j == i)) for j in range(size)))

    @classmethod
    def uniform(cls, size: int) -> "MixedStrategy":
        return cls((Fraction(1, size),) * size)

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, i):
        return self.weights[i]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, w in enumerate(self.weights) if w > 0)


@dataclass(frozen=True)
class GameSolution:
    value: Fraction
    minimax: MixedStrategy
    adversary_support: tuple[tuple[Domain, Fraction], ...]
    iterations: int
    lower_bounds: tuple[Fraction, ...] = ()
    upper_bounds: tuple[Fraction, ...] = ()


def solve_matrix_game(M: Sequence[Sequence]) -> tuple[Fraction, tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Exact value and optimal mixes of the game where rows minimize ``p^T M q``."""
    M = [[Fraction(v) for v in row] for row in M]
    if not M or not M[0]:
        raise ValueError("empty payoff matrix")
    r, c = len(M), len(M[0])
    if any(len(row) != c for row in M):
        raise ValueError("ragged payoff matrix")
    # rows: min v  s.t. sum_i p_i M[i][j] <= v,  sum p = 1   (vars p..., v)
    res_row = linprog(
        c=[0] * r + [-1],
        A_ub=[[M[i][j] for i in range(r)] + [-1] for j in range(c)],
        b_ub=[0] * c,
        A_eq=[[1] * r + [0]],
        b_eq=[1],
    )
    # columns: max u  s.t. sum_j M[i][j] q_j >= u,  sum q = 1   (vars q..., u)
    res_col = linprog(
        c=[0] * c + [1],
        A_ub=[[-M[i][j] for j in range(c)] + [1] for i in range(r)],
        b_ub=[0] * r,
        A_eq=[[1] * c + [0]],
        b_eq=[1],
    )
    value = -res_row.value
    if value != res_col.value:
        raise ArithmeticError(f"duality gap {value} vs {res_col.value}")
    return value, res_row.x[:r], res_col.x[:c]


def _best_response_on_graph(F: MetaFamily, P: MixedStrategy, g: int) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Max of sum_H P(H) L_D(H) over distributions D on the graph of ``g``."""
    K = F.K
    active = [i for i in P.support]
    nvar = K + len(active)
    A_ub, b_ub = [], []
    for t, i in enumerate(active):
        for h in F.classes[i].masks:
            diff = h ^ g
            row = [Fraction(0)] * nvar
            for x in range(K):
                if diff >> x & 1:
                    row[x] = Fraction(-1)
            row[K + t] = Fraction(1)
            A_ub.append(row)
            b_ub.append(0)
    c = [0] * K + [P[i] for i in active]
    res = linprog(c, A_ub, b_ub, A_eq=[[1] * K + [0] * len(active)], b_eq=[1])
    return res.value, res.x[:K]


def adversary_best_response(F: MetaFamily, P: MixedStrategy) -> tuple[Domain, Fraction]:
    """Best realizable domain against the class mixture ``P`` and its exact payoff.

    One LP per distinct hypothesis of the family (a realizable domain sits on
    the graph of some hypothesis); ties keep the first (class, hypothesis) pair.
    """
    if len(P) != len(F):
        raise ValueError("strategy length does not match the family")
    best = None
    for g in F.union_masks():
        value, mass = _best_response_on_graph(F, P, g)
        if best is None or value > best[0]:
            best = (value, g, mass)
    value, g, mass = best
    atoms = tuple((LabeledExample(x, (g >> x) & 1), p) for x, p in enumerate(mass) if p > 0)
    return Domain(atoms), value


def payoff(F: MetaFamily, P: MixedStrategy, D: Domain) -> Fraction:
    return sum((w * class_loss(F.classes[i], D) for i, w in enumerate(P.weights) if w), Fraction(0))


def family_value(F: MetaFamily, max_iter: int = 1000) -> GameSolution:
    pool: list[Domain] = []
    first, _ = adversary_best_response(F, MixedStrategy.uniform(len(F)))
    pool.append(first)
    lows, highs = [], []
    for it in range(1, max_iter + 1):
        M = [[class_loss(H, D) for D in pool] for H in F.classes]
        low, p, q = solve_matrix_game(M)
        P = MixedStrategy(p)
        D, high = adversary_best_response(F, P)
        lows.append(low)
        highs.append(high)
        if high == low:
            support = tuple((d, w) for d, w in zip(pool, q) if w > 0)
            return GameSolution(low, P, support, it, tuple(lows), tuple(highs))
        if high < low:
            raise ArithmeticError("best response fell below the restricted game value")
        pool.append(D)
    raise IterationCapExceeded(f"double oracle did not converge in {max_iter} rounds")

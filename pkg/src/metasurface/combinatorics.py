"""Exact combinatorial parameters of finite hypothesis classes and families.

Example sets over a universe of ``K`` points are encoded as integers in
``[0, 4**K)``: bit ``x`` holds the example ``(x, 1)`` and bit ``K + x`` the
example ``(x, 0)``.  Whole-universe tables indexed this way are built with
numpy; the central one is the *witness size* ``w_H(S)``, the size of the
smallest subset of ``S`` that no hypothesis of ``H`` fits (255 when ``S`` is
realizable).  It is a subset-minimum transform of ``|T| * [T non-realizable]``.

The level-wise search in :func:`minimal_nonrealizable_sets` does not use the
tables and serves as the second route for the dual Helly number.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Union

import numpy as np

from .budget import check_budget
from .universe import (
    Domain,
    HypothesisClass,
    LabeledExample,
    MetaDistribution,
    MetaFamily,
    set_loss,
)

EXCEEDS_CAP = "exceeds-cap"
NO_WITNESS = 255

HellyValue = Union[int, str]


# -- encoding helpers -------------------------------------------------------


def encode(S, K: int) -> int:
    code = 0
    for x, y in S:
        if not 0 <= x < K:
            raise ValueError(f"point {x} is outside a universe of size {K}")
        code |= 1 << (x if y == 1 else K + x)
    return code


def decode(code: int, K: int) -> frozenset:
    out = []
    for b in range(2 * K):
        if code >> b & 1:
            out.append(LabeledExample(b, 1) if b < K else LabeledExample(b - K, 0))
    return frozenset(out)


def fits(h: int, code: int, K: int) -> bool:
    pos = code & ((1 << K) - 1)
    neg = code >> K
    return h & pos == pos and h & neg == 0


def _popcount_table(K: int) -> np.ndarray:
    t = np.zeros(1 << K, dtype=np.uint8)
    for b in range(K):
        t[1 << b:1 << (b + 1)] = t[: 1 << b] + 1
    return t


def _space(K: int):
    check_budget(4 ** K, f"example-set table for K={K}")
    return _space_cached(K)


@lru_cache(maxsize=4)
def _space_cached(K: int):
    idx = np.arange(4 ** K, dtype=np.int64)
    full = (1 << K) - 1
    pos = idx & full
    neg = idx >> K
    pc = _popcount_table(K)
    size = pc[pos] + pc[neg]
    return pos, neg, pc, size


@lru_cache(maxsize=16)
def _mistakes(masks: tuple[int, ...], K: int) -> np.ndarray:
    """Fewest examples of each set that a single hypothesis in ``masks`` gets wrong."""
    pos, neg, pc, size = _space(K)
    full = (1 << K) - 1
    best = np.full(pos.shape, 2 * K, dtype=np.uint8)
    for h in masks:
        np.minimum(best, pc[pos & (full ^ h)] + pc[neg & h], out=best)
    best.setflags(write=False)
    return best


@lru_cache(maxsize=16)
def _witness_size(masks: tuple[int, ...], K: int) -> np.ndarray:
    _, _, _, size = _space(K)
    w = np.where(_mistakes(masks, K) > 0, size, NO_WITNESS).astype(np.uint8)
    for b in range(2 * K):
        blocks = w.reshape(-1, 2, 1 << b)
        np.minimum(blocks[:, 1, :], blocks[:, 0, :], out=blocks[:, 1, :])
    w.setflags(write=False)
    return w


def _family_realizable(F: MetaFamily) -> np.ndarray:
    return _mistakes(F.union_masks(), F.K) == 0


def _exceeds(eps: Fraction, K: int) -> np.ndarray:
    """Lookup ``[mistakes, size] -> mistakes/size > eps`` (size 0 never qualifies)."""
    n = 2 * K + 1
    tab = np.zeros((n, n), dtype=bool)
    for s in range(1, n):
        for k in range(s + 1):
            tab[k, s] = Fraction(k, s) > eps
    return tab


def _as_eps(eps) -> Fraction:
    eps = Fraction(eps)
    if not 0 <= eps <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {eps}")
    return eps


def _smallest_witness(code: int, masks: tuple[int, ...], K: int, size: int) -> frozenset:
    bits = [b for b in range(2 * K) if code >> b & 1]
    for combo in itertools.combinations(bits, size):
        sub = sum(1 << b for b in combo)
        if not any(fits(h, sub, K) for h in masks):
            return decode(sub, K)
    raise AssertionError("witness size table is inconsistent")


# -- results ----------------------------------------------------------------


@dataclass(frozen=True)
class HellyResult:
    value: HellyValue
    witness: frozenset | None
    epsilon: Fraction
    class_index: int | None = None

    @property
    def exceeded(self) -> bool:
        return self.value == EXCEEDS_CAP


@dataclass(frozen=True)
class ErrorCurve:
    """Optimal error ``eps(m)`` for ``m = 0..len(values)-1``."""

    values: tuple[Fraction, ...]
    settled: bool

    @property
    def breakpoints(self) -> list[tuple[int, Fraction]]:
        out = []
        for m, v in enumerate(self.values):
            if not out or out[-1][1] != v:
                out.append((m, v))
        return out

    @property
    def m_max(self) -> int:
        return len(self.values) - 1

    def __call__(self, m: int) -> Fraction:
        if m < 0:
            raise ValueError("m must be nonnegative")
        if m < len(self.values):
            return self.values[m]
        if self.settled:
            return self.values[-1]
        raise IndexError(f"curve computed only up to m={self.m_max}")


class Flag(NamedTuple):
    holds: bool
    witness: object = None


@dataclass(frozen=True)
class TrivialityReport:
    weak_nonseparability: Flag
    no_pairwise_domination: Flag
    strong_nonseparability: Flag


# -- VC dimension -------------------------------------------------------------


def _shatters(masks: tuple[int, ...], points: tuple[int, ...]) -> bool:
    patterns = {tuple((h >> x) & 1 for x in points) for h in masks}
    return len(patterns) == 1 << len(points)


def vc_dimension(H: HypothesisClass, cap: int | None = None) -> int:
    K = H.size
    cap = K if cap is None else cap
    if not 0 <= cap <= K:
        raise ValueError(f"cap must lie in [0, {K}]")
    masks = H.masks
    best = 0
    for t in range(1, cap + 1):
        if (1 << t) > len(masks):
            break
        if not any(_shatters(masks, pts) for pts in itertools.combinations(range(K), t)):
            break
        best = t
    return best


def family_vc(F: MetaFamily) -> int:
    return max(vc_dimension(H) for H in F.classes)


# -- dual Helly numbers -------------------------------------------------------


def minimal_nonrealizable_sets(H: HypothesisClass, size_cap: int | None = None) -> list[frozenset]:
    """All minimal non-realizable example sets of size at most ``size_cap``.

    Level-wise search: a candidate of size ``k + 1`` is generated only from a
    realizable set of size ``k`` and kept only if every ``k``-subset is
    realizable, so no superset of a found witness is ever examined.
    """
    K = H.size
    size_cap = 2 * K if size_cap is None else size_cap
    if size_cap < 1:
        raise ValueError("size_cap must be >= 1")
    masks = H.masks

    def realizable(code: int) -> bool:
        return any(fits(h, code, K) for h in masks)

    found: list[int] = []
    level = []
    for b in range(2 * K):
        (level if realizable(1 << b) else found).append(1 << b)
    k = 1
    seen = len(level)
    while level and k < size_cap:
        k += 1
        prev = set(level)
        nxt = []
        check_budget(seen + len(level) * (2 * K - k + 1), f"minimal-set search at size {k}")
        for base in level:
            top = base.bit_length()
            for b in range(top, 2 * K):
                cand = base | (1 << b)
                if any(cand ^ (1 << c) not in prev for c in range(top) if cand >> c & 1):
                    continue
                (nxt if realizable(cand) else found).append(cand)
        level = nxt
        seen += len(level)
    found.sort(key=lambda c: (bin(c).count("1"), c))
    return [decode(c, K) for c in found]


def dual_helly(H: HypothesisClass, cap: int | None = None) -> HellyResult:
    K = H.size
    cap = 2 * K if cap is None else cap
    witnesses = minimal_nonrealizable_sets(H)
    if not witnesses:
        return HellyResult(0, None, Fraction(0))
    largest = max(len(s) for s in witnesses)
    if largest > cap:
        return HellyResult(EXCEEDS_CAP, None, Fraction(0))
    w = next(s for s in witnesses if len(s) == largest)
    return HellyResult(largest, w, Fraction(0))


def _max_witness(H: HypothesisClass, K: int, eps: Fraction, cap: int,
                 restrict: np.ndarray | None, class_index: int | None = None) -> HellyResult:
    masks = H.masks
    _, _, _, size = _space(K)
    qual = _exceeds(eps, K)[_mistakes(masks, K), size]
    if restrict is not None:
        qual &= restrict
    if not qual.any():
        return HellyResult(0, None, eps, class_index)
    w = _witness_size(masks, K)
    value = int(w[qual].max())
    if value > cap:
        return HellyResult(EXCEEDS_CAP, None, eps, class_index)
    code = int(np.flatnonzero(qual & (w == value))[0])
    return HellyResult(value, _smallest_witness(code, masks, K, value), eps, class_index)


def eps_dual_helly_class(H: HypothesisClass, eps, cap: int | None = None) -> HellyResult:
    K = H.size
    return _max_witness(H, K, _as_eps(eps), 2 * K if cap is None else cap, None)


def eps_dual_helly_relative(H: HypothesisClass, F: MetaFamily, eps,
                            cap: int | None = None) -> HellyResult:
    i = F.index(H)
    return _max_witness(H, F.K, _as_eps(eps), 2 * F.K if cap is None else cap,
                        _family_realizable(F), i)


def eps_dual_helly_family(F: MetaFamily, eps, cap: int | None = None) -> HellyResult:
    eps = _as_eps(eps)
    cap = 2 * F.K if cap is None else cap
    freal = _family_realizable(F)
    best = None
    for i, H in enumerate(F.classes):
        r = _max_witness(H, F.K, eps, cap, freal, i)
        if r.exceeded:
            return r
        if best is None or r.value > best.value:
            best = r
    return best


def candidate_epsilons(F: MetaFamily) -> list[Fraction]:
    """Every loss some class attains on some family-realizable set, plus 0 and 1."""
    _, _, _, size = _space(F.K)
    freal = _family_realizable(F)
    pairs = set()
    for H in F.classes:
        mk = _mistakes(H.masks, F.K)[freal]
        sz = size[freal]
        keep = sz > 0
        pairs.update(zip(mk[keep].tolist(), sz[keep].tolist()))
    return sorted({Fraction(0), Fraction(1)} | {Fraction(k, s) for k, s in pairs})


def optimal_error_curve(F: MetaFamily, m_max: int) -> ErrorCurve:
    """``eps(m) = min{eps in grid : m_F(eps) <= m}`` for ``m = 0..m_max``.

    ``m_F`` is a right-continuous step function that only moves at attained
    set losses, so the infimum over ``[0, 1]`` is a minimum over the grid.
    """
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    grid = candidate_epsilons(F)
    helly = [eps_dual_helly_family(F, e, cap=2 * F.K).value for e in grid]
    values = []
    for m in range(m_max + 1):
        values.append(next(e for e, h in zip(grid, helly) if h <= m))
    return ErrorCurve(tuple(values), settled=m_max >= helly[0])


def find_hard_set(H: HypothesisClass, F: MetaFamily, eps, m: int) -> frozenset | None:
    """A family-realizable set with ``L_S(H) > eps`` whose ``m``-subsets all fit ``H``.

    Among all such sets the one with the largest loss is returned (ties: the
    smallest encoding), or ``None`` when ``m >= m_{H|F}(eps)``.
    """
    F.index(H)
    eps = _as_eps(eps)
    K = F.K
    _, _, _, size = _space(K)
    mk = _mistakes(H.masks, K)
    qual = _exceeds(eps, K)[mk, size] & _family_realizable(F) & (_witness_size(H.masks, K) > m)
    codes = np.flatnonzero(qual)
    if codes.size == 0:
        return None
    approx = mk[codes] / size[codes]
    near = codes[approx >= approx.max() - 1e-9]
    best = max(near.tolist(), key=lambda c: (Fraction(int(mk[c]), int(size[c])), -c))
    return decode(best, K)


# -- non-triviality checks ----------------------------------------------------


def _realizing_classes(F: MetaFamily, x: int, y: int) -> list[int]:
    return [i for i, H in enumerate(F.classes) if any(h(x) == y for h in H)]


def _examples_in_order(F: MetaFamily):
    first = F.classes[0].hypotheses[0]
    for x in range(F.K):
        y0 = first(x)
        yield LabeledExample(x, y0)
        yield LabeledExample(x, 1 - y0)


def check_weak_nonseparability(F: MetaFamily) -> Flag:
    for ex in _examples_in_order(F):
        if len(_realizing_classes(F, *ex)) > 1:
            return Flag(True, ex)
    return Flag(False)


def check_strong_nonseparability(F: MetaFamily) -> Flag:
    # A domain fit by every class lives inside the graph of one hypothesis per
    # class, so any single atom of it is an example every class can fit; the
    # point mass on that example is then a meta-distribution all classes realize.
    for ex in _examples_in_order(F):
        if len(_realizing_classes(F, *ex)) == len(F):
            return Flag(True, ex)
    return Flag(False)


def separating_metadist(H: HypothesisClass, H_prime: HypothesisClass) -> MetaDistribution | None:
    """A meta-distribution realized by ``H_prime`` but not by ``H`` (None if ``H_prime`` is inside ``H``)."""
    inside = set(H.masks)
    for h in H_prime:
        if h.bits not in inside:
            return MetaDistribution.point_mass(Domain.uniform(h.graph()))
    return None


def check_no_pairwise_domination(F: MetaFamily) -> Flag:
    """Fails with ``(i, j)`` when class ``i``'s hypotheses all lie in class ``j``."""
    sets = [set(H.masks) for H in F.classes]
    for i, j in itertools.permutations(range(len(F)), 2):
        if sets[i] <= sets[j]:
            return Flag(False, (i, j))
    return Flag(True)


def triviality_report(F: MetaFamily) -> TrivialityReport:
    return TrivialityReport(
        check_weak_nonseparability(F),
        check_no_pairwise_domination(F),
        check_strong_nonseparability(F),
    )


def verify_witness(H: HypothesisClass, S: frozenset) -> bool:
    """``S`` is non-realizable by ``H`` while each proper subset is realizable."""
    if set_loss(H, S) == 0:
        return False
    elems = sorted(S)
    return all(set_loss(H, [e for e in elems if e != drop]) == 0 for drop in elems) if len(elems) > 1 else True

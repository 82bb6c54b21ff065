"""Two-stage sampling, meta-ERM selection, and learning-surface estimation.

``estimate_surface`` is a seeded Monte Carlo estimate; ``exact_surface`` is
the exact expectation.  The exact route uses the fact that every policy here
depends on the sample only through the set of consistent classes, which is
the intersection of one per-row set; the distribution of that intersection
over ``n`` i.i.d. rows is propagated exactly with rational arithmetic.

The worst-case and best-case policies read the true meta-distribution to
pick the consistent class with the largest (smallest) meta-loss.  They are
the sup/inf over meta-ERMs used to define the learning surface, not
learners one could deploy.
"""

from __future__ import annotations

import enum
import math
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .budget import check_budget, enumeration_budget, BudgetExceeded
from .combinatorics import check_strong_nonseparability, encode, find_hard_set
from .game import GameSolution, family_value
from .universe import (
    Domain,
    HypothesisClass,
    LabeledExample,
    MetaDistribution,
    MetaFamily,
    MultiSample,
    UniverseMismatch,
    consistent_classes,
    meta_loss,
)


class NonRealizableSample(RuntimeError):
    """No class of the family is consistent with every row of the sample."""


class OutsideFamily(ValueError):
    pass


class ErmPolicy(enum.Enum):
    WORST = "worst-case"
    BEST = "best-case"
    UNIFORM = "uniform-random"
    FIRST = "first-consistent"

    @property
    def requires_target(self) -> bool:
        return self in (ErmPolicy.WORST, ErmPolicy.BEST)

    @classmethod
    def parse(cls, value) -> "ErmPolicy":
        if isinstance(value, cls):
            return value
        aliases = {"worst": cls.WORST, "best": cls.BEST, "uniform": cls.UNIFORM,
                   "random": cls.UNIFORM, "first": cls.FIRST}
        if value in aliases:
            return aliases[value]
        return cls(value)


@dataclass(frozen=True)
class SurfaceEstimate:
    n: int
    m: int
    mean: float
    ci_low: float
    ci_high: float
    reps: int
    seed: int
    std_err: float
    policy: str = ErmPolicy.WORST.value


@dataclass(frozen=True)
class BoundParams:
    d: int
    family_size: int
    c: float = 1.0

    def __post_init__(self):
        if self.d < 0 or self.family_size < 1 or not self.c > 0:
            raise ValueError(f"invalid bound parameters {self}")

    @classmethod
    def for_family(cls, F: MetaFamily, c: float = 1.0) -> "BoundParams":
        from .combinatorics import family_vc
        return cls(family_vc(F), len(F), c)


# -- random streams ------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def rep_rng(seed: int, rep: int) -> np.random.Generator:
    """Counter-based stream for replicate ``rep``.

    Philox keyed by ``seed`` with ``rep`` in the third counter word: each
    replicate owns a disjoint counter range, so replicates can be computed in
    any order or on any worker.
    """
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64, counter=[0, 0, int(rep), 0]))


def seed_rng(seed: int) -> np.random.Generator:
    return rep_rng(seed, 0)


def rep_uniforms(seed: int, reps: range, width: int) -> np.ndarray:
    """``(len(reps), width)`` uniforms; row ``i`` is the start of ``rep_rng(seed, reps[i])``.

    Reuses one bit generator and resets its counter per replicate, which is
    several times cheaper than building a generator per replicate.
    """
    bg = np.random.Philox(key=int(seed) & _MASK64)
    gen = np.random.Generator(bg)
    state = bg.state
    out = np.empty((len(reps), width))
    for i, r in enumerate(reps):
        state["state"]["counter"] = np.array([0, 0, r, 0], dtype=np.uint64)
        state["buffer_pos"] = 4
        state["has_uint32"] = 0
        bg.state = state
        out[i] = gen.random(width)
    return out


# -- sampling tables -------------------------------------------------------------


class _Sampler:
    """Float lookup tables for drawing from a meta-distribution.

    One replicate consumes ``width(n, m, T)`` uniforms: ``n`` for domains,
    ``n*m`` (or ``n*T``) for examples, ``n*T`` more for the three-stage
    subset, and a final one for tie-breaking draws.
    """

    def __init__(self, Q: MetaDistribution):
        self.Q = Q
        w = np.array([float(p) for p in Q.weights])
        self.dom_cum = np.cumsum(w)
        self.dom_cum[-1] = np.inf
        width = max(len(D.atoms) for D in Q.domains)
        cum = np.full((len(Q.domains), width), np.inf)
        for d, D in enumerate(Q.domains):
            c = np.cumsum([float(p) for _, p in D.atoms])
            c[-1] = np.inf
            cum[d, : len(c)] = c
        self.atom_cum = cum

    @staticmethod
    def width(n: int, m: int, T: int | None = None) -> int:
        return n + (n * m if T is None else 2 * n * T) + 1

    def _atoms(self, dom: np.ndarray, u: np.ndarray) -> np.ndarray:
        cum = self.atom_cum[dom]  # (R, n, width)
        return (u[..., None] >= cum[:, :, None, :]).sum(-1)

    def from_uniforms(self, U: np.ndarray, n: int, m: int, T: int | None = None):
        """Domains ``(R, n)``, atom indices ``(R, n, m)`` and the spare uniform ``(R,)``."""
        R = U.shape[0]
        dom = np.searchsorted(self.dom_cum, U[:, :n], side="right")
        if T is None:
            atom = self._atoms(dom, U[:, n : n + n * m].reshape(R, n, m))
        else:
            if T < m:
                raise ValueError(f"block size T={T} is smaller than m={m}")
            block = self._atoms(dom, U[:, n : n + n * T].reshape(R, n, T))
            keys = U[:, n + n * T : n + 2 * n * T].reshape(R, n, T)
            pick = np.argsort(keys, axis=2, kind="stable")[:, :, :m]
            atom = np.take_along_axis(block, pick, axis=2)
        return dom, atom, U[:, -1]

    def draw(self, seed: int, rep: int, n: int, m: int, T: int | None = None):
        U = rep_uniforms(seed, range(rep, rep + 1), self.width(n, m, T))
        dom, atom, _ = self.from_uniforms(U, n, m, T)
        return dom[0], atom[0]

    def to_multisample(self, dom: np.ndarray, atom: np.ndarray) -> MultiSample:
        rows = []
        for d, row in zip(dom.tolist(), atom.tolist()):
            atoms = self.Q.domains[d].atoms
            rows.append(tuple(atoms[a][0] for a in row))
        return MultiSample(tuple(dom.tolist()), tuple(rows))


def sample_two_stage(Q: MetaDistribution, n: int, m: int, seed: int) -> MultiSample:
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    s = _Sampler(Q)
    return s.to_multisample(*s.draw(seed, 0, n, m))


def sample_three_stage(Q: MetaDistribution, n: int, m: int, T: int, seed: int) -> MultiSample:
    """Draw ``T`` examples per domain, then keep ``m`` of those positions without repetition."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    if T < m:
        raise ValueError(f"block size T={T} is smaller than m={m}")
    s = _Sampler(Q)
    return s.to_multisample(*s.draw(seed, 0, n, m, T))


# -- selection -----------------------------------------------------------------


def _ranks(losses: Sequence[Fraction]) -> np.ndarray:
    order = sorted(set(losses))
    return np.array([order.index(v) for v in losses], dtype=np.int64)


def _select(cons: np.ndarray, policy: ErmPolicy, ranks: np.ndarray | None, u: np.ndarray | None) -> np.ndarray:
    """Row-wise class choice from a boolean (reps, classes) consistency matrix."""
    if not cons.any(axis=1).all():
        raise NonRealizableSample("a sample has no consistent class; the meta-distribution is not realizable")
    if policy is ErmPolicy.FIRST:
        return cons.argmax(axis=1)
    if policy is ErmPolicy.WORST:
        return np.where(cons, ranks, -1).argmax(axis=1)
    if policy is ErmPolicy.BEST:
        return np.where(cons, -ranks, -(1 << 40)).argmax(axis=1)
    counts = cons.sum(axis=1)
    k = np.minimum((u * counts).astype(np.int64), counts - 1)
    csum = np.cumsum(cons, axis=1)
    return (csum > k[:, None]).argmax(axis=1)


def erm_select(policy, F: MetaFamily, S: MultiSample, Q: MetaDistribution | None = None,
               seed: int | None = None) -> int:
    policy = ErmPolicy.parse(policy)
    if policy.requires_target and Q is None:
        raise ValueError(f"policy {policy.value} needs the target meta-distribution")
    idx = consistent_classes(F, S)
    if not idx:
        raise NonRealizableSample("no class is consistent with every row")
    if policy is ErmPolicy.FIRST:
        return idx[0]
    if policy is ErmPolicy.UNIFORM:
        return idx[int(seed_rng(0 if seed is None else seed).integers(len(idx)))]
    losses = {i: meta_loss(F.classes[i], Q) for i in idx}
    if policy is ErmPolicy.WORST:
        return max(idx, key=lambda i: (losses[i], -i))
    return min(idx, key=lambda i: (losses[i], i))


# -- Monte Carlo -----------------------------------------------------------------


class _Engine:
    """Vectorized per-rep sampling plus class selection for one (F, Q) pair."""

    def __init__(self, F: MetaFamily, Q: MetaDistribution):
        if Q.max_point() >= F.K:
            raise UniverseMismatch("meta-distribution uses points outside the family's universe")
        self.K = F.K
        self.sampler = _Sampler(Q)
        width = self.sampler.atom_cum.shape[1]
        codes = np.zeros((len(Q.domains), width), dtype=np.int64)
        for d, D in enumerate(Q.domains):
            for a, (ex, _) in enumerate(D.atoms):
                codes[d, a] = encode([ex], F.K)
        self.atom_code = codes
        self.hyps = [np.array(H.masks, dtype=np.int64) for H in F.classes]
        self.losses = tuple(meta_loss(H, Q) for H in F.classes)
        self.loss_f = np.array([float(v) for v in self.losses])
        self.ranks = _ranks(self.losses)

    def consistency(self, codes: np.ndarray) -> np.ndarray:
        """Boolean array ``codes.shape + (classes,)``: class fits that row."""
        uniq, inv = np.unique(codes, return_inverse=True)
        full = (1 << self.K) - 1
        pos = (uniq & full)[:, None]
        neg = (uniq >> self.K)[:, None]
        table = np.empty((len(uniq), len(self.hyps)), dtype=bool)
        for c, h in enumerate(self.hyps):
            h = h[None, :]
            table[:, c] = (((h & pos) == pos) & ((h & neg) == 0)).any(axis=1)
        return table[inv.reshape(codes.shape)]

    def _codes(self, seed: int, reps: range, n: int, m: int, T: int | None):
        U = rep_uniforms(seed, reps, self.sampler.width(n, m, T))
        dom, atom, spare = self.sampler.from_uniforms(U, n, m, T)
        codes = np.bitwise_or.reduce(self.atom_code[dom[:, :, None], atom], axis=2)
        return self.consistency(codes).all(axis=1), spare

    def run(self, policy: ErmPolicy, n: int, m: int, seed: int, reps: range,
            T: int | None = None) -> np.ndarray:
        cons, spare = self._codes(seed, reps, n, m, T)
        return self.loss_f[_select(cons, policy, self.ranks, spare)]

    def consistent_sets(self, n: int, m: int, seed: int, reps: range, T: int | None = None) -> list[int]:
        cons, _ = self._codes(seed, reps, n, m, T)
        weights = np.array([1 << c for c in range(cons.shape[1])], dtype=np.int64)
        return (cons.astype(np.int64) @ weights).tolist()


def _chunk_size(engine: _Engine, n: int, m: int, T: int | None, cap: int) -> int:
    # keep the (reps, n, draws, atoms) comparison array near 4M cells
    cells = n * (m if T is None else T) * engine.sampler.atom_cum.shape[1]
    return max(1, min(cap, 4_000_000 // cells))


def _chunks(reps: int, size: int) -> list[range]:
    return [range(a, min(a + size, reps)) for a in range(0, reps, size)]


def _run_chunk(args):
    engine, policy, n, m, seed, chunk, T = args
    return engine.run(policy, n, m, seed, chunk, T)


def mc_values(F: MetaFamily, Q: MetaDistribution, policy, n: int, m: int, reps: int, seed: int,
              workers: int = 1, T: int | None = None, chunk: int = 4096) -> np.ndarray:
    """Per-replicate meta-loss of the selected class, in replicate order."""
    policy = ErmPolicy.parse(policy)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    engine = _Engine(F, Q)
    chunk = _chunk_size(engine, n, m, T, chunk)
    jobs = [(engine, policy, n, m, seed, c, T) for c in _chunks(reps, chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(j) for j in jobs]
    return np.concatenate(parts)


def summarize(values: np.ndarray, n: int, m: int, seed: int, policy: str) -> SurfaceEstimate:
    reps = len(values)
    vals = values.tolist()
    mean = math.fsum(vals) / reps
    if reps > 1:
        var = math.fsum((v - mean) ** 2 for v in vals) / (reps - 1)
    else:
        var = 0.0
    se = math.sqrt(var / reps)
    half = 1.96 * se
    return SurfaceEstimate(n, m, mean, mean - half, mean + half, reps, seed, se, policy)


def estimate_surface(F: MetaFamily, Q: MetaDistribution, policy, n: int, m: int, reps: int,
                     seed: int, workers: int = 1) -> SurfaceEstimate:
    """Monte Carlo mean of the selected class's meta-loss with a 95% normal CI.

    The mean uses an exactly rounded sum, so the result is bit-identical for
    any worker count.
    """
    policy = ErmPolicy.parse(policy)
    values = mc_values(F, Q, policy, n, m, reps, seed, workers)
    return summarize(values, n, m, seed, policy.value)


def surface_sweep(F: MetaFamily, Q: MetaDistribution, policy, ns: Sequence[int], ms: Sequence[int],
                  reps: int, seed: int, workers: int = 1) -> list[SurfaceEstimate]:
    return [estimate_surface(F, Q, policy, n, m, reps, seed, workers) for n in ns for m in ms]


# -- exact surface -----------------------------------------------------------------


def row_distribution(Q: MetaDistribution, m: int, K: int, exact: bool = True) -> dict:
    """Exact law of the set of distinct examples in one row, as encoded sets.

    For a domain with atom probabilities ``p``, the chance that ``m`` draws
    show exactly the atoms in ``A`` is ``sum_{B <= A} (-1)^{|A|-|B|} p(B)^m``.
    With ``exact=False`` the same recursion runs in floating point, which
    keeps large ``m`` cheap.
    """
    work = sum(3 ** len(D.atoms) for D in Q.domains)
    check_budget(work, "row distribution")
    out: dict[int, Fraction] = defaultdict(Fraction)
    for D, q in Q.atoms:
        num = Fraction if exact else float
        probs = [num(p) for _, p in D.atoms]
        q = num(q)
        codes = [encode([e], K) for e, _ in D.atoms]
        k = len(probs)
        mass = [num(0)] * (1 << k)
        for A in range(1, 1 << k):
            low = A & -A
            mass[A] = mass[A ^ low] + probs[low.bit_length() - 1]
        power = [p ** m for p in mass]
        for A in range(1, 1 << k):
            if bin(A).count("1") > m:
                continue
            total = num(0)
            B = A
            while True:
                sign = -1 if (bin(A).count("1") - bin(B).count("1")) % 2 else 1
                total += sign * power[B]
                if B == 0:
                    break
                B = (B - 1) & A
            if total:
                code = 0
                for i in range(k):
                    if A >> i & 1:
                        code |= codes[i]
                out[code] += q * total
    return dict(out)


def _class_mask(F: MetaFamily, code: int) -> int:
    from .combinatorics import fits
    mask = 0
    for c, H in enumerate(F.classes):
        if any(fits(h, code, F.K) for h in H.masks):
            mask |= 1 << c
    return mask


def consistent_set_distribution(F: MetaFamily, Q: MetaDistribution, n: int, m: int,
                                exact: bool = True) -> dict:
    """Exact law of the consistent-class set (as a bitmask over classes)."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    if Q.max_point() >= F.K:
        raise UniverseMismatch("meta-distribution uses points outside the family's universe")
    per_mask: dict = defaultdict(int)
    for code, p in row_distribution(Q, m, F.K, exact).items():
        per_mask[_class_mask(F, code)] += p
    limit = enumeration_budget()
    state = {(1 << len(F)) - 1: Fraction(1) if exact else 1.0}
    # square-and-multiply over the semigroup of mask distributions under AND
    def combine(a, b):
        out = defaultdict(int)
        for ma, pa in a.items():
            for mb, pb in b.items():
                out[ma & mb] += pa * pb
        if len(out) > limit:
            raise BudgetExceeded("consistent-set distribution outgrew the budget")
        return dict(out)
    base = dict(per_mask)
    k = n
    while k:
        if k & 1:
            state = combine(state, base)
        k >>= 1
        if k:
            base = combine(base, base)
    return state


def _policy_value(policy: ErmPolicy, mask: int, losses: Sequence[Fraction]) -> Fraction:
    members = [i for i in range(len(losses)) if mask >> i & 1]
    if not members:
        raise NonRealizableSample("a sample with positive probability has no consistent class")
    if policy is ErmPolicy.WORST:
        return max(losses[i] for i in members)
    if policy is ErmPolicy.BEST:
        return min(losses[i] for i in members)
    if policy is ErmPolicy.FIRST:
        return losses[members[0]]
    return sum((losses[i] for i in members), Fraction(0)) / len(members)


def exact_surface(F: MetaFamily, Q: MetaDistribution, policy, n: int, m: int) -> Fraction:
    """Exact expected meta-loss of the selected class over ``S ~ Q^(n, m)``."""
    policy = ErmPolicy.parse(policy)
    losses = tuple(meta_loss(H, Q) for H in F.classes)
    dist = consistent_set_distribution(F, Q, n, m)
    return sum((p * _policy_value(policy, mask, losses) for mask, p in dist.items() if p), Fraction(0))


def expected_surface(F: MetaFamily, Q: MetaDistribution, policy, n: int, m: int) -> float:
    """``exact_surface`` evaluated in floating point, for large ``n`` and ``m``."""
    policy = ErmPolicy.parse(policy)
    losses = tuple(meta_loss(H, Q) for H in F.classes)
    dist = consistent_set_distribution(F, Q, n, m, exact=False)
    return math.fsum(p * float(_policy_value(policy, mask, losses)) for mask, p in dist.items() if p)


# -- adversarial constructions -------------------------------------------------------


def build_easy_metadist(F: MetaFamily) -> MetaDistribution:
    """Point mass on the point-mass domain of an example every class can fit."""
    flag = check_strong_nonseparability(F)
    if not flag.holds:
        raise ValueError("no example is realizable by every class (strong non-separability check failed)")
    return MetaDistribution.point_mass(Domain.point_mass(*flag.witness))


def build_mixture(Q_A: MetaDistribution, Q_0: MetaDistribution, p) -> MetaDistribution:
    """``p * Q_A + (1 - p) * Q_0`` with identical domains merged."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("mixture weight must lie in [0, 1]")
    weights: dict[Domain, Fraction] = {}
    for Q, scale in ((Q_A, p), (Q_0, 1 - p)):
        if scale == 0:
            continue
        for D, w in Q.atoms:
            weights[D] = weights.get(D, Fraction(0)) + scale * w
    return MetaDistribution(tuple(weights.items()))


def build_hard_metadist(H: HypothesisClass, F: MetaFamily, eps, m: int) -> MetaDistribution | None:
    S = find_hard_set(H, F, eps, m)
    if S is None:
        return None
    return MetaDistribution.point_mass(Domain.uniform(S))


def random_realizable_metadist(F: MetaFamily, rng: np.random.Generator, max_domains: int = 3,
                               max_weight: int = 4) -> MetaDistribution:
    """A random meta-distribution realized by one randomly chosen class.

    Each domain sits on the graph of some hypothesis of that class, over a
    random nonempty set of points, with small integer weights.
    """
    H = F.classes[int(rng.integers(len(F)))]
    parts: dict[Domain, Fraction] = {}
    for _ in range(int(rng.integers(1, max_domains + 1))):
        h = H.hypotheses[int(rng.integers(len(H)))]
        size = int(rng.integers(1, F.K + 1))
        pts = sorted(int(x) for x in rng.choice(F.K, size=size, replace=False))
        w = rng.integers(1, max_weight + 1, size=size)
        total = int(w.sum())
        D = Domain(tuple((LabeledExample(x, h(x)), Fraction(int(v), total)) for x, v in zip(pts, w)))
        parts[D] = parts.get(D, Fraction(0)) + int(rng.integers(1, max_weight + 1))
    total = sum(parts.values())
    return MetaDistribution(tuple((D, w / total) for D, w in parts.items()))


# -- learners ------------------------------------------------------------------------


def _singleton_index(F: MetaFamily) -> dict[frozenset, int]:
    out = {}
    for i, H in enumerate(F.classes):
        if any(b == 0 or b & (b - 1) for b in H.masks):
            raise ValueError(f"class {H.name!r} is not a set of point indicators")
        out[frozenset(b.bit_length() - 1 for b in H.masks)] = i
    return out


def _compress(S: MultiSample, s: int, index: dict[frozenset, int]) -> int:
    if S.m != 1:
        raise ValueError("the compression learner reads one example per domain")
    W = frozenset(e.point for row in S.rows for e in row if e.label == 1) or frozenset({0})
    if len(W) > s:
        raise OutsideFamily(f"{len(W)} distinct positive points exceed the compression size {s}")
    if W not in index:
        raise OutsideFamily(f"no class for points {sorted(W)}")
    return index[W]


def compression_learner(S: MultiSample, s: int, F: MetaFamily) -> int:
    """Return the class of indicators over the distinct positive points seen.

    With no positive example the index of ``{1_0}`` is returned, mirroring
    the convention of sending negative rows to a fixed point.
    """
    return _compress(S, s, _singleton_index(F))


def compression_failure_rate(F: MetaFamily, Q: MetaDistribution, s: int, n: int, eps,
                             reps: int, seed: int) -> tuple[float, float]:
    """Monte Carlo probability that the compression learner's meta-loss is >= eps.

    Returns ``(rate, standard error)``.  A learner error (too many positives)
    counts as a failure.
    """
    eps = Fraction(eps)
    sampler = _Sampler(Q)
    index = _singleton_index(F)
    losses: dict[int, Fraction] = {}
    fails = 0
    for c in _chunks(reps, 4096):
        dom, atom, _ = sampler.from_uniforms(rep_uniforms(seed, c, sampler.width(n, 1)), n, 1)
        for d, a in zip(dom, atom):
            try:
                i = _compress(sampler.to_multisample(d, a), s, index)
            except OutsideFamily:
                fails += 1
                continue
            if i not in losses:
                losses[i] = meta_loss(F.classes[i], Q)
            fails += losses[i] >= eps
    rate = fails / reps
    return rate, math.sqrt(max(rate * (1 - rate), 0.0) / reps)


def compression_envelope(n: int, p: int, eps) -> float:
    """``binom(n, p) * (1 - eps)^(n - p)``."""
    return math.comb(n, p) * (1 - float(eps)) ** (n - p)


def oblivious_minimax_learner(F: MetaFamily, seed: int, solution: GameSolution | None = None) -> int:
    """Draw a class from the minimax mixture, ignoring all data."""
    solution = solution or family_value(F)
    w = np.array([float(v) for v in solution.minimax.weights])
    return int(seed_rng(seed).choice(len(w), p=w / w.sum()))


# -- bounds and diagnostics -------------------------------------------------------------


def upper_bound_curve(params: BoundParams, n: int, m: int) -> float:
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    d, size, c = params.d, params.family_size, params.c
    vc_term = d * math.log(max(m / d, math.e)) if d > 0 else 0.0
    value = 8 * c * (vc_term + math.log(size)) / m + 2 * math.log(size) / n
    return min(1.0, value)


def fit_rate(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares line through ``(log n, log value)``: returns (slope, intercept)."""
    if len(points) < 3:
        raise ValueError("need at least three points")
    xs = np.array([float(n) for n, _ in points])
    ys = np.array([float(v) for _, v in points])
    if (ys <= 0).any() or (xs <= 0).any():
        raise ValueError("rate fitting needs positive n and values")
    slope, const = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope), float(const)


# -- sampler equivalence ------------------------------------------------------------------


def consistent_set_counts(F: MetaFamily, Q: MetaDistribution, n: int, m: int, reps: int, seed: int,
                          T: int | None = None) -> Counter:
    engine = _Engine(F, Q)
    out: Counter = Counter()
    for c in _chunks(reps, _chunk_size(engine, n, m, T, 4096)):
        out.update(engine.consistent_sets(n, m, seed, c, T))
    return out


def compare_samplers(F: MetaFamily, Q: MetaDistribution, n: int, m: int, T: int, reps: int,
                     seed: int) -> float:
    """Chi-square p-value for equal consistent-set laws under two- and three-stage sampling."""
    from scipy.stats import chi2_contingency

    two = consistent_set_counts(F, Q, n, m, reps, seed)
    three = consistent_set_counts(F, Q, n, m, reps, seed + 1, T)
    cats = sorted(set(two) | set(three))
    if len(cats) < 2:
        return 1.0
    table = np.array([[two.get(c, 0) for c in cats], [three.get(c, 0) for c in cats]])
    return float(chi2_contingency(table)[1])

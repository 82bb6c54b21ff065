"""Self-checks that tie the exact oracles, the Monte Carlo engine and the bounds together.

Each check returns a ``CheckResult`` carrying what was measured and the
tolerance it was held to.  A suite passes only if every check passes.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .combinatorics import (
    candidate_epsilons,
    check_no_pairwise_domination,
    check_strong_nonseparability,
    check_weak_nonseparability,
    eps_dual_helly_family,
    family_vc,
    optimal_error_curve,
)
from .game import family_value, payoff
from .generators import (
    full_class,
    gen_halfspace_family,
    gen_near_complete_family,
    gen_random_family,
    gen_singleton_family,
    pair_singleton_family,
    random_halfspace_instance,
    threshold_class,
)
from .simulate import (
    BoundParams,
    build_hard_metadist,
    compare_samplers,
    compression_envelope,
    compression_failure_rate,
    consistent_set_distribution,
    estimate_surface,
    exact_surface,
    expected_surface,
    fit_rate,
    random_realizable_metadist,
    upper_bound_curve,
)
from .universe import Domain, HypothesisClass, MetaDistribution, MetaFamily

SUITES = ("dichotomy", "lower-bound", "upper-bound", "equivalence", "halfspace")


@dataclass(frozen=True)
class CheckResult:
    name: str
    claim: str
    passed: bool
    measured: dict = field(default_factory=dict)
    tolerance: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.claim} ({self.seconds:.1f}s)"


@dataclass(frozen=True)
class VerifyReport:
    suite: str
    seed: int
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _timed(fn: Callable[..., CheckResult]) -> Callable[..., CheckResult]:
    def run(*args, **kwargs) -> CheckResult:
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        return CheckResult(res.name, res.claim, res.passed, res.measured, res.tolerance,
                           time.perf_counter() - t0)
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _q(x) -> str:
    return str(Fraction(x))


def pair_singleton_metadist(p) -> MetaDistribution:
    """``(1 - p) * delta(2, 0) + p * delta(0, 1)`` on the pair-singleton universe."""
    p = Fraction(p)
    parts = [(Domain.point_mass(2, 0), 1 - p), (Domain.point_mass(0, 1), p)]
    return MetaDistribution(tuple((D, w) for D, w in parts if w))


# -- lower bound in n ---------------------------------------------------------------


@_timed
def check_exact_surface_law(seed: int = 0, reps: int = 100_000, ns=range(1, 13), workers: int = 1) -> CheckResult:
    F = pair_singleton_family()
    mismatches, worst_z = [], 0.0
    for n in ns:
        for p in (Fraction(1, 4), Fraction(1, 2), Fraction(1, n + 1)):
            Q = pair_singleton_metadist(p)
            exact = exact_surface(F, Q, "worst", n, 1)
            if exact != p * (1 - p) ** n:
                mismatches.append((n, _q(p), _q(exact)))
            est = estimate_surface(F, Q, "worst", n, 1, reps, seed + n, workers)
            gap = abs(est.mean - float(exact))
            z = gap / est.std_err if est.std_err > 0 else (0.0 if gap == 0 else math.inf)
            worst_z = max(worst_z, z)
    ok = not mismatches and worst_z <= 3
    return CheckResult("exact-surface-law", "worst-case error on the pair-singleton family is p(1-p)^n",
                       ok, {"rational_mismatches": mismatches, "max_z": worst_z, "reps": reps},
                       {"rational": "equal", "z": 3})


@_timed
def check_lower_bound_rate(ns=range(1, 21)) -> CheckResult:
    F = pair_singleton_family()
    v = family_value(F).value
    below, pts = [], []
    for n in ns:
        p = Fraction(1, n + 1)
        e = exact_surface(F, pair_singleton_metadist(p), "worst", n, 1)
        if e < v / (8 * n):
            below.append(n)
        pts.append((n, float(e)))
    slope, _ = fit_rate(pts)
    ok = v == Fraction(1, 2) and not below and -1.2 <= slope <= -0.8
    return CheckResult("lower-bound-rate", "worst-case error stays above v/(8n) and decays like 1/n", ok,
                       {"value": _q(v), "below_bound_at": below, "slope": slope},
                       {"slope": [-1.2, -0.8]})


def single_class_families() -> list[MetaFamily]:
    rng = np.random.default_rng(11)
    fams = [MetaFamily.of(threshold_class(4)), MetaFamily.of(full_class(3)),
            MetaFamily.of(HypothesisClass.from_strings("H", ["100"]))]
    for i in range(3):
        fams.append(gen_random_family(int(rng.integers(2, 5)), 1, int(rng.integers(1, 5)), 100 + i))
    return fams


@_timed
def check_game_values(seed: int = 0, samples: int = 10_000) -> CheckResult:
    named = [("pair-singleton", pair_singleton_family(), Fraction(1, 2)),
             ("near-complete-4", gen_near_complete_family(4), Fraction(1, 5))]
    named += [(f"single-{i}", F, Fraction(0)) for i, F in enumerate(single_class_families())]
    values, exceed = {}, {}
    ok = True
    rng = np.random.default_rng(seed)
    for name, F, expected in named:
        sol = family_value(F)
        gap = sol.upper_bounds[-1] - sol.lower_bounds[-1]
        values[name] = _q(sol.value)
        ok &= sol.value == expected and gap == 0
        if name.startswith("single") and name != "single-0":
            continue
        worst = Fraction(0)
        for _ in range(samples):
            Q = random_realizable_metadist(F, rng)
            val = sum((w * payoff(F, sol.minimax, D) for D, w in Q.atoms), Fraction(0))
            worst = max(worst, val)
        exceed[name] = _q(worst)
        ok &= worst <= sol.value
    return CheckResult("game-values", "family values are 1/2, 1/5 and 0 and no random adversary beats them",
                       ok, {"values": values, "max_random_payoff": exceed, "samples": samples},
                       {"values": "exact", "duality_gap": 0})


@_timed
def check_triviality() -> CheckResult:
    pair = pair_singleton_family()
    disjoint = MetaFamily.of(HypothesisClass.from_strings("A", ["10"]), HypothesisClass.from_strings("B", ["01"]))
    T = threshold_class(3)
    extra = HypothesisClass("T+h", T.hypotheses + (HypothesisClass.from_strings("x", ["010"]).hypotheses[0],))
    dominated = MetaFamily.of(T, extra)
    got = {
        "pair": [check_weak_nonseparability(pair).holds, check_no_pairwise_domination(pair).holds,
                 check_strong_nonseparability(pair).holds],
        "disjoint": [check_weak_nonseparability(disjoint).holds, check_strong_nonseparability(disjoint).holds],
        "dominated": check_no_pairwise_domination(dominated).holds,
    }
    ok = got["pair"] == [True, True, True] and got["disjoint"] == [False, False] and got["dominated"] is False
    return CheckResult("non-triviality", "checkers accept pair-singleton, reject disjoint and dominated families",
                       ok, got, {"exact": True})


# -- dichotomy ------------------------------------------------------------------------


@_timed
def check_finite_side(seed: int = 0, reps: int = 10_000, n: int = 200, workers: int = 1) -> CheckResult:
    F = pair_singleton_family()
    m0 = eps_dual_helly_family(F, 0).value
    est = estimate_surface(F, pair_singleton_metadist(Fraction(1, 2)), "worst", n, 1, reps, seed, workers)
    ok = m0 == 1 and est.mean <= 1e-3
    return CheckResult("finite-dual-helly", "finite dual Helly number gives vanishing error at m=1", ok,
                       {"m_F(0)": m0, "mean": est.mean, "n": n, "reps": reps}, {"mean": 1e-3})


@_timed
def check_infinite_side(ns=(1, 10, 100)) -> CheckResult:
    F = gen_near_complete_family(4)
    curve = optimal_error_curve(F, 6)
    want = [1, Fraction(1, 4), Fraction(1, 4), Fraction(1, 4), 0, 0, 0]
    Q = build_hard_metadist(F.classes[0], F, Fraction(1, 5), 3)
    errs = {n: exact_surface(F, Q, "worst", n, 3) for n in ns} if Q is not None else {}
    ok = (list(curve.values) == want and curve(3) == Fraction(1, 3 + 1) and Q is not None
          and all(e >= Fraction(1, 4) for e in errs.values()) and len(set(errs.values())) == 1)
    return CheckResult("near-complete-curve", "error curve (1,1/4,1/4,1/4,0,...) and an n-independent hard case",
                       ok, {"curve": [_q(v) for v in curve.values], "hard_errors": {n: _q(e) for n, e in errs.items()}},
                       {"exact": True, "hard_error_min": "1/4"})


def characterization_families(seed: int = 0, count: int = 20) -> list[MetaFamily]:
    """Random families with ``K <= 5``, at most three classes and six hypotheses per class."""
    rng = np.random.default_rng([seed, 5])
    out = []
    for i in range(count):
        K = int(rng.integers(3, 6))
        classes = int(rng.integers(1, 4))
        hyps = int(rng.integers(1, 7))
        out.append(gen_random_family(K, classes, hyps, seed * 1000 + i))
    return out


@dataclass
class _Case:
    family: MetaFamily
    curve: object
    hard: dict  # m -> list[(eps, Q)]
    random: list


def characterization_cases(seed: int = 0, count: int = 20, ms=range(1, 5), random_qs: int = 3) -> list[_Case]:
    cases = []
    rng = np.random.default_rng([seed, 7])
    for F in characterization_families(seed, count):
        curve = optimal_error_curve(F, max(ms))
        grid = candidate_epsilons(F)
        hard = {}
        for m in ms:
            hard[m] = []
            for eps in grid:
                if eps >= curve(m):
                    continue
                Q = None
                for H in F.classes:
                    Q = build_hard_metadist(H, F, eps, m)
                    if Q is not None:
                        break
                hard[m].append((eps, Q))
        cases.append(_Case(F, curve, hard, [random_realizable_metadist(F, rng) for _ in range(random_qs)]))
    return cases


@_timed
def check_characterization(seed: int = 0, n: int = 500, reps: int = 400, slack: float = 0.02,
                           workers: int = 1, cases=None) -> CheckResult:
    cases = cases if cases is not None else characterization_cases(seed)
    missing, not_hard, too_high = [], [], []
    tested = 0
    for fi, case in enumerate(cases):
        F = case.family
        for m, items in case.hard.items():
            target = case.curve(m)
            cache: dict = {}
            qs = [Q for _, Q in items if Q is not None] + case.random
            for eps, Q in items:
                if Q is None:
                    missing.append((fi, m, _q(eps)))
                    continue
                if Q not in cache:
                    cache[Q] = estimate_surface(F, Q, "worst", n, m, reps, seed + fi, workers)
                est = cache[Q]
                if not est.mean - 3 * est.std_err > float(eps):
                    not_hard.append((fi, m, _q(eps), est.mean))
            for Q in qs:
                if Q not in cache:
                    cache[Q] = estimate_surface(F, Q, "worst", n, m, reps, seed + fi, workers)
                tested += 1
                if cache[Q].mean > float(target) + slack:
                    too_high.append((fi, m, _q(target), cache[Q].mean))
    ok = not missing and not not_hard and not too_high
    return CheckResult("characterization", "limit error in m equals the optimal error function", ok,
                       {"families": len(cases), "tested": tested, "no_hard_set": missing,
                        "hard_case_too_easy": not_hard, "above_curve": too_high},
                       {"sigma": 3, "slack": slack, "n": n, "reps": reps})


@_timed
def check_compression(seed: int = 0, reps: int = 10_000, ns=(5, 10, 20, 40)) -> CheckResult:
    F = gen_singleton_family(10, 3)
    third = Fraction(1, 3)
    Q = MetaDistribution(tuple((Domain.point_mass(x, 1), third) for x in (2, 5, 8)))
    rows, ok = {}, True
    for n in ns:
        rate, se = compression_failure_rate(F, Q, 3, n, third, reps, seed + n)
        env = compression_envelope(n, 3, third)
        rows[n] = {"rate": rate, "se": se, "envelope": env}
        ok &= rate <= env + 3 * se
    return CheckResult("compression-learner", "failure rate of the compression learner is under its envelope",
                       ok, rows, {"sigma": 3})


# -- upper bound ----------------------------------------------------------------------


@_timed
def check_upper_envelope(seed: int = 0, cases=None, ns=(10, 100, 500),
                         ms=(1, 2, 3, 4, 16, 64, 256, 1024)) -> CheckResult:
    cases = cases if cases is not None else characterization_cases(seed)
    checked, violations = 0, []
    for fi, case in enumerate(cases):
        F = case.family
        params = BoundParams.for_family(F, 1.0)
        qs = list(dict.fromkeys([Q for items in case.hard.values() for _, Q in items if Q is not None]
                                + case.random))
        for n in ns:
            for m in ms:
                bound = upper_bound_curve(params, n, m)
                if bound >= 1:
                    continue
                for Q in qs:
                    err = expected_surface(F, Q, "worst", n, m)
                    checked += 1
                    if err > bound:
                        violations.append((fi, n, m, err, bound))
    ok = not violations and checked > 0
    return CheckResult("upper-envelope", "worst-case error stays under the closed-form upper bound (c=1)", ok,
                       {"points_checked": checked, "violations": violations}, {"c": 1.0})


# -- sampler equivalence ------------------------------------------------------------


def equivalence_instances(seed: int = 0) -> list[tuple]:
    """Five (family, meta-distribution, n, m, T) instances with several consistent-set outcomes."""
    out = [(pair_singleton_family(), pair_singleton_metadist(Fraction(1, 2)), 3, 1, 2)]
    F = gen_near_complete_family(3)
    Q = MetaDistribution(((Domain.uniform([(0, 1), (1, 1), (2, 1)]), Fraction(1, 2)),
                          (Domain.uniform([(0, 0), (1, 1)]), Fraction(1, 2))))
    out.append((F, Q, 2, 2, 3))
    shapes = [(2, 1, 3), (3, 2, 4), (2, 3, 5)]
    i = 0
    while len(out) < 5:
        n, m, T = shapes[len(out) - 2]
        G = gen_random_family(4, 3, 5, seed * 100 + 40 + i)
        Q = random_realizable_metadist(G, np.random.default_rng([seed, 9, i]))
        i += 1
        # skip instances whose consistent set is (almost surely) constant
        if len(consistent_set_distribution(G, Q, n, m)) >= 2:
            out.append((G, Q, n, m, T))
    return out


@_timed
def check_sampler_equivalence(seed: int = 0, reps: int = 10_000, alpha: float = 1e-3) -> CheckResult:
    pvals = []
    for i, (F, Q, n, m, T) in enumerate(equivalence_instances(seed)):
        pvals.append(compare_samplers(F, Q, n, m, T, reps, seed + 2 * i))
    ok = all(p > alpha for p in pvals)
    return CheckResult("sampler-equivalence", "two- and three-stage sampling give the same consistent-set law",
                       ok, {"p_values": pvals, "reps": reps}, {"p_min": alpha})


# -- half-spaces ---------------------------------------------------------------------


@_timed
def check_halfspace(seed: int = 2024, count: int = 100) -> CheckResult:
    rng = np.random.default_rng(seed)
    bad = []
    for i in range(count):
        d = int(rng.integers(2, 4))
        pts, normals = random_halfspace_instance(rng, d, int(rng.integers(3, 11)), int(rng.integers(1, 4)), 3)
        F = gen_halfspace_family(pts, normals)
        vc = family_vc(F)
        m0 = eps_dual_helly_family(F, 0).value
        if vc > d + 1 or m0 > d + 2:
            bad.append({"instance": i, "dim": d, "vc": vc, "m_F(0)": m0, "points": pts, "normals": normals})
    return CheckResult("halfspace", "half-space families have VC <= d+1 and m_F(0) <= d+2", not bad,
                       {"instances": count, "violations": bad}, {"exact": True})


# -- suites ----------------------------------------------------------------------------


def run_suite(suite: str, seed: int = 0, workers: int = 1) -> VerifyReport:
    if suite == "lower-bound":
        checks = [check_exact_surface_law(seed, workers=workers), check_lower_bound_rate(),
                  check_game_values(seed), check_triviality()]
    elif suite == "dichotomy":
        checks = [check_finite_side(seed, workers=workers), check_infinite_side(),
                  check_characterization(seed, workers=workers), check_compression(seed)]
    elif suite == "upper-bound":
        checks = [check_upper_envelope(seed)]
    elif suite == "equivalence":
        checks = [check_sampler_equivalence(seed)]
    elif suite == "halfspace":
        checks = [check_halfspace(seed)]
    else:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES}")
    return VerifyReport(suite, seed, tuple(checks))

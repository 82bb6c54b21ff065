import itertools
import math
from collections import Counter, defaultdict
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import families, family_and_metadist, q_p
from metasurface.budget import BudgetExceeded
from metasurface.combinatorics import candidate_epsilons, find_hard_set
from metasurface.game import family_value
from metasurface.generators import gen_random_family, gen_singleton_family, threshold_class
from metasurface.simulate import (
    BoundParams,
    ErmPolicy,
    NonRealizableSample,
    OutsideFamily,
    build_easy_metadist,
    build_hard_metadist,
    build_mixture,
    compare_samplers,
    compression_envelope,
    compression_failure_rate,
    compression_learner,
    erm_select,
    estimate_surface,
    exact_surface,
    expected_surface,
    fit_rate,
    mc_values,
    oblivious_minimax_learner,
    random_realizable_metadist,
    rep_rng,
    rep_uniforms,
    sample_three_stage,
    sample_two_stage,
    upper_bound_curve,
)
from metasurface.universe import (
    Domain,
    HypothesisClass,
    MetaDistribution,
    MetaFamily,
    MultiSample,
    consistent_classes,
    meta_loss,
    set_loss,
)

POLICIES = list(ErmPolicy)


def brute_surface(F, Q, policy, n, m):
    """Enumerate every (domain, m examples) row and every n-tuple of rows."""
    rows = defaultdict(Fraction)
    for d, (D, q) in enumerate(Q.atoms):
        for draw in itertools.product(D.atoms, repeat=m):
            p = q
            for _, a in draw:
                p *= a
            rows[(d, tuple(e for e, _ in draw))] += p
    losses = [meta_loss(H, Q) for H in F.classes]
    total = Fraction(0)
    for combo in itertools.product(rows.items(), repeat=n):
        p = Fraction(1)
        for _, w in combo:
            p *= w
        S = MultiSample(tuple(r[0] for r, _ in combo), tuple(r[1] for r, _ in combo))
        idx = consistent_classes(F, S)
        vals = [losses[i] for i in idx]
        if policy is ErmPolicy.WORST:
            v = max(vals)
        elif policy is ErmPolicy.BEST:
            v = min(vals)
        elif policy is ErmPolicy.FIRST:
            v = vals[0]
        else:
            v = sum(vals) / len(vals)
        total += p * v
    return total


# -- sampling ------------------------------------------------------------------------


def test_point_mass_sample():
    Q = MetaDistribution.point_mass(Domain.point_mass(0, 1))
    S = sample_two_stage(Q, 2, 3, seed=5)
    assert S.rows == (((0, 1),) * 3,) * 2
    assert sample_three_stage(Q, 2, 2, 4, seed=5).rows == (((0, 1),) * 2,) * 2


def test_sampling_is_deterministic():
    Q = q_p(Fraction(1, 3))
    assert sample_two_stage(Q, 5, 2, seed=11) == sample_two_stage(Q, 5, 2, seed=11)
    assert sample_three_stage(Q, 5, 2, 3, seed=11) == sample_three_stage(Q, 5, 2, 3, seed=11)
    assert sample_two_stage(Q, 50, 2, seed=11) != sample_two_stage(Q, 50, 2, seed=12)


def test_domain_frequencies_within_3_sigma():
    Q = MetaDistribution(((Domain.point_mass(0, 1), Fraction(1, 5)), (Domain.point_mass(1, 0), Fraction(3, 10)),
                          (Domain.uniform([(2, 1), (0, 1)]), Fraction(1, 2))))
    reps = 10_000
    S = sample_two_stage(Q, reps, 1, seed=3)
    counts = Counter(S.domains_drawn)
    for d, w in enumerate(Q.weights):
        w = float(w)
        assert abs(counts[d] / reps - w) <= 3 * math.sqrt(w * (1 - w) / reps)
    S.check_support(Q)


def test_three_stage_rejects_small_block():
    with pytest.raises(ValueError):
        sample_three_stage(q_p(Fraction(1, 2)), 2, 3, 2, seed=0)


def test_three_stage_with_full_block_matches_two_stage_law(near4):
    Q = MetaDistribution(((Domain.uniform([(0, 1), (1, 1), (2, 1), (3, 1)]), Fraction(1, 2)),
                          (Domain.uniform([(0, 0), (1, 1)]), Fraction(1, 2))))
    assert compare_samplers(near4, Q, 2, 2, 2, 10_000, seed=4) > 1e-3


def test_rep_streams_are_counter_based():
    U = rep_uniforms(9, range(5, 9), 6)
    for i, r in enumerate(range(5, 9)):
        assert np.array_equal(U[i], rep_rng(9, r).random(6))
    # order independence: a sub-range gives the same rows
    assert np.array_equal(rep_uniforms(9, range(7, 8), 6)[0], U[2])


# -- selection -------------------------------------------------------------------------


def test_erm_select_examples(pair):
    Q = q_p(Fraction(1, 3))
    S = MultiSample((0, 0), (((2, 0),), ((2, 0),)))
    assert erm_select("worst", pair, S, Q) == 1
    assert erm_select("best", pair, S, Q) == 0
    assert erm_select("first", pair, S) == 0
    assert erm_select("uniform", pair, S, seed=1) == erm_select("uniform", pair, S, seed=1)
    with pytest.raises(NonRealizableSample):
        erm_select("worst", pair, MultiSample((0, 1), (((0, 1),), ((1, 1),))), Q)
    with pytest.raises(ValueError):
        erm_select("worst", pair, S)


def test_worst_ties_break_to_lowest_index():
    F = MetaFamily.of(HypothesisClass.from_strings("A", ["10"]), HypothesisClass.from_strings("B", ["11"]))
    Q = MetaDistribution.point_mass(Domain.point_mass(0, 1))
    S = MultiSample((0,), (((0, 1),),))
    assert erm_select("worst", F, S, Q) == 0 and erm_select("best", F, S, Q) == 0


# -- exact surface ---------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 5, 12])
@pytest.mark.parametrize("p", [Fraction(1, 4), Fraction(1, 2), Fraction(1, 7)])
def test_exact_surface_pair_law(pair, n, p):
    assert exact_surface(pair, q_p(p), "worst", n, 1) == p * (1 - p) ** n
    assert exact_surface(pair, q_p(p), "best", n, 1) == 0


def test_exact_surface_quarter(pair):
    assert exact_surface(pair, q_p(Fraction(1, 2)), "worst", 1, 1) == Fraction(1, 4)


def test_exact_surface_trivial_domain(pair):
    Q = MetaDistribution.point_mass(Domain.point_mass(2, 0))
    for policy in POLICIES:
        assert exact_surface(pair, Q, policy, 3, 2) == 0


def test_exact_surface_budget(monkeypatch, near4):
    monkeypatch.setenv("METASURFACE_BUDGET", "10")
    Q = MetaDistribution.point_mass(Domain.uniform([(0, 1), (1, 1), (2, 1), (3, 1)]))
    with pytest.raises(BudgetExceeded):
        exact_surface(near4, Q, "worst", 2, 2)


@settings(max_examples=40)
@given(family_and_metadist(max_K=3, max_classes=3, max_hyps=4), st.integers(1, 3), st.integers(1, 2),
       st.sampled_from(POLICIES))
def test_exact_surface_matches_enumeration(FQ, n, m, policy):
    F, Q = FQ
    support = sum(len(D.atoms) for D in Q.domains)
    if support ** (n * m) > 4000:
        n = 1
    assert exact_surface(F, Q, policy, n, m) == brute_surface(F, Q, policy, n, m)


@given(family_and_metadist(max_K=3, max_hyps=4), st.integers(1, 6), st.integers(1, 4))
def test_exact_surface_float_route_agrees(FQ, n, m):
    F, Q = FQ
    assert expected_surface(F, Q, "worst", n, m) == pytest.approx(float(exact_surface(F, Q, "worst", n, m)),
                                                                 abs=1e-12)


@given(family_and_metadist(max_K=3, max_hyps=4), st.integers(1, 5), st.integers(1, 3))
def test_worst_case_monotone_in_n_and_m(FQ, n, m):
    F, Q = FQ
    e = exact_surface(F, Q, "worst", n, m)
    assert exact_surface(F, Q, "worst", n + 1, m) <= e
    assert exact_surface(F, Q, "worst", n, m + 1) <= e
    assert exact_surface(F, Q, "best", n, m) <= e


# -- Monte Carlo -------------------------------------------------------------------------


def test_estimate_quarter(pair):
    est = estimate_surface(pair, q_p(Fraction(1, 2)), "worst", 1, 1, 100_000, seed=1)
    assert abs(est.mean - 0.25) <= 3 * est.std_err
    assert est.ci_low <= est.mean <= est.ci_high
    assert est.ci_high - est.mean == pytest.approx(1.96 * est.std_err)


def test_estimate_single_rep_reproducible(pair):
    a = estimate_surface(pair, q_p(Fraction(1, 2)), "worst", 3, 1, 1, seed=42)
    b = estimate_surface(pair, q_p(Fraction(1, 2)), "worst", 3, 1, 1, seed=42)
    assert a == b and a.ci_low == a.mean == a.ci_high


def test_estimate_trivial_is_zero(pair):
    Q = MetaDistribution.point_mass(Domain.point_mass(2, 0))
    assert estimate_surface(pair, Q, "first", 4, 2, 500, seed=0).mean == 0.0


def test_estimate_rejects_nonrealizable(pair):
    Q = MetaDistribution(((Domain.point_mass(0, 1), Fraction(1, 2)), (Domain.point_mass(1, 1), Fraction(1, 2))))
    with pytest.raises(NonRealizableSample):
        estimate_surface(pair, Q, "worst", 6, 1, 200, seed=0)


def test_workers_do_not_change_results(near4):
    Q = MetaDistribution(((Domain.uniform([(0, 1), (1, 1), (2, 1)]), Fraction(1, 2)),
                          (Domain.uniform([(0, 0), (3, 1)]), Fraction(1, 2))))
    a = mc_values(near4, Q, "worst", 5, 2, 3000, seed=8, workers=1, chunk=500)
    b = mc_values(near4, Q, "worst", 5, 2, 3000, seed=8, workers=3, chunk=500)
    c = mc_values(near4, Q, "worst", 5, 2, 3000, seed=8, workers=1, chunk=4096)
    assert np.array_equal(a, b) and np.array_equal(a, c)
    assert estimate_surface(near4, Q, "worst", 5, 2, 3000, 8, workers=1) == \
        estimate_surface(near4, Q, "worst", 5, 2, 3000, 8, workers=2)


def test_worst_dominates_best_per_sample(near4):
    Q = MetaDistribution(((Domain.uniform([(0, 1), (1, 1), (2, 1), (3, 1)]), Fraction(1, 3)),
                          (Domain.uniform([(1, 0), (2, 1)]), Fraction(2, 3))))
    worst = mc_values(near4, Q, "worst", 3, 2, 2000, seed=2)
    best = mc_values(near4, Q, "best", 3, 2, 2000, seed=2)
    assert (worst >= best).all()


@pytest.mark.parametrize("seed", range(6))
def test_estimate_matches_exact(seed):
    rng = np.random.default_rng(seed)
    F = gen_random_family(4, 3, 4, seed)
    Q = random_realizable_metadist(F, rng)
    for policy in POLICIES:
        est = estimate_surface(F, Q, policy, 3, 2, 20_000, seed)
        exact = float(exact_surface(F, Q, policy, 3, 2))
        assert abs(est.mean - exact) <= 4 * est.std_err + 1e-12


# -- constructions -------------------------------------------------------------------


def test_easy_metadist_examples(pair):
    assert build_easy_metadist(pair) == MetaDistribution.point_mass(Domain.point_mass(2, 0))
    with pytest.raises(ValueError):
        build_easy_metadist(MetaFamily.of(HypothesisClass.from_strings("A", ["10"]),
                                          HypothesisClass.from_strings("B", ["01"])))
    solo = MetaFamily.of(threshold_class(3))
    assert build_easy_metadist(solo) == MetaDistribution.point_mass(Domain.point_mass(0, 1))


def test_mixture_examples():
    QA, Q0 = q_p(Fraction(1, 2)), MetaDistribution.point_mass(Domain.point_mass(2, 0))
    assert build_mixture(QA, Q0, 0) == Q0
    assert build_mixture(QA, Q0, 1) == QA
    mix = build_mixture(QA, Q0, Fraction(1, 3))
    assert sum(mix.weights) == 1
    assert dict(mix.atoms)[Domain.point_mass(2, 0)] == Fraction(1, 3) * Fraction(1, 2) + Fraction(2, 3)
    with pytest.raises(ValueError):
        build_mixture(QA, Q0, Fraction(3, 2))


def test_hard_metadist_examples(pair, near4):
    Q = build_hard_metadist(near4[0], near4, Fraction(1, 5), 3)
    assert Q == MetaDistribution.point_mass(Domain.uniform([(x, 1) for x in range(4)]))
    assert meta_loss(near4[0], Q) == Fraction(1, 4)
    for n in (1, 4, 9):
        assert exact_surface(near4, Q, "worst", n, 3) >= Fraction(1, 4)
    assert build_hard_metadist(pair[0], pair, 0, 1) is None
    assert build_hard_metadist(near4[0], near4, 1, 0) is None


@given(families(max_K=3, max_hyps=4), st.integers(0, 3), st.data())
def test_hard_metadist_error_is_n_independent(F, m, data):
    eps = data.draw(st.sampled_from(candidate_epsilons(F)))
    H = data.draw(st.sampled_from(F.classes))
    S = find_hard_set(H, F, eps, m)
    if S is None or m == 0:
        return
    Q = build_hard_metadist(H, F, eps, m)
    floor = set_loss(H, S)
    assert floor > eps
    for n in (1, 2, 5):
        assert exact_surface(F, Q, "worst", n, m) >= floor


# -- learners ---------------------------------------------------------------------------


def test_compression_learner_examples():
    F = gen_singleton_family(8, 3)
    names = [H.name for H in F.classes]

    def run(points):
        rows = tuple(((x, 1),) for x in points) + (((6, 0),),)
        return names[compression_learner(MultiSample(tuple(range(len(rows))), rows), 3, F)]

    assert run([3]) == "X{3}"
    assert run([1, 5, 7, 5]) == "X{1,5,7}"
    assert run([]) == "X{0}"
    with pytest.raises(OutsideFamily):
        run([1, 2, 3, 4])


def test_compression_rate_under_envelope():
    F = gen_singleton_family(6, 2)
    Q = MetaDistribution(((Domain.point_mass(1, 1), Fraction(1, 2)), (Domain.point_mass(4, 1), Fraction(1, 2))))
    for n in (4, 8, 16):
        rate, se = compression_failure_rate(F, Q, 2, n, Fraction(1, 2), 2000, seed=n)
        assert rate <= compression_envelope(n, 2, Fraction(1, 2)) + 3 * se
        # exact failure probability is 2 * 2^-n
        assert abs(rate - 2 * 0.5 ** n) <= 4 * math.sqrt(2 * 0.5 ** n / 2000) + 1e-12


def test_oblivious_learner(pair):
    solo = MetaFamily.of(threshold_class(3))
    assert {oblivious_minimax_learner(solo, s) for s in range(20)} == {0}
    sol = family_value(pair)
    draws = [oblivious_minimax_learner(pair, s, sol) for s in range(10_000)]
    frac = sum(draws) / len(draws)
    assert abs(frac - 0.5) <= 3 * math.sqrt(0.25 / len(draws))
    assert oblivious_minimax_learner(pair, 7, sol) == oblivious_minimax_learner(pair, 7, sol)


# -- bounds and rates ------------------------------------------------------------------


def test_upper_bound_examples():
    assert upper_bound_curve(BoundParams(1, 2), 10, 10) == 1.0
    assert upper_bound_curve(BoundParams(1, 2), 10 ** 9, 10 ** 9) < 1e-6
    raw = 8 * (2 * math.log(400 / 2) + math.log(3)) / 400 + 2 * math.log(3) / 50
    assert upper_bound_curve(BoundParams(2, 3), 50, 400) == pytest.approx(raw)
    # the log term is guarded below by e
    assert upper_bound_curve(BoundParams(5, 1), 10, 6) == min(1.0, 8 * 5 * 1.0 / 6)
    with pytest.raises(ValueError):
        upper_bound_curve(BoundParams(1, 2), 0, 3)


@given(st.integers(0, 5), st.integers(1, 10), st.integers(1, 500), st.integers(1, 5000))
def test_upper_bound_monotone_in_n(d, size, n, m):
    p = BoundParams(d, size)
    assert 0 <= upper_bound_curve(p, n + 1, m) <= upper_bound_curve(p, n, m) <= 1


def test_fit_rate_examples():
    ns = range(1, 30)
    assert fit_rate([(n, 3.0 / n) for n in ns])[0] == pytest.approx(-1, abs=0.01)
    assert fit_rate([(n, 0.2) for n in ns])[0] == pytest.approx(0, abs=1e-9)
    pts = [(n, (1 / (n + 1)) * (n / (n + 1)) ** n) for n in range(2, 51)]
    assert -1.2 <= fit_rate(pts)[0] <= -0.8
    with pytest.raises(ValueError):
        fit_rate([(1, 0.1), (2, 0.0), (3, 0.1)])
    with pytest.raises(ValueError):
        fit_rate([(1, 0.1), (2, 0.1)])

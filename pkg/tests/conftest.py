from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from metasurface.generators import gen_near_complete_family, pair_singleton_family, threshold_class
from metasurface.universe import Domain, HypothesisClass, LabeledExample, MetaDistribution, MetaFamily

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def pair():
    return pair_singleton_family()


@pytest.fixture
def near4():
    return gen_near_complete_family(4)


@pytest.fixture
def thresholds4():
    return threshold_class(4)


def q_p(p):
    """(1 - p) on the domain delta(2, 0) plus p on delta(0, 1)."""
    p = Fraction(p)
    parts = [(Domain.point_mass(2, 0), 1 - p), (Domain.point_mass(0, 1), p)]
    return MetaDistribution(tuple((D, w) for D, w in parts if w))


# -- strategies ------------------------------------------------------------------


@st.composite
def classes(draw, K=None, max_hyps=6, name="H"):
    K = K if K is not None else draw(st.integers(1, 4))
    masks = draw(st.lists(st.integers(0, (1 << K) - 1), min_size=1, max_size=min(max_hyps, 1 << K), unique=True))
    return HypothesisClass.from_strings(name, [format_bits(b, K) for b in masks])


def format_bits(bits, K):
    return "".join(str(bits >> x & 1) for x in range(K))


@st.composite
def families(draw, max_K=4, max_classes=3, max_hyps=5):
    K = draw(st.integers(1, max_K))
    count = draw(st.integers(1, max_classes))
    return MetaFamily.of(*[draw(classes(K=K, max_hyps=max_hyps, name=f"C{i}")) for i in range(count)])


@st.composite
def domains(draw, K, labeling=None):
    pts = draw(st.lists(st.integers(0, K - 1), min_size=1, max_size=K, unique=True))
    weights = draw(st.lists(st.integers(1, 5), min_size=len(pts), max_size=len(pts)))
    total = sum(weights)
    atoms = []
    for x, w in zip(pts, weights):
        y = labeling(x) if labeling is not None else draw(st.integers(0, 1))
        atoms.append((LabeledExample(x, y), Fraction(w, total)))
    return Domain(tuple(atoms))


@st.composite
def realizable_metadists(draw, F, max_domains=3):
    """Meta-distribution whose domains all sit on graphs of one class's hypotheses."""
    H = F.classes[draw(st.integers(0, len(F) - 1))]
    parts = {}
    for _ in range(draw(st.integers(1, max_domains))):
        h = H.hypotheses[draw(st.integers(0, len(H) - 1))]
        D = draw(domains(F.K, labeling=h))
        parts[D] = parts.get(D, 0) + draw(st.integers(1, 4))
    total = sum(parts.values())
    return MetaDistribution(tuple((D, Fraction(w, total)) for D, w in parts.items()))


@st.composite
def family_and_metadist(draw, **kw):
    F = draw(families(**kw))
    return F, draw(realizable_metadists(F))

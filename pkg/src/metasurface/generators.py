"""Deterministic constructors for example families."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .universe import Hypothesis, HypothesisClass, MetaFamily, PointUniverse

GENERATOR_KINDS = ("singleton", "halfspace", "near_complete", "random")


def _indicator(x: int, K: int) -> Hypothesis:
    return Hypothesis(1 << x, K)


def class_name_for(X) -> str:
    return "X{" + ",".join(str(x) for x in sorted(X)) + "}"


def gen_singleton_family(K: int, s: int) -> MetaFamily:
    """One class ``{1_x : x in X}`` for every nonempty ``X`` with ``|X| <= s``."""
    if not 1 <= s <= K:
        raise ValueError(f"need 1 <= s <= K, got s={s}, K={K}")
    universe = PointUniverse(K)
    classes = []
    for size in range(1, s + 1):
        for X in itertools.combinations(range(K), size):
            classes.append(HypothesisClass(class_name_for(X), tuple(_indicator(x, K) for x in X)))
    return MetaFamily(tuple(classes), universe)


def _exact(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v)
    return Fraction(v)  # floats convert exactly


def halfspace_class(name: str, points: Sequence[Sequence], normals: Sequence[Sequence]) -> HypothesisClass:
    """All labelings ``x -> 1(w.x >= b)`` with ``w`` in ``normals`` and real ``b``.

    Only ``b`` at ``-inf``, at each distinct projected value, and above the
    largest projection matter on a finite point set; placing ``b`` exactly at a
    projected value reproduces the same labels as a midpoint just below it.
    """
    pts = [[_exact(c) for c in p] for p in points]
    K = len(pts)
    seen = {}
    for w in normals:
        w = [_exact(c) for c in w]
        if len(w) != len(pts[0]):
            raise ValueError("normal and point dimensions differ")
        proj = [sum(a * b for a, b in zip(w, p)) for p in pts]
        for b in sorted(set(proj)) + [None]:
            bits = 0 if b is None else sum(1 << x for x, t in enumerate(proj) if t >= b)
            seen.setdefault(bits, None)
    return HypothesisClass(name, tuple(Hypothesis(b, K) for b in seen))


def gen_halfspace_family(points: Sequence[Sequence], normal_sets: Sequence[Sequence[Sequence]]) -> MetaFamily:
    if not points or not normal_sets or any(not V for V in normal_sets):
        raise ValueError("points and every normal set must be nonempty")
    dims = {len(p) for p in points}
    if len(dims) != 1:
        raise ValueError("points must share one dimension")
    keys = [tuple(_exact(c) for c in p) for p in points]
    if len(set(keys)) != len(keys):
        raise ValueError("points must be distinct")
    classes = [halfspace_class(f"V{i}", points, V) for i, V in enumerate(normal_sets)]
    return MetaFamily(tuple(classes), PointUniverse(len(points)))


def gen_near_complete_family(K: int) -> MetaFamily:
    """``H_nc`` holds every labeling except all-ones; ``H_top`` holds only all-ones."""
    if K < 2:
        raise ValueError("near-complete family needs K >= 2")
    top = (1 << K) - 1
    nc = HypothesisClass("H_nc", tuple(Hypothesis(b, K) for b in range(top)))
    return MetaFamily((nc, HypothesisClass("H_top", (Hypothesis(top, K),))), PointUniverse(K))


def gen_random_family(K: int, num_classes: int, hyps_per_class: int, seed: int) -> MetaFamily:
    if num_classes < 1 or hyps_per_class < 1:
        raise ValueError("counts must be >= 1")
    if hyps_per_class > 1 << K:
        raise ValueError(f"cannot draw {hyps_per_class} distinct hypotheses on {K} points")
    rng = np.random.default_rng(seed)
    classes = []
    for c in range(num_classes):
        picks = rng.choice(1 << K, size=hyps_per_class, replace=False)
        classes.append(HypothesisClass(f"C{c}", tuple(Hypothesis(int(b), K) for b in picks)))
    return MetaFamily(tuple(classes), PointUniverse(K))


def random_halfspace_instance(rng: np.random.Generator, dim: int, n_points: int,
                              n_classes: int, max_normals: int, coord_range: int = 3):
    """Random integer points and normal sets for ``gen_halfspace_family``.

    Small integer coordinates make ties between projections common.
    """
    pts: list[tuple[int, ...]] = []
    while len(pts) < n_points:
        p = tuple(int(v) for v in rng.integers(-coord_range, coord_range + 1, size=dim))
        if p not in pts:
            pts.append(p)
    normal_sets = []
    for _ in range(n_classes):
        k = int(rng.integers(1, max_normals + 1))
        V = []
        while len(V) < k:
            w = tuple(int(v) for v in rng.integers(-2, 3, size=dim))
            if any(w) and w not in V:
                V.append(w)
        normal_sets.append(V)
    return pts, normal_sets


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    parameters: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {GENERATOR_KINDS}")
        required = {
            "singleton": {"K", "s"},
            "halfspace": {"points", "normal_sets"},
            "near_complete": {"K"},
            "random": {"K", "num_classes", "hyps_per_class", "seed"},
        }[self.kind]
        missing = required - set(self.parameters)
        if missing:
            raise ValueError(f"{self.kind} generator is missing {sorted(missing)}")

    @classmethod
    def from_json(cls, doc: dict) -> "GeneratorSpec":
        doc = dict(doc)
        kind = doc.pop("kind", None)
        params = doc.pop("parameters", None)
        if params is None:
            params = doc
        return cls(kind, dict(params))

    def build(self) -> MetaFamily:
        p = self.parameters
        if self.kind == "singleton":
            return gen_singleton_family(int(p["K"]), int(p["s"]))
        if self.kind == "halfspace":
            return gen_halfspace_family(p["points"], p["normal_sets"])
        if self.kind == "near_complete":
            return gen_near_complete_family(int(p["K"]))
        return gen_random_family(int(p["K"]), int(p["num_classes"]), int(p["hyps_per_class"]), int(p["seed"]))


# -- small named families used throughout the tests and checks ---------------------


def pair_singleton_family() -> MetaFamily:
    """``H_a = {100}``, ``H_b = {010}`` on three points."""
    return MetaFamily.of(HypothesisClass.from_strings("H_a", ["100"]),
                         HypothesisClass.from_strings("H_b", ["010"]))


def threshold_class(K: int, name: str = "T") -> HypothesisClass:
    """``1(x >= t)`` for ``t = 0..K``: ``11..1, 01..1, ..., 00..0``."""
    return HypothesisClass(name, tuple(Hypothesis(((1 << K) - 1) & ~((1 << t) - 1), K) for t in range(K + 1)))


def full_class(K: int, name: str = "ALL") -> HypothesisClass:
    return HypothesisClass(name, tuple(Hypothesis(b, K) for b in range(1 << K)))

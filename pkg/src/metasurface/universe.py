"""Finite-universe data model: hypotheses, classes, families, domains and losses.

Points are the integers ``0..K-1``.  A hypothesis is stored as an integer
bitmask whose bit ``x`` is the label it assigns to point ``x``; its string
form lists labels in point order, so ``"100"`` labels point 0 with 1.

Every probability and loss in this module is an exact ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

MAX_UNIVERSE = 24


class UniverseMismatch(ValueError):
    """Objects built over different (or incompatible) point universes."""


@dataclass(frozen=True)
class PointUniverse:
    size: int
    cap: int = MAX_UNIVERSE

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"universe size must be >= 1, got {self.size}")
        if self.size > self.cap:
            raise ValueError(f"universe size {self.size} exceeds cap {self.cap}")

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1


class LabeledExample(NamedTuple):
    point: int
    label: int


ExampleSet = frozenset  # frozenset[LabeledExample]


def example_set(items: Iterable) -> frozenset:
    """Build an ExampleSet from ``(point, label)`` pairs."""
    out = frozenset(LabeledExample(int(p), int(y)) for p, y in items)
    for ex in out:
        if ex.label not in (0, 1) or ex.point < 0:
            raise ValueError(f"bad labeled example {ex}")
    return out


def sorted_examples(s: Iterable[LabeledExample]) -> list[LabeledExample]:
    return sorted(s)


@dataclass(frozen=True, order=True)
class Hypothesis:
    bits: int
    size: int

    def __post_init__(self):
        if self.size < 1 or self.bits < 0 or self.bits >> self.size:
            raise ValueError(f"bit pattern {self.bits} does not fit {self.size} points")

    @classmethod
    def from_string(cls, s: str) -> "Hypothesis":
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"hypothesis must be a nonempty 0/1 string, got {s!r}")
        bits = sum(1 << i for i, ch in enumerate(s) if ch == "1")
        return cls(bits, len(s))

    def __call__(self, x: int) -> int:
        return (self.bits >> x) & 1

    def __str__(self) -> str:
        return "".join(str((self.bits >> i) & 1) for i in range(self.size))

    def graph(self) -> frozenset:
        return frozenset(LabeledExample(x, self(x)) for x in range(self.size))


@dataclass(frozen=True)
class HypothesisClass:
    name: str
    hypotheses: tuple[Hypothesis, ...]

    def __post_init__(self):
        hyps = tuple(self.hypotheses)
        object.__setattr__(self, "hypotheses", hyps)
        if not hyps:
            raise ValueError(f"class {self.name!r} is empty")
        sizes = {h.size for h in hyps}
        if len(sizes) != 1:
            raise UniverseMismatch(f"class {self.name!r} mixes universe sizes {sorted(sizes)}")
        if len({h.bits for h in hyps}) != len(hyps):
            raise ValueError(f"class {self.name!r} has duplicate hypotheses")

    @classmethod
    def from_strings(cls, name: str, strings: Sequence[str]) -> "HypothesisClass":
        return cls(name, tuple(Hypothesis.from_string(s) for s in strings))

    @property
    def size(self) -> int:
        return self.hypotheses[0].size

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(h.bits for h in self.hypotheses)

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __iter__(self):
        return iter(self.hypotheses)


@dataclass(frozen=True)
class MetaFamily:
    classes: tuple[HypothesisClass, ...]
    universe: PointUniverse

    def __post_init__(self):
        classes = tuple(self.classes)
        object.__setattr__(self, "classes", classes)
        if not classes:
            raise ValueError("a meta-family needs at least one class")
        for H in classes:
            if H.size != self.universe.size:
                raise UniverseMismatch(
                    f"class {H.name!r} has {H.size} points, universe has {self.universe.size}")
        names = [H.name for H in classes]
        if len(set(names)) != len(names):
            raise ValueError("class names must be unique")

    @classmethod
    def of(cls, *classes: HypothesisClass) -> "MetaFamily":
        return cls(tuple(classes), PointUniverse(classes[0].size))

    @property
    def K(self) -> int:
        return self.universe.size

    def __len__(self) -> int:
        return len(self.classes)

    def __getitem__(self, i: int) -> HypothesisClass:
        return self.classes[i]

    def index(self, H: HypothesisClass) -> int:
        for i, G in enumerate(self.classes):
            if G == H:
                return i
        raise ValueError(f"class {H.name!r} is not in the family")

    def union_masks(self) -> tuple[int, ...]:
        """Distinct hypothesis masks over all classes, in first-seen order."""
        return tuple(dict.fromkeys(b for H in self.classes for b in H.masks))


def _as_fraction(p) -> Fraction:
    return p if isinstance(p, Fraction) else Fraction(p)


@dataclass(frozen=True)
class Domain:
    atoms: tuple[tuple[LabeledExample, Fraction], ...]

    def __post_init__(self):
        atoms = tuple((LabeledExample(int(e[0]), int(e[1])), _as_fraction(p)) for e, p in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("a domain needs at least one atom")
        seen = set()
        for ex, p in atoms:
            if ex.label not in (0, 1) or ex.point < 0:
                raise ValueError(f"bad labeled example {ex}")
            if p <= 0:
                raise ValueError(f"atom {ex} has nonpositive probability {p}")
            if ex in seen:
                raise ValueError(f"duplicate atom {ex}")
            seen.add(ex)
        total = sum(p for _, p in atoms)
        if total != 1:
            raise ValueError(f"domain probabilities sum to {total}, not 1")

    @classmethod
    def point_mass(cls, point: int, label: int) -> "Domain":
        return cls(((LabeledExample(point, label), Fraction(1)),))

    @classmethod
    def uniform(cls, examples: Iterable) -> "Domain":
        exs = sorted_examples(example_set(examples))
        if not exs:
            raise ValueError("uniform domain over an empty set")
        w = Fraction(1, len(exs))
        return cls(tuple((e, w) for e in exs))

    @property
    def support(self) -> frozenset:
        return frozenset(e for e, _ in self.atoms)

    def max_point(self) -> int:
        return max(e.point for e, _ in self.atoms)


@dataclass(frozen=True)
class MetaDistribution:
    atoms: tuple[tuple[Domain, Fraction], ...]

    def __post_init__(self):
        atoms = tuple((D, _as_fraction(p)) for D, p in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("a meta-distribution needs at least one domain")
        if any(p <= 0 for _, p in atoms):
            raise ValueError("meta-distribution weights must be positive")
        total = sum(p for _, p in atoms)
        if total != 1:
            raise ValueError(f"meta-distribution weights sum to {total}, not 1")

    @classmethod
    def point_mass(cls, D: Domain) -> "MetaDistribution":
        return cls(((D, Fraction(1)),))

    @property
    def domains(self) -> tuple[Domain, ...]:
        return tuple(D for D, _ in self.atoms)

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(p for _, p in self.atoms)

    def max_point(self) -> int:
        return max(D.max_point() for D in self.domains)


@dataclass(frozen=True)
class MultiSample:
    """An ``n x m`` grid of examples together with the index of each row's domain."""

    domains_drawn: tuple[int, ...]
    rows: tuple[tuple[LabeledExample, ...], ...]
    m: int = field(init=False)

    def __post_init__(self):
        rows = tuple(tuple(LabeledExample(int(p), int(y)) for p, y in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "domains_drawn", tuple(int(i) for i in self.domains_drawn))
        if len(rows) != len(self.domains_drawn) or not rows:
            raise ValueError("need one nonempty row per drawn domain")
        widths = {len(r) for r in rows}
        if len(widths) != 1 or 0 in widths:
            raise ValueError("multi-sample rows must share one positive length")
        object.__setattr__(self, "m", widths.pop())

    @property
    def n(self) -> int:
        return len(self.rows)

    def check_support(self, Q: MetaDistribution) -> None:
        for i, row in zip(self.domains_drawn, self.rows):
            support = Q.domains[i].support
            for ex in row:
                if ex not in support:
                    raise ValueError(f"example {ex} is outside the support of domain {i}")


# -- losses -----------------------------------------------------------------


def _check_points(K: int, points: Iterable[int]) -> None:
    for x in points:
        if not 0 <= x < K:
            raise UniverseMismatch(f"point {x} is outside a universe of size {K}")


def hypothesis_loss(h: Hypothesis, D: Domain) -> Fraction:
    _check_points(h.size, (e.point for e, _ in D.atoms))
    return sum((p for e, p in D.atoms if h(e.point) != e.label), Fraction(0))


def class_loss(H: HypothesisClass, D: Domain) -> Fraction:
    return min(hypothesis_loss(h, D) for h in H)


def meta_loss(H: HypothesisClass, Q: MetaDistribution) -> Fraction:
    return sum((p * class_loss(H, D) for D, p in Q.atoms), Fraction(0))


def set_loss(H: HypothesisClass, S: Iterable[LabeledExample]) -> Fraction:
    """Loss of ``H`` on the uniform distribution over the distinct elements of ``S``."""
    S = example_set(S)
    if not S:
        raise ValueError("set_loss of an empty example set")
    return class_loss(H, Domain.uniform(S))


def consistent_with(h: Hypothesis, examples: Iterable[LabeledExample]) -> bool:
    return all(h(e.point) == e.label for e in examples)


def class_realizes(H: HypothesisClass, examples: Iterable[LabeledExample]) -> bool:
    examples = tuple(examples)
    _check_points(H.size, (e.point for e in examples))
    return any(consistent_with(h, examples) for h in H)


def consistent_classes(F: MetaFamily, S: MultiSample) -> tuple[int, ...]:
    """Indices of classes that fit every row of ``S`` with some hypothesis."""
    _check_points(F.K, (e.point for row in S.rows for e in row))
    rows = [frozenset(r) for r in dict.fromkeys(frozenset(r) for r in S.rows)]
    return tuple(i for i, H in enumerate(F.classes) if all(class_realizes(H, r) for r in rows))


def is_meta_realizable(F: MetaFamily, Q: MetaDistribution) -> tuple[bool, int | None]:
    for i, H in enumerate(F.classes):
        if meta_loss(H, Q) == 0:
            return True, i
    return False, None

"""JSON and CSV formats.  Rationals travel as ``"num/den"`` strings."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .combinatorics import ErrorCurve, HellyResult, TrivialityReport
from .game import GameSolution
from .simulate import SurfaceEstimate
from .universe import (
    Domain,
    HypothesisClass,
    LabeledExample,
    MetaDistribution,
    MetaFamily,
    PointUniverse,
)

CSV_HEADER = ["n", "m", "policy", "mean", "ci_low", "ci_high", "reps", "seed"]


def frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s.strip())
    raise ValueError(f"expected a 'num/den' string, got {s!r}")


def float_str(x: float) -> str:
    return format(float(x), ".17g")


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


# -- families -------------------------------------------------------------------


def family_to_json(F: MetaFamily) -> dict:
    return {
        "universe_size": F.K,
        "classes": [{"name": H.name, "hypotheses": [str(h) for h in H]} for H in F.classes],
    }


def family_from_json(doc: dict) -> MetaFamily:
    try:
        K = int(doc["universe_size"])
        classes = []
        for c in doc["classes"]:
            hyps = c["hypotheses"]
            if any(len(h) != K for h in hyps):
                raise ValueError(f"class {c['name']!r} has hypotheses of the wrong length")
            classes.append(HypothesisClass.from_strings(str(c["name"]), hyps))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed family document: {exc}") from None
    return MetaFamily(tuple(classes), PointUniverse(K))


def dump_family(F: MetaFamily) -> str:
    return dumps(family_to_json(F))


def load_family(path) -> MetaFamily:
    return family_from_json(json.loads(Path(path).read_text()))


# -- meta-distributions -------------------------------------------------------------


def domain_to_json(D: Domain) -> dict:
    return {"atoms": [[e.point, e.label, frac_str(p)] for e, p in D.atoms]}


def domain_from_json(doc: dict) -> Domain:
    return Domain(tuple((LabeledExample(int(x), int(y)), parse_frac(p)) for x, y, p in doc["atoms"]))


def metadist_to_json(Q: MetaDistribution) -> dict:
    return {
        "domains": [domain_to_json(D) for D in Q.domains],
        "weights": [frac_str(p) for p in Q.weights],
    }


def metadist_from_json(doc: dict) -> MetaDistribution:
    try:
        domains = [domain_from_json(d) for d in doc["domains"]]
        weights = [parse_frac(w) for w in doc["weights"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed meta-distribution document: {exc}") from None
    if len(domains) != len(weights):
        raise ValueError("domains and weights differ in length")
    return MetaDistribution(tuple(zip(domains, weights)))


def load_metadist(path) -> MetaDistribution:
    return metadist_from_json(json.loads(Path(path).read_text()))


# -- results ------------------------------------------------------------------------


def examples_to_json(S: Iterable[LabeledExample] | None):
    if S is None:
        return None
    return [[e.point, e.label] for e in sorted(S)]


def helly_to_json(name: str, r: HellyResult) -> dict:
    doc = {
        "parameter": name,
        "epsilon": frac_str(r.epsilon),
        "value": r.value,
        "witness": examples_to_json(r.witness),
    }
    if r.class_index is not None:
        doc["class_index"] = r.class_index
    return doc


def curve_to_json(curve: ErrorCurve) -> dict:
    return {
        "values": [frac_str(v) for v in curve.values],
        "breakpoints": [[m, frac_str(v)] for m, v in curve.breakpoints],
    }


def triviality_to_json(rep: TrivialityReport) -> dict:
    def flag(f):
        w = f.witness
        if isinstance(w, LabeledExample):
            w = [w.point, w.label]
        elif w is not None:
            w = list(w)
        return {"holds": f.holds, "witness": w}

    return {
        "weak_nonseparability": flag(rep.weak_nonseparability),
        "no_pairwise_domination": flag(rep.no_pairwise_domination),
        "strong_nonseparability": flag(rep.strong_nonseparability),
    }


def game_to_json(F: MetaFamily, sol: GameSolution) -> dict:
    return {
        "value": frac_str(sol.value),
        "minimax": {H.name: frac_str(w) for H, w in zip(F.classes, sol.minimax.weights)},
        "adversary_domains": [
            dict(domain_to_json(D), weight=frac_str(w)) for D, w in sol.adversary_support
        ],
        "iterations": sol.iterations,
    }


def surface_csv(rows: Iterable[SurfaceEstimate]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.n, r.m, r.policy, float_str(r.mean), float_str(r.ci_low),
                    float_str(r.ci_high), r.reps, r.seed])
    return buf.getvalue()

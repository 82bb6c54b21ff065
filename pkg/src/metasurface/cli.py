"""``metasurface`` command line.

Every flag can also be given in a ``--config`` JSON document under the same
name (dashes or underscores); a flag given on the command line wins.

Exit codes: 0 on success, 1 when a verification check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from . import io
from .budget import ENV_VAR, BudgetExceeded
from .combinatorics import (
    dual_helly,
    eps_dual_helly_family,
    eps_dual_helly_relative,
    family_vc,
    optimal_error_curve,
    triviality_report,
    vc_dimension,
)
from .game import IterationCapExceeded, family_value
from .generators import GeneratorSpec
from .simulate import ErmPolicy, NonRealizableSample, surface_sweep
from .universe import UniverseMismatch
from .verify import SUITES, run_suite

COMMANDS = ("analyze", "game", "surface", "verify", "generate")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    family: str | None = None
    metadist: str | None = None
    spec: str | None = None
    out: str | None = None
    seed: int = 0
    reps: int = 1000
    n: list[int] = field(default_factory=lambda: [1, 2, 4, 8, 16, 32, 64])
    m: list[int] = field(default_factory=lambda: [1, 2, 4, 8])
    policy: str = ErmPolicy.WORST.value
    eps: list[str] = field(default_factory=lambda: ["0/1"])
    m_max: int = 8
    cap: int | None = None
    budget: int | None = None
    workers: int = 1
    suite: str | None = None

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        need = {"analyze": ["family"], "game": ["family"], "surface": ["family", "metadist"],
                "verify": ["suite"], "generate": ["spec"]}[self.command]
        for key in need:
            if getattr(self, key) is None:
                raise InputError(f"{self.command} needs --{key}")
        if not self.n or not self.m or any(v < 1 for v in self.n + self.m):
            raise InputError("n and m grids must be nonempty lists of positive integers")
        if self.reps < 1 or self.workers < 1 or self.m_max < 0:
            raise InputError("reps and workers must be >= 1, m-max >= 0")
        if self.suite is not None and self.suite not in SUITES:
            raise InputError(f"unknown suite {self.suite!r}; expected one of {SUITES}")
        if self.budget is not None and self.budget < 1:
            raise InputError("budget must be positive")
        self.policy = ErmPolicy.parse(self.policy).value
        for e in self.eps:
            io.parse_frac(e)
        return self


def parse_grid(text) -> list[int]:
    """``"1..64"``, ``"1,2,4"`` or a mix like ``"1..4,8,16"``; also accepts a JSON list."""
    if isinstance(text, list):
        return [int(v) for v in text]
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise InputError(f"empty grid {text!r}")
    return out


def parse_eps(text) -> list[str]:
    items = text if isinstance(text, list) else str(text).split(",")
    return [io.frac_str(io.parse_frac(str(v))) for v in items if str(v).strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default values for any flag")
    common.add_argument("--out", help="output path (stdout when omitted)")
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int, help="worker processes; results do not depend on it")
    common.add_argument("--budget", type=int, help=f"enumeration budget (overrides {ENV_VAR})")

    p = argparse.ArgumentParser(prog="metasurface", description="Meta-learning surface toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="VC, dual Helly table, error curve, non-triviality")
    a.add_argument("--family")
    a.add_argument("--eps", help="comma list of num/den values")
    a.add_argument("--m-max", type=int, dest="m_max")
    a.add_argument("--cap", type=int, help="report exceeds-cap for values above this")

    g = sub.add_parser("game", parents=[common], help="exact value of the family game")
    g.add_argument("--family")

    s = sub.add_parser("surface", parents=[common], help="Monte Carlo sweep of the learning surface (CSV)")
    s.add_argument("--family")
    s.add_argument("--metadist")
    s.add_argument("--policy")
    s.add_argument("--n", help="grid, e.g. 1..64 or 1,2,4")
    s.add_argument("--m", help="grid, e.g. 1..8")
    s.add_argument("--reps", type=int)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", choices=SUITES)

    gen = sub.add_parser("generate", parents=[common], help="build a family from a generator spec")
    gen.add_argument("--spec")
    return p


def resolve(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the config file and explicit flags, in that order."""
    values: dict = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(doc, dict):
            raise InputError("config must be a JSON object")
        values.update({k.replace("-", "_"): v for k, v in doc.items()})
    values.update({k: v for k, v in vars(args).items() if v is not None and k not in ("config", "command")})
    values.pop("command", None)
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise InputError(f"unknown config keys {sorted(unknown)}")
    if "n" in values:
        values["n"] = parse_grid(values["n"])
    if "m" in values:
        values["m"] = parse_grid(values["m"])
    if "eps" in values:
        values["eps"] = parse_eps(values["eps"])
    try:
        return RunConfig(command=args.command, **values).validate()
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


RELEVANT = {
    "analyze": ("family", "eps", "m_max", "cap", "budget"),
    "game": ("family",),
    "surface": ("family", "metadist", "policy", "n", "m", "reps", "seed", "budget"),
    "verify": ("suite", "seed"),
    "generate": ("spec",),
}


def _config_doc(cfg: RunConfig) -> dict:
    """The resolved settings that affect this command's output."""
    doc = asdict(cfg)
    return {"command": cfg.command, **{k: doc[k] for k in RELEVANT[cfg.command] if doc[k] is not None}}


def _load_family(path: str):
    try:
        return io.load_family(path)
    except OSError as exc:
        raise InputError(f"cannot read family {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"family {path} is not JSON: {exc}") from None


def cmd_analyze(cfg: RunConfig) -> int:
    F = _load_family(cfg.family)
    eps = [io.parse_frac(e) for e in cfg.eps]
    helly = []
    for e in eps:
        row = {"epsilon": io.frac_str(e), "family": io.helly_to_json("m_F", eps_dual_helly_family(F, e, cfg.cap))}
        row["classes"] = {H.name: io.helly_to_json("m_H|F", eps_dual_helly_relative(H, F, e, cfg.cap))
                          for H in F.classes}
        helly.append(row)
    doc = {
        "config": _config_doc(cfg),
        "universe_size": F.K,
        "vc": {H.name: vc_dimension(H) for H in F.classes},
        "family_vc": family_vc(F),
        "dual_helly": {H.name: io.helly_to_json("DH", dual_helly(H, cfg.cap)) for H in F.classes},
        "eps_dual_helly": helly,
        "error_curve": io.curve_to_json(optimal_error_curve(F, cfg.m_max)),
        "triviality": io.triviality_to_json(triviality_report(F)),
    }
    _emit(io.dumps(doc), cfg.out)
    return 0


def cmd_game(cfg: RunConfig) -> int:
    F = _load_family(cfg.family)
    doc = {"config": _config_doc(cfg)}
    doc.update(io.game_to_json(F, family_value(F)))
    _emit(io.dumps(doc), cfg.out)
    return 0


def cmd_surface(cfg: RunConfig) -> int:
    F = _load_family(cfg.family)
    try:
        Q = io.load_metadist(cfg.metadist)
    except OSError as exc:
        raise InputError(f"cannot read meta-distribution {cfg.metadist}: {exc}") from None
    rows = surface_sweep(F, Q, cfg.policy, cfg.n, cfg.m, cfg.reps, cfg.seed, cfg.workers)
    _emit(io.surface_csv(rows), cfg.out)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    report = run_suite(cfg.suite, cfg.seed, cfg.workers)
    for c in report.checks:
        print(c.line(), file=sys.stderr)
    doc = {
        "config": _config_doc(cfg),
        "suite": report.suite,
        "passed": report.passed,
        "checks": [{"name": c.name, "claim": c.claim, "status": "pass" if c.passed else "fail",
                    "measured": c.measured, "tolerance": c.tolerance, "seconds": round(c.seconds, 3)}
                   for c in report.checks],
    }
    _emit(json.dumps(doc, indent=2, default=str) + "\n", cfg.out)
    return 0 if report.passed else 1


def cmd_generate(cfg: RunConfig) -> int:
    try:
        doc = json.loads(Path(cfg.spec).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read generator spec {cfg.spec}: {exc}") from None
    F = GeneratorSpec.from_json(doc).build()
    _emit(io.dump_family(F), cfg.out)
    return 0


HANDLERS = {"analyze": cmd_analyze, "game": cmd_game, "surface": cmd_surface,
            "verify": cmd_verify, "generate": cmd_generate}


def execute(cfg: RunConfig) -> int:
    if cfg.budget is None:
        return HANDLERS[cfg.command](cfg)
    saved = os.environ.get(ENV_VAR)
    os.environ[ENV_VAR] = str(cfg.budget)
    try:
        return HANDLERS[cfg.command](cfg)
    finally:
        if saved is None:
            del os.environ[ENV_VAR]
        else:
            os.environ[ENV_VAR] = saved


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return execute(resolve(args))
    except (InputError, ValueError, BudgetExceeded, UniverseMismatch, NonRealizableSample,
            IterationCapExceeded) as exc:
        print(f"metasurface {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

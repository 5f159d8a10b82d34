"""Command line front end.

    afpartial verify-uhf --factors 2,3 --levels 3 [--tol 1e-10] [--trials 100]
                         [--seed 42] [--report out.json] [--strict-unital]
    afpartial verify-bratteli --spec tower.json [same options]
    afpartial orbit --factors 2,2,2 --level 3 --start 0,0,0 --steps 7 [--out orbit.csv]

Exit status: 0 when every check passes, 1 when any check fails, 2 for
invalid configuration or spec files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import grading, odometer, regular, tower
from .errors import AlgebraError, VerificationFailure
from .grading import GradedAlgebra
from .matblock import BlockShape, CAP_ENV_VAR, max_block_size
from .odometer import FactorSeq, Word
from .regular import RegularityData
from .report import CheckReport
from .tower import StandardHomSpec, TowerSpec, UhfSpec

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
REPORT_VERSION = 1


class ConfigError(AlgebraError):
    pass


@dataclass
class RunConfig:
    tol: float = 1e-10
    trials: int = 100
    seed: int = 42
    report: str | None = None
    strict_unital: bool = False
    source: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not self.tol > 0:
            raise ConfigError(f"tolerance must be > 0, got {self.tol}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")


@dataclass
class Record:
    check: str
    scope: str
    trials: int
    max_residual: float | None
    passed: bool
    detail: str = ""
    failure: dict | None = None


def _scope_key(scope: str):
    kind, _, rest = scope.partition("=")
    return (kind, [int(x) for x in rest.replace("->", " ").split()])


@dataclass
class VerificationReport:
    config: dict
    records: list[Record] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def sorted_records(self) -> list[Record]:
        return sorted(self.records, key=lambda r: (r.check, _scope_key(r.scope)))

    def to_dict(self) -> dict:
        recs = self.sorted_records()
        return {
            "version": REPORT_VERSION,
            "config": self.config,
            "records": [asdict(r) for r in recs],
            "summary": {
                "passed": self.passed,
                "checks": len(recs),
                "failed": sum(not r.passed for r in recs),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        rows = [("check", "scope", "trials", "max residual", "status")]
        for r in self.sorted_records():
            res = "-" if r.max_residual is None else f"{r.max_residual:.3e}"
            status = "PASS" if r.passed else "FAIL"
            if r.detail:
                status += f"  {r.detail}"
            rows.append((r.check, r.scope, str(r.trials), res, status))
        widths = [max(len(row[i]) for row in rows) for i in range(4)]
        lines = [
            "  ".join(cell.ljust(w) for cell, w in zip(row[:4], widths)) + "  " + row[4]
            for row in rows
        ]
        return "\n".join(lines)


def _check_seed(seed: int, check: str, scope: str) -> int:
    # distinct reproducible stream per (check, scope)
    ss = np.random.SeedSequence([seed, zlib.crc32(f"{check}|{scope}".encode())])
    return int(ss.generate_state(1)[0])


class _Runner:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.report = VerificationReport(
            config={
                "tol": cfg.tol,
                "trials": cfg.trials,
                "seed": cfg.seed,
                "strict_unital": cfg.strict_unital,
                "source": cfg.source,
            }
        )

    def seed(self, check: str, scope: str) -> int:
        return _check_seed(self.cfg.seed, check, scope)

    def numeric(self, check: str, scope: str, fn: Callable[[int], CheckReport]) -> None:
        try:
            rep = fn(self.seed(check, scope))
        except VerificationFailure as exc:
            self.report.records.append(
                Record(check, scope, self.cfg.trials, exc.residual, False,
                       failure={"identity": exc.check, **exc.witness})
            )
            return
        self.report.records.append(Record(check, scope, rep.trials, rep.max_residual, rep.passed))

    def boolean(self, check: str, scope: str, ok: bool, detail: str = "") -> None:
        self.report.records.append(Record(check, scope, 1, None, bool(ok), detail))


def _level_checks(run: _Runner, shape: BlockShape, k: int) -> None:
    cfg = run.cfg
    scope = f"level={k}"
    g = GradedAlgebra(shape)
    d = RegularityData(shape)
    gen = grading.generated_dimension(g)
    run.boolean("semi_saturated", scope, gen == shape.dimension, f"generated {gen}/{shape.dimension}")
    comm = regular.commutant_dimension(shape, regular.diagonal_units(shape))
    run.boolean("masa", scope, comm == shape.trace_dimension, f"commutant {comm}/{shape.trace_dimension}")
    run.boolean("shift_structure", scope, regular.shift_structure_ok(d))
    run.numeric("regular_axioms", scope,
                lambda s: regular.verify_regular_axioms(d, cfg.trials, cfg.tol, s))
    run.numeric("lemma_theta_yx", scope,
                lambda s: regular.verify_theta_lemma(d, cfg.trials, cfg.tol, s))


def _hom_checks(run: _Runner, h: StandardHomSpec, i: int, j: int) -> None:
    cfg = run.cfg
    scope = f"hom={i}->{j}"
    injective = tower.check_injective(h)
    if injective:
        run.boolean("injective", scope, True)
    elif cfg.strict_unital:
        run.boolean("injective", scope, False, "unused source block")
    else:
        run.boolean("injective", scope, True, "warning: unused source block")
    run.numeric("covariant", scope, lambda s: tower.check_covariant(h, cfg.trials, cfg.tol, s))
    run.numeric("regular_hom", scope, lambda s: tower.check_regular_hom(h, cfg.trials, cfg.tol, s))
    run.boolean("shift_restriction", scope, tower.check_shift_restriction(h))
    diag = all(
        _is_diagonal(tower.apply_hom(h, e)) for e in regular.diagonal_units(h.source)
    )
    run.boolean("fixed_point_compatible", scope, diag)


def _is_diagonal(a) -> bool:
    return all(not np.any(b - np.diag(np.diag(b))) for b in a.blocks)


def run_tower_suite(t: TowerSpec, cfg: RunConfig, run: _Runner | None = None) -> VerificationReport:
    """Level checks at every level and map checks on every composite i -> j, i < j."""
    run = run or _Runner(cfg)
    for k, shape in enumerate(t.levels):
        _level_checks(run, shape, k)
    for i in range(t.depth):
        for j in range(i + 1, t.depth + 1):
            _hom_checks(run, tower.composite(t, i, j), i, j)
    return run.report


def run_uhf_suite(u: UhfSpec, cfg: RunConfig) -> VerificationReport:
    t = tower.uhf_tower(u)
    run = _Runner(cfg)
    run_tower_suite(t, cfg, run)
    f = FactorSeq(u.factors)
    for k in range(u.levels + 1):
        scope = f"level={k}"
        run.numeric("theta_odometer", scope, lambda s, k=k: odometer.verify_theta_odometer(f, k, cfg.tol))
        run.numeric("odometer_bijection", scope, lambda s, k=k: odometer.verify_odometer_bijection(f, k))
        run.numeric("ideal_identification", scope, lambda s, k=k: odometer.verify_ideal_identification(f, k))
    for k in range(u.levels):
        scope = f"level={k}"
        run.numeric("cylinder_refinement", scope, lambda s, k=k: odometer.cylinder_refinement_check(f, k))
        run.numeric("level_consistency", scope, lambda s, k=k: odometer.verify_level_consistency(f, k))
    return run.report


# spec files


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def load_spec(path: str | Path, strict_unital: bool = False) -> TowerSpec | UhfSpec:
    """Parse a JSON tower spec (``uhf`` or ``bratteli`` type)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read spec {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("spec must be a JSON object")
    kind = data.get("type")
    try:
        if kind == "uhf":
            return UhfSpec(data["factors"], int(data["levels"]))
        if kind == "bratteli":
            shapes = [BlockShape(s) for s in data["shapes"]]
            placements = data["placements"]
            if len(placements) != len(shapes) - 1:
                raise ConfigError(
                    f"{len(shapes)} shapes need {len(shapes) - 1} placement entries, got {len(placements)}"
                )
            homs = []
            for k, pl in enumerate(placements):
                try:
                    h = StandardHomSpec.from_one_based(shapes[k], shapes[k + 1], pl)
                except AlgebraError as exc:
                    raise ConfigError(f"map {k} (level {k} -> {k + 1}): {exc}") from None
                if strict_unital and not h.is_unital:
                    pad = [b + 1 for b in range(len(h.target)) if h.padding(b)]
                    raise ConfigError(f"map {k}: target blocks {pad} are padded (strict unital mode)")
                homs.append(h)
            return TowerSpec(shapes, homs)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed {kind} spec: {exc!r}") from None
    raise ConfigError(f"unknown spec type {kind!r}; expected 'uhf' or 'bratteli'")


# commands


def _config(args, source: dict) -> RunConfig:
    cfg = RunConfig(args.tol, args.trials, args.seed, args.report, args.strict_unital, source)
    cfg.validate()
    return cfg


def _finish(report: VerificationReport, cfg: RunConfig, started: float, out=None) -> int:
    out = out or sys.stdout
    print(report.table(), file=out)
    verdict = "PASS" if report.passed else "FAIL"
    n_fail = sum(not r.passed for r in report.records)
    print(f"\n{verdict}: {len(report.records)} checks, {n_fail} failed, "
          f"{time.perf_counter() - started:.2f}s", file=out)
    if cfg.report:
        Path(cfg.report).write_text(report.to_json(), encoding="utf-8")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify_uhf(args, out=None) -> int:
    started = time.perf_counter()
    factors = _int_list(args.factors)
    cfg = _config(args, {"type": "uhf", "factors": factors, "levels": args.levels})
    try:
        u = UhfSpec(factors, args.levels)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    report = run_uhf_suite(u, cfg)
    return _finish(report, cfg, started, out)


def cmd_verify_bratteli(args, out=None) -> int:
    started = time.perf_counter()
    spec = load_spec(args.spec, args.strict_unital)
    if isinstance(spec, UhfSpec):
        cfg = _config(args, {"type": "uhf", "factors": list(spec.factors), "levels": spec.levels})
        return _finish(run_uhf_suite(spec, cfg), cfg, started, out)
    cfg = _config(args, {
        "type": "bratteli",
        "shapes": [list(s.sizes) for s in spec.levels],
        "placements": [[[i + 1 for i in row] for row in h.placement] for h in spec.homs],
    })
    return _finish(run_tower_suite(spec, cfg), cfg, started, out)


OUT_OF_DOMAIN_MARK = "out-of-domain"


def write_orbit_csv(f: FactorSeq, start: Word, steps: int, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["step", "index", "digits"])
    if steps > 0 and odometer.is_beta_max(f, start):
        writer.writerow([1, "", OUT_OF_DOMAIN_MARK])
        return
    path = odometer.orbit(f, start, steps)
    for step, w in enumerate(path):
        writer.writerow([step, odometer.index_j(f, w), str(w)])
    if len(path) < steps + 1:
        writer.writerow([len(path), "", OUT_OF_DOMAIN_MARK])


def cmd_orbit(args, out=None) -> int:
    try:
        f = FactorSeq(_int_list(args.factors))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    start = Word(_int_list(args.start)) if args.start else odometer.zero_word(args.level)
    if start.level != args.level:
        raise ConfigError(f"start word has {start.level} digits but level is {args.level}")
    if args.steps < 0:
        raise ConfigError("steps must be >= 0")
    odometer.validate(f, start)
    out = out or sys.stdout
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_orbit_csv(f, start, args.steps, fh)
    else:
        write_orbit_csv(f, start, args.steps, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afpartial",
        description="Finite-level certificates for standard circle actions, "
        "standard homomorphisms and the odometer on UHF towers.",
        epilog=f"The block-size cap (default {max_block_size()}) is read from ${CAP_ENV_VAR}.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=1e-10, help="residual tolerance (default 1e-10)")
        p.add_argument("--trials", type=int, default=100, help="random trials per check (default 100)")
        p.add_argument("--seed", type=int, default=42, help="base RNG seed (default 42)")
        p.add_argument("--report", help="write the JSON report here")
        p.add_argument("--strict-unital", action="store_true",
                       help="reject padded maps and treat non-injective maps as failures")

    p = sub.add_parser("verify-uhf", help="verify the UHF tower for a factor sequence")
    p.add_argument("--factors", required=True, help="comma-separated n_i, repeated periodically")
    p.add_argument("--levels", type=int, required=True, help="top level K")
    common(p)
    p.set_defaults(func=cmd_verify_uhf)

    p = sub.add_parser("verify-bratteli", help="verify a tower given in a JSON spec file")
    p.add_argument("--spec", required=True)
    common(p)
    p.set_defaults(func=cmd_verify_bratteli)

    p = sub.add_parser("orbit", help="emit an odometer orbit as CSV")
    p.add_argument("--factors", required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--start", default="", help="comma-separated digits, little-endian")
    p.add_argument("--steps", type=int, default=0)
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.set_defaults(func=cmd_orbit)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if getattr(args, "levels", 1) is not None and getattr(args, "levels", 1) < 1:
            raise ConfigError("levels must be >= 1")
        return args.func(args)
    except AlgebraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

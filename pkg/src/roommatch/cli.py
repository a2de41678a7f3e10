"""Command-line entry point: ``python3 -m roommatch <command> ...``.

Exit codes: 0 success, 2 usage or parse error, 3 size cap exceeded,
4 internal invariant violated.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .audit import DEFAULT_AUDIT_CAP, MisreportDomain, reproduce_impossibility
from .audit import audit as run_audit
from .generators import (FAMILIES, Cnf3, FigureMismatch, from_3sat, gen_figure, gen_random)
from .instance import Instance, InstanceError, UtilityModel, format_value
from .mechanisms import BOUNDS, MECHANISM_IDS, make_runner
from .oracle import DEFAULT_CAP, CapExceeded, max_welfare

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_INVARIANT = 0, 2, 3, 4


class InvariantViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    mechanism: str | None
    model: UtilityModel
    sigma: tuple[int, ...] | None
    input: str | None
    out: str | None
    seed: int
    oracle_cap: int
    audit_cap: int
    format: str


def parse_sigma(text: str | None) -> tuple[int, ...] | None:
    """``identity`` (or nothing) means index order; otherwise comma-separated agent indices."""
    if text is None or text.strip() == "identity":
        return None
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InstanceError(f"bad --sigma {text!r}: expected comma-separated indices") from None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=[m.value for m in UtilityModel], default="leontief")
    common.add_argument("--input", help="instance JSON file, or - for stdin")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--sigma", help="agent order, e.g. 2,0,1,3 or identity")
    common.add_argument("--oracle-cap", type=_positive, default=DEFAULT_CAP)
    common.add_argument("--audit-cap", type=_positive, default=DEFAULT_AUDIT_CAP)
    common.add_argument("--format", choices=["json", "csv"], default="json")

    parser = argparse.ArgumentParser(prog="roommatch", description=(
        "Roommate matching: mechanisms, exact optimum, manipulation audits, generators."))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="run a mechanism on an instance")
    p.add_argument("--mechanism", required=True)
    p.add_argument("--agent", type=int, default=0, help="favoured agent of the parity fixture")

    sub.add_parser("oracle", parents=[common], help="exact optimum and all optimal matchings")

    p = sub.add_parser("audit", parents=[common], help="search for a profitable misreport")
    p.add_argument("--mechanism", required=True)
    p.add_argument("--domain", choices=["binary-all", "binary-symmetric", "grid"],
                   default="binary-all")
    p.add_argument("--grid", help="comma-separated values for the grid domain")
    p.add_argument("--agent", type=int, default=0)

    p = sub.add_parser("gen", parents=[common], help="generate an instance")
    p.add_argument("--family", required=True,
                   help="random, random-symmetric, 3sat, or one of: " + ", ".join(FAMILIES))
    p.add_argument("--n", type=_positive, default=2)
    p.add_argument("--density", type=Fraction, default=Fraction(1, 2))
    p.add_argument("--k", type=_positive, default=1)
    p.add_argument("--cnf", help="3sat clauses, e.g. '1,-2,3;-1,2,3'")
    p.add_argument("--relaxed", action="store_true", help="allow clauses of 1 or 2 literals")
    p.add_argument("--map-out", help="where to write the 3sat reduction map")

    p = sub.add_parser("bench", parents=[common], help="welfare ratios against the optimum")
    p.add_argument("--families", default="random:n<=3",
                   help="comma list of random:n<=K, random-symmetric:n<=K or figure names")
    p.add_argument("--mechanisms", default="all")
    p.add_argument("--seeds", type=_positive, default=20)
    p.add_argument("--density", type=Fraction, default=Fraction(1, 2))

    p = sub.add_parser("report", parents=[common], help="replay an impossibility construction")
    p.add_argument("--family", required=True, choices=["fig5", "fig6", "fig6-symmetric"])
    p.add_argument("--alpha", type=Fraction, default=Fraction(1))
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(args.command, getattr(args, "mechanism", None),
                     UtilityModel.parse(args.model), parse_sigma(args.sigma), args.input,
                     args.out, args.seed, args.oracle_cap, args.audit_cap, args.format)


def _read_instance(path: str | None) -> Instance:
    if path is None:
        raise InstanceError("--input is required")
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc}") from exc
    try:
        return Instance.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path} is not valid JSON: {exc}") from exc


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _check_mechanism(name: str | None) -> str:
    if name not in MECHANISM_IDS:
        raise InstanceError(f"unknown mechanism {name!r}; choose from {', '.join(MECHANISM_IDS)}")
    return name


def cmd_solve(cfg: RunConfig, args) -> int:
    inst = _read_instance(cfg.input)
    run = make_runner(_check_mechanism(cfg.mechanism), cfg.model, cfg.sigma,
                      agent=args.agent, oracle_cap=cfg.oracle_cap)
    _emit(_dump(run(inst).to_json()), cfg.out)
    return EXIT_OK


def cmd_oracle(cfg: RunConfig, args) -> int:
    inst = _read_instance(cfg.input)
    _emit(_dump(max_welfare(inst, cfg.model, cfg.oracle_cap).to_json()), cfg.out)
    return EXIT_OK


def cmd_audit(cfg: RunConfig, args) -> int:
    inst = _read_instance(cfg.input)
    values = [Fraction(x) for x in args.grid.split(",")] if args.grid else None
    domain = MisreportDomain.parse(args.domain, values)
    report = run_audit(_check_mechanism(cfg.mechanism), inst, cfg.model, domain, cfg.sigma,
                       cap=cfg.audit_cap, oracle_cap=cfg.oracle_cap, fixture_agent=args.agent)
    _emit(_dump(report.to_json()), cfg.out)
    return EXIT_OK


def parse_cnf(text: str, relaxed: bool = False) -> Cnf3:
    clauses = []
    for part in text.split(";"):
        if part.strip():
            try:
                clauses.append([int(x) for x in part.split(",")])
            except ValueError:
                raise InstanceError(f"bad clause {part!r}") from None
    if any(0 in c for c in clauses):
        raise InstanceError("literal 0 is not allowed")
    num_vars = max((abs(x) for c in clauses for x in c), default=0)
    return Cnf3.from_dimacs(num_vars, clauses, relaxed)


def cmd_gen(cfg: RunConfig, args) -> int:
    family = args.family
    if family in ("random", "random-symmetric"):
        inst = gen_random(args.n, args.density, family == "random-symmetric", cfg.seed)
    elif family == "3sat":
        if not args.cnf:
            raise InstanceError("--cnf is required for the 3sat family")
        inst, rmap = from_3sat(parse_cnf(args.cnf, args.relaxed))
        if args.map_out:
            with open(args.map_out, "w", encoding="utf-8") as fh:
                fh.write(_dump(rmap.to_json()))
    else:
        inst, _ = gen_figure(family, cfg.model, k=args.k)
    _emit(_dump(inst.to_json()), cfg.out)
    return EXIT_OK


_FAMILY_RE = re.compile(r"^(random|random-symmetric):n(<=|=)(\d+)$")


def _bench_instances(families: str, seeds: int, density: Fraction, model: UtilityModel):
    for item in (s.strip() for s in families.split(",") if s.strip()):
        match = _FAMILY_RE.match(item)
        if match:
            kind, op, size = match.groups()
            sizes = range(1, int(size) + 1) if op == "<=" else [int(size)]
            for n in sizes:
                for seed in range(seeds):
                    inst = gen_random(n, density, kind == "random-symmetric", seed)
                    yield kind, f"n={n};seed={seed}", inst
        else:
            inst, _ = gen_figure(item, model)
            yield item, "", inst


def cmd_bench(cfg: RunConfig, args) -> int:
    names = list(MECHANISM_IDS) if args.mechanisms == "all" else \
        [_check_mechanism(x.strip()) for x in args.mechanisms.split(",")]
    rows = []
    worst: dict[str, Fraction] = {}
    for family, params, inst in _bench_instances(args.families, args.seeds, args.density,
                                                 cfg.model):
        best = max_welfare(inst, cfg.model, cfg.oracle_cap).max_welfare
        for name in names:
            try:
                res = make_runner(name, cfg.model, cfg.sigma, oracle_cap=cfg.oracle_cap)(inst)
            except CapExceeded:
                raise
            except InstanceError:
                continue  # mechanism not defined for this model or instance
            ratio = Fraction(1) if best == 0 else Fraction(res.welfare) / Fraction(best)
            worst[name] = min(worst.get(name, ratio), ratio)
            rows.append({"family": family, "params": params, "mechanism": name,
                         "model": cfg.model.value, "welfare": format_value(res.welfare),
                         "oracle": format_value(best), "ratio": format_value(ratio),
                         "ratio_decimal": f"{float(ratio):.6f}"})
    summary = []
    violated = False
    for name in names:
        if name not in worst:
            continue
        bound = BOUNDS.get((name, cfg.model))
        ok = bound is None or worst[name] >= Fraction(*bound)
        violated |= not ok
        summary.append({"mechanism": name, "model": cfg.model.value,
                        "worst_ratio": format_value(worst[name]),
                        "worst_decimal": f"{float(worst[name]):.6f}",
                        "bound": format_value(Fraction(*bound)) if bound else "",
                        "holds": "" if bound is None else str(ok).lower()})
    if cfg.format == "json":
        text = _dump({"rows": rows, "summary": summary})
    else:
        buf = io.StringIO()
        cols = ["family", "params", "mechanism", "model", "welfare", "oracle", "ratio",
                "ratio_decimal", "bound", "holds"]
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        for s in summary:
            writer.writerow({"family": "SUMMARY", "params": "worst", "mechanism": s["mechanism"],
                             "model": s["model"], "ratio": s["worst_ratio"],
                             "ratio_decimal": s["worst_decimal"], "bound": s["bound"],
                             "holds": s["holds"]})
        text = buf.getvalue()
    _emit(text, cfg.out)
    if violated:
        raise InvariantViolation("a mechanism fell below its guaranteed ratio")
    return EXIT_OK


def cmd_report(cfg: RunConfig, args) -> int:
    report = reproduce_impossibility(args.family, args.alpha, cfg.model)
    _emit(_dump(report.to_json()), cfg.out)
    if not report.verified:
        raise InvariantViolation(f"the {args.family} construction did not verify")
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "oracle": cmd_oracle, "audit": cmd_audit, "gen": cmd_gen,
            "bench": cmd_bench, "report": cmd_report}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[cfg.command](cfg, args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InvariantViolation, FigureMismatch) as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``numpart {gen,heuristic,solve,sweep,trace,theory}``.

Exit codes: 0 success, 2 usage error, 3 input error, 4 budget exhausted
before any solution was found.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from typing import List, Optional

from . import experiments, theory
from .core import (
    CardinalityConstraint,
    InputError,
    Instance,
    read_instance,
    write_instance,
)
from .heuristics import HeuristicKind, run_heuristic
from .search import SearchLimits, cbldm_solve, ckk_solve

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NO_SOLUTION = 4


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {value}")
    return value


def _target(text: str):
    if text == "balanced":
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"target must be 'balanced' or an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("target must be non-negative")
    return value


def _n_values(text: str) -> List[int]:
    """Parse ``12,13,20`` or ``12-28`` (inclusive) or a mix of both."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(_positive_int(lo), _positive_int(hi) + 1))
        elif part:
            out.append(_positive_int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty n list")
    return out


def _signs_text(signs) -> str:
    return ",".join(str(s) for s in signs)


class _Emitter:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def record(self, kind: str, **fields):
        if self.fmt == "json-lines":
            self.stream.write(json.dumps({"type": kind, **fields}) + "\n")
        else:
            self.stream.write(",".join([kind] + [str(v) for v in fields.values()]) + "\n")
        self.stream.flush()

    def block(self, title: str, items):
        if self.fmt == "json-lines":
            self.stream.write(json.dumps({"type": title, **dict(items)}) + "\n")
        else:
            self.stream.write(title + "\n")
            for key, value in items:
                self.stream.write(f"{key},{value}\n")
        self.stream.flush()


def _limits(args) -> SearchLimits:
    return SearchLimits(max_nodes=args.max_nodes, max_time=args.max_seconds)


def cmd_gen(args) -> int:
    inst = experiments.gen_instance(args.bits, args.n, args.seed)
    header = f"generator {experiments.GENERATOR_ID} bits {args.bits} n {args.n} seed {args.seed}"
    if args.out:
        try:
            write_instance(inst, args.out, header)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror}") from None
    else:
        sys.stdout.write("# " + header + "\n")
        sys.stdout.write("".join(f"{w}\n" for w in inst.weights))
    return EXIT_OK


def cmd_heuristic(args) -> int:
    inst = read_instance(args.instance)
    result = run_heuristic(HeuristicKind(args.alg), inst)
    _Emitter(args.format).block("heuristic", [
        ("algorithm", args.alg),
        ("delta", str(result.delta)),
        ("card_diff", result.card_diff),
        ("signs", _signs_text(result.signs) if args.format == "csv" else list(result.signs)),
    ])
    return EXIT_OK


def _run_solver(inst: Instance, mode: str, target, limits: SearchLimits, sink):
    if mode == "ckk":
        return ckk_solve(inst, limits, sink)
    if target == "balanced":
        constraint = CardinalityConstraint.balanced(inst.n)
    else:
        constraint = CardinalityConstraint.target_abs(target, inst.n)
    return cbldm_solve(inst, constraint, limits, sink)


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    emit = _Emitter(args.format)
    if args.mode == "cbldm" and args.target != "balanced":
        CardinalityConstraint.target_abs(args.target, inst.n)
    report = _run_solver(inst, args.mode, args.target, _limits(args),
                         lambda ev: emit.record("event", nodes=ev.nodes_at_event, delta=str(ev.delta)))
    items = [("status", report.status.value), ("optimal", str(report.optimal).lower())]
    if report.best is not None:
        items += [
            ("delta", str(report.best.delta)),
            ("card_diff", report.best.card_diff),
        ]
    items += [("nodes", report.nodes_generated), ("elapsed", f"{report.elapsed:.6f}")]
    if report.best is not None:
        items.append(("signs", _signs_text(report.best.signs) if args.format == "csv" else list(report.best.signs)))
    emit.block("summary", items)
    if report.best is None:
        print(f"numpart: budget exhausted after {report.nodes_generated} nodes without a solution",
              file=sys.stderr)
        return EXIT_NO_SOLUTION
    return EXIT_OK


def _json_row(row) -> dict:
    d = asdict(row)
    # exact magnitudes travel as decimal strings
    if isinstance(d.get("delta"), int):
        d["delta"] = str(d["delta"])
    return d


def _write_table(rows, args):
    if args.format == "json-lines":
        text = "".join(json.dumps(_json_row(r)) + "\n" for r in rows)
    else:
        text = experiments.write_csv(rows)
    if args.out:
        try:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def cmd_sweep(args) -> int:
    if args.experiment == "bldm-scaling":
        rows = experiments.bldm_scaling(args.n_values, args.instances, args.seed)
    else:
        config = experiments.SweepConfig(
            bit_width=args.bits,
            n_values=tuple(args.n_values),
            instances_per_n=args.instances,
            mode=args.mode,
            target=args.target,
            limits=_limits(args),
            base_seed=args.seed,
        )
        rows = experiments.phase_sweep(config, workers=args.workers)
    _write_table(rows, args)
    return EXIT_OK


def cmd_trace(args) -> int:
    if args.instance:
        inst = read_instance(args.instance)
    else:
        inst = experiments.gen_instance(args.bits, args.n, args.seed)
    if args.target != "balanced":
        CardinalityConstraint.target_abs(args.target, inst.n)
    points, report = experiments.anytime_trace(inst, args.target, _limits(args))
    if not points:
        print("numpart: budget exhausted without a solution", file=sys.stderr)
        return EXIT_NO_SOLUTION
    _write_table(points, args)
    if len(points) >= 2 and all(p.ratio != float("inf") for p in points):
        a, c = experiments.fit_power_law(points)
        print(f"fit: ratio ~ {a:.4g} * nodes^{c:.4g} ({report.status.value})", file=sys.stderr)
    return EXIT_OK


def cmd_theory(args) -> int:
    moments = theory.moments_uniform_bits(args.bits)
    items = [("bits", args.bits), ("balanced", str(args.balanced).lower()),
             ("critical_n", f"{theory.critical_n(moments, args.balanced):.6g}")]
    if args.n is not None:
        items.append(("expected_optimum", repr(theory.expected_optimum(moments, args.n, args.balanced))))
        if args.n >= 2:
            items.append(("bldm_prediction", repr(theory.bldm_prediction(args.n))))
    _Emitter(args.format).block("theory", items)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="numpart", description="Exact and anytime number partitioning.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True, bits=False, n=False, out=True):
        p.add_argument("--format", choices=["csv", "json-lines"], default="csv")
        if seed:
            p.add_argument("--seed", type=_seed, default=0)
        if bits:
            p.add_argument("--bits", type=_positive_int, required=bits == "required", default=None if bits == "required" else 15)
        if n:
            p.add_argument("--n", type=_positive_int, required=n == "required")
        if out:
            p.add_argument("--out", default=None)

    def budget(p):
        p.add_argument("--max-nodes", type=_positive_int, default=None)
        p.add_argument("--max-seconds", type=_positive_float, default=None)

    p = sub.add_parser("gen", help="generate a random b-bit instance")
    common(p, bits="required", n="required")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("heuristic", help="run PDM, LDM or BLDM")
    common(p, seed=False, out=False)
    p.add_argument("--alg", choices=[k.value for k in HeuristicKind], required=True)
    p.add_argument("instance")
    p.set_defaults(func=cmd_heuristic)

    p = sub.add_parser("solve", help="complete anytime search (CKK or complete BLDM)")
    common(p, seed=False, out=False)
    p.add_argument("--mode", choices=["ckk", "cbldm"], default="cbldm")
    p.add_argument("--target", type=_target, default="balanced")
    budget(p)
    p.add_argument("instance")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="phase-transition sweep or BLDM scaling table")
    common(p, bits=True)
    p.add_argument("--experiment", choices=["phase", "bldm-scaling"], default="phase")
    p.add_argument("--n-values", type=_n_values, required=True, help="e.g. 12-28 or 64,128,256")
    p.add_argument("--instances", type=_positive_int, default=100)
    p.add_argument("--mode", choices=["ckk", "cbldm"], default="cbldm")
    p.add_argument("--target", type=_target, default="balanced")
    p.add_argument("--workers", type=_positive_int, default=1)
    budget(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("trace", help="anytime improvement trace of complete BLDM")
    common(p, bits=True, n=True)
    p.add_argument("--target", type=_target, default="balanced")
    p.add_argument("instance", nargs="?", default=None)
    budget(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("theory", help="critical size and expected optimum predictions")
    common(p, seed=False, out=False)
    p.add_argument("--bits", type=_positive_int, required=True)
    p.add_argument("--balanced", action="store_true")
    p.add_argument("--n", type=_positive_int, default=None)
    p.set_defaults(func=cmd_theory)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "trace" and args.instance is None and args.n is None:
        parser.error("trace needs an instance file or --n")
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        sys.stdout.reconfigure(line_buffering=True)
    except (AttributeError, ValueError):
        pass
    try:
        return args.func(args)
    except (InputError, theory.DomainError) as exc:
        print(f"numpart: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

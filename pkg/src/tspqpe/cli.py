"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 usage error, 3 ``compare`` mismatch.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

from .encoding import Tour, tour_to_eigenstate
from .errors import InvalidTour, TspQpeError
from .formats import export_qasm, parse_instance, read_document, reference_readouts
from .oracle import brute_force_solve, build_tour_table
from .qpe import BACKENDS, QpeConfig, decode_outcome, run_qpe
from .report import format_text, mismatches, prepare, solve

EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_MISMATCH = 3


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("instance", help="instance JSON file (bundled fixture names also work)")
    p.add_argument("--phase-qubits", "-t", type=int, default=None, help="phase register width")
    p.add_argument("--bits", type=int, default=4, help="accurate phase bits wanted")
    p.add_argument("--epsilon", type=float, default=0.25, help="allowed failure probability")
    p.add_argument("--backend", choices=BACKENDS, default="gate")
    p.add_argument("--shots", type=int, default=None, help="sample instead of exact readout")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (env SEED, else 0)")
    p.add_argument("--dedup-symmetric", action="store_true", help="one route per reversal pair")
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tspqpe", description="TSP by phase estimation on a statevector simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("solve", "full pipeline: phase estimation of every route, then minimum search"),
        ("compare", "solve and check against brute force; exit 3 on mismatch"),
    ]:
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.add_argument("--confidence", type=float, default=0.999)
        p.add_argument("--exact-search", action="store_true", help="search exact costs (diagnostic)")
    p = sub.add_parser("qpe", help="phase estimation of a single route")
    _common(p)
    p.add_argument("--route", required=True, help="comma-separated city order, e.g. 1,2,3,4")
    p = sub.add_parser("export-qasm", help="OpenQASM 2.0 circuit for one route")
    _common(p)
    p.add_argument("--route", required=True)
    p.add_argument("--output", "-o", default=None, help="write to file instead of stdout")
    p = sub.add_parser("tours", help="classical tour table with expected readouts")
    _common(p)
    p = sub.add_parser("brute", help="classical brute-force optimum")
    _common(p)
    return parser


def _seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SEED must be an integer, got {env!r}")


def _config(args: argparse.Namespace) -> QpeConfig:
    if args.shots is not None and args.shots <= 0:
        raise UsageError("--shots must be positive")
    try:
        return QpeConfig(
            n_bits=args.bits,
            epsilon=args.epsilon,
            t=args.phase_qubits,
            backend=args.backend,
            shots=args.shots,
            seed=_seed(args),
        )
    except TspQpeError as e:
        raise UsageError(str(e))


def _route(text: str, n: int) -> Tour:
    try:
        cities = [int(c) for c in text.replace(" ", "").split(",")]
        tour = Tour.from_cycle(cities)
    except (ValueError, InvalidTour) as e:
        raise UsageError(f"bad --route {text!r}: {e}")
    if tour.n != n:
        raise UsageError(f"--route lists {tour.n} cities, instance has {n}")
    return tour


def _emit(args: argparse.Namespace, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _run(args: argparse.Namespace) -> int:
    config = _config(args)
    doc = read_document(args.instance)
    instance = parse_instance(doc)
    t = config.phase_qubits

    if args.command in ("solve", "compare"):
        if not 0.0 < args.confidence < 1.0:
            raise UsageError("--confidence must lie in (0, 1)")
        report = solve(
            instance,
            config,
            dedup=args.dedup_symmetric,
            confidence=args.confidence,
            exact_search=args.exact_search,
            reference=reference_readouts(doc) or None,
        )
        bad = mismatches(report) if args.command == "compare" else []
        payload = report.to_dict()
        text = format_text(report)
        if args.command == "compare":
            payload["mismatches"] = bad
            text += "\n" + ("compare: OK" if not bad else "compare: MISMATCH\n" + "\n".join(bad))
        _emit(args, payload, text)
        return EXIT_MISMATCH if bad else 0

    if args.command == "brute":
        work, _, _ = prepare(instance, t)
        tour, cost = brute_force_solve(work)
        _emit(args, {"tour": str(tour), "cost": cost}, f"optimal tour {tour} cost {cost!r}")
        return 0

    if args.command == "tours":
        work, _, _ = prepare(instance, t)
        rows = build_tour_table(work, t, dedup_symmetric=args.dedup_symmetric and instance.symmetric)
        payload = {"t": t, "rows": [asdict(r) | {"tour": str(r.tour)} for r in rows]}
        lines = [f"{'#':>3}  {'Tour':<14} {'Eigenstate':<12} {'Phase':>10}  {'Cost':>10}  Expected"]
        for i, r in enumerate(rows, 1):
            lines.append(
                f"{i:>3}  {str(r.tour):<14} {r.eigenstate:<12} {r.phase:>10.6f}  {r.cost:>10.6g}  {r.expected}"
            )
        _emit(args, payload, "\n".join(lines))
        return 0

    work, phases, op = prepare(instance, t)
    tour = _route(args.route, instance.n)
    es = tour_to_eigenstate(tour)

    if args.command == "export-qasm":
        qasm = export_qasm(op, es, t)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(qasm)
        else:
            sys.stdout.write(qasm)
        return 0

    dist = run_qpe(op, es, config)
    bits, p = dist.most_likely()
    out = decode_outcome(bits, phases.scale, tour, p, es.bits)
    payload = {
        "tour": str(tour),
        "eigenstate": es.bits,
        "bitstring": bits,
        "probability": p,
        "phase": out.phase,
        "cost": out.cost,
        "distribution": dist.to_dict(),
    }
    text = (
        f"route {tour} eigenstate {es.bits}: bitstring {bits} with probability {p:.3f}\n"
        f"phase {out.phase:.6f} rad, cost {out.cost:.6g}"
    )
    _emit(args, payload, text)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except UsageError as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (TspQpeError, FileNotFoundError) as e:
        print(f"{parser.prog}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: solve, gen, oracle, bench."""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time
from typing import Sequence

from .generate import generate_planted, random_digraph
from .graph import GraphFormatError, read_edge_list, write_edge_list
from .oracle import OracleRefused, brute_force_lsp
from .solver import SolverConfig, format_weight, solve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="longpath", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="search for a long simple path")
    p.add_argument("file", help="edge list: one 'u v w' per line")
    p.add_argument("--budget-ms", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--config", help="JSON file with solver settings")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--report", choices=("json", "text"), default="json")
    p.add_argument("--compact", action="store_true", help="renumber sparse vertex ids")

    p = sub.add_parser("gen", help="generate a planted-path instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("oracle", help="exact answer by exhaustive search (small graphs)")
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=12)

    p = sub.add_parser("bench", help="run a benchmark suite")
    p.add_argument("--suite", choices=("planted", "small"), required=True)
    p.add_argument("--full", action="store_true", help="planted: n=10000, m=100000")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--budget-ms", type=float)
    return parser


def _config(args: argparse.Namespace) -> SolverConfig:
    data = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("config file must hold a JSON object")
    for key in ("budget_ms", "seed", "workers"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    return SolverConfig.from_dict(data)


def cmd_solve(args: argparse.Namespace) -> int:
    config = _config(args)
    graph = read_edge_list(args.file, compact=args.compact)
    report = solve(graph, config)
    body = report.to_json() + "\n" if args.report == "json" else report.text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
        sys.stdout.write(report.text())
    else:
        sys.stdout.write(body)
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    graph, opt = generate_planted(args.n, args.m, args.seed)
    write_edge_list(graph, args.out)
    print(f"wrote {args.out}: n={graph.n} m={graph.m} optimum={format_weight(opt)}")
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    graph = read_edge_list(args.file)
    path = brute_force_lsp(graph, cap=args.cap)
    print(" ".join(str(graph.label(v)) for v in path.vertices()))
    print(f"weight {format_weight(path.weight)}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    if args.suite == "planted":
        n, m = (10_000, 100_000) if args.full else (1_000, 10_000)
        budget = args.budget_ms or (60_000.0 if args.full else 10_000.0)
        hits = 0
        for seed in range(args.seeds):
            graph, opt = generate_planted(n, m, seed)
            report = solve(graph, SolverConfig(budget_ms=budget, seed=seed))
            ok = report.weight == opt
            hits += ok
            t = report.events[-1]["t_ms"] if report.events else 0.0
            print(
                f"seed {seed}: weight {format_weight(report.weight)}/{format_weight(opt)} "
                f"{'optimal' if ok else 'short'} best found at {t / 1000:.2f}s "
                f"total {report.phase_timings_ms['total'] / 1000:.2f}s"
            )
        print(f"planted n={n} m={m}: optimal on {hits}/{args.seeds}")
        return 0

    budget = args.budget_ms or 100.0
    rng = random.Random(2024)
    hits = total = 0
    t0 = time.perf_counter()
    for k in range(200):
        n = rng.randint(2, 10)
        density = (0.2, 0.5, 0.8)[k % 3]
        graph = random_digraph(n, density, rng)
        exact = brute_force_lsp(graph).weight
        got = solve(graph, SolverConfig(budget_ms=budget, seed=k)).weight
        total += 1
        hits += abs(got - exact) <= 1e-9 * max(1.0, exact)
    print(f"small graphs: optimal on {hits}/{total} in {time.perf_counter() - t0:.1f}s")
    return 0


COMMANDS = {"solve": cmd_solve, "gen": cmd_gen, "oracle": cmd_oracle, "bench": cmd_bench}


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except (OSError, GraphFormatError, OracleRefused, ValueError) as exc:
        print(f"longpath: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()

"""Command-line interface.

Exit status: 0 for a non-empty result, 2 when a search legitimately finds
an empty equivalence class (callers may fall back to `optimize`), 1 for
errors of any kind.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import asp_export, benchmark, fileformat, oracle
from .generators import GenConfig, generate
from .graphs import DirectedGraph, undersample
from .optimizer import edge_errors, optimize, refine
from .solver import EquivalenceClass, SolveConfig, solve

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse exits 2 on usage errors; 2 means "empty class" here.
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_out(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _solve_config(args) -> SolveConfig:
    return SolveConfig(maxu=args.max_rate, use_scc_decomposition=not args.no_scc)


def _class_text(cls: EquivalenceClass) -> str:
    lines = [f"class size: {len(cls)}"]
    for idx, member in enumerate(cls.entries, start=1):
        edges = ", ".join(f"{i} -> {j}" for i, j in member.graph.edges()) or "(empty)"
        rates = ",".join(str(u) for u in member.witnesses)
        lines.append(f"g{idx}: {edges}   rates: {rates}")
    stats = cls.stats.to_dict()
    lines.append(
        "stats: nodes={nodes_expanded} prunes(lower={prunes_lower}, "
        "upper={prunes_upper}, collapse={prunes_collapse}, fanout={prunes_fanout}) "
        "forced={forced_absent} elapsed={elapsed_s:.3f}s".format(**stats)
    )
    for w in stats["warnings"]:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


def _class_json(cls: EquivalenceClass, n: int, maxu: int) -> str:
    payload = {
        "n": n,
        "maxu": maxu,
        "entries": [
            {
                "edges": [[i, j] for i, j in m.graph.edges()],
                "witnesses": list(m.witnesses),
            }
            for m in cls.entries
        ],
        "stats": cls.stats.to_dict(),
    }
    return json.dumps(payload, indent=2) + "\n"


def _cmd_undersample(args) -> int:
    g = fileformat.parse_directed(_read(args.input))
    m = undersample(g, args.rate)
    _write_out(fileformat.write_mixed(m), args.out)
    return EXIT_OK


def _cmd_solve(args) -> int:
    h = fileformat.parse_mixed(_read(args.input))
    cls = solve(h, _solve_config(args))
    text = _class_json(cls, h.n, args.max_rate) if args.json else _class_text(cls)
    _write_out(text, args.out)
    return EXIT_OK if len(cls) else EXIT_EMPTY


def _cmd_oracle(args) -> int:
    h = fileformat.parse_mixed(_read(args.input))
    cls = oracle.brute_force_class(h, args.max_rate, allow_slow=args.allow_slow)
    text = _class_json(cls, h.n, args.max_rate) if args.json else _class_text(cls)
    _write_out(text, args.out)
    return EXIT_OK if len(cls) else EXIT_EMPTY


def _cmd_optimize(args) -> int:
    w = fileformat.parse_weighted(_read(args.input))
    cfg = SolveConfig(maxu=args.max_rate, use_scc_decomposition=not args.no_scc)
    lines = ["unlisted presence/absence weights default to 1"]
    if args.refine or args.truth:
        opt, cls = refine(w, cfg)
    else:
        opt = optimize(w, cfg, enumerate_all=args.all_optima)
        cls = None
    edges = ", ".join(f"{i} -> {j}" for i, j in opt.graph.edges()) or "(empty)"
    lines.append(f"optimum: {edges}")
    lines.append(f"rate: {opt.rate}")
    lines.append(f"cost: {opt.cost:g}")
    if args.all_optima and opt.all_optima is not None:
        lines.append(f"cost-tied optima: {len(opt.all_optima)}")
        for g2, u2 in opt.all_optima:
            e2 = ", ".join(f"{i} -> {j}" for i, j in g2.edges()) or "(empty)"
            lines.append(f"  {e2}   rate {u2}")
    if cls is not None:
        lines.append(f"refined class size: {len(cls)}")
    if args.truth:
        truth = fileformat.parse_directed(_read(args.truth))
        om, com = edge_errors(truth, opt.graph)
        lines.append(f"errors vs truth: omission {om:.4f} commission {com:.4f}")
        r_om = min(edge_errors(truth, m.graph)[0] for m in cls.entries)
        r_com = min(edge_errors(truth, m.graph)[1] for m in cls.entries)
        lines.append(
            f"refined errors vs truth (best in class): omission {r_om:.4f} "
            f"commission {r_com:.4f}"
        )
    _write_out("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_export_asp(args) -> int:
    text = _read(args.input)
    if args.weighted:
        w = fileformat.parse_weighted(text)
        program = asp_export.export_weighted_program(w, args.max_rate)
    else:
        h = fileformat.parse_mixed(text)
        program = asp_export.export_program(h, args.max_rate)
    _write_out(program, args.out)
    return EXIT_OK


def _gen_config(args) -> GenConfig:
    common = dict(seed=args.seed, max_attempts=args.max_attempts)
    if args.density is not None:
        common.update(avg_out_degree=None, density=args.density)
    else:
        common.update(avg_out_degree=args.degree)
    if args.gen_kind == "scc":
        return GenConfig(kind="single_scc", n=args.size, **common)
    return GenConfig(
        kind="structured",
        scc_count=args.scc_count,
        scc_size=args.scc_size,
        dag_degree=args.dag_degree,
        realizations_per_dag_edge=tuple(args.realizations),
        **common,
    )


def _cmd_gen(args) -> int:
    g = generate(_gen_config(args))
    _write_out(fileformat.write_directed(g), args.out)
    return EXIT_OK


def _cmd_bench(args) -> int:
    suites = benchmark.builtin_suites()
    if args.suite not in suites:
        raise ValueError(
            f"unknown suite {args.suite!r}; available: {', '.join(sorted(suites))}"
        )
    suite = suites[args.suite]
    if args.time_limit is not None:
        suite = replace(suite, time_limit_s=args.time_limit)
    csv_path = f"{args.out_prefix}.csv"
    svg_path = f"{args.out_prefix}.svg"
    records = benchmark.run_benchmark(
        suite, csv_path=csv_path, svg_path=svg_path, workers=args.threads
    )
    timeouts = sum(1 for r in records if r.timeout)
    sys.stdout.write(
        f"{len(records)} records ({timeouts} timeouts) -> {csv_path}, {svg_path}\n"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="unsample",
        description=(
            "Recover the causal-timescale graphs consistent with a graph "
            "measured at an unknown, slower sampling rate."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, weighted=False):
        p.add_argument("input", help="graph file ('-' for stdin)")
        p.add_argument("--max-rate", type=int, default=20, metavar="U",
                       help="largest sampling rate to consider (default 20)")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("undersample", help="measure a graph at a given rate")
    p.add_argument("input", help="directed graph file ('-' for stdin)")
    p.add_argument("--rate", type=int, required=True, metavar="U")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_undersample)

    p = sub.add_parser("solve", help="enumerate the equivalence class of a measured graph")
    add_common(p)
    p.add_argument("--json", action="store_true", help="JSON instead of text")
    p.add_argument("--no-scc", action="store_true",
                   help="disable SCC structural forcing")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("oracle", help="brute-force the class by full enumeration (small n)")
    add_common(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--allow-slow", action="store_true",
                   help="permit n=5 (tens of millions of graphs)")
    p.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("optimize", help="find the closest achievable graph under edge weights")
    add_common(p, weighted=True)
    p.add_argument("--no-scc", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--refine", action="store_true",
                   help="re-measure the optimum and solve it exactly")
    p.add_argument("--all-optima", action="store_true",
                   help="list every cost-tied optimum")
    p.add_argument("--truth", default=None, metavar="FILE",
                   help="true generating graph for error reporting (implies --refine)")
    p.set_defaults(fn=_cmd_optimize)

    p = sub.add_parser("export-asp", help="emit the answer-set program for a measured graph")
    add_common(p)
    p.add_argument("--weighted", action="store_true",
                   help="parse weights and emit the optimization program")
    p.set_defaults(fn=_cmd_export_asp)

    p = sub.add_parser("gen", help="generate a seeded random graph")
    gsub = p.add_subparsers(dest="gen_kind", required=True)
    for kind in ("scc", "structured"):
        gp = gsub.add_parser(kind)
        if kind == "scc":
            gp.add_argument("--size", type=int, required=True, help="node count")
        else:
            gp.add_argument("--scc-count", type=int, required=True)
            gp.add_argument("--scc-size", type=int, required=True)
            gp.add_argument("--dag-degree", type=float, default=2.0)
            gp.add_argument("--realizations", type=int, nargs=2, default=(1, 3),
                            metavar=("LO", "HI"),
                            help="node edges per block edge, uniform range")
        gp.add_argument("--degree", type=float, default=1.4,
                        help="average out-degree per node (default 1.4)")
        gp.add_argument("--density", type=float, default=None,
                        help="edge probability; overrides --degree")
        gp.add_argument("--seed", type=int, required=True)
        gp.add_argument("--max-attempts", type=int, default=10000)
        gp.add_argument("--out", default=None)
        gp.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("bench", help="run a named benchmark suite")
    p.add_argument("--suite", required=True,
                   help="one of: " + ", ".join(sorted(benchmark.builtin_suites())))
    p.add_argument("--out-prefix", required=True,
                   help="writes <prefix>.csv and <prefix>.svg")
    p.add_argument("--threads", type=int, default=1,
                   help="worker processes (default 1)")
    p.add_argument("--time-limit", type=float, default=None,
                   help="per-run cap in seconds")
    p.set_defaults(fn=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BrokenPipeError:
        return EXIT_ERROR
    except Exception as exc:  # noqa: BLE001 - single reporting point for the CLI
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Benchmark harness: generate graphs, measure them, time the searches.

Each run owns one generated graph and one rate; the timed work (solve, or
optimize and refine for robustness suites) executes in a child process so
a hung run can be killed at the time limit and recorded as a timeout
rather than aborting the suite. Results land in a CSV with a fixed column
set and an SVG plot of elapsed time against the suite's sweep variable,
one series per rate.
"""

from __future__ import annotations

import csv
import io
import multiprocessing as mp
import time
from dataclasses import dataclass, fields, replace

from .generators import GenConfig, break_edges, generate
from .graphs import DirectedGraph, MixedGraph, undersample
from .optimizer import WeightedHypothesis, edge_errors, optimize, refine
from .solver import SolveConfig, solve

CSV_COLUMNS = [
    "suite",
    "seed",
    "kind",
    "n",
    "scc_size",
    "scc_count",
    "degree",
    "u",
    "elapsed_ms",
    "class_size",
    "timeout",
    "cost",
    "omission",
    "commission",
]


@dataclass(frozen=True)
class BenchRecord:
    suite: str
    seed: int
    kind: str
    n: int
    scc_size: int | None
    scc_count: int | None
    degree: float
    u: int
    elapsed_ms: float
    class_size: int | None
    timeout: bool
    cost: float | None = None
    omission: float | None = None
    commission: float | None = None
    prunes: dict | None = None  # per-prune counters; not a CSV column

    def to_row(self) -> list[str]:
        def cell(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return "true" if v else "false"
            if isinstance(v, float):
                return repr(v)
            return str(v)

        return [cell(getattr(self, c)) for c in CSV_COLUMNS]

    @classmethod
    def from_row(cls, row: list[str]) -> "BenchRecord":
        def opt(s, conv):
            return None if s == "" else conv(s)

        raw = dict(zip(CSV_COLUMNS, row))
        return cls(
            suite=raw["suite"],
            seed=int(raw["seed"]),
            kind=raw["kind"],
            n=int(raw["n"]),
            scc_size=opt(raw["scc_size"], int),
            scc_count=opt(raw["scc_count"], int),
            degree=float(raw["degree"]),
            u=int(raw["u"]),
            elapsed_ms=float(raw["elapsed_ms"]),
            class_size=opt(raw["class_size"], int),
            timeout=raw["timeout"] == "true",
            cost=opt(raw["cost"], float),
            omission=opt(raw["omission"], float),
            commission=opt(raw["commission"], float),
        )

    def without_prunes(self) -> "BenchRecord":
        return replace(self, prunes=None)


@dataclass(frozen=True)
class BenchSuite:
    """A sweep: one timed run per (config, repeat, rate).

    Repeat r reuses each config with seed + r. Mode "solve" times the exact
    search; "refine" breaks break_count edges off the measured graph, times
    optimize plus the two-stage refinement, and reports errors against the
    generating graph (refined metrics appear under suite name
    "<name>:refined").
    """

    name: str
    configs: tuple[GenConfig, ...]
    rates: tuple[int, ...]
    repeats: int = 1
    mode: str = "solve"
    maxu: int = 4
    time_limit_s: float = 600.0
    sweep: str = "n"
    break_count: int = 1

    def jobs(self):
        for cfg in self.configs:
            for r in range(self.repeats):
                seeded = replace(cfg, seed=cfg.seed + r)
                for u in self.rates:
                    yield seeded, u


def _timed_child(conn, mode, n, g_rows, u, maxu, break_count, seed) -> None:
    g = DirectedGraph(n, tuple(g_rows))
    h = undersample(g, u)
    cfg = SolveConfig(maxu=maxu)
    if mode == "solve":
        t0 = time.perf_counter()
        cls = solve(h, cfg)
        elapsed = time.perf_counter() - t0
        conn.send(
            {
                "elapsed_ms": elapsed * 1000.0,
                "class_size": len(cls),
                "prunes": cls.stats.to_dict(),
            }
        )
        return
    broken = break_edges(h, break_count, seed ^ 0x5EED)
    w = WeightedHypothesis.unit(broken)
    t0 = time.perf_counter()
    opt, cls = refine(w, cfg)
    elapsed = time.perf_counter() - t0
    omission, commission = edge_errors(g, opt.graph)
    r_omission = min(edge_errors(g, m.graph)[0] for m in cls.entries)
    r_commission = min(edge_errors(g, m.graph)[1] for m in cls.entries)
    conn.send(
        {
            "elapsed_ms": elapsed * 1000.0,
            "class_size": len(cls),
            "cost": opt.cost,
            "omission": omission,
            "commission": commission,
            "refined_omission": r_omission,
            "refined_commission": r_commission,
        }
    )


def _base_record(suite: BenchSuite, cfg: GenConfig, u: int) -> dict:
    return {
        "suite": suite.name,
        "seed": cfg.seed,
        "kind": cfg.kind,
        "n": cfg.total_nodes(),
        "scc_size": cfg.scc_size,
        "scc_count": cfg.scc_count,
        "degree": round(cfg.edge_probability() * cfg.block_nodes(), 6),
        "u": u,
    }


def _start_job(suite: BenchSuite, cfg: GenConfig, u: int):
    g = generate(cfg)
    ctx = mp.get_context("fork")
    parent, child = ctx.Pipe(duplex=False)
    proc = ctx.Process(
        target=_timed_child,
        args=(child, suite.mode, g.n, g.rows, u, suite.maxu, suite.break_count, cfg.seed),
    )
    proc.start()
    child.close()
    return proc, parent


def _collect(suite: BenchSuite, base: dict, parent) -> list[BenchRecord]:
    if not parent.poll():
        raise RuntimeError(f"benchmark child for {base} died without a result")
    payload = parent.recv()
    if suite.mode == "solve":
        return [
            BenchRecord(
                **base,
                elapsed_ms=payload["elapsed_ms"],
                class_size=payload["class_size"],
                timeout=False,
                prunes=payload.get("prunes"),
            )
        ]
    plain = BenchRecord(
        **base,
        elapsed_ms=payload["elapsed_ms"],
        class_size=payload["class_size"],
        timeout=False,
        cost=payload["cost"],
        omission=payload["omission"],
        commission=payload["commission"],
    )
    refined = replace(
        plain,
        suite=f"{suite.name}:refined",
        omission=payload["refined_omission"],
        commission=payload["refined_commission"],
    )
    return [plain, refined]


def _timeout_records(suite: BenchSuite, base: dict) -> list[BenchRecord]:
    return [
        BenchRecord(
            **base,
            elapsed_ms=suite.time_limit_s * 1000.0,
            class_size=None,
            timeout=True,
        )
    ]


def run_benchmark(
    suite: BenchSuite,
    csv_path=None,
    svg_path=None,
    workers: int = 1,
) -> list[BenchRecord]:
    """Run every job of the suite, up to `workers` child processes at a time.

    Output order follows job order regardless of completion order, so the
    CSV is deterministic for a fixed suite (timings aside).
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    jobs = list(suite.jobs())
    results: dict[int, list[BenchRecord]] = {}
    active: list = []
    next_job = 0
    while next_job < len(jobs) or active:
        while next_job < len(jobs) and len(active) < workers:
            cfg, u = jobs[next_job]
            proc, parent = _start_job(suite, cfg, u)
            deadline = time.monotonic() + suite.time_limit_s
            active.append((next_job, proc, parent, deadline, _base_record(suite, cfg, u)))
            next_job += 1
        time.sleep(0.005)
        remaining = []
        for idx, proc, parent, deadline, base in active:
            if proc.is_alive():
                if time.monotonic() < deadline:
                    remaining.append((idx, proc, parent, deadline, base))
                    continue
                proc.terminate()
                proc.join()
                results[idx] = _timeout_records(suite, base)
            else:
                proc.join()
                results[idx] = _collect(suite, base, parent)
            parent.close()
        active = remaining
    records = [rec for idx in range(len(jobs)) for rec in results[idx]]
    if csv_path is not None:
        write_csv(records, csv_path)
    if svg_path is not None:
        plot_svg(records, svg_path, suite.sweep)
    return records


def write_csv(records: list[BenchRecord], path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.to_row())
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def read_csv(path) -> list[BenchRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header in {path}")
    return [BenchRecord.from_row(row) for row in rows[1:]]


def plot_svg(records: list[BenchRecord], path, sweep: str) -> None:
    """Scatter of per-run times with a median trend line, one series per rate."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    valid = {f.name for f in fields(BenchRecord)}
    if sweep not in valid:
        raise ValueError(f"unknown sweep field {sweep!r}")

    fig, ax = plt.subplots(figsize=(7, 4.5))
    rates = sorted({r.u for r in records})
    for u in rates:
        pts = [
            (getattr(r, sweep), r.elapsed_ms)
            for r in records
            if r.u == u and not r.timeout and getattr(r, sweep) is not None
        ]
        if not pts:
            continue
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.scatter(xs, ys, s=14, alpha=0.45, label=f"rate {u}")
        by_x: dict = {}
        for x, y in pts:
            by_x.setdefault(x, []).append(y)
        mx = sorted(by_x)
        medians = []
        for x in mx:
            vals = sorted(by_x[x])
            mid = len(vals) // 2
            med = vals[mid] if len(vals) % 2 else (vals[mid - 1] + vals[mid]) / 2
            medians.append(med)
        ax.plot(mx, medians, marker="o", lw=1.5)
    ax.set_xlabel(sweep)
    ax.set_ylabel("elapsed (ms)")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def builtin_suites() -> dict[str, BenchSuite]:
    """Desk-scale suites named after the shape of the experiment they echo."""
    size_sweep = BenchSuite(
        name="size-sweep",
        configs=tuple(
            GenConfig(kind="single_scc", n=n, avg_out_degree=1.4, seed=1000 + n)
            for n in (4, 5, 6)
        ),
        rates=(2, 3),
        repeats=5,
        maxu=4,
        sweep="n",
    )
    scc_count_sweep = BenchSuite(
        name="scc-count-sweep",
        configs=tuple(
            GenConfig(
                kind="structured",
                scc_count=k,
                scc_size=4,
                avg_out_degree=1.4,
                dag_degree=2.0,
                seed=2000 + k,
            )
            for k in (1, 2, 3, 4, 5, 6)
        ),
        rates=(2,),
        repeats=10,
        maxu=4,
        sweep="scc_count",
    )
    robustness = BenchSuite(
        name="robustness",
        configs=tuple(
            GenConfig(kind="single_scc", n=n, avg_out_degree=1.4, seed=3000 + n)
            for n in (4, 5)
        ),
        rates=(2, 3),
        repeats=5,
        mode="refine",
        maxu=4,
        sweep="n",
    )
    return {s.name: s for s in (size_sweep, scc_count_sweep, robustness)}

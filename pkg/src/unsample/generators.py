"""Seeded random graph generators and the edge-breaking perturbation.

All randomness flows through numpy's counter-based Philox generator keyed
by a SeedSequence, so a (seed, config) pair reproduces bit-identically on
any platform. Single-SCC graphs are rejection-sampled until one strongly
connected component spans every node with cycle-length gcd 1, the regime
in which structural pruning of the solver is sound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import DirectedGraph, MixedGraph, scc_decompose


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GenConfig:
    """Parameters for one generated graph.

    kind "single_scc" uses n; kind "structured" builds scc_count blocks of
    scc_size nodes each, wired by a random block-level DAG. Edge density
    is given either as avg_out_degree (edges per node, the paper-style
    parameter) or as density (probability per ordered pair); exactly one.
    """

    kind: str = "single_scc"
    n: int | None = None
    scc_count: int | None = None
    scc_size: int | None = None
    avg_out_degree: float | None = 1.4
    density: float | None = None
    dag_degree: float = 2.0
    realizations_per_dag_edge: tuple[int, int] = (1, 3)
    seed: int = 0
    max_attempts: int = 10000

    def __post_init__(self) -> None:
        if self.kind not in ("single_scc", "structured"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if (self.avg_out_degree is None) == (self.density is None):
            raise ValueError("give exactly one of avg_out_degree and density")
        if self.kind == "single_scc":
            if not self.n or self.n < 1:
                raise ValueError("single_scc needs n >= 1")
        else:
            if not self.scc_count or self.scc_count < 1:
                raise ValueError("structured needs scc_count >= 1")
            if not self.scc_size or self.scc_size < 1:
                raise ValueError("structured needs scc_size >= 1")
            if self.dag_degree <= 0:
                raise ValueError("dag_degree must be positive")
            lodeg, hideg = self.realizations_per_dag_edge
            if not (1 <= lodeg <= hideg):
                raise ValueError("realizations_per_dag_edge must be a range >= 1")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        deg = self.avg_out_degree if self.avg_out_degree is not None else None
        if deg is not None and deg <= 0:
            raise ValueError("avg_out_degree must be positive")
        if self.density is not None and not (0 < self.density <= 1):
            raise ValueError("density must be in (0, 1]")

    def block_nodes(self) -> int:
        return self.n if self.kind == "single_scc" else self.scc_size

    def edge_probability(self) -> float:
        """Per ordered pair (self-pairs included), within one block."""
        if self.density is not None:
            return self.density
        return min(1.0, self.avg_out_degree / self.block_nodes())

    def reported_density(self) -> float:
        return self.edge_probability()

    def total_nodes(self) -> int:
        if self.kind == "single_scc":
            return self.n
        return self.scc_count * self.scc_size


def _rng(seed_seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed_seq))


def _sample_block(m: int, p: float, rng: np.random.Generator, max_attempts: int):
    """Rows of a period-1 single-SCC graph on m nodes, or raise."""
    reason = "no attempt made"
    for _ in range(max_attempts):
        matrix = rng.random((m, m)) < p
        rows = tuple(
            int(sum(1 << j for j in range(m) if matrix[i, j])) for i in range(m)
        )
        scc = scc_decompose(DirectedGraph(m, rows))
        if len(scc.components) != 1:
            reason = f"{len(scc.components)} strongly connected components, want 1"
            continue
        if scc.periods[0] != 1:
            reason = f"cycle-length gcd {scc.periods[0]}, want 1"
            continue
        return rows
    raise GenerationError(
        f"no acceptable graph in {max_attempts} attempts (last failure: {reason})"
    )


def gen_single_scc(cfg: GenConfig) -> DirectedGraph:
    """One strongly connected period-1 graph on cfg.n nodes."""
    if cfg.kind != "single_scc":
        raise ValueError("config kind must be single_scc")
    rng = _rng(np.random.SeedSequence(cfg.seed))
    rows = _sample_block(cfg.n, cfg.edge_probability(), rng, cfg.max_attempts)
    return DirectedGraph(cfg.n, rows)


def gen_structured(cfg: GenConfig) -> DirectedGraph:
    """scc_count single-SCC blocks wired by a random block-level DAG.

    Blocks are laid out on consecutive node labels. A random topological
    order over blocks admits each forward block pair as a DAG edge with
    probability giving dag_degree expected edges per block; every DAG edge
    is realized by several node-level edges drawn without replacement.
    """
    if cfg.kind != "structured":
        raise ValueError("config kind must be structured")
    k, m = cfg.scc_count, cfg.scc_size
    streams = np.random.SeedSequence(cfg.seed).spawn(k + 1)
    p = cfg.edge_probability()

    n = k * m
    rows = [0] * n
    for b in range(k):
        block_rows = _sample_block(m, p, _rng(streams[b]), cfg.max_attempts)
        for i in range(m):
            rows[b * m + i] |= block_rows[i] << (b * m)

    rng = _rng(streams[k])
    order = rng.permutation(k)
    position = {int(b): pos for pos, b in enumerate(order)}
    if k > 1:
        p_dag = min(1.0, cfg.dag_degree * k / (k * (k - 1) / 2))
    else:
        p_dag = 0.0
    lodeg, hideg = cfg.realizations_per_dag_edge
    for a in range(k):
        for b in range(k):
            if a == b or position[a] >= position[b]:
                continue
            if rng.random() >= p_dag:
                continue
            count = int(rng.integers(lodeg, hideg + 1))
            count = min(count, m * m)
            picks = rng.choice(m * m, size=count, replace=False)
            for pick in picks:
                src = a * m + int(pick) // m
                dst = b * m + int(pick) % m
                rows[src] |= 1 << dst
    return DirectedGraph(n, tuple(rows))


def generate(cfg: GenConfig) -> DirectedGraph:
    return gen_single_scc(cfg) if cfg.kind == "single_scc" else gen_structured(cfg)


def break_edges(h: MixedGraph, count: int, seed: int) -> MixedGraph:
    """Remove count edges chosen uniformly from the pooled directed and
    bidirected edges; deterministic under seed."""
    if count < 0:
        raise ValueError("count must be >= 0")
    pool = [("dir", i, j) for i, j in h.directed_edges()]
    pool += [("bi", x, y) for x, y in h.bidirected_pairs()]
    if count > len(pool):
        raise ValueError(f"cannot break {count} of {len(pool)} edges")
    if count == 0:
        return h
    rng = _rng(np.random.SeedSequence(seed))
    drop = {int(i) for i in rng.choice(len(pool), size=count, replace=False)}
    directed = [(i, j) for idx, (kind, i, j) in enumerate(pool) if kind == "dir" and idx not in drop]
    bidirected = [(x, y) for idx, (kind, x, y) in enumerate(pool) if kind == "bi" and idx not in drop]
    return MixedGraph.from_edges(h.n, directed=directed, bidirected=bidirected)

"""Weighted soft-constraint search for graphs closest to an inexact measured graph.

When no graph measures exactly to the hypothesis (statistical noise, edge
misidentification), each claimed edge and each claimed non-edge carries a
non-negative weight and the search minimizes the total weight of
disagreements between the hypothesis and the candidate's measurement, over
all candidate graphs and all rates up to maxu.

The branch-and-bound reuses the solver's decision order and bound graphs.
A subtree's admissible lower bound charges the disagreements no completion
can avoid: measured edges of the decided-present lower graph that the
hypothesis denies, plus hypothesis edges the all-present upper graph cannot
produce. Subtrees are pruned only when the bound strictly exceeds the
incumbent, so every cost-tied optimum survives to the final canonical
tie-break.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from .graphs import (
    DirectedGraph,
    MixedGraph,
    _bits,
    _full_mask,
    measure_rows,
    pack_rows,
    undersample,
)
from .solver import EquivalenceClass, SolveConfig, solve


def _unit_weights_dir(n: int, rows: tuple[int, ...], present: bool) -> dict:
    out = {}
    for i in range(n):
        for j in range(n):
            if bool(rows[i] >> j & 1) == present:
                out[(i + 1, j + 1)] = 1.0
    return out


def _unit_weights_bi(n: int, rows: tuple[int, ...], present: bool) -> dict:
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            if bool(rows[i] >> j & 1) == present:
                out[(i + 1, j + 1)] = 1.0
    return out


@dataclass(frozen=True)
class WeightedHypothesis:
    """A measured graph plus the cost of disputing each claimed edge or non-edge.

    ``dir_present[(i, j)]`` is charged when the hypothesis edge i -> j is
    missing from the candidate's measurement; ``dir_absent[(i, j)]`` when a
    spurious measured edge appears. ``bi_present`` / ``bi_absent`` do the
    same for bidirected pairs, keyed with the smaller node first. The maps
    must cover exactly the hypothesis edges and exactly their complements.
    """

    base: MixedGraph
    dir_present: dict[tuple[int, int], float]
    dir_absent: dict[tuple[int, int], float]
    bi_present: dict[tuple[int, int], float]
    bi_absent: dict[tuple[int, int], float]

    def __post_init__(self) -> None:
        n = self.base.n
        want_dp = set(self.base.directed_edges())
        want_da = {(i, j) for i in range(1, n + 1) for j in range(1, n + 1)} - want_dp
        want_bp = set(self.base.bidirected_pairs())
        want_ba = {
            (i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)
        } - want_bp
        for name, got, want in (
            ("dir_present", set(self.dir_present), want_dp),
            ("dir_absent", set(self.dir_absent), want_da),
            ("bi_present", set(self.bi_present), want_bp),
            ("bi_absent", set(self.bi_absent), want_ba),
        ):
            if got != want:
                raise ValueError(f"{name} weights must cover exactly {len(want)} pairs")
        for m in (self.dir_present, self.dir_absent, self.bi_present, self.bi_absent):
            for pair, w in m.items():
                if w < 0:
                    raise ValueError(f"negative weight {w} on {pair}")

    @classmethod
    def unit(cls, base: MixedGraph) -> "WeightedHypothesis":
        """Weight 1 on every presence and absence constraint."""
        return cls.with_weights(base)

    @classmethod
    def with_weights(
        cls,
        base: MixedGraph,
        dir_present: dict | None = None,
        dir_absent: dict | None = None,
        bi_present: dict | None = None,
        bi_absent: dict | None = None,
    ) -> "WeightedHypothesis":
        """Fill any weights not listed with the default of 1."""
        n = base.n
        dp = _unit_weights_dir(n, base.dir_rows, True)
        dp.update(dir_present or {})
        da = _unit_weights_dir(n, base.dir_rows, False)
        da.update(dir_absent or {})
        bp = _unit_weights_bi(n, base.bi_rows, True)
        bp.update({(min(p), max(p)): w for p, w in (bi_present or {}).items()})
        ba = _unit_weights_bi(n, base.bi_rows, False)
        ba.update({(min(p), max(p)): w for p, w in (bi_absent or {}).items()})
        return cls(base, dp, da, bp, ba)


@dataclass(frozen=True)
class Optimum:
    graph: DirectedGraph
    rate: int
    cost: float
    all_optima: tuple[tuple[DirectedGraph, int], ...] | None = None


class _CostTables:
    """Weight lookups as row-indexed arrays for the inner loops."""

    def __init__(self, w: WeightedHypothesis):
        n = w.base.n
        self.n = n
        self.base_dir = w.base.dir_rows
        self.base_bi = w.base.bi_rows
        self.wp_dir = [[0.0] * n for _ in range(n)]
        self.wa_dir = [[0.0] * n for _ in range(n)]
        self.wp_bi = [[0.0] * n for _ in range(n)]
        self.wa_bi = [[0.0] * n for _ in range(n)]
        for (i, j), wt in w.dir_present.items():
            self.wp_dir[i - 1][j - 1] = wt
        for (i, j), wt in w.dir_absent.items():
            self.wa_dir[i - 1][j - 1] = wt
        for (i, j), wt in w.bi_present.items():
            self.wp_bi[i - 1][j - 1] = wt
        for (i, j), wt in w.bi_absent.items():
            self.wa_bi[i - 1][j - 1] = wt

    def extra_cost(self, mdir, mbi) -> float:
        """Weight of measured edges the hypothesis does not claim."""
        total = 0.0
        for i in range(self.n):
            for j in _bits(mdir[i] & ~self.base_dir[i]):
                total += self.wa_dir[i][j]
            above = ~((1 << (i + 1)) - 1)
            for j in _bits(mbi[i] & ~self.base_bi[i] & above):
                total += self.wa_bi[i][j]
        return total

    def miss_cost(self, mdir, mbi) -> float:
        """Weight of hypothesis edges absent from the measurement."""
        total = 0.0
        for i in range(self.n):
            for j in _bits(self.base_dir[i] & ~mdir[i]):
                total += self.wp_dir[i][j]
            above = ~((1 << (i + 1)) - 1)
            for j in _bits(self.base_bi[i] & ~mbi[i] & above):
                total += self.wp_bi[i][j]
        return total

    def cost(self, mdir, mbi) -> float:
        return self.extra_cost(mdir, mbi) + self.miss_cost(mdir, mbi)


def discrepancy_cost(g: DirectedGraph, u: int, w: WeightedHypothesis) -> float:
    """Total weight of disagreements between the rate-u measurement of g and w.base."""
    if g.n != w.base.n:
        raise ValueError(f"node count mismatch: {g.n} vs {w.base.n}")
    if u < 1:
        raise ValueError("rate must be >= 1")
    mdir, mbi = measure_rows(g.rows, g.n, u)
    return _CostTables(w).cost(mdir, mbi)


class _Incumbent:
    """Best cost so far plus the surviving cost-tied candidates."""

    def __init__(self, n: int, seed_cost: float, enumerate_all: bool):
        self.n = n
        self.cost = seed_cost
        self.best: tuple[bytes, int, tuple[int, ...]] | None = None
        self.ties: dict[tuple[bytes, int], tuple[int, ...]] = {}
        self.enumerate_all = enumerate_all

    def consider(self, rows, u: int, cost: float) -> None:
        if cost > self.cost:
            return
        key = pack_rows(self.n, rows)
        frozen = tuple(rows)
        if cost < self.cost:
            self.cost = cost
            self.best = (key, u, frozen)
            if self.enumerate_all:
                self.ties = {(key, u): frozen}
            return
        if self.best is None or (key, u) < (self.best[0], self.best[1]):
            self.best = (key, u, frozen)
        if self.enumerate_all:
            self.ties.setdefault((key, u), frozen)


def optimize(
    w: WeightedHypothesis,
    cfg: SolveConfig = SolveConfig(),
    enumerate_all: bool = False,
) -> Optimum:
    """Find the (graph, rate) whose measurement is cheapest to reconcile with w.

    Searches all graphs on w.base's nodes and all rates in [1, cfg.maxu].
    Ties are broken by canonical key, then rate, after the search finishes;
    with enumerate_all every cost-tied optimum is attached. A zero cost
    means the hypothesis was exactly achievable.
    """
    n = w.base.n
    tables = _CostTables(w)
    decisions = [(i, j) for i in range(n) for j in range(n)]

    # Cheap finite incumbent: the empty graph measured at rate 1.
    inc = _Incumbent(n, tables.cost((0,) * n, (0,) * n), enumerate_all)

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, n * n + 500))
    try:
        for u in range(1, cfg.maxu + 1):
            _opt_search_one_rate(n, u, decisions, tables, inc)
    finally:
        sys.setrecursionlimit(old_limit)

    assert inc.best is not None, "search must at least reach the empty graph"
    graph = DirectedGraph(n, inc.best[2])
    rate = inc.best[1]
    check = discrepancy_cost(graph, rate, w)
    if check != inc.cost:
        raise RuntimeError(f"optimum re-verification failed: {check} != {inc.cost}")
    all_optima = None
    if enumerate_all:
        all_optima = tuple(
            (DirectedGraph(n, rows), u2) for (key, u2), rows in sorted(inc.ties.items())
        )
    return Optimum(graph=graph, rate=rate, cost=inc.cost, all_optima=all_optima)


def _opt_search_one_rate(n, u, decisions, tables, inc: _Incumbent) -> None:
    lo = [0] * n
    hi = [_full_mask(n)] * n

    def emit_interval(d: int, cost: float) -> None:
        if not inc.enumerate_all:
            # Within the interval, subsets pack to smaller keys, so the
            # decided-present graph alone carries the canonical minimum.
            inc.consider(lo, u, cost)
            return
        rem = decisions[d:]
        for mask in range(1 << len(rem)):
            rows = list(lo)
            for t, (i, j) in enumerate(rem):
                if mask >> t & 1:
                    rows[i] |= 1 << j
            inc.consider(rows, u, cost)

    def rec(d: int, ulo, uhi, extra: float, miss: float) -> None:
        if extra + miss > inc.cost:
            return
        if ulo == uhi:
            # All completions measure identically and cost extra + miss.
            emit_interval(d, extra + miss)
            return
        if d == len(decisions):
            inc.consider(lo, u, extra + miss)
            return
        i, j = decisions[d]
        bit = 1 << j

        lo[i] |= bit
        ulo2 = measure_rows(lo, n, u)
        rec(d + 1, ulo2, uhi, tables.extra_cost(*ulo2), miss)
        lo[i] &= ~bit

        hi[i] &= ~bit
        uhi2 = measure_rows(hi, n, u)
        rec(d + 1, ulo, uhi2, extra, tables.miss_cost(*uhi2))
        hi[i] |= bit

    ulo = measure_rows(lo, n, u)
    uhi = measure_rows(hi, n, u)
    rec(0, ulo, uhi, tables.extra_cost(*ulo), tables.miss_cost(*uhi))


def refine(
    w: WeightedHypothesis, cfg: SolveConfig = SolveConfig()
) -> tuple[Optimum, EquivalenceClass]:
    """Two-stage estimation: optimize, re-measure the optimum, then solve exactly.

    The optimum's measurement at its own rate is exactly achievable by
    construction, so the returned class is never empty and always contains
    the optimizing graph. Taking the best member of that class can only
    improve on the single optimization output.
    """
    opt = optimize(w, cfg)
    h2 = undersample(opt.graph, opt.rate)
    cls = solve(h2, cfg)
    return opt, cls


def edge_errors(
    g_true: DirectedGraph, g_est: DirectedGraph
) -> tuple[float, float]:
    """(omission, commission): missed fraction of true edges, spurious fraction of estimated edges."""
    if g_true.n != g_est.n:
        raise ValueError(f"node count mismatch: {g_true.n} vs {g_est.n}")
    n_true = g_true.edge_count()
    n_est = g_est.edge_count()
    missed = sum(
        (g_true.rows[i] & ~g_est.rows[i]).bit_count() for i in range(g_true.n)
    )
    spurious = sum(
        (g_est.rows[i] & ~g_true.rows[i]).bit_count() for i in range(g_true.n)
    )
    omission = missed / n_true if n_true else 0.0
    commission = spurious / n_est if n_est else 0.0
    return omission, commission

"""Rate-agnostic enumeration of causal-timescale graphs matching a measured graph.

Given a measured mixed graph h, find every directed graph g (same nodes)
whose measurement at some rate u in [1, maxu] equals h exactly, together
with all such witness rates.

The search runs one depth-first pass per rate over the n^2 edge decisions
in lexicographic order, present before absent. At every branch node the
decided-present edges form a lower graph and decided-present plus
undecided edges form an upper graph; measuring those two bounds the
measurement of every completion from below and above (adding an edge never
removes a measured edge), which yields the prunes:

* lower prune  - the lower graph already measures outside h: no completion
  can shed those edges, kill the subtree.
* upper prune  - the upper graph's measurement misses an edge of h: no
  completion can recover it, kill the subtree.
* scc forcing  - edges between different SCCs of h are forced absent unless
  h's condensation has that edge, exempting singleton destination SCCs.
  Applied only when every non-singleton SCC of h has cycle-length gcd 1;
  otherwise disabled with a warning, since SCC membership is only
  preserved under measurement below that assumption.

When the two bounds measure identically, every completion of the node
measures the same, so the whole interval is either emitted wholesale or
discarded. Every candidate is re-verified by a direct measure-and-compare
before output, so soundness does not rest on the pruning logic.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field

from .graphs import (
    DirectedGraph,
    MixedGraph,
    _bits,
    _full_mask,
    boolean_matmul,
    canonical_key,
    graphs_equal,
    measure_rows,
    pack_rows,
    scc_decompose,
    undersample,
)


class SoundnessError(RuntimeError):
    """A candidate survived the search but fails direct re-verification."""


@dataclass(frozen=True)
class SolveConfig:
    maxu: int = 20
    use_scc_decomposition: bool = True
    search_order: str = "lexicographic"
    use_lower_prune: bool = True
    use_upper_prune: bool = True

    def __post_init__(self) -> None:
        if self.maxu < 1:
            raise ValueError("maxu must be >= 1")
        if self.search_order != "lexicographic":
            raise ValueError(f"unknown search order {self.search_order!r}")


@dataclass
class SolveStats:
    maxu: int = 0
    nodes_expanded: int = 0
    prunes_lower: int = 0
    prunes_upper: int = 0
    prunes_collapse: int = 0
    prunes_fanout: int = 0
    prunes_support: int = 0
    prunes_stratum: int = 0
    forced_absent: int = 0
    forced_present: int = 0
    scc_forced_absent: int = 0
    scc_prune_active: bool = False
    bulk_members: int = 0
    elapsed_s: float = 0.0
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "maxu": self.maxu,
            "nodes_expanded": self.nodes_expanded,
            "prunes_lower": self.prunes_lower,
            "prunes_upper": self.prunes_upper,
            "prunes_collapse": self.prunes_collapse,
            "prunes_fanout": self.prunes_fanout,
            "prunes_support": self.prunes_support,
            "prunes_stratum": self.prunes_stratum,
            "forced_absent": self.forced_absent,
            "forced_present": self.forced_present,
            "scc_forced_absent": self.scc_forced_absent,
            "scc_prune_active": self.scc_prune_active,
            "bulk_members": self.bulk_members,
            "elapsed_s": self.elapsed_s,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class ClassMember:
    graph: DirectedGraph
    witnesses: tuple[int, ...]


@dataclass(frozen=True)
class EquivalenceClass:
    """Members sorted by canonical key; an empty class is a valid result."""

    entries: tuple[ClassMember, ...]
    stats: SolveStats

    def __len__(self) -> int:
        return len(self.entries)

    def graphs(self) -> list[DirectedGraph]:
        return [m.graph for m in self.entries]

    def contains(self, g: DirectedGraph) -> bool:
        key = canonical_key(g)
        return any(canonical_key(m.graph) == key for m in self.entries)


def _measure_within(
    rows: list[int],
    n: int,
    u: int,
    h_dir: tuple[int, ...],
    h_bi: tuple[int, ...],
) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Like measure_rows, but bail out with None as soon as the result leaves h."""
    base = tuple(rows)
    bi = [0] * n
    power = base
    for _ in range(1, u):
        for z in range(n):
            reach = power[z]
            if reach.bit_count() >= 2:
                for x in _bits(reach):
                    extra = reach & ~(1 << x)
                    if extra & ~h_bi[x]:
                        return None
                    bi[x] |= extra
        power = boolean_matmul(power, base)
    for i in range(n):
        if power[i] & ~h_dir[i]:
            return None
    return power, tuple(bi)


def _covers(
    m: tuple[tuple[int, ...], tuple[int, ...]],
    h_dir: tuple[int, ...],
    h_bi: tuple[int, ...],
    n: int,
) -> bool:
    mdir, mbi = m
    for i in range(n):
        if h_dir[i] & ~mdir[i] or h_bi[i] & ~mbi[i]:
            return False
    return True


def _clique_bound(mask: int, bi_compat: tuple[int, ...]) -> int:
    """Upper bound on the largest bi-compatible clique inside mask."""
    best = 0
    for y in _bits(mask):
        size = (mask & bi_compat[y]).bit_count()
        if size > best:
            best = size
    return best


def _fanout_feasible(
    n: int,
    u: int,
    hi: list[int],
    h_dir: tuple[int, ...],
    h_bi: tuple[int, ...],
    bi_compat: tuple[int, ...],
) -> bool:
    """Can each node's measured fan-out be as wide as h demands, at rate u?

    Every exact-length front along a walk of fewer than u steps is a set of
    co-caused nodes, so it must be a clique of h's bidirected part. Chaining
    per-node clique caps over the edges still available in hi bounds how
    many rate-u targets a node can have; a row of h wider than its bound is
    unachievable. In particular, with no bidirected edges at all every
    out-degree is capped at one and h's rows must be single edges.
    """
    caps = [_clique_bound(hi[w], bi_compat) for w in range(n)]
    for z in range(n):
        need = h_dir[z].bit_count()
        if need == 0:
            continue
        bound = _clique_bound(hi[z], bi_compat)
        front = hi[z]
        for step in range(2, u + 1):
            member_caps = sorted((caps[w] for w in _bits(front)), reverse=True)
            bound = sum(member_caps[:bound])
            nxt = 0
            for w in _bits(front):
                nxt |= hi[w]
            front = nxt
            if step <= u - 1:
                bound = min(bound, _clique_bound(front, bi_compat))
            if bound == 0:
                break
        if bound < need:
            return False
    return True


def scc_allowed_rows(h: MixedGraph) -> tuple[tuple[int, ...] | None, str | None]:
    """Row masks of edges not forced absent by h's SCC structure.

    Returns (None, warning) when some non-singleton SCC of h has cycle-length
    gcd other than 1, in which case the forcing is not sound and must stay off.
    """
    scc = scc_decompose(h)
    for c, comp in enumerate(scc.components):
        if len(comp) > 1 and scc.periods[c] != 1:
            return None, (
                f"scc {set(comp)} has cycle-length gcd {scc.periods[c]}; "
                "structural forcing disabled"
            )
    n = h.n
    comp_mask = [0] * len(scc.components)
    for v in range(n):
        comp_mask[scc.membership[v]] |= 1 << v
    rows = []
    for i in range(n):
        ci = scc.membership[i]
        allowed = comp_mask[ci]
        for cj in range(len(scc.components)):
            if cj == ci:
                continue
            if len(scc.components[cj]) == 1 or (ci, cj) in scc.condensation:
                allowed |= comp_mask[cj]
        rows.append(allowed)
    return tuple(rows), None


def solve(h: MixedGraph, cfg: SolveConfig = SolveConfig()) -> EquivalenceClass:
    """Enumerate every g with a rate u <= cfg.maxu such that measuring g at u gives h.

    Rates are searched in an outer loop (their searches are independent);
    results are merged, deduplicated by canonical key, and re-verified
    directly, with witness sets covering every matching rate in range.
    """
    t0 = time.perf_counter()
    n = h.n
    stats = SolveStats(maxu=cfg.maxu)
    full = _full_mask(n)

    hi0: tuple[int, ...] = (full,) * n
    if cfg.use_scc_decomposition:
        allowed, warning = scc_allowed_rows(h)
        if allowed is None:
            stats.warnings.append(warning)
        else:
            stats.scc_prune_active = True
            hi0 = allowed

    decisions = [
        (i, j) for i in range(n) for j in range(n) if hi0[i] >> j & 1
    ]
    stats.scc_forced_absent = n * n - len(decisions)

    # The structural restriction is sound only for graphs whose strongly
    # connected components survive measurement intact; a component of
    # cycle-length gcd >= 2 can shatter invisibly, so candidates using a
    # forbidden edge are swept in a second stratum that requires one.
    # The strata are disjoint and together cover every graph.
    strata: list[tuple[tuple[int, ...], list, tuple[int, ...] | None]] = [
        (hi0, decisions, None)
    ]
    forbidden = tuple(full & ~hi0[i] for i in range(n))
    if any(forbidden):
        full_rows = (full,) * n
        forb_first = [(i, j) for i in range(n) for j in range(n) if forbidden[i] >> j & 1]
        rest = [(i, j) for i in range(n) for j in range(n) if hi0[i] >> j & 1]
        strata.append((full_rows, forb_first + rest, forbidden))

    found: dict[bytes, tuple[int, ...]] = {}
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, n * n + 500))
    try:
        for u in range(1, cfg.maxu + 1):
            for hi_rows, stratum_decisions, require_any in strata:
                _search_one_rate(
                    h, u, hi_rows, stratum_decisions, cfg, stats, found, require_any
                )
    finally:
        sys.setrecursionlimit(old_limit)

    members = []
    for key in sorted(found):
        g = DirectedGraph(n, found[key])
        witnesses = tuple(
            u for u in range(1, cfg.maxu + 1) if graphs_equal(undersample(g, u), h)
        )
        if not witnesses:
            raise SoundnessError(
                f"candidate {g.edges()} matches no rate in 1..{cfg.maxu}"
            )
        members.append(ClassMember(graph=g, witnesses=witnesses))

    stats.elapsed_s = time.perf_counter() - t0
    return EquivalenceClass(entries=tuple(members), stats=stats)


def _search_one_rate(
    h: MixedGraph,
    u: int,
    hi0: tuple[int, ...],
    decisions: list[tuple[int, int]],
    cfg: SolveConfig,
    stats: SolveStats,
    found: dict[bytes, tuple[int, ...]],
    require_any: tuple[int, ...] | None = None,
) -> None:
    """Collect every graph measuring exactly to h at rate u into found.

    Rate 4 factors through rate 2 twice: A^4 = (A^2)^2, and the square's
    rows are the candidate's two-step fronts, so the intermediate graph C
    must itself satisfy C^2 = h.dir with bidirected-compatible rows. Both
    stages are rate-2 searches, which are far cheaper than a direct rate-4
    search; each composite candidate is kept only if it measures back to h.
    """
    n = h.n
    zeros = (0,) * n
    if u == 4:
        hi0_sq = boolean_matmul(hi0, hi0)
        sq_pairs = [(i, j) for i in range(n) for j in range(n) if hi0_sq[i] >> j & 1]
        squares = _rate_search(
            n, 2, h.dir_rows, zeros, h.bi_rows, hi0_sq, sq_pairs, cfg, stats
        )
        for c_rows in squares.values():
            roots = _rate_search(
                n, 2, c_rows, zeros, h.bi_rows, hi0, decisions, cfg, stats, require_any
            )
            for key, rows in roots.items():
                if key in found:
                    continue
                if graphs_equal(undersample(DirectedGraph(n, rows), 4), h):
                    found[key] = rows
        return
    hits = _rate_search(
        n, u, h.dir_rows, h.bi_rows, h.bi_rows, hi0, decisions, cfg, stats, require_any
    )
    for key, rows in hits.items():
        if key not in found:
            found[key] = rows


def _rate_search(
    n: int,
    u: int,
    target_dir: tuple[int, ...],
    required_bi: tuple[int, ...],
    allowed_bi: tuple[int, ...],
    hi0: tuple[int, ...],
    decisions: list[tuple[int, int]],
    cfg: SolveConfig,
    stats: SolveStats,
    require_any: tuple[int, ...] | None = None,
) -> dict[bytes, tuple[int, ...]]:
    """All graphs whose rate-u measurement has directed part exactly
    target_dir and bidirected part between required_bi and allowed_bi.

    The exact solve passes required == allowed == h.bi; the rate-4
    factorization stages pass required = 0 to drop the coverage side.
    With require_any, only graphs containing at least one of those edges
    are emitted (the completion stratum of the structural restriction).
    """
    target = (target_dir, required_bi)
    lo = [0] * n
    hi = list(hi0)
    found: dict[bytes, tuple[int, ...]] = {}
    forcing = u >= 2
    full = _full_mask(n)
    # Partner masks: once (z, y) is present, a second out-edge (z, y')
    # surfaces as the measured bidirected pair {y, y'} at every rate >= 2,
    # so y' must be compatible with y. Nothing of the kind at rate 1.
    bi_compat = tuple(allowed_bi[y] | (1 << y) for y in range(n))
    required_dir_pairs = [
        (i, j) for i in range(n) for j in _bits(target_dir[i])
    ]
    required_bi_pairs = [
        (x, y) for x in range(n) for y in _bits(required_bi[x]) if x < y
    ]

    if forcing and not _fanout_feasible(n, u, hi, target_dir, allowed_bi, bi_compat):
        stats.prunes_fanout += 1
        return found

    def matches(m: tuple[tuple[int, ...], tuple[int, ...]]) -> bool:
        mdir, mbi = m
        if mdir != target_dir:
            return False
        for i in range(n):
            if required_bi[i] & ~mbi[i] or mbi[i] & ~allowed_bi[i]:
                return False
        return True

    def emit_interval(d: int) -> None:
        rem = [
            (i, j)
            for (i, j) in decisions[d:]
            if hi[i] >> j & 1 and not lo[i] >> j & 1
        ]
        for mask in range(1 << len(rem)):
            rows = list(lo)
            for t, (i, j) in enumerate(rem):
                if mask >> t & 1:
                    rows[i] |= 1 << j
            key = pack_rows(n, rows)
            if key not in found:
                found[key] = tuple(rows)
        stats.bulk_members += 1 << len(rem)

    def chain_masks(touch) -> bool:
        """Force absent the single-edge extensions of decided walks that
        would certainly measure outside the target; True if hi changed.

        With P[L] the exact-L walk relation of the decided-present graph:
        a length-(u-1) decided walk s => t pins the final step out of t to
        the measured row of s (and an edge (w, s) would pin t into w's
        row); fronts P[L][s] are co-caused sets, so one more step must
        stay bidirected-compatible with the next front.
        """
        changed = False

        def shrink(row: int, mask: int) -> None:
            nonlocal changed
            new_row = (hi[row] & mask) | lo[row]
            if new_row != hi[row]:
                if row not in touch:
                    touch[row] = (lo[row], hi[row])
                hi[row] = new_row
                changed = True
                stats.forced_absent += 1

        powers = [None] * u  # powers[L] = exact-L walk rows of lo, L >= 1
        powers[1] = tuple(lo)
        for L in range(2, u):
            powers[L] = boolean_matmul(powers[L - 1], powers[1])

        for s in range(n):
            sbit = 1 << s
            ends = powers[u - 1][s]
            for t in _bits(ends):
                shrink(t, target_dir[s])
            if ends:
                for w in range(n):
                    if hi[w] & sbit and not lo[w] & sbit and ends & ~target_dir[w]:
                        shrink(w, ~sbit)
            for L in range(1, u):
                front = powers[L][s]
                allowed = full
                for y in _bits(front):
                    allowed &= bi_compat[y]
                if allowed != full:
                    for t in _bits(powers[L - 1][s] if L >= 2 else sbit):
                        shrink(t, allowed)
            # An edge (w, s) prepends w to every walk from s: front L of s
            # joins front L+1 of w, so they must be mutually compatible.
            for w in range(n):
                if not (hi[w] & sbit) or lo[w] & sbit:
                    continue
                ok = True
                for L in range(0, u - 1):
                    a_front = powers[L][s] if L >= 1 else sbit
                    b_front = powers[L + 1][w]
                    if not a_front or not b_front:
                        continue
                    need = full
                    for y in _bits(b_front):
                        need &= bi_compat[y]
                    if a_front & ~need:
                        ok = False
                        break
                if not ok:
                    shrink(w, ~sbit)
        return changed

    def support_force(touch):
        """Force present the unique remaining realization of a required
        edge; returns (conflict, changed).

        At rate 2 a required directed pair (i, j) needs a mid node k with
        (i, k) and (k, j) still available, and a required bidirected pair
        {x, y} needs a common cause z; at rate 3 a directed pair needs a
        two-node chain. Zero options kill the subtree, exactly one pins
        its edges into every completion.
        """
        changed = False
        hi_t = [0] * n
        for a in range(n):
            for b in _bits(hi[a]):
                hi_t[b] |= 1 << a

        def grow(row: int, bit: int) -> None:
            nonlocal changed
            if not lo[row] & bit:
                if row not in touch:
                    touch[row] = (lo[row], hi[row])
                lo[row] |= bit
                changed = True
                stats.forced_present += 1

        if u == 2:
            for i, j in required_dir_pairs:
                mids = hi[i] & hi_t[j]
                if not mids:
                    return True, changed
                if mids & (mids - 1) == 0:
                    k = mids.bit_length() - 1
                    grow(i, 1 << k)
                    grow(k, 1 << j)
            for x, y in required_bi_pairs:
                causes = hi_t[x] & hi_t[y]
                if not causes:
                    return True, changed
                if causes & (causes - 1) == 0:
                    z = causes.bit_length() - 1
                    grow(z, 1 << x)
                    grow(z, 1 << y)
        elif u == 3:
            for i, j in required_dir_pairs:
                total = 0
                unique = None
                for k in _bits(hi[i]):
                    opts = hi[k] & hi_t[j]
                    c = opts.bit_count()
                    if c:
                        total += c
                        unique = (k, opts.bit_length() - 1)
                        if total > 1:
                            break
                if total == 0:
                    return True, changed
                if total == 1:
                    k, m = unique
                    grow(i, 1 << k)
                    grow(k, 1 << m)
                    grow(m, 1 << j)
        return False, changed

    def propagate():
        """Alternate forcings to a fixpoint; (conflict, touched-row undo map)."""
        touch: dict[int, tuple[int, int]] = {}
        if not forcing:
            return False, touch
        while True:
            changed = chain_masks(touch)
            conflict, grew = support_force(touch)
            if conflict:
                return True, touch
            if not (changed or grew):
                return False, touch

    def undo(touch) -> None:
        for row, (lo_val, hi_val) in touch.items():
            lo[row] = lo_val
            hi[row] = hi_val

    def bounds_after(lo_changed: bool, hi_changed: bool, ulo, uhi):
        """Refresh the measured bounds the last move invalidated.

        Returns (ok, ulo, uhi); a stale upper bound is only ever too big,
        so skipping its refresh when hi is untouched stays sound.
        """
        if cfg.use_lower_prune:
            if lo_changed or ulo is None:
                ulo = _measure_within(lo, n, u, target_dir, allowed_bi)
                if ulo is None:
                    stats.prunes_lower += 1
                    return False, None, uhi
        else:
            ulo = None
        if cfg.use_upper_prune:
            if hi_changed or uhi is None:
                uhi = measure_rows(hi, n, u)
                if not _covers(uhi, target_dir, required_bi, n):
                    stats.prunes_upper += 1
                    return False, ulo, None
        else:
            uhi = None
        return True, ulo, uhi

    def rec(d: int, ulo, uhi) -> None:
        stats.nodes_expanded += 1
        if require_any is not None and not any(
            hi[i] & require_any[i] for i in range(n)
        ):
            stats.prunes_stratum += 1
            return
        if ulo is not None and uhi is not None and ulo == uhi:
            # Every completion measures identically: one check settles all.
            if matches(ulo):
                emit_interval(d)
            else:
                stats.prunes_collapse += 1
            return
        while d < len(decisions):
            i, j = decisions[d]
            if lo[i] >> j & 1 or not hi[i] >> j & 1:
                d += 1
                continue
            break
        if d == len(decisions):
            value = uhi if uhi is not None else (ulo if ulo is not None else measure_rows(lo, n, u))
            if matches(value):
                key = pack_rows(n, lo)
                if key not in found:
                    found[key] = tuple(lo)
            return
        i, j = decisions[d]
        bit = 1 << j

        lo[i] |= bit
        conflict, touch = propagate()
        if conflict:
            stats.prunes_support += 1
        else:
            hi_changed = any(hi[r] != hv for r, (_, hv) in touch.items())
            ok, ulo2, uhi2 = bounds_after(True, hi_changed, ulo, uhi)
            if ok:
                rec(d + 1, ulo2, uhi2)
        undo(touch)
        lo[i] &= ~bit

        hi[i] &= ~bit
        conflict, touch = propagate()
        if conflict:
            stats.prunes_support += 1
        else:
            lo_changed = any(lo[r] != lv for r, (lv, _) in touch.items())
            ok, ulo2, uhi2 = bounds_after(lo_changed, True, ulo, uhi)
            if ok:
                rec(d + 1, ulo2, uhi2)
        undo(touch)
        hi[i] |= bit

    conflict, _root_touch = propagate()
    if conflict:
        stats.prunes_support += 1
        return found
    ok, ulo, uhi = bounds_after(True, True, None, None)
    if not ok:
        return found
    rec(0, ulo, uhi)
    return found


def witness_rates(g: DirectedGraph, h: MixedGraph, maxu: int) -> tuple[int, ...]:
    """Every rate u in [1, maxu] at which measuring g yields exactly h."""
    if g.n != h.n:
        raise ValueError(f"node count mismatch: {g.n} vs {h.n}")
    if maxu < 1:
        raise ValueError("maxu must be >= 1")
    return tuple(u for u in range(1, maxu + 1) if graphs_equal(undersample(g, u), h))

"""Exhaustive brute-force ground truth for small instances.

Everything here recomputes reachability by explicit walk-front extension
over successor lists and Python sets. It deliberately shares no code with
the matrix-power operator in :mod:`unsample.graphs`, so agreement between
the two is a meaningful check. Never called by the solver or optimizer.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .graphs import DirectedGraph, MixedGraph, canonical_key, mixed_key
from .solver import ClassMember, EquivalenceClass, SolveStats

MAX_ORACLE_NODES = 5
_FAST_NODES = 4


class OracleSizeError(ValueError):
    pass


def _successors(g: DirectedGraph) -> list[list[int]]:
    n = g.n
    succ: list[list[int]] = [[] for _ in range(n)]
    for i, j in g.edges():
        succ[i - 1].append(j - 1)
    return succ


def _decode(code: int, n: int) -> DirectedGraph:
    edges = []
    for k in range(n * n):
        if code >> k & 1:
            edges.append((k // n + 1, k % n + 1))
    return DirectedGraph.from_edges(n, edges)


def _encode_mixed(n: int, dir_pairs: set, bi_pairs: set) -> tuple:
    return (tuple(sorted(dir_pairs)), tuple(sorted(bi_pairs)))


def _mixed_signature(h: MixedGraph) -> tuple:
    dir_pairs = {(i - 1, j - 1) for i, j in h.directed_edges()}
    bi_pairs = {(x - 1, y - 1) for x, y in h.bidirected_pairs()}
    return _encode_mixed(h.n, dir_pairs, bi_pairs)


def _undersample_signatures(succ: list[list[int]], n: int, maxu: int) -> list[tuple]:
    """Signature of the measured graph at every rate 1..maxu, by walk extension."""
    fronts = [set(succ[s]) for s in range(n)]
    bi_pairs: set[tuple[int, int]] = set()
    out = []
    for u in range(1, maxu + 1):
        dir_pairs = {(s, t) for s in range(n) for t in fronts[s]}
        out.append(_encode_mixed(n, dir_pairs, set(bi_pairs)))
        # Extend every front by one step; the rate-u fronts feed the
        # common-cause pairs of every rate above u.
        for s in range(n):
            front = fronts[s]
            if len(front) >= 2:
                bi_pairs.update(combinations(sorted(front), 2))
            nxt = set()
            for x in front:
                nxt.update(succ[x])
            fronts[s] = nxt
    return out


def oracle_undersample(g: DirectedGraph, u: int) -> MixedGraph:
    """Walk-enumeration undersampling, independent of the matrix-power path."""
    if u < 1:
        raise ValueError("undersampling rate must be >= 1")
    sig = _undersample_signatures(_successors(g), g.n, u)[u - 1]
    dir_pairs, bi_pairs = sig
    return MixedGraph.from_edges(
        g.n,
        directed=[(i + 1, j + 1) for i, j in dir_pairs],
        bidirected=[(x + 1, y + 1) for x, y in bi_pairs],
    )


def _check_size(n: int, allow_slow: bool) -> None:
    if n > MAX_ORACLE_NODES:
        raise OracleSizeError(
            f"brute force enumerates 2^(n^2) graphs; n={n} exceeds the "
            f"ceiling of {MAX_ORACLE_NODES}"
        )
    if n > _FAST_NODES and not allow_slow:
        raise OracleSizeError(
            f"n={n} means {2 ** (n * n):,} graphs; pass allow_slow=True "
            "if you really want to wait"
        )


def brute_force_class(h: MixedGraph, maxu: int, allow_slow: bool = False) -> EquivalenceClass:
    """Enumerate all 2^(n^2) graphs and keep those measuring as h at some rate <= maxu."""
    if maxu < 1:
        raise ValueError("maxu must be >= 1")
    _check_size(h.n, allow_slow)
    n = h.n
    target = _mixed_signature(h)
    members = []
    for code in range(1 << (n * n)):
        g = _decode(code, n)
        sigs = _undersample_signatures(_successors(g), n, maxu)
        witnesses = tuple(u for u, sig in enumerate(sigs, start=1) if sig == target)
        if witnesses:
            members.append(ClassMember(graph=g, witnesses=witnesses))
    members.sort(key=lambda m: canonical_key(m.graph))
    return EquivalenceClass(entries=tuple(members), stats=SolveStats(maxu=maxu))


class BruteForceIndex:
    """One full enumeration for a node count, then constant-time class lookups.

    Builds the same classes as :func:`brute_force_class`; use it when many
    hypotheses of one size must be checked.
    """

    def __init__(self, n: int, maxu: int, allow_slow: bool = False):
        _check_size(n, allow_slow)
        if maxu < 1:
            raise ValueError("maxu must be >= 1")
        self.n = n
        self.maxu = maxu
        self._by_signature: dict[tuple, list[tuple[int, tuple[int, ...]]]] = {}
        for code in range(1 << (n * n)):
            succ = _successors(_decode(code, n))
            sigs = _undersample_signatures(succ, n, maxu)
            per_sig: dict[tuple, list[int]] = {}
            for u, sig in enumerate(sigs, start=1):
                per_sig.setdefault(sig, []).append(u)
            for sig, us in per_sig.items():
                self._by_signature.setdefault(sig, []).append((code, tuple(us)))

    def class_of(self, h: MixedGraph) -> EquivalenceClass:
        if h.n != self.n:
            raise ValueError(f"index built for n={self.n}, got n={h.n}")
        hits = self._by_signature.get(_mixed_signature(h), [])
        members = [
            ClassMember(graph=_decode(code, self.n), witnesses=ws) for code, ws in hits
        ]
        members.sort(key=lambda m: canonical_key(m.graph))
        return EquivalenceClass(entries=tuple(members), stats=SolveStats(maxu=self.maxu))


@dataclass(frozen=True)
class UndersampleSequence:
    """Measured graphs at rates 1, 2, ... until a repeat or the cap."""

    steps: tuple[tuple[int, MixedGraph], ...]
    stopped_by_repeat: bool

    @property
    def stopped_by_cap(self) -> bool:
        return not self.stopped_by_repeat


def undersample_sequence(g: DirectedGraph, cap: int) -> UndersampleSequence:
    """Walk the rate sequence of g, stopping at the first repeated measured graph.

    The repeated graph (when there is one) is included as the last step, so
    callers can see which earlier rate it duplicates. Further rates cannot
    produce anything new once a repeat occurs.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    seen: set[bytes] = set()
    steps = []
    for u in range(1, cap + 1):
        m = oracle_undersample(g, u)
        key = mixed_key(m)
        steps.append((u, m))
        if key in seen:
            return UndersampleSequence(steps=tuple(steps), stopped_by_repeat=True)
        seen.add(key)
    return UndersampleSequence(steps=tuple(steps), stopped_by_repeat=False)

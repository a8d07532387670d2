"""Core graph types and the undersampling operator.

Graphs live on nodes labeled 1..n. Adjacency is stored as one Python int
per row (bit j-1 set in row i-1 means an edge i -> j), so subset tests,
unions and boolean matrix products are whole-row bitwise operations.
All values are immutable after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Iterator, Union


def _full_mask(n: int) -> int:
    return (1 << n) - 1


def _bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of mask, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _check_rows(n: int, rows: tuple[int, ...], what: str) -> None:
    if len(rows) != n:
        raise ValueError(f"{what}: expected {n} rows, got {len(rows)}")
    full = _full_mask(n)
    for i, row in enumerate(rows):
        if row < 0 or row & ~full:
            raise ValueError(f"{what}: row {i + 1} has bits outside 1..{n}")


@dataclass(frozen=True)
class DirectedGraph:
    """A candidate causal-timescale graph: directed edges, self-loops allowed."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("node count must be >= 1")
        _check_rows(self.n, self.rows, "adjacency")

    @classmethod
    def empty(cls, n: int) -> "DirectedGraph":
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> "DirectedGraph":
        return cls(n, (_full_mask(n),) * n)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "DirectedGraph":
        rows = [0] * n
        for i, j in edges:
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"edge ({i},{j}) outside 1..{n}")
            rows[i - 1] |= 1 << (j - 1)
        return cls(n, tuple(rows))

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.rows[i - 1] >> (j - 1) & 1)

    def edges(self) -> list[tuple[int, int]]:
        """All directed edges as 1-based pairs in lexicographic order."""
        return [(i + 1, j + 1) for i in range(self.n) for j in _bits(self.rows[i])]

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.rows)

    def with_edge(self, i: int, j: int) -> "DirectedGraph":
        rows = list(self.rows)
        rows[i - 1] |= 1 << (j - 1)
        return DirectedGraph(self.n, tuple(rows))

    def without_edge(self, i: int, j: int) -> "DirectedGraph":
        rows = list(self.rows)
        rows[i - 1] &= ~(1 << (j - 1))
        return DirectedGraph(self.n, tuple(rows))


@dataclass(frozen=True)
class MixedGraph:
    """A measured graph: directed edges plus symmetric irreflexive bidirected edges."""

    n: int
    dir_rows: tuple[int, ...]
    bi_rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("node count must be >= 1")
        _check_rows(self.n, self.dir_rows, "directed part")
        _check_rows(self.n, self.bi_rows, "bidirected part")
        for i in range(self.n):
            if self.bi_rows[i] >> i & 1:
                raise ValueError(f"bidirected self-loop at node {i + 1}")
        for i in range(self.n):
            for j in _bits(self.bi_rows[i]):
                if not self.bi_rows[j] >> i & 1:
                    raise ValueError(f"bidirected part not symmetric at {i + 1},{j + 1}")

    @classmethod
    def from_edges(
        cls,
        n: int,
        directed: Iterable[tuple[int, int]] = (),
        bidirected: Iterable[tuple[int, int]] = (),
    ) -> "MixedGraph":
        dir_rows = [0] * n
        for i, j in directed:
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"edge ({i},{j}) outside 1..{n}")
            dir_rows[i - 1] |= 1 << (j - 1)
        bi_rows = [0] * n
        for x, y in bidirected:
            if not (1 <= x <= n and 1 <= y <= n):
                raise ValueError(f"pair ({x},{y}) outside 1..{n}")
            if x == y:
                raise ValueError(f"bidirected self-loop at node {x}")
            bi_rows[x - 1] |= 1 << (y - 1)
            bi_rows[y - 1] |= 1 << (x - 1)
        return cls(n, tuple(dir_rows), tuple(bi_rows))

    def directed_part(self) -> DirectedGraph:
        return DirectedGraph(self.n, self.dir_rows)

    def directed_edges(self) -> list[tuple[int, int]]:
        return [(i + 1, j + 1) for i in range(self.n) for j in _bits(self.dir_rows[i])]

    def bidirected_pairs(self) -> list[tuple[int, int]]:
        """Unordered pairs, reported once each with smaller node first."""
        return [
            (i + 1, j + 1)
            for i in range(self.n)
            for j in _bits(self.bi_rows[i])
            if i < j
        ]

    def edge_count(self) -> int:
        ndir = sum(row.bit_count() for row in self.dir_rows)
        nbi = sum(row.bit_count() for row in self.bi_rows) // 2
        return ndir + nbi

    def has_directed(self, i: int, j: int) -> bool:
        return bool(self.dir_rows[i - 1] >> (j - 1) & 1)

    def has_bidirected(self, x: int, y: int) -> bool:
        return bool(self.bi_rows[x - 1] >> (y - 1) & 1)


@dataclass(frozen=True)
class SccDecomposition:
    """Strongly connected components of a directed graph.

    Components are listed in topological order of the condensation and
    identified by their index in that list. ``period(c)`` is the gcd of all
    cycle lengths inside component c, with 0 for a singleton without a
    self-loop.
    """

    n: int
    membership: tuple[int, ...]
    components: tuple[tuple[int, ...], ...]
    condensation: frozenset[tuple[int, int]]
    periods: tuple[int, ...]

    def component_of(self, node: int) -> int:
        return self.membership[node - 1]

    def component_size(self, comp: int) -> int:
        return len(self.components[comp])

    def period(self, comp: int) -> int:
        return self.periods[comp]


GraphLike = Union[DirectedGraph, MixedGraph]


def boolean_matmul(rows_a: tuple[int, ...], rows_b: tuple[int, ...]) -> tuple[int, ...]:
    """Boolean product: bit j of row i set iff some k has a[i,k] and b[k,j]."""
    out = []
    for row in rows_a:
        acc = 0
        for k in _bits(row):
            acc |= rows_b[k]
        out.append(acc)
    return tuple(out)


def walk_rows(rows: tuple[int, ...], length: int) -> tuple[int, ...]:
    """Exact-length walk relation: the boolean ``length``-th power of rows."""
    if length < 1:
        raise ValueError("walk length must be >= 1")
    power = rows
    for _ in range(length - 1):
        power = boolean_matmul(power, rows)
    return power


def measure_rows(rows, n: int, u: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Directed and bidirected row masks of the rate-u measurement of rows."""
    base = tuple(rows)
    bi = [0] * n
    power = base
    for _ in range(1, u):
        # power is the L-step walk relation for the L just passed; every
        # pair of distinct nodes in one of its rows shares a common cause.
        for z in range(n):
            reach = power[z]
            if reach.bit_count() >= 2:
                for x in _bits(reach):
                    bi[x] |= reach
        power = boolean_matmul(power, base)
    for x in range(n):
        bi[x] &= ~(1 << x)
    return power, tuple(bi)


def undersample(g: DirectedGraph, u: int) -> MixedGraph:
    """Measure g at rate u.

    The directed part holds a pair (i,j) iff g has a walk of length exactly
    u from i to j. The bidirected part holds {x,y}, x != y, iff some node z
    has walks of one common length L, 1 <= L <= u-1, to both x and y (an
    unmeasured common cause fewer than u steps back). Rate 1 is the
    identity on the directed part with no bidirected edges.
    """
    if u < 1:
        raise ValueError("undersampling rate must be >= 1")
    dir_rows, bi_rows = measure_rows(g.rows, g.n, u)
    return MixedGraph(g.n, dir_rows, bi_rows)


def is_edge_subset(a: MixedGraph, b: MixedGraph) -> bool:
    """True iff every directed and bidirected edge of a is in b."""
    if a.n != b.n:
        raise ValueError(f"node count mismatch: {a.n} vs {b.n}")
    for i in range(a.n):
        if a.dir_rows[i] & ~b.dir_rows[i]:
            return False
        if a.bi_rows[i] & ~b.bi_rows[i]:
            return False
    return True


def graphs_equal(a: MixedGraph, b: MixedGraph) -> bool:
    """True iff node count, directed part, and bidirected part all coincide."""
    return a.n == b.n and a.dir_rows == b.dir_rows and a.bi_rows == b.bi_rows


def pack_rows(n: int, rows) -> bytes:
    """Row-major bit packing of n rows of n bits each."""
    packed = 0
    for i, row in enumerate(rows):
        packed |= row << (i * n)
    nbits = n * len(rows)
    return packed.to_bytes((nbits + 7) // 8, "little")


def canonical_key(g: DirectedGraph) -> bytes:
    """Row-major bit packing of the adjacency relation.

    Injective over graphs of equal node count; used for deduplication and
    deterministic output ordering.
    """
    return pack_rows(g.n, g.rows)


def mixed_key(m: MixedGraph) -> bytes:
    """Packed directed rows followed by packed bidirected rows."""
    return pack_rows(m.n, m.dir_rows + m.bi_rows)


def scc_decompose(g: GraphLike) -> SccDecomposition:
    """Strongly connected components of g (the directed part, for a MixedGraph).

    Iterative Tarjan, components emitted in topological order. Periods come
    from the standard levelling computation: breadth-first levels from a
    component root, then the gcd of level(x) + 1 - level(y) over all
    internal edges (x -> y).
    """
    n = g.n
    rows = g.rows if isinstance(g, DirectedGraph) else g.dir_rows
    succ = [tuple(_bits(rows[i])) for i in range(n)]

    index = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comp_of = [-1] * n
    comp_lists: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, si = work[-1]
            if si == 0:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(si, len(succ[v])):
                w = succ[v][k]
                if index[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp_of[w] = len(comp_lists)
                    comp.append(w)
                    if w == v:
                        break
                comp_lists.append(comp)

    # Tarjan finishes successors first; reverse for topological order.
    k = len(comp_lists)
    comp_lists.reverse()
    remap = [0] * k
    for new_id, comp in enumerate(comp_lists):
        remap[comp_of[comp[0]]] = new_id
    membership = tuple(remap[comp_of[v]] for v in range(n))

    condensation = set()
    for v in range(n):
        cv = membership[v]
        for w in succ[v]:
            cw = membership[w]
            if cv != cw:
                condensation.add((cv, cw))

    periods = []
    for comp in comp_lists:
        inside = set(comp)
        level = {comp[0]: 0}
        frontier = [comp[0]]
        while frontier:
            nxt = []
            for x in frontier:
                for y in succ[x]:
                    if y in inside and y not in level:
                        level[y] = level[x] + 1
                        nxt.append(y)
            frontier = nxt
        p = 0
        for x in comp:
            for y in succ[x]:
                if y in inside:
                    p = gcd(p, level[x] + 1 - level[y])
        periods.append(abs(p))

    return SccDecomposition(
        n=n,
        membership=membership,
        components=tuple(tuple(v + 1 for v in sorted(comp)) for comp in comp_lists),
        condensation=frozenset(condensation),
        periods=tuple(periods),
    )

"""Plain-text graph files.

One graph per file. Lines are comments (``# ...``), a mandatory leading
``nodes <n>`` line, and edge lines::

    1 -> 2          directed edge
    1 <-> 3         bidirected edge (written smaller node first)
    1 -> 2 @ 2.5    directed edge with a presence weight
    1 -/> 4 @ 0.5   absence weight for a directed non-edge
    2 </> 3 @ 3     absence weight for a bidirected non-pair

Weights only make sense for the optimizer's input; plain graphs use the
unweighted forms. Writers emit canonical form: LF endings, edges sorted,
bidirected pairs with the smaller node first, weights only where they
differ from nothing (absence lines always carry weights).
"""

from __future__ import annotations

from .graphs import DirectedGraph, MixedGraph
from .optimizer import WeightedHypothesis


class GraphFormatError(ValueError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


_ARROWS = ("->", "<->", "-/>", "</>")


def _parse_weight(text: str, line_no: int) -> float:
    try:
        w = float(text)
    except ValueError:
        raise GraphFormatError(f"bad weight {text!r}", line_no) from None
    if w < 0:
        raise GraphFormatError(f"negative weight {w}", line_no)
    return w


def _parse_lines(text: str):
    """Yield (line_no, kind, i, j, weight) for each edge line, after the nodes line."""
    n = None
    seen: set[tuple[str, int, int]] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "nodes":
            if n is not None:
                raise GraphFormatError("duplicate nodes line", line_no)
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise GraphFormatError("expected 'nodes <positive integer>'", line_no)
            n = int(parts[1])
            yield line_no, "nodes", n, 0, None
            continue
        if n is None:
            raise GraphFormatError("edge line before the nodes line", line_no)
        if len(parts) == 3:
            weight = None
        elif len(parts) == 5 and parts[3] == "@":
            weight = _parse_weight(parts[4], line_no)
        else:
            raise GraphFormatError(f"unrecognized line {line!r}", line_no)
        lhs, arrow, rhs = parts[0], parts[1], parts[2]
        if arrow not in _ARROWS:
            raise GraphFormatError(f"unknown edge arrow {arrow!r}", line_no)
        if not (lhs.isdigit() and rhs.isdigit()):
            raise GraphFormatError(f"node ids must be integers in {line!r}", line_no)
        i, j = int(lhs), int(rhs)
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphFormatError(f"node id outside 1..{n}", line_no)
        if arrow in ("<->", "</>"):
            if i == j:
                raise GraphFormatError("bidirected self-loop", line_no)
            key = (arrow, min(i, j), max(i, j))
        else:
            key = (arrow, i, j)
        if key in seen:
            raise GraphFormatError(f"duplicate edge line {line!r}", line_no)
        seen.add(key)
        yield line_no, arrow, i, j, weight


def parse_directed(text: str) -> DirectedGraph:
    """Parse a file that must contain directed edges only, no weights."""
    n = None
    edges = []
    for line_no, kind, i, j, weight in _parse_lines(text):
        if kind == "nodes":
            n = i
            continue
        if kind != "->" or weight is not None:
            raise GraphFormatError(
                "only unweighted directed edges allowed here", line_no
            )
        edges.append((i, j))
    if n is None:
        raise GraphFormatError("missing nodes line")
    return DirectedGraph.from_edges(n, edges)


def parse_mixed(text: str) -> MixedGraph:
    """Parse a measured graph: directed and bidirected edges, no weights."""
    n = None
    directed = []
    bidirected = []
    for line_no, kind, i, j, weight in _parse_lines(text):
        if kind == "nodes":
            n = i
            continue
        if weight is not None or kind in ("-/>", "</>"):
            raise GraphFormatError("weights are not allowed here", line_no)
        if kind == "->":
            directed.append((i, j))
        else:
            bidirected.append((i, j))
    if n is None:
        raise GraphFormatError("missing nodes line")
    return MixedGraph.from_edges(n, directed=directed, bidirected=bidirected)


def parse_weighted(text: str) -> WeightedHypothesis:
    """Parse a weighted hypothesis; unlisted weights default to 1."""
    n = None
    directed = []
    bidirected = []
    dir_present = {}
    bi_present = {}
    dir_absent = {}
    bi_absent = {}
    for line_no, kind, i, j, weight in _parse_lines(text):
        if kind == "nodes":
            n = i
            continue
        if kind == "->":
            directed.append((i, j))
            if weight is not None:
                dir_present[(i, j)] = weight
        elif kind == "<->":
            bidirected.append((i, j))
            if weight is not None:
                bi_present[(min(i, j), max(i, j))] = weight
        elif kind == "-/>":
            if weight is None:
                raise GraphFormatError("absence line requires '@ <weight>'", line_no)
            dir_absent[(i, j)] = weight
        else:
            if weight is None:
                raise GraphFormatError("absence line requires '@ <weight>'", line_no)
            bi_absent[(min(i, j), max(i, j))] = weight
    if n is None:
        raise GraphFormatError("missing nodes line")
    base = MixedGraph.from_edges(n, directed=directed, bidirected=bidirected)
    for pair in dir_absent:
        if base.has_directed(*pair):
            raise GraphFormatError(f"{pair[0]} -> {pair[1]} listed both present and absent")
    for pair in bi_absent:
        if base.has_bidirected(*pair):
            raise GraphFormatError(f"{pair[0]} <-> {pair[1]} listed both present and absent")
    return WeightedHypothesis.with_weights(
        base,
        dir_present=dir_present,
        dir_absent=dir_absent,
        bi_present=bi_present,
        bi_absent=bi_absent,
    )


def _fmt_weight(w: float) -> str:
    return repr(int(w)) if float(w).is_integer() else repr(w)


def write_directed(g: DirectedGraph) -> str:
    lines = [f"nodes {g.n}"]
    lines += [f"{i} -> {j}" for i, j in g.edges()]
    return "\n".join(lines) + "\n"


def write_mixed(m: MixedGraph) -> str:
    lines = [f"nodes {m.n}"]
    lines += [f"{i} -> {j}" for i, j in m.directed_edges()]
    lines += [f"{x} <-> {y}" for x, y in m.bidirected_pairs()]
    return "\n".join(lines) + "\n"


def write_weighted(w: WeightedHypothesis) -> str:
    """Canonical weighted form: every presence and absence weight explicit."""
    base = w.base
    lines = [f"nodes {base.n}"]
    lines += [
        f"{i} -> {j} @ {_fmt_weight(w.dir_present[(i, j)])}"
        for i, j in base.directed_edges()
    ]
    lines += [
        f"{x} <-> {y} @ {_fmt_weight(w.bi_present[(x, y)])}"
        for x, y in base.bidirected_pairs()
    ]
    lines += [
        f"{i} -/> {j} @ {_fmt_weight(wt)}"
        for (i, j), wt in sorted(w.dir_absent.items())
    ]
    lines += [
        f"{x} </> {y} @ {_fmt_weight(wt)}"
        for (x, y), wt in sorted(w.bi_absent.items())
    ]
    return "\n".join(lines) + "\n"

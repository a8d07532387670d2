"""Export a measured graph as an answer-set-programming constraint program.

The emitted text encodes the full candidate-graph search: a choice rule for
the unknown rate, a generator over all edges, the walk recursion, the
common-cause rule, SCC structure facts with the condensation constraint,
and either four integrity constraints (exact mode) or per-edge weak
constraints carrying weights (optimization mode). Output is byte-stable
for a fixed input; no solver is invoked here.
"""

from __future__ import annotations

from .graphs import MixedGraph, scc_decompose
from .optimizer import WeightedHypothesis

_SCC_CONSTRAINT = (
    ":- edge1(X,Y), scc(X, K), scc(Y, L), K != L, "
    "sccsize(L, Z), Z > 1, not dag(K, L)."
)
_GENERATOR = "{edge1(X,Y)} :- node(X), node(Y)."
_BASE_RULE = "directed(X, Y, 1) :- edge1(X, Y)."
_RECURSION = "directed(X, Y, L) :- directed(X, Z, L-1), edge1(Z, Y), L <= U, u(U, _)."
_BIDIRECTED_RULE = (
    "bidirected(X, Y, U) :- directed(Z, X, L), directed(Z, Y, L), "
    "node(X;Y;Z), X < Y, L < U, u(U, _)."
)
_INTEGRITY = (
    ":- directed(X, Y, L), not hdirected(X, Y, K), node(X;Y), u(L, K).",
    ":- bidirected(X, Y, L), not hbidirected(X, Y, K), node(X;Y), u(L, K), X < Y.",
    ":- not directed(X, Y, L), hdirected(X, Y, K), node(X;Y), u(L, K).",
    ":- not bidirected(X, Y, L), hbidirected(X, Y, K), node(X;Y), u(L, K), X < Y.",
)


def _fmt_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(w)


def _preamble(n: int, maxu: int) -> list[str]:
    return [
        f"#const n = {n}.",
        f"#const maxu = {maxu}.",
        "node(1..n).",
        f"1 {{u(1..{maxu}, 1)}} 1.",
    ]


def _scc_facts(h: MixedGraph) -> list[str]:
    scc = scc_decompose(h)
    lines = [f"scc({v}, {scc.membership[v - 1] + 1})." for v in range(1, h.n + 1)]
    lines += [
        f"sccsize({c + 1}, {len(comp)})." for c, comp in enumerate(scc.components)
    ]
    lines += [f"dag({a + 1}, {b + 1})." for a, b in sorted(scc.condensation)]
    return lines


def _rules(constraints) -> list[str]:
    return [_SCC_CONSTRAINT, _GENERATOR, _BASE_RULE, _RECURSION, _BIDIRECTED_RULE, *constraints]


def export_program(h: MixedGraph, maxu: int = 20) -> str:
    """Exact mode: hypothesis facts plus the four integrity constraints."""
    if maxu < 1:
        raise ValueError("maxu must be >= 1")
    lines = _preamble(h.n, maxu)
    lines += _scc_facts(h)
    lines += [f"hdirected({i},{j})." for i, j in h.directed_edges()]
    lines += [f"hbidirected({x},{y})." for x, y in h.bidirected_pairs()]
    lines += _rules(_INTEGRITY)
    return "\n".join(lines) + "\n"


def export_weighted_program(w: WeightedHypothesis, maxu: int = 20) -> str:
    """Optimization mode: weighted facts and one ground weak constraint each.

    The four weak-constraint families replace the integrity constraints;
    every claimed edge, claimed bidirected pair, and their absences get one
    instance, so the solver may trade a weight penalty for consistency.
    """
    if maxu < 1:
        raise ValueError("maxu must be >= 1")
    base = w.base
    lines = _preamble(base.n, maxu)
    lines += _scc_facts(base)

    facts = []
    weak = []
    for (i, j) in base.directed_edges():
        wt = _fmt_weight(w.dir_present[(i, j)])
        facts.append(f"hdirected({i},{j},{wt},1).")
        weak.append(
            f":~ not directed({i}, {j}, L), hdirected({i}, {j}, {wt}, 1), "
            f"node({i};{j}), u(L, 1). [{wt}@1,{i},{j}]"
        )
    for (x, y) in base.bidirected_pairs():
        wt = _fmt_weight(w.bi_present[(x, y)])
        facts.append(f"hbidirected({x},{y},{wt},1).")
        weak.append(
            f":~ not bidirected({x}, {y}, L), hbidirected({x}, {y}, {wt}, 1), "
            f"node({x};{y}), u(L, 1). [{wt}@1,{x},{y}]"
        )
    for (i, j), wv in sorted(w.dir_absent.items()):
        wt = _fmt_weight(wv)
        facts.append(f"no_hdirected({i},{j},{wt},1).")
        weak.append(
            f":~ directed({i}, {j}, L), no_hdirected({i}, {j}, {wt}, 1), "
            f"node({i};{j}), u(L, 1). [{wt}@1,{i},{j}]"
        )
    for (x, y), wv in sorted(w.bi_absent.items()):
        wt = _fmt_weight(wv)
        facts.append(f"no_hbidirected({x},{y},{wt},1).")
        weak.append(
            f":~ bidirected({x}, {y}, L), no_hbidirected({x}, {y}, {wt}, 1), "
            f"node({x};{y}), u(L, 1). [{wt}@1,{x},{y}]"
        )

    lines += facts
    lines += _rules(weak)
    return "\n".join(lines) + "\n"

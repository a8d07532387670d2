import random

from unsample.graphs import DirectedGraph


def random_graph(rng: random.Random, n: int, degree: float = 1.4) -> DirectedGraph:
    """Bernoulli digraph with edge probability degree/n, self-loops included."""
    p = min(1.0, degree / n)
    edges = [
        (i, j)
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if rng.random() < p
    ]
    return DirectedGraph.from_edges(n, edges)

import random
from dataclasses import replace

import pytest

from unsample.graphs import DirectedGraph, MixedGraph, graphs_equal, undersample
from unsample.oracle import brute_force_class
from unsample.solver import SolveConfig, solve, witness_rates

from .conftest import random_graph


def entries_as_sets(cls):
    return {(m.graph.rows, m.witnesses) for m in cls.entries}


class TestSolveExamples:
    def test_single_self_loop(self):
        h = MixedGraph.from_edges(1, directed=[(1, 1)])
        cls = solve(h, SolveConfig(maxu=5))
        assert len(cls) == 1
        assert cls.entries[0].graph.edges() == [(1, 1)]
        assert cls.entries[0].witnesses == (1, 2, 3, 4, 5)

    def test_two_cycle(self):
        h = MixedGraph.from_edges(2, directed=[(1, 2), (2, 1)])
        cls = solve(h, SolveConfig(maxu=6))
        assert len(cls) == 1
        assert cls.entries[0].graph.edges() == [(1, 2), (2, 1)]
        assert cls.entries[0].witnesses == (1, 3, 5)

    def test_fan_hypothesis_contains_forward_image(self):
        h = MixedGraph.from_edges(
            3,
            directed=[(1, 1), (1, 2), (1, 3)],
            bidirected=[(1, 2), (1, 3), (2, 3)],
        )
        cls = solve(h, SolveConfig(maxu=4))
        g = DirectedGraph.from_edges(3, [(1, 1), (1, 2), (1, 3)])
        member = next(m for m in cls.entries if m.graph == g)
        assert 2 in member.witnesses
        assert cls.entries == brute_force_class(h, 4).entries

    def test_bidirected_free_h_contains_own_directed_part(self):
        rng = random.Random(11)
        for _ in range(30):
            g = random_graph(rng, rng.randint(1, 5))
            h = undersample(g, 1)
            cls = solve(h, SolveConfig(maxu=3))
            member = next(m for m in cls.entries if m.graph == g)
            assert 1 in member.witnesses

    def test_empty_class_is_a_result_not_an_error(self):
        h = MixedGraph.from_edges(2, directed=[(1, 2)], bidirected=[(1, 2)])
        cls = solve(h, SolveConfig(maxu=3))
        assert len(cls) == 0
        assert cls.entries == ()


class TestSolveAgainstOracle:
    @pytest.mark.parametrize("seed", range(8))
    def test_exact_class_small(self, seed):
        rng = random.Random(1000 + seed)
        for _ in range(6):
            n = rng.randint(2, 3)
            g = random_graph(rng, n, degree=1.6)
            u = rng.randint(1, 4)
            h = undersample(g, u)
            cls = solve(h, SolveConfig(maxu=5))
            assert cls.entries == brute_force_class(h, 5).entries

    def test_unachievable_hypothesis_matches_oracle(self):
        # directed edge plus its bidirected pairing cannot be produced
        h = MixedGraph.from_edges(2, directed=[(1, 2)], bidirected=[(1, 2)])
        assert solve(h, SolveConfig(maxu=4)).entries == ()
        assert brute_force_class(h, 4).entries == ()


class TestSolveProperties:
    def test_self_membership(self):
        rng = random.Random(12)
        for _ in range(40):
            g = random_graph(rng, rng.randint(1, 6))
            u = rng.randint(1, 4)
            h = undersample(g, u)
            cls = solve(h, SolveConfig(maxu=4))
            assert cls.contains(g)

    def test_soundness_of_all_claimed_witnesses(self):
        rng = random.Random(13)
        for _ in range(25):
            g = random_graph(rng, rng.randint(2, 5))
            h = undersample(g, rng.randint(1, 3))
            cls = solve(h, SolveConfig(maxu=4))
            for m in cls.entries:
                for u in m.witnesses:
                    assert graphs_equal(undersample(m.graph, u), h)
                # witness sets are complete as well
                assert m.witnesses == witness_rates(m.graph, h, 4)

    def test_entries_sorted_and_deduplicated(self):
        rng = random.Random(14)
        from unsample.graphs import canonical_key

        for _ in range(20):
            g = random_graph(rng, rng.randint(2, 4))
            h = undersample(g, rng.randint(1, 3))
            cls = solve(h, SolveConfig(maxu=4))
            keys = [canonical_key(m.graph) for m in cls.entries]
            assert keys == sorted(keys)
            assert len(keys) == len(set(keys))

    def test_prune_toggles_change_stats_not_results(self):
        rng = random.Random(15)
        base = SolveConfig(maxu=4)
        variants = [
            replace(base, use_lower_prune=False),
            replace(base, use_upper_prune=False),
            replace(base, use_scc_decomposition=False),
        ]
        for _ in range(10):
            g = random_graph(rng, rng.randint(2, 4))
            h = undersample(g, rng.randint(1, 3))
            expected = entries_as_sets(solve(h, base))
            for cfg in variants:
                assert entries_as_sets(solve(h, cfg)) == expected

    def test_determinism(self):
        rng = random.Random(16)
        g = random_graph(rng, 5)
        h = undersample(g, 2)
        a = solve(h, SolveConfig(maxu=4))
        b = solve(h, SolveConfig(maxu=4))
        assert a.entries == b.entries

    def test_scc_prune_disabled_with_warning_on_period_two_component(self):
        # two-cycle h has one SCC of period 2: structural forcing unsound
        h = MixedGraph.from_edges(2, directed=[(1, 2), (2, 1)])
        cls = solve(h, SolveConfig(maxu=3))
        assert not cls.stats.scc_prune_active
        assert any("gcd 2" in w for w in cls.stats.warnings)


class TestWitnessRates:
    def test_two_cycle_rates(self):
        g = DirectedGraph.from_edges(2, [(1, 2), (2, 1)])
        h = MixedGraph.from_edges(2, directed=[(1, 2), (2, 1)])
        assert witness_rates(g, h, 6) == (1, 3, 5)

    def test_empty_graph_fixed_point(self):
        g = DirectedGraph.empty(3)
        h = MixedGraph.from_edges(3)
        assert witness_rates(g, h, 3) == (1, 2, 3)

    def test_self_loop_never_vanishes(self):
        g = DirectedGraph.from_edges(1, [(1, 1)])
        h = MixedGraph.from_edges(1)
        assert witness_rates(g, h, 3) == ()

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            witness_rates(DirectedGraph.empty(2), MixedGraph.from_edges(3), 2)


class TestSolveConfig:
    def test_rejects_bad_maxu(self):
        with pytest.raises(ValueError):
            SolveConfig(maxu=0)

    def test_rejects_unknown_order(self):
        with pytest.raises(ValueError):
            SolveConfig(search_order="random")

import numpy as np
import pytest

import dubinsguard as dg
from conftest import brute_force_matching_size, make_state


def _dummy_cert():
    return dg.certify_win(
        make_state(0, 2, 0.0, 0, 1), dg.GameParams(2, 1, 1, 0.1), motion="simple"
    )


def _graph(n_p, n_e, pairs):
    return dg.WinGraph(
        n_pursuers=n_p, n_evaders=n_e, edges={pair: _dummy_cert() for pair in pairs}
    )


class TestBuildGraph:
    def _pair_inputs(self, pursuer_rows, evader_rows, motion="simple"):
        p = dg.GameParams(2.0, 1.0, 1.0, 0.1)
        states = {}
        params = {}
        for i, (px, py) in enumerate(pursuer_rows):
            for j, (ex, ey) in enumerate(evader_rows):
                states[(i, j)] = make_state(px, py, 0.0, ex, ey)
                params[(i, j)] = p
        motions = {i: motion for i in range(len(pursuer_rows))}
        return states, params, motions

    def test_all_pairs_certified_gives_complete_graph(self):
        # simple-motion pursuers win on separation alone; evaders placed high
        states, params, motions = self._pair_inputs(
            [(0, 1), (3, 1)], [(0, 5), (3, 5)]
        )
        g = dg.build_graph(states, params, 2, 2, motions)
        assert set(g.edges) == {(0, 0), (0, 1), (1, 0), (1, 1)}

    def test_no_pairs_certified_gives_empty_graph(self):
        # evaders hugging the goal line: separation fails everywhere
        states, params, motions = self._pair_inputs(
            [(0, 5), (3, 5)], [(0, 0.1), (3, 0.1)]
        )
        g = dg.build_graph(states, params, 2, 2, motions)
        assert g.edges == {}

    def test_golden_scenario_initial_edges(self):
        from dubinsguard.cli import load_scenario
        from importlib import resources

        with resources.as_file(
            resources.files("dubinsguard") / "scenarios" / "5v5_paper.json"
        ) as path:
            sc = load_scenario(path)
        states = {
            (i, j): dg.JointState(
                pursuer=sc.pursuers[i].state, evader=sc.evaders[j].state
            )
            for i in range(5)
            for j in range(5)
        }
        params = {
            (i, j): sc.pair_params(i, j) for i in range(5) for j in range(5)
        }
        motions = {i: sc.pursuers[i].motion for i in range(5)}
        g = dg.build_graph(states, params, 5, 5, motions)
        assert set(g.edges) == {(0, 3), (2, 2), (3, 1), (4, 0)}

    def test_removing_a_pair_never_adds_edges(self):
        states, params, motions = self._pair_inputs(
            [(0, 1), (3, 1)], [(0, 5), (3, 5)]
        )
        full = dg.build_graph(states, params, 2, 2, motions)
        states.pop((0, 1))
        params.pop((0, 1))
        reduced = dg.build_graph(states, params, 2, 2, motions)
        assert set(reduced.edges) <= set(full.edges)


class TestMaxMatching:
    def test_single_edge(self):
        assert dg.max_matching(_graph(2, 2, [(0, 0)])) == {0: 0}

    def test_complete_two_by_two(self):
        m = dg.max_matching(_graph(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]))
        assert len(m) == 2
        assert sorted(m.values()) == [0, 1]

    def test_requires_augmenting_path(self):
        # 0 prefers evader 0, but 1 can only take evader 0
        m = dg.max_matching(_graph(2, 2, [(0, 0), (0, 1), (1, 0)]))
        assert m == {0: 1, 1: 0}

    def test_matches_exhaustive_search_on_random_graphs(self):
        rng = np.random.default_rng(61)
        for _ in range(60):
            n_p = int(rng.integers(1, 9))
            n_e = int(rng.integers(1, 9))
            pairs = [
                (i, j)
                for i in range(n_p)
                for j in range(n_e)
                if rng.uniform() < 0.35
            ]
            g = _graph(n_p, n_e, pairs)
            m = dg.max_matching(g)
            # must be a valid matching
            assert len(set(m.values())) == len(m)
            for i, j in m.items():
                assert (i, j) in g.edges
            adjacency = {i: g.neighbors(i) for i in range(n_p)}
            assert len(m) == brute_force_matching_size(n_p, adjacency)

    def test_deterministic(self):
        pairs = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0)]
        a = dg.max_matching(_graph(3, 3, pairs))
        b = dg.max_matching(_graph(3, 3, pairs))
        assert a == b


class TestAssign:
    def test_nearest_unmatched_evader(self):
        g = _graph(2, 3, [(0, 0)])
        matching = {0: 0}
        positions = [np.array([0.0, 0.0]), np.array([0.0, 0.0])]
        evaders = {
            0: np.array([10.0, 0.0]),
            1: np.array([3.0, 0.0]),
            2: np.array([5.0, 0.0]),
        }
        out = dg.assign(g, matching, positions, evaders)
        assert out.opportunistic == {1: 1}
        assert not out.fallback

    def test_tie_break_lowest_index(self):
        g = _graph(1, 5, [])
        positions = [np.array([0.0, 0.0])]
        evaders = {
            2: np.array([4.0, 0.0]),
            4: np.array([-4.0, 0.0]),
        }
        out = dg.assign(g, {}, positions, evaders)
        assert out.opportunistic == {0: 2}

    def test_fallback_targets_matched_evader(self):
        g = _graph(2, 1, [(0, 0)])
        positions = [np.array([0.0, 0.0]), np.array([1.0, 0.0])]
        evaders = {0: np.array([2.0, 0.0])}
        out = dg.assign(g, {0: 0}, positions, evaders)
        assert out.opportunistic == {1: 0}
        assert out.fallback

    def test_matched_evaders_never_duplicated(self):
        rng = np.random.default_rng(62)
        for _ in range(50):
            n_p = int(rng.integers(1, 7))
            n_e = int(rng.integers(1, 7))
            pairs = [
                (i, j)
                for i in range(n_p)
                for j in range(n_e)
                if rng.uniform() < 0.5
            ]
            g = _graph(n_p, n_e, pairs)
            m = dg.max_matching(g)
            positions = [rng.normal(size=2) for _ in range(n_p)]
            evaders = {j: rng.normal(size=2) for j in range(n_e)}
            out = dg.assign(g, m, positions, evaders)
            assert len(set(out.matched.values())) == len(out.matched)
            for i, j in out.opportunistic.items():
                assert i not in out.matched
                if not out.fallback:
                    assert j not in out.matched.values()

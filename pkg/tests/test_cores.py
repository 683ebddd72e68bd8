import numpy as np
import pytest

from loosecore.cores import (
    CoreResult,
    PeelState,
    core_construct,
    degrees_after_round,
    loose_core_direct,
    loose_core_from_padded,
    padded_core_from_reduced,
    peel_round,
    peeled_degrees,
    reduced_core,
    verify_core_construct,
    write_round_labels,
)
from loosecore.errors import MismatchedInput, TruncatedNeighborhood
from loosecore.factor_graph import FactorGraph, bfs_layers, build_factor_graph
from loosecore.hypergraph import Hypergraph, loose_cycle, loose_path, union

from conftest import random_hypergraph
from oracles import loose_core_by_subsets, peel_reference


def tree_hypergraph():
    # root 0 -> factors {0,1,2}, {0,3,4}; each of 1..4 starts one more factor
    return Hypergraph(
        13,
        3,
        [[0, 1, 2], [0, 3, 4], [1, 5, 6], [2, 7, 8], [3, 9, 10], [4, 11, 12]],
    )


class TestPeelRound:
    def test_single_graph_edge(self):
        G = build_factor_graph(Hypergraph(2, 2, [[0, 1]]))
        s = peel_round(PeelState.initial(G))
        assert s.degrees.tolist() == [0, 0, 0]
        assert s.disabled_round.tolist() == [1, 1, 0]
        assert not s.fixpoint
        assert peel_round(s).fixpoint

    def test_loose_cycle(self, cycle3):
        G = build_factor_graph(cycle3)
        s1 = peel_round(PeelState.initial(G))
        pendants = [v for v in range(6) if cycle3.degree(v) == 1]
        assert all(s1.degrees[v] == 0 for v in pendants)
        assert all(s1.degrees[a] == 2 for a in range(6, 9))
        s2 = peel_round(s1)
        assert s2.fixpoint and s2.round == 2
        assert np.array_equal(s2.degrees, s1.degrees)

    def test_no_degree_one_is_identity(self):
        G = FactorGraph(4, [[0, 1, 2], [0, 1, 2]])  # variable 3 isolated, rest degree >= 2
        s0 = PeelState.initial(G)
        s1 = peel_round(s0)
        assert s1.fixpoint
        assert np.array_equal(s1.degrees, s0.degrees)

    def test_disabled_node_has_no_live_edges(self):
        G = build_factor_graph(random_hypergraph(300, 3, 1.2, 4))
        s = PeelState.initial(G)
        while not s.fixpoint:
            s = peel_round(s)
            dead = s.disabled_round > 0
            live_var = np.bincount(G.inc_var[s.alive], minlength=G.n)
            assert np.all(live_var[dead[: G.n]] == 0)
            assert np.all(s.disabled_round <= s.round)


class TestReducedCore:
    def test_tree_peels_completely(self):
        G = build_factor_graph(tree_hypergraph())
        for mode in ("synchronous", "queue"):
            assert not reduced_core(G, mode).degrees.any()

    def test_loose_cycle(self, cycle3):
        G = build_factor_graph(cycle3)
        R = reduced_core(G)
        for v in range(6):
            assert R.degrees[v] == (2 if cycle3.degree(v) == 2 else 0)
        assert R.factor_degrees.tolist() == [2, 2, 2]
        assert R.rounds == 1

    def test_rounds_zero_without_leaves(self):
        G = FactorGraph(3, [[0, 1, 2], [0, 1, 2]])
        assert reduced_core(G).rounds == 0

    def test_modes_agree_with_reference(self):
        for seed in range(40):
            G = build_factor_graph(random_hypergraph(40, 3, 1.5, seed))
            ref = peel_reference(G)
            assert reduced_core(G, "synchronous").degrees.tolist() == ref
            assert reduced_core(G, "queue").degrees.tolist() == ref

    def test_modes_agree_differential(self):
        rng = np.random.default_rng(7)
        for seed in range(500):
            n = int(rng.integers(20, 501))
            r = int(rng.integers(2, 6))
            d = float(rng.choice([0.4, 0.8, 1.0, 1.5, 3.0])) / (r - 1)
            G = build_factor_graph(random_hypergraph(n, r, d, seed))
            a = reduced_core(G, "synchronous").degrees
            b = reduced_core(G, "queue").degrees
            assert np.array_equal(a, b)

    def test_invariants(self):
        for seed in range(20):
            G = build_factor_graph(random_hypergraph(300, 3, 1.0, seed))
            R = reduced_core(G)
            assert not np.any(R.degrees == 1)
            raw = G.degrees()
            prev = raw
            for rnd in range(R.rounds + 2):
                cur = peeled_degrees(G, rnd)
                assert np.all(R.degrees <= cur) and np.all(cur <= prev) and np.all(cur <= raw)
                prev = cur

    def test_idempotent(self):
        for seed in range(20):
            G = build_factor_graph(random_hypergraph(200, 3, 1.5, seed))
            R = reduced_core(G)
            s = PeelState(G, R.degrees, _alive_mask(G, R), np.zeros(G.node_count, dtype=np.int64))
            assert peel_round(s).fixpoint

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            reduced_core(build_factor_graph(Hypergraph(3, 3)), "magic")


def _alive_mask(G, R):
    pos = R.degrees > 0
    return pos[G.inc_var] & pos[G.n + G.inc_fac]


class TestDegreesAfterRound:
    def test_round_zero_is_raw(self):
        H = random_hypergraph(100, 3, 1.0, 3)
        G = build_factor_graph(H)
        var, fac = degrees_after_round(G, 0)
        assert np.allclose(var, np.bincount(H.degrees) / H.n)
        assert fac.tolist() == [0, 0, 0, 1.0]

    def test_beyond_fixpoint(self):
        G = build_factor_graph(random_hypergraph(400, 3, 1.2, 5))
        R = reduced_core(G)
        var, fac = degrees_after_round(G, R.rounds + 5)
        assert np.allclose(var, np.bincount(R.variable_degrees) / G.n)
        assert np.allclose(fac, np.bincount(R.factor_degrees, minlength=4) / G.m)

    def test_loose_cycle_round_one(self, cycle3):
        var, _ = degrees_after_round(build_factor_graph(cycle3), 1)
        assert var.tolist() == [0.5, 0.0, 0.5]


class TestPadded:
    def test_empty(self):
        G = build_factor_graph(tree_hypergraph())
        P = padded_core_from_reduced(G, reduced_core(G))
        assert not P.padded_degrees.any()

    def test_loose_cycle(self, cycle3):
        G = build_factor_graph(cycle3)
        P = padded_core_from_reduced(G, reduced_core(G))
        assert P.padded_variable_degrees.tolist() == cycle3.degrees.tolist()
        assert P.padded_factor_degrees.tolist() == [3, 3, 3]

    def test_factor_degrees_zero_or_r(self):
        for seed in range(10):
            G = build_factor_graph(random_hypergraph(500, 4, 0.6, seed))
            P = padded_core_from_reduced(G, reduced_core(G))
            assert set(np.unique(P.padded_factor_degrees)) <= {0, 4}
            # vertices of core degree >= 2 keep the same degree (mu_j = zeta_j, j >= 2)
            big = P.variable_degrees >= 2
            assert np.array_equal(P.padded_variable_degrees[big], P.variable_degrees[big])

    def test_mismatch(self):
        G = build_factor_graph(Hypergraph(5, 3, [[0, 1, 2]]))
        bad = CoreResult(4, 1, np.zeros(5, dtype=np.int64))
        with pytest.raises(MismatchedInput):
            padded_core_from_reduced(G, bad)


class TestLooseCoreDirect:
    def test_single_edge(self):
        assert loose_core_direct(Hypergraph(3, 3, [[0, 1, 2]])).m == 0

    def test_loose_cycle(self, cycle3):
        assert loose_core_direct(cycle3) == cycle3

    def test_loose_path_cascades(self):
        assert loose_core_direct(loose_path(2, 3)).m == 0
        assert loose_core_direct(loose_path(5, 3)).m == 0

    def test_graph_case_is_two_core(self):
        # triangle with a pendant edge
        H = Hypergraph(4, 2, [[0, 1], [1, 2], [0, 2], [2, 3]])
        assert loose_core_direct(H).edge_set() == {(0, 1), (1, 2), (0, 2)}

    def test_against_subset_enumeration(self):
        for seed in range(60):
            H = random_hypergraph(9, 3, 1.5, seed)
            if H.m > 12:
                continue
            expected = loose_core_by_subsets([tuple(e) for e in H.edges.tolist()], H.n)
            assert loose_core_direct(H).edge_set() == expected

    def test_batch_matches_single(self):
        for seed in range(50):
            H = random_hypergraph(60, 3, 1.5, seed)
            assert loose_core_direct(H, "batch") == loose_core_direct(H, "single")

    def test_reconstruction_matches(self):
        for seed in range(100):
            H = random_hypergraph(150, 3, [0.5, 1.0, 2.0][seed % 3], seed)
            G = build_factor_graph(H)
            P = padded_core_from_reduced(G, reduced_core(G, "queue"))
            assert loose_core_from_padded(G, P) == loose_core_direct(H)

    def test_planted_cycles_survive(self):
        for seed in range(30):
            noise = random_hypergraph(120, 3, 0.8, seed)
            length = 2 + seed % 6
            planted = loose_cycle(length, 3, n=120)
            H = union(planted, noise)
            core = loose_core_direct(H).edge_set()
            assert planted.edge_set() <= core


class TestCoreConstruct:
    def test_isolated_root(self):
        G = build_factor_graph(Hypergraph(4, 3, [[1, 2, 3]]))
        for ell in (1, 2, 3):
            nb = bfs_layers(G, 0, ell + 1, node_cap=100)
            assert core_construct(ell, nb).d_star == 0

    def test_full_tree(self):
        G = build_factor_graph(tree_hypergraph())
        nb = bfs_layers(G, 0, 3, node_cap=100)
        res = core_construct(2, nb)
        assert res.d_star == 2 == len(G.neighbors(0))
        assert res.d_tilde == 2

    def test_star_rooted_at_factor(self):
        G = build_factor_graph(Hypergraph(3, 3, [[0, 1, 2]]))
        nb = bfs_layers(G, 3, 3, node_cap=100)
        res = core_construct(2, nb)
        assert res.d_star == 0
        assert res.surviving[1] == []

    def test_tilde_maps_one_to_zero(self):
        G = build_factor_graph(loose_path(3, 3))
        # root = end vertex 0; one branch long enough
        nb = bfs_layers(G, 0, 3, node_cap=100)
        res = core_construct(2, nb)
        assert res.d_star == 1 and res.d_tilde == 0

    def test_truncated_raises(self, cycle3):
        G = build_factor_graph(cycle3)
        nb = bfs_layers(G, 0, 3, node_cap=2)
        with pytest.raises(TruncatedNeighborhood):
            core_construct(2, nb)


class TestConstructCheck:
    def test_equality_case(self):
        # root 0 with three long branches
        H = Hypergraph(
            19,
            3,
            [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 7, 8], [3, 9, 10], [5, 11, 12], [7, 13, 14], [9, 15, 16], [11, 17, 18]],
        )
        G = build_factor_graph(H)
        chk = verify_core_construct(G, 0, 2)
        assert chk.applicable and chk.d_star == 3 and chk.peeled_degree == 3 and chk.holds

    def test_d_star_one(self):
        G = build_factor_graph(loose_path(3, 3))
        chk = verify_core_construct(G, 0, 2)
        assert chk.applicable and chk.d_star == 1
        assert chk.peeled_degree in (0, 1) and chk.holds

    def test_cyclic_ball(self, cycle3):
        G = build_factor_graph(cycle3)
        chk = verify_core_construct(G, 0, 4)
        assert not chk.applicable and chk.holds is None

    def test_random_roots(self):
        checked = 0
        for seed in range(5):
            G = build_factor_graph(random_hypergraph(300, 3, 1.0, seed))
            for ell in (1, 2, 3):
                deg = peeled_degrees(G, ell)
                for w in range(0, G.node_count, 7):
                    chk = verify_core_construct(G, w, ell, deg)
                    if chk.applicable:
                        checked += 1
                        assert chk.holds, chk
        assert checked > 100


def test_round_labels_csv(tmp_path, cycle3):
    G = build_factor_graph(cycle3)
    R = reduced_core(G)
    path = tmp_path / "rounds.csv"
    write_round_labels(G, R, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "node_id,node_type,round_disabled"
    assert len(lines) == 1 + G.node_count
    pend = next(v for v in range(6) if cycle3.degree(v) == 1)
    assert lines[1 + pend] == f"{pend},variable,1"
    assert lines[-1] == f"{G.node_count - 1},factor,0"

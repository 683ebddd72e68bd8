import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loosecore.errors import (
    EdgeOutOfRange,
    EmptyEdgeSet,
    InvalidParams,
    ProbabilityOverflow,
    VertexOutOfRange,
)
from loosecore.hypergraph import (
    Hypergraph,
    ModelParams,
    binomial_inverse_cdf,
    connection_number,
    degree,
    edge_probability,
    kappa_min,
    loose_cycle,
    loose_path,
    sample_hypergraph,
    union,
)


class TestEdgeProbability:
    def test_small(self):
        assert edge_probability(3, 4, 1) == pytest.approx(1 / 3, rel=1e-15)

    def test_graph_case(self):
        assert edge_probability(2, 101, 1) == pytest.approx(0.01, rel=1e-15)

    def test_large_n(self):
        # C(99999, 2) = 4999850001 exactly
        assert math.comb(99999, 2) == 4_999_850_001
        assert edge_probability(3, 10**5, 0.7) == pytest.approx(0.7 / 4_999_850_001, rel=1e-15)
        assert edge_probability(3, 10**5, 0.7) == pytest.approx(1.40004200098e-10, rel=1e-10)

    def test_log_space_branch(self):
        # C(10^6 - 1, 9) is far beyond 2^63
        p = edge_probability(10, 10**6, 2.0)
        expected = math.exp(math.log(2.0) - math.log(math.comb(10**6 - 1, 9)))
        assert p == pytest.approx(expected, rel=1e-9)

    def test_probability_overflow(self):
        with pytest.raises(ProbabilityOverflow):
            edge_probability(3, 4, 4)

    @pytest.mark.parametrize("r,n,d", [(1, 5, 1), (3, 2, 1), (3, 5, 0), (3, 5, -1)])
    def test_invalid(self, r, n, d):
        with pytest.raises(InvalidParams):
            edge_probability(r, n, d)

    def test_model_params_roundtrip(self):
        mp = ModelParams.from_degree(4, 50, 1.3)
        assert mp.p * math.comb(49, 3) == pytest.approx(1.3, rel=1e-14)


class TestHypergraphBasics:
    def test_edges_sorted_and_validated(self):
        H = Hypergraph(5, 3, [[2, 0, 1]])
        assert H.edges.tolist() == [[0, 1, 2]]
        with pytest.raises(InvalidParams):
            Hypergraph(5, 3, [[0, 1, 2], [2, 1, 0]])
        with pytest.raises(InvalidParams):
            Hypergraph(5, 3, [[0, 0, 1]])
        with pytest.raises(VertexOutOfRange):
            Hypergraph(3, 3, [[0, 1, 3]])

    def test_degree(self, cycle3):
        assert degree(Hypergraph(5, 3, [[0, 1, 2]]), 0) == 1
        assert all(degree(Hypergraph(4, 3), v) == 0 for v in range(4))
        assert degree(cycle3, 2) == 2
        with pytest.raises(VertexOutOfRange):
            degree(cycle3, 6)

    def test_connection_number(self, cycle3):
        assert connection_number(Hypergraph(3, 3, [[0, 1, 2]]), 0) == 0
        assert [connection_number(cycle3, e) for e in range(3)] == [2, 2, 2]
        twin = Hypergraph(4, 3, [[0, 1, 2], [1, 2, 3]])
        assert connection_number(twin, 0) == connection_number(twin, 1) == 2
        with pytest.raises(EdgeOutOfRange):
            connection_number(twin, 2)

    def test_kappa_min(self, cycle3):
        assert kappa_min(Hypergraph(3, 3, [[0, 1, 2]])) == 0
        assert kappa_min(cycle3) == 2
        with_isolated = Hypergraph(9, 3, cycle3.edges.tolist() + [[6, 7, 8]])
        assert kappa_min(with_isolated) == 0
        with pytest.raises(EmptyEdgeSet):
            kappa_min(Hypergraph(3, 3))

    def test_loose_constructions(self):
        assert loose_cycle(3, 3).edges.tolist() == [[0, 1, 2], [2, 3, 4], [0, 4, 5]]
        assert loose_path(2, 3).edges.tolist() == [[0, 1, 2], [2, 3, 4]]
        assert loose_cycle(2, 3).m == 2

    def test_union(self, cycle3):
        u = union(cycle3, Hypergraph(6, 3, [[0, 1, 2], [1, 3, 5]]))
        assert u.m == 4


@st.composite
def hypergraphs(draw, max_n=12):
    r = draw(st.integers(2, 4))
    n = draw(st.integers(r, max_n))
    all_sets = list(combinations(range(n), r))
    chosen = draw(st.lists(st.sampled_from(all_sets), unique=True, max_size=20))
    return Hypergraph(n, r, chosen)


@given(hypergraphs())
def test_degree_sum(H):
    assert int(H.degrees.sum()) == H.r * H.m


@given(hypergraphs())
def test_text_roundtrip(H):
    again = Hypergraph.from_text(H.to_text())
    assert again == H
    assert again.to_text() == H.to_text()


def test_file_roundtrip(tmp_path, cycle3):
    path = tmp_path / "h.txt"
    cycle3.save(path)
    assert path.read_text().splitlines()[0] == "3 6 3"
    assert Hypergraph.load(path) == cycle3


def test_text_format_errors():
    with pytest.raises(InvalidParams):
        Hypergraph.from_text("3 5 2\n0 1 2\n")
    with pytest.raises(InvalidParams):
        Hypergraph.from_text("3 5 1\n0 1\n")


class TestBinomialInverseCdf:
    def test_extremes(self):
        assert binomial_inverse_cdf(0.3, 10, 0.0) == 0
        assert binomial_inverse_cdf(0.3, 10, 1.0) == 10

    def test_matches_exact_cdf(self):
        from scipy import stats

        for u in (0.001, 0.2, 0.5, 0.77, 0.999):
            assert binomial_inverse_cdf(u, 40, 0.3) == int(stats.binom.ppf(u, 40, 0.3))

    def test_matches_poisson_when_trials_astronomical(self):
        from scipy import stats

        for r, n in ((4, 10**6), (5, 10**5), (10, 10**6)):
            trials = math.comb(n, r)
            p = edge_probability(r, n, 1.5)
            for u in (0.1, 0.5, 0.9):
                assert binomial_inverse_cdf(u, trials, p) == int(stats.poisson.ppf(u, trials * p))

    def test_huge_trials(self):
        trials = math.comb(10**5, 3)
        p = edge_probability(3, 10**5, 1.0)
        median = binomial_inverse_cdf(0.5, trials, p)
        assert abs(median - trials * p) < 2


class TestSampling:
    def test_p_zero_and_one(self):
        assert sample_hypergraph(ModelParams(3, 5, 0.0, 0.0, 1)).m == 0
        full = sample_hypergraph(ModelParams(3, 5, 6.0, 1.0, 1))
        assert full.m == 10

    def test_reproducible(self):
        mp = ModelParams.from_degree(3, 3000, 1.5, seed=99)
        a, b = sample_hypergraph(mp), sample_hypergraph(mp)
        assert np.array_equal(a.edges, b.edges)
        c = sample_hypergraph(ModelParams.from_degree(3, 3000, 1.5, seed=100))
        assert not np.array_equal(a.edges, c.edges)

    def test_simple_for_many_seeds(self):
        for seed in range(50):
            H = sample_hypergraph(ModelParams.from_degree(3, 200, 3.0, seed))
            assert len(H.edge_set()) == H.m
            assert np.all(np.diff(H.edges, axis=1) > 0)

    def test_enumeration_branch_uniform(self):
        # C(6, 3) = 20 sets; every set should show up with frequency near p
        counts = {}
        trials = 3000
        for seed in range(trials):
            H = sample_hypergraph(ModelParams(3, 6, 0.0, 0.25, seed))
            for e in H.edge_set():
                counts[e] = counts.get(e, 0) + 1
        freqs = np.array([counts.get(e, 0) / trials for e in combinations(range(6), 3)])
        # binomial sd sqrt(0.25*0.75/3000) ~ 0.008
        assert np.all(np.abs(freqs - 0.25) < 0.035)

    def test_edge_count_concentration(self):
        n, d = 10**4, 1.0
        mean = d * n / 3
        hits = 0
        for seed in range(200):
            m = sample_hypergraph(ModelParams.from_degree(3, n, d, seed)).m
            hits += abs(m - mean) <= 4 * math.sqrt(mean)
        assert hits >= 198

    def test_mean_edge_count(self):
        n, d = 2000, 1.0
        ms = [sample_hypergraph(ModelParams.from_degree(3, n, d, s)).m for s in range(200)]
        assert abs(np.mean(ms) - d * n / 3) <= 0.05 * d * n / 3

    def test_rejection_branch_r4(self):
        # n^r overflows int64 encoding -> hashed keys
        H = sample_hypergraph(ModelParams.from_degree(4, 100_000, 1.0, seed=5))
        assert len(H.edge_set()) == H.m
        assert abs(H.m - 25_000) < 5 * math.sqrt(25_000)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 5))
def test_sample_valid(seed, r):
    H = sample_hypergraph(ModelParams.from_degree(r, 60, 1.0, seed))
    assert H.edges.shape[1] == r
    assert int(H.degrees.sum()) == r * H.m

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphgen import k2, path3, random_connected_graph, triangle
from walkmf import (
    CooccurrenceCounts,
    SamplerConfig,
    Walk,
    default_sampler_config,
    empirical_conditional,
    empirical_frequency,
    extract_pairs,
    generate_walk,
    merge_counts,
    read_counts_csv,
    sample_counts,
    stationary_distribution,
    walk_probability_matrix,
    write_counts_csv,
    write_counts_sidecar,
)

# chi-square critical value, 1 degree of freedom, alpha = 0.001
CHI2_1DOF_P001 = 10.828


class TestSamplerConfig:
    def test_rejects_bad_window(self):
        with pytest.raises(ValueError):
            SamplerConfig(window=0, centers=1)

    def test_rejects_fixed_without_node(self):
        with pytest.raises(ValueError):
            SamplerConfig(window=1, centers=1, start_mode="fixed")

    def test_round_trips_through_dict(self):
        cfg = SamplerConfig(window=3, centers=10, seed=9, burn_in=5, workers=2)
        assert SamplerConfig.from_dict(cfg.to_dict()) == cfg

    def test_defaults_follow_directedness(self):
        und = default_sampler_config(path3(), window=2, centers=10)
        assert und.start_mode == "stationary" and und.burn_in == 0
        from graphgen import cycle
        dire = default_sampler_config(cycle(3, directed=True), window=2, centers=10)
        assert dire.start_mode == "uniform" and dire.burn_in == 1000


class TestGenerateWalk:
    def test_k2_alternates(self):
        cfg = SamplerConfig(window=1, centers=6, seed=11, start_mode="fixed", start_node=0)
        walk = generate_walk(k2(), cfg)
        assert walk.nodes.tolist() == [0, 1, 0, 1, 0, 1, 0]

    def test_same_seed_same_walk(self):
        cfg = SamplerConfig(window=2, centers=50, seed=123)
        first = generate_walk(path3(), cfg)
        second = generate_walk(path3(), cfg)
        assert np.array_equal(first.nodes, second.nodes)

    def test_length_is_burn_in_plus_centers_plus_window(self):
        cfg = SamplerConfig(window=3, centers=7, seed=0, burn_in=5)
        assert len(generate_walk(path3(), cfg)) == 5 + 7 + 3

    def test_disconnected_rejected(self):
        from walkmf import GraphStructureError, parse_edge_list
        with pytest.raises(GraphStructureError, match="connected"):
            generate_walk(parse_edge_list("0 1\n2 3\n"), SamplerConfig(window=1, centers=1))

    def test_fixed_start_out_of_range(self):
        cfg = SamplerConfig(window=1, centers=1, start_mode="fixed", start_node=99)
        with pytest.raises(ValueError, match="out of range"):
            generate_walk(path3(), cfg)

    def test_first_step_from_path_center_is_unbiased(self):
        # Start at node 1 of 0-1-2; the next node must be 0 or 2 with equal
        # probability. Chi-square over 10^4 independent walks, p > 0.001.
        hits = {0: 0, 2: 0}
        for seed in range(10_000):
            cfg = SamplerConfig(window=1, centers=1, seed=seed,
                                start_mode="fixed", start_node=1)
            walk = generate_walk(path3(), cfg)
            hits[int(walk.nodes[1])] += 1
        expected = 5000.0
        chi2 = sum((obs - expected) ** 2 / expected for obs in hits.values())
        assert chi2 < CHI2_1DOF_P001

    @settings(deadline=None, max_examples=30)
    @given(st.integers(0, 10**6), st.integers(2, 10), st.integers(1, 3))
    def test_every_consecutive_pair_is_an_edge(self, seed, n, window):
        g = random_connected_graph(n, seed)
        edge_set = {frozenset(e) for e in g.edges}
        cfg = SamplerConfig(window=window, centers=50, seed=seed)
        walk = generate_walk(g, cfg)
        for a, b in zip(walk.nodes[:-1], walk.nodes[1:]):
            assert frozenset((int(a), int(b))) in edge_set


class TestExtractPairs:
    def test_hand_enumeration_undirected(self):
        walk = Walk(nodes=np.array([0, 1, 0, 1]), n=2, seed=0)
        counts = extract_pairs(walk, window=1, directed=False, burn_in=0, centers=3)
        assert counts.pair_counts == {(0, 1): 3, (1, 0): 3}
        assert counts.total == 6

    def test_hand_enumeration_directed(self):
        walk = Walk(nodes=np.array([0, 1, 0, 1]), n=2, seed=0)
        counts = extract_pairs(walk, window=1, directed=True, burn_in=0, centers=3)
        assert counts.pair_counts == {(0, 1): 2, (1, 0): 1}
        assert counts.total == 3

    def test_total_is_2tL_undirected(self):
        cfg = SamplerConfig(window=3, centers=40, seed=5)
        walk = generate_walk(triangle(), cfg)
        counts = extract_pairs(walk, window=3, directed=False, burn_in=0, centers=40)
        assert counts.total == 2 * 3 * 40

    def test_burn_in_shifts_the_center_range(self):
        walk = Walk(nodes=np.array([0, 1, 0, 1, 0]), n=2, seed=0)
        counts = extract_pairs(walk, window=1, directed=True, burn_in=2, centers=2)
        # centers are positions 2 and 3: pairs (0,1) and (1,0)
        assert counts.pair_counts == {(0, 1): 1, (1, 0): 1}

    def test_walk_too_short_rejected(self):
        walk = Walk(nodes=np.array([0, 1]), n=2, seed=0)
        with pytest.raises(ValueError, match="positions"):
            extract_pairs(walk, window=2, directed=False, burn_in=0, centers=3)


@st.composite
def _sampling_case(draw):
    seed = draw(st.integers(0, 10**6))
    n = draw(st.integers(2, 9))
    window = draw(st.integers(1, 4))
    centers = draw(st.integers(1, 200))
    return random_connected_graph(n, seed), SamplerConfig(window=window, centers=centers, seed=seed)


class TestCountInvariants:
    @settings(deadline=None, max_examples=40)
    @given(_sampling_case())
    def test_marginals_are_consistent(self, case):
        g, cfg = case
        counts = sample_counts(g, cfg)
        dense = counts.dense
        assert np.array_equal(dense.sum(axis=1), counts.node_counts)
        assert np.array_equal(dense.sum(axis=0), counts.context_counts)
        assert counts.node_counts.sum() == counts.total
        assert counts.total == 2 * cfg.window * cfg.centers

    @settings(deadline=None, max_examples=40)
    @given(_sampling_case())
    def test_undirected_counts_symmetric(self, case):
        g, cfg = case
        counts = sample_counts(g, cfg)
        assert counts.is_symmetric()

    @settings(deadline=None, max_examples=20)
    @given(_sampling_case())
    def test_deterministic(self, case):
        g, cfg = case
        assert sample_counts(g, cfg).pair_counts == sample_counts(g, cfg).pair_counts

    def test_directed_total_is_tL(self):
        from graphgen import cycle
        g = cycle(4, directed=True)
        cfg = SamplerConfig(window=3, centers=25, seed=2, start_mode="uniform", burn_in=10)
        assert sample_counts(g, cfg).total == 3 * 25


class TestSampleCounts:
    def test_k2_forced_counts(self):
        cfg = SamplerConfig(window=1, centers=1000, seed=0)
        counts = sample_counts(k2(), cfg)
        assert counts.pair_counts == {(0, 1): 1000, (1, 0): 1000}
        assert counts.total == 2000

    def test_workers_split_is_deterministic_and_consistent(self):
        g = triangle()
        cfg4 = SamplerConfig(window=2, centers=2001, seed=77, workers=4)
        counts_a = sample_counts(g, cfg4)
        counts_b = sample_counts(g, cfg4)
        assert counts_a.pair_counts == counts_b.pair_counts
        assert counts_a.total == 2 * 2 * 2001
        single = sample_counts(g, SamplerConfig(window=2, centers=2001, seed=77))
        assert single.total == counts_a.total

    def test_worker_merge_converges_to_same_closed_form(self):
        g = path3()
        p = walk_probability_matrix(g, 2).probs
        for workers in (1, 4):
            cfg = SamplerConfig(window=2, centers=200_000, seed=5, workers=workers)
            emp = empirical_conditional(sample_counts(g, cfg))
            assert np.nanmax(np.abs(emp - p)) < 0.02

    def test_merge_is_order_independent(self):
        g = triangle()
        parts = [
            sample_counts(g, SamplerConfig(window=1, centers=100, seed=s))
            for s in (1, 2, 3)
        ]
        forward = merge_counts(parts)
        backward = merge_counts(parts[::-1])
        assert forward.pair_counts == backward.pair_counts


class TestEmpiricalStatistics:
    def test_k2_conditional_exact(self):
        counts = sample_counts(k2(), SamplerConfig(window=1, centers=500, seed=1))
        assert empirical_conditional(counts).tolist() == [[0, 1], [1, 0]]

    def test_k2_frequency_exact(self):
        counts = sample_counts(k2(), SamplerConfig(window=1, centers=500, seed=1))
        assert empirical_frequency(counts).tolist() == [0.5, 0.5]

    def test_path_frequency_matches_degree_fraction(self):
        counts = sample_counts(path3(), SamplerConfig(window=2, centers=200_000, seed=3))
        freq = empirical_frequency(counts)
        assert np.max(np.abs(freq - stationary_distribution(path3()))) < 0.01

    def test_path_conditional_matches_average_walk_matrix(self):
        counts = sample_counts(path3(), SamplerConfig(window=2, centers=200_000, seed=3))
        emp = empirical_conditional(counts)
        assert np.max(np.abs(emp - walk_probability_matrix(path3(), 2).probs)) < 0.01

    def test_triangle_frequency_uniform(self):
        counts = sample_counts(triangle(), SamplerConfig(window=1, centers=200_000, seed=9))
        assert np.max(np.abs(empirical_frequency(counts) - 1 / 3)) < 0.01

    def test_observed_rows_sum_to_one(self):
        counts = sample_counts(path3(), SamplerConfig(window=2, centers=1, seed=0))
        emp = empirical_conditional(counts)
        observed = counts.node_counts > 0
        assert np.allclose(emp[observed].sum(axis=1), 1.0)

    def test_degenerate_single_center_on_k2(self):
        counts = sample_counts(k2(), SamplerConfig(window=1, centers=1, seed=0))
        emp = empirical_conditional(counts)
        for row in emp[counts.node_counts > 0]:
            assert row.sum() == 1.0

    def test_unobserved_row_is_nan_not_fabricated(self):
        counts = CooccurrenceCounts.from_matrix(np.array([[0, 3, 0], [3, 0, 0], [0, 0, 0]]))
        emp = empirical_conditional(counts)
        assert np.isnan(emp[2]).all()
        assert np.isfinite(emp[:2]).all()

    def test_empty_counts_rejected(self):
        counts = CooccurrenceCounts.from_matrix(np.zeros((2, 2), dtype=np.int64))
        with pytest.raises(ValueError, match="empty"):
            empirical_frequency(counts)

    def test_conditional_approaches_walk_matrix_as_length_grows(self):
        g = triangle()
        p = walk_probability_matrix(g, 2).probs
        distances = []
        for centers in (1000, 10_000, 100_000):
            counts = sample_counts(g, SamplerConfig(window=2, centers=centers, seed=21))
            distances.append(np.nanmax(np.abs(empirical_conditional(counts) - p)))
        assert distances[-1] < 0.01
        assert distances[-1] < distances[0]


class TestCountsIO:
    def test_round_trip(self, tmp_path):
        cfg = SamplerConfig(window=2, centers=300, seed=8)
        counts = sample_counts(path3(), cfg)
        write_counts_csv(counts, tmp_path / "counts.csv")
        write_counts_sidecar(counts, tmp_path / "counts.json", cfg)
        loaded, loaded_cfg = read_counts_csv(tmp_path / "counts.csv", tmp_path / "counts.json")
        assert loaded.pair_counts == counts.pair_counts
        assert loaded.total == counts.total
        assert loaded_cfg == cfg

    def test_total_mismatch_detected(self, tmp_path):
        cfg = SamplerConfig(window=1, centers=10, seed=8)
        counts = sample_counts(k2(), cfg)
        write_counts_csv(counts, tmp_path / "counts.csv")
        write_counts_sidecar(counts, tmp_path / "counts.json", cfg)
        sidecar = (tmp_path / "counts.json").read_text().replace('"total": 20', '"total": 21')
        (tmp_path / "counts.json").write_text(sidecar)
        with pytest.raises(ValueError, match="total"):
            read_counts_csv(tmp_path / "counts.csv", tmp_path / "counts.json")

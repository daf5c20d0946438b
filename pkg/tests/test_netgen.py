import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from felix import (
    GraphSpec,
    SocialGraph,
    make_complete,
    make_er,
    read_edgelist,
    write_edgelist,
)
from felix.graph import format_edgelist, parse_edgelist
from felix.netgen import STREAM_GRAPH, STREAM_INIT, substream


def test_complete_graph_counts():
    g = make_complete(2)
    assert g.edges == ((0, 1),)
    g = make_complete(100)
    assert g.num_edges == 4950 and np.all(g.degrees == 99)
    assert np.all(make_complete(20).degrees == 19)
    with pytest.raises(ValueError):
        make_complete(1)


def test_er_near_complete_limit_is_complete():
    g = make_er(30, 29 - 1e-12, 0)
    # p rounds to one only in the limit; at mean degree n-1 every pair is drawn
    assert make_er(30, 29.0, 0).is_complete()
    assert g.num_edges >= 430


def test_er_is_deterministic_in_seed():
    assert make_er(50, 5, 7) == make_er(50, 5, 7)
    assert make_er(50, 5, 7) != make_er(50, 5, 8)


def test_er_rejects_bad_degree():
    for k in (0, -1, 50, 60):
        with pytest.raises(ValueError):
            make_er(50, k, 0)


def test_er_mean_degree_within_three_standard_errors():
    n, k = 50, 5.0
    means = np.array([make_er(n, k, s).mean_degree() for s in range(1000)])
    se = means.std(ddof=1) / np.sqrt(means.size)
    assert abs(means.mean() - k) < 3 * se


def test_er_edge_counts_pass_chi_square():
    n, k = 50, 5.0
    pairs, p = n * (n - 1) // 2, k / (n - 1)
    counts = np.array([make_er(n, k, s).num_edges for s in range(1000)])
    dist = stats.binom(pairs, p)
    # bins with at least five expected draws; the tails are pooled
    edges = [-0.5]
    lo = int(dist.ppf(0.005))
    hi = int(dist.ppf(0.995))
    edges += [x + 0.5 for x in range(lo, hi, 3)]
    edges.append(pairs + 0.5)
    observed, _ = np.histogram(counts, bins=edges)
    expected = np.diff(dist.cdf(np.array(edges))) * counts.size
    expected *= observed.sum() / expected.sum()
    assert np.all(expected >= 5)
    assert stats.chisquare(observed, expected).pvalue > 0.01


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 40), frac=st.floats(0.01, 0.99), seed=st.integers(0, 2**63 - 1))
def test_generated_graphs_are_simple_and_symmetric(n, frac, seed):
    g = make_er(n, frac * (n - 1), seed)
    A = g.adjacency
    assert np.array_equal(A, A.T) and np.all(np.diag(A) == 0)
    assert all(a < b for a, b in g.edges)
    assert list(g.isolated) == [i for i in range(n) if g.degree(i) == 0]


def test_substreams_are_independent_of_each_other():
    a = substream(1, 0, STREAM_GRAPH).random(5)
    b = substream(1, 0, STREAM_INIT).random(5)
    c = substream(1, 1, STREAM_GRAPH).random(5)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)
    assert np.array_equal(a, substream(1, 0, STREAM_GRAPH).random(5))


def test_graph_spec():
    assert GraphSpec("complete", 5).build(None).is_complete()
    g = GraphSpec("erdos_renyi", 20, 4.3).build(substream(0, 0, STREAM_GRAPH))
    assert g == make_er(20, 4.3, substream(0, 0, STREAM_GRAPH))
    with pytest.raises(ValueError):
        GraphSpec("erdos_renyi", 20, 20)
    with pytest.raises(ValueError):
        GraphSpec("lattice", 20)


# -- edge-list format ------------------------------------------------------------


def test_edgelist_text_format():
    g = SocialGraph(4, [(2, 1), (0, 3), (0, 1)])
    assert format_edgelist(g) == "n 4\n0 1\n0 3\n1 2\n"


def test_edgelist_round_trip(tmp_path):
    g = make_er(30, 4, 3)
    path = tmp_path / "g.txt"
    write_edgelist(g, path)
    assert read_edgelist(path) == g
    assert path.read_bytes() == format_edgelist(g).encode()


def test_edgelist_keeps_isolated_nodes():
    g = parse_edgelist("n 5\n0 1\n")
    assert g.n == 5 and list(g.isolated) == [2, 3, 4]


@pytest.mark.parametrize(
    "text",
    ["0 1\n", "n 3\n0 0\n", "n 3\n0 5\n", "n 3\n0 1 2\n", "", "m 3\n"],
)
def test_edgelist_rejects_malformed_text(text):
    with pytest.raises(ValueError):
        parse_edgelist(text)


def test_graph_rejects_self_loops_and_out_of_range():
    with pytest.raises(ValueError):
        SocialGraph(2, [(1, 1)])
    with pytest.raises(ValueError):
        SocialGraph(2, [(0, 2)])

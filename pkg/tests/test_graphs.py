import itertools
import json

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from hrmodels.errors import Disconnected, NotChordal, TooLarge
from hrmodels.graphs import (UndirectedGraph, chordal_decomposition, clique_number,
                             complete_bipartite, complete_graph, cycle_graph, fish_graph, glue,
                             is_chordal, maximal_cliques, min_fill_order, path_graph, pentad_graph,
                             random_chordal_graph, random_connected_graph, read_graph,
                             separate_decompose, suspension, treewidth, write_graph)

from conftest import graph_from_bits


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(g.edges)
    return h


def brute_treewidth(g):
    best = g.d
    for order in itertools.permutations(g.vertices):
        adj = {v: set(g.adjacency[v]) for v in g.vertices}
        width = 0
        for v in order:
            nb = adj.pop(v)
            width = max(width, len(nb))
            for a in nb:
                adj[a].discard(v)
                adj[a] |= nb - {a}
        best = min(best, width)
    return best


graphs_small = st.integers(1, 7).flatmap(
    lambda d: st.integers(0, 2 ** (d * (d - 1) // 2) - 1).map(lambda b: graph_from_bits(d, b)))


def test_edges_normalized_and_validated():
    g = UndirectedGraph.from_edges(3, [(2, 1), (3, 2)])
    assert g.edge_list() == [(1, 2), (2, 3)]
    with pytest.raises(ValueError):
        UndirectedGraph.from_edges(3, [(1, 1)])
    with pytest.raises(ValueError):
        UndirectedGraph.from_edges(3, [(1, 4)])


def test_chordality_examples():
    assert is_chordal(complete_graph(4))
    assert not is_chordal(cycle_graph(4))
    assert is_chordal(fish_graph())
    assert fish_graph().edge_list() == [(1, 2), (1, 3), (1, 4), (2, 4), (3, 4), (4, 5), (4, 6)]


@given(graphs_small)
def test_chordality_matches_networkx(g):
    assert is_chordal(g) == nx.is_chordal(to_nx(g))


def test_fish_decomposition():
    dec = chordal_decomposition(fish_graph())
    assert [set(c) for c in dec.cliques] == [{1, 2, 4}, {1, 3, 4}, {4, 5}, {4, 6}]
    assert {(frozenset(s), nu) for s, nu in dec.separators} == {(frozenset({1, 4}), 1),
                                                                (frozenset({4}), 2)}
    assert dec.running_intersection()


def test_small_decompositions():
    dec = chordal_decomposition(path_graph(3))
    assert [set(c) for c in dec.cliques] == [{1, 2}, {2, 3}]
    assert [(set(s), nu) for s, nu in dec.separators] == [({2}, 1)]
    dec = chordal_decomposition(complete_graph(3))
    assert [set(c) for c in dec.cliques] == [{1, 2, 3}]
    assert dec.separators == ()


def test_decomposition_errors():
    with pytest.raises(NotChordal):
        chordal_decomposition(cycle_graph(4))
    with pytest.raises(Disconnected):
        chordal_decomposition(UndirectedGraph.from_edges(4, [(1, 2), (3, 4)]))


def test_random_chordal_decompositions(rng):
    for _ in range(50):
        g = random_chordal_graph(int(rng.integers(2, 11)), rng)
        assert is_chordal(g)
        dec = chordal_decomposition(g)
        assert dec.running_intersection()
        assert sum(nu for _, nu in dec.separators) == len(dec.cliques) - 1
        assert {frozenset(c) for c in dec.cliques} == set(maximal_cliques(g))


def test_clique_numbers():
    assert clique_number(cycle_graph(4)) == 2
    assert clique_number(fish_graph()) == 3
    assert clique_number(complete_graph(5)) == 5


@given(graphs_small)
def test_clique_number_matches_networkx(g):
    assert clique_number(g) == max(len(c) for c in nx.find_cliques(to_nx(g)))


def test_treewidth_bound_met_by_non_chordal_graph():
    g = graph_from_bits(6, 762)
    assert not is_chordal(g)
    assert treewidth(g).width == clique_number(g) - 1 == 2


def test_treewidth_examples():
    assert treewidth(cycle_graph(4)).width == 2
    assert treewidth(path_graph(7)).width == 1
    for d in range(2, 7):
        assert treewidth(complete_graph(d)).width == d - 1
    assert treewidth(complete_graph(6), exact=False).mode == "min-fill upper bound"
    with pytest.raises(TooLarge):
        treewidth(path_graph(21))


@given(st.integers(1, 6).flatmap(
    lambda d: st.integers(0, 2 ** (d * (d - 1) // 2) - 1).map(lambda b: graph_from_bits(d, b))))
def test_treewidth_matches_brute_force(g):
    tw = treewidth(g).width
    assert tw == brute_treewidth(g)
    assert tw <= min_fill_order(g)[0]


@given(graphs_small)
def test_treewidth_clique_relations(g):
    tw = treewidth(g).width
    q = clique_number(g)
    assert q - 1 <= tw
    # chordal graphs meet the lower bound; the converse fails, e.g. a 4-cycle beside a triangle
    if is_chordal(g):
        assert tw == q - 1


def test_separate_decompose_examples():
    split = separate_decompose(fish_graph())
    assert (split.left, split.right, split.separator) == ({1, 2, 3, 4}, {4, 5, 6}, {4})
    assert separate_decompose(cycle_graph(4)) is None
    two = UndirectedGraph.from_edges(4, [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)])
    split = separate_decompose(two)
    assert (split.left, split.right, split.separator) == ({1, 2, 3}, {2, 3, 4}, {2, 3})
    with pytest.raises(Disconnected):
        separate_decompose(UndirectedGraph.from_edges(3, [(1, 2)]))


@pytest.mark.parametrize("n", range(4, 10))
def test_cycles_are_prime(n):
    assert separate_decompose(cycle_graph(n)) is None


def test_every_split_is_a_clique_separation(rng):
    for _ in range(30):
        g = random_connected_graph(int(rng.integers(3, 9)), 0.3, rng)
        k = 0
        while (split := separate_decompose(g, k)) is not None:
            c = split.separator
            assert g.is_clique(c)
            a, b = split.left - c, split.right - c
            assert a and b and not (a & b)
            assert not any(g.has_edge(i, j) for i in a for j in b)
            k += 1


def test_suspension_examples():
    s = suspension(path_graph(3))
    assert s.d == 4 and s.edge_list() == [(1, 2), (1, 4), (2, 3), (2, 4), (3, 4)]
    w = suspension(cycle_graph(4))
    assert len(w.edges) == 8 and all(len(w.adjacency[v]) == 3 for v in range(1, 5))
    p = pentad_graph()
    assert p.d == 8 and len(p.edges) == 10 + 1 + 7
    assert p.has_edge(6, 7) and not p.has_edge(1, 2)


def test_families():
    k = complete_bipartite(2, 3)
    assert k.d == 5 and len(k.edges) == 6 and not k.has_edge(1, 2)
    g = glue(cycle_graph(4), cycle_graph(4), 2)
    assert g.d == 6 and len(g.edges) == 7
    assert separate_decompose(g).separator == {3, 4}


def test_graph_io_round_trip(tmp_path):
    g = fish_graph()
    write_graph(g, tmp_path / "g.json")
    assert read_graph(tmp_path / "g.json") == g
    (tmp_path / "g.txt").write_text("# fish\n1 2\n1 3\n1 4\n2 4\n3 4\n4 5\n4 6\n")
    assert read_graph(tmp_path / "g.txt") == g
    assert json.loads((tmp_path / "g.json").read_text())["d"] == 6

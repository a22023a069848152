import itertools

import networkx as nx
import pytest

from conftest import path_graph, random_graph
from widthkit import config, connfn
from widthkit.checks import Verdict
from widthkit.errors import BudgetExceeded, NotAnEdge, UnknownLabel, WidthKitError
from widthkit.fullset import path_width as arrangement_path_width
from widthkit.graph import (
    Graph,
    apply_pivots,
    arrangement_of,
    boundary_dims_match,
    canonical_form,
    check_pivot_triangle,
    cut_rank,
    enumerate_graphs,
    graph_linking_minor,
    graph_matroid,
    is_pivot_minor,
    linear_rank_width,
    matroid_side,
    min_cut_rank,
    pivot,
    pivot_orbit,
    pivot_paths,
    strong_linking_graph_check,
)
from widthkit.matroid import connectivity, is_coindependent

K2 = Graph.from_edges(2, [(0, 1)])
K3 = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def small_graphs(max_n: int):
    return [g for g in enumerate_graphs(max_n) if g.n >= 1]


# -------------------- Graphs --------------------


def test_graph_validation():
    with pytest.raises(WidthKitError):
        Graph.from_edges(2, [(0, 0)])
    with pytest.raises(UnknownLabel):
        Graph.from_edges(2, [(0, 2)])
    with pytest.raises(WidthKitError):
        Graph(2, (0b10, 0))


def test_graph6_round_trip(p4):
    assert Graph.from_graph6(p4.to_graph6()) == p4
    assert Graph.from_graph6("B?") == Graph.empty(3)


def test_induced_renumbers(p4):
    h = p4.induced([1, 2, 3])
    assert h.edges() == [(0, 1), (1, 2)]
    assert p4.delete([0]) == h


# -------------------- Cut-rank and rank-width --------------------


def test_cut_rank_on_p4(p4):
    assert cut_rank(p4, []) == 0
    assert cut_rank(p4, [0]) == 1
    assert cut_rank(p4, [0, 1]) == 1
    assert cut_rank(p4, [0, 2]) == 2
    assert cut_rank(Graph.empty(4), [0, 1]) == 0


def test_linear_rank_width_examples(p4):
    assert linear_rank_width(p4)[0] == 1
    assert linear_rank_width(Graph.empty(3))[0] == 0
    assert linear_rank_width(K3)[0] == 1
    c5 = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    assert linear_rank_width(c5)[0] == 2


def test_cut_rank_is_a_connectivity_function():
    for g in small_graphs(4):
        f = connfn.ConnectivityFunction(range(g.n), lambda m, g=g: cut_rank(g, [v for v in range(g.n) if m >> v & 1]))
        assert connfn.check_axioms(f)


# -------------------- Pivots --------------------


def test_pivot_on_k2_is_k2():
    assert pivot(K2, 0, 1) == K2


def test_pivot_needs_an_edge(p4):
    with pytest.raises(NotAnEdge):
        pivot(p4, 0, 2)


def test_pivot_is_an_involution():
    for g in small_graphs(5):
        for u, v in g.edges():
            assert pivot(pivot(g, u, v), u, v) == g


def test_pivot_keeps_every_cut_rank():
    for g in small_graphs(5):
        for u, v in g.edges():
            h = pivot(g, u, v)
            for r in range(g.n + 1):
                for x in itertools.combinations(range(g.n), r):
                    assert cut_rank(h, x) == cut_rank(g, x)


def test_pivot_on_p3_end_edge():
    # no cross pairs; only the label swap moves edge 1-2 to 0-2
    assert set(pivot(path_graph(3), 0, 1).edges()) == {(0, 1), (0, 2)}


def test_triangle_identity():
    assert check_pivot_triangle(K3, 0, 1, 2)
    pendant = Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    assert check_pivot_triangle(pendant, 0, 1, 2)
    for g in small_graphs(5):
        for u, v, w in itertools.permutations(range(g.n), 3):
            if g.has_edge(u, v) and g.has_edge(v, w) and g.has_edge(u, w):
                assert check_pivot_triangle(g, u, v, w)


def test_triangle_identity_needs_a_triangle(p4):
    with pytest.raises(NotAnEdge):
        check_pivot_triangle(p4, 0, 1, 2)


def test_orbit_of_k2_and_p4(p4):
    assert pivot_orbit(K2) == {K2}
    orbit = pivot_orbit(p4)
    assert p4 in orbit
    for member in orbit:
        for r in range(5):
            for x in itertools.combinations(range(4), r):
                assert cut_rank(member, x) == cut_rank(p4, x)


def test_pivot_paths_reach_their_members(p4):
    for member, path in pivot_paths(p4).items():
        assert apply_pivots(p4, path) == member


def test_orbit_budget(monkeypatch):
    monkeypatch.setattr(config, "ORBIT_BUDGET", 3)
    with pytest.raises(BudgetExceeded):
        pivot_orbit(path_graph(4))


def test_pivot_minors(p4):
    assert is_pivot_minor(p4, p4)
    assert not is_pivot_minor(p4, p4, proper=True)
    assert is_pivot_minor(K2, p4, proper=True)
    assert is_pivot_minor(Graph.empty(1), K2)
    assert not is_pivot_minor(K2, Graph.empty(3))
    assert not is_pivot_minor(path_graph(5), p4)


# -------------------- Canonical forms and enumeration --------------------


def test_canonical_form_ignores_labels(rng):
    for _ in range(20):
        g = random_graph(rng, 6)
        perm = [int(v) for v in rng.permutation(6)]
        assert canonical_form(g.relabel(perm)) == canonical_form(g)


def test_canonical_form_separates_classes():
    forms = [canonical_form(g) for g in enumerate_graphs(5)]
    assert len(forms) == len(set(forms))


def test_enumerate_graphs_counts():
    # graph atlas: 1, 1, 2, 4, 11, 34 graphs on 0..5 vertices
    assert len(list(enumerate_graphs(4))) == 19
    assert len(list(enumerate_graphs(5))) == 53


def test_enumerate_graphs_budget():
    with pytest.raises(BudgetExceeded):
        list(enumerate_graphs(9))


# -------------------- Linear-algebra views --------------------


def test_arrangement_boundary_is_twice_cut_rank():
    for g in small_graphs(5):
        for r in range(g.n + 1):
            for x in itertools.combinations(range(g.n), r):
                assert boundary_dims_match(g, x)


def test_arrangement_path_width_is_twice_rank_width():
    for g in small_graphs(4):
        assert arrangement_path_width(arrangement_of(g))[0] == 2 * linear_rank_width(g)[0]


def test_graph_matroid_connectivity(p4):
    m = graph_matroid(p4)
    assert m.size == 8
    for r in range(5):
        for x in itertools.combinations(range(4), r):
            assert connectivity(m, matroid_side(x)) == 2 * cut_rank(p4, x)
    assert is_coindependent(m, [f"a{v}" for v in range(4)])


# -------------------- Linking --------------------


def test_graph_linking_on_p4(p4):
    link = graph_linking_minor(p4, [0], [3])
    assert link.k == 1
    assert link.vertices == (0, 3)
    assert cut_rank(link.minor, [0]) == 1
    assert link.minor.has_edge(0, 1)


def test_graph_linking_without_free_vertices(p4):
    link = graph_linking_minor(p4, [0, 1], [2, 3])
    assert link.k == 1
    assert link.pivots == ()
    assert link.minor == p4


def test_graph_linking_on_random_graphs(rng):
    for _ in range(20):
        g = random_graph(rng, 6)
        side = rng.integers(0, 3, size=6)
        s = [v for v in range(6) if side[v] == 1]
        t = [v for v in range(6) if side[v] == 2]
        link = graph_linking_minor(g, s, t)
        assert link.k == min_cut_rank(g, s, t)
        index = {v: i for i, v in enumerate(link.vertices)}
        assert cut_rank(link.minor, [index[v] for v in s]) == link.k


def test_graph_strong_linking_holds_after_linking(rng):
    for _ in range(10):
        g = random_graph(rng, 6)
        s, t = [0], [5]
        link = graph_linking_minor(g, s, t)
        g0 = link.member
        cuts = [
            set(s) | set(extra)
            for r in range(5)
            for extra in itertools.combinations(range(1, 5), r)
            if cut_rank(g0, set(s) | set(extra)) == link.k
        ]
        for z, z2 in itertools.product(cuts, repeat=2):
            report = strong_linking_graph_check(g0, s, t, z, z2, rng)
            assert report.status is Verdict.HELD


def test_graph_strong_linking_needs_a_linked_graph():
    # in P4 itself, G[{0, 3}] has no edge, so S and T are not linked there
    report = strong_linking_graph_check(path_graph(4), [0], [3], [0], [0])
    assert report.status is Verdict.INAPPLICABLE


def test_networkx_round_trip(p4):
    assert Graph.from_networkx(p4.to_networkx()) == p4
    assert nx.is_isomorphic(p4.to_networkx(), nx.path_graph(4))

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dynapsp import oracle
from dynapsp.graph import (Graph, GraphError, GraphFormatError, GraphView, VertexSet,
                           format_graph, induced_without, parse_graph, reversed_view)
from support import cycle, random_graph


def test_induced_without_cycle():
    view = induced_without(cycle(5), VertexSet(5, [2]))
    assert view.n == 4
    assert view.m == 3


def test_induced_without_empty_is_identity(rng):
    g = random_graph(12, 0.3, rng)
    view = induced_without(g, VertexSet(12))
    assert view.edges() == sorted(g.edges())
    assert view.n == g.n


def test_induced_without_recount(rng):
    g = random_graph(20, 0.2, rng)
    removed = {int(v) for v in rng.choice(20, 5, replace=False)}
    view = induced_without(g, VertexSet(20, removed))
    expected = [(u, v, w) for u, v, w in g.edges() if u not in removed and v not in removed]
    assert view.m == len(expected)
    assert view.edges() == sorted(expected)


def test_reversed_single_edge():
    g = Graph.from_edges(2, [(0, 1, 3.0)])
    assert reversed_view(g).edges() == [(1, 0, 3.0)]


def test_reversed_involution(rng):
    g = random_graph(15, 0.25, rng)
    assert reversed_view(reversed_view(g)).edges() == sorted(g.edges())


def test_reversed_distances(rng):
    for _ in range(5):
        g = random_graph(15, 0.2, rng)
        D = oracle.apsp(g)
        R = oracle.apsp(_view_graph(reversed_view(g)))
        assert np.array_equal(D, R.T)


def _view_graph(view: GraphView) -> Graph:
    return Graph.from_edges(int(view.ids.max()) + 1, view.edges())


def test_insert_into_empty():
    g = Graph()
    assert g.insert_vertex() == 0
    assert g.m == 0


def test_insert_into_triangle():
    g = cycle(3)
    v = g.insert_vertex([(0, 1.0)], [(1, 2.0)])
    assert v == 3
    assert g.m == 5
    assert g.weight(3, 0) == 1.0 and g.weight(1, 3) == 2.0


def test_insert_accepts_dicts():
    g = cycle(3)
    g.insert_vertex({0: 1.0}, {2: 4.0})
    assert g.weight(2, 3) == 4.0


def test_insert_rejects_dead_neighbour_and_negative_weight():
    g = cycle(4)
    g.delete_vertex(1)
    with pytest.raises(GraphError):
        g.insert_vertex([(1, 1.0)], [])
    with pytest.raises(GraphError):
        g.insert_vertex([(0, -1.0)], [])


def test_random_ops_keep_transpose(rng):
    g = random_graph(10, 0.3, rng)
    for _ in range(50):
        alive = g.alive_ids()
        if len(alive) > 1 and rng.random() < 0.5:
            g.delete_vertex(int(rng.choice(alive)))
        else:
            out = [(int(u), float(rng.integers(1, 5))) for u in alive if rng.random() < 0.3]
            inn = [(int(u), float(rng.integers(1, 5))) for u in alive if rng.random() < 0.3]
            g.insert_vertex(out, inn)
        g.check_consistency()


def test_delete_isolated_vertex():
    g = Graph.from_edges(3, [(0, 1, 1.0)])
    g.delete_vertex(2)
    assert g.m == 1


def test_delete_cycle_vertex():
    g = cycle(5)
    g.delete_vertex(2)
    assert g.m == 3
    assert not g.is_alive(2)


def test_double_delete_is_error():
    g = cycle(5)
    g.delete_vertex(2)
    with pytest.raises(GraphError):
        g.delete_vertex(2)


def test_ids_never_recycled():
    g = cycle(3)
    g.delete_vertex(2)
    assert g.insert_vertex() == 3


def test_parallel_edges_keep_minimum():
    g = Graph(2)
    g.add_edge(0, 1, 5.0)
    g.add_edge(0, 1, 2.0)
    g.add_edge(0, 1, 7.0)
    assert g.m == 1 and g.weight(0, 1) == 2.0


def test_alive_subgraph_distances_after_deletes(rng):
    g = random_graph(25, 0.15, rng)
    for v in rng.choice(25, 8, replace=False):
        g.delete_vertex(int(v))
    alive = g.alive_ids()
    D = oracle.apsp(g)
    sub = GraphView.from_graph(g)
    W = sub.dense()
    np.fill_diagonal(W, 0.0)
    assert np.array_equal(D[np.ix_(alive, alive)], oracle.floyd_warshall(W))


@given(st.integers(0, 2**32 - 1), st.sets(st.integers(0, 11)), st.sets(st.integers(0, 11)))
def test_view_composition(seed, a, b):
    g = random_graph(12, 0.3, np.random.default_rng(seed))
    left = induced_without(induced_without(g, VertexSet(12, a)), VertexSet(12, b))
    right = induced_without(g, VertexSet(12, a | b))
    assert left.edges() == right.edges()


def test_parse_roundtrip(rng):
    g = random_graph(8, 0.4, rng)
    h = parse_graph(format_graph(g))
    assert sorted(h.edges()) == sorted(g.edges())


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("3\n", 1),
    ("3 1\n0 1\n", 2),
    ("3 1\n0 5 1\n", 2),
    ("3 1\n0 1 -2\n", 2),
    ("3 2\n0 1 1\n", 3),
    ("3 1\n0 x 1\n", 2),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(GraphFormatError) as err:
        parse_graph(text)
    assert err.value.line == line


def test_self_loops_dropped():
    g = parse_graph("2 2\n0 0 1\n0 1 1\n")
    assert g.m == 1

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dynapsp.graph import VertexSet
from dynapsp.hitting import SetSystem, choose_radius, greedy_hitting_set, integer_range


def hits_all(sys, chosen):
    return all(any(x in chosen for x in s) for s in sys.sets)


def test_common_element():
    sys = SetSystem(4, [{0, 1}, {1, 2}, {1, 3}], min_size=2)
    assert set(greedy_hitting_set(sys)) == {1}


def test_disjoint_sets_need_both():
    sys = SetSystem(2, [{0}, {1}], min_size=1)
    assert set(greedy_hitting_set(sys)) == {0, 1}


def test_random_sets_within_bound(rng):
    sets = [rng.choice(50, 10, replace=False) for _ in range(100)]
    sys = SetSystem(50, sets, min_size=10)
    chosen = set(greedy_hitting_set(sys))
    assert hits_all(sys, chosen)
    assert len(chosen) <= math.ceil(50 / 10 * math.log(101)) + 1


def test_rejects_small_set():
    with pytest.raises(ValueError):
        SetSystem(5, [{0, 1}, {2}], min_size=2)


def test_rejects_out_of_universe():
    with pytest.raises(ValueError):
        SetSystem(3, [{0, 3}])


def test_empty_system():
    assert len(greedy_hitting_set(SetSystem(5, []))) == 0


@given(st.integers(1, 40), st.lists(st.sets(st.integers(0, 39), min_size=1, max_size=12),
                                    max_size=40))
def test_greedy_hits_and_respects_bound(u, raw):
    sets = [{x % u for x in s} for s in raw]
    sys = SetSystem(u, sets)
    chosen = set(greedy_hitting_set(sys))
    assert hits_all(sys, chosen)
    assert len(chosen) <= sys.size_bound()


def test_radius_on_path_layers():
    hops = [(x, x) for x in range(10)]
    ch = choose_radius(hops, (1.687, 3.375))
    assert ch.radius == 2
    assert set(ch.members) == {2}
    assert ch.choices == 2


def test_radius_single_choice():
    hops = [(x, 2) for x in range(6)]
    ch = choose_radius(hops, (1.125, 2.25))
    assert ch.radius == 2
    assert set(ch.members) == set(range(6))


def test_radius_random_tree(rng):
    n = 100
    depth = np.zeros(n, dtype=int)
    for v in range(1, n):
        depth[v] = depth[rng.integers(v)] + 1
    hops = list(enumerate(depth.tolist()))
    ch = choose_radius(hops, (2.53, 5.06))
    layer = [int(np.sum(depth == r)) for r in (3, 4, 5)]
    assert len(ch.members) == min(layer)
    assert len(ch.members) <= sum(layer) / 3
    assert ch.candidates == sum(layer)


def test_radius_skips_excluded():
    hops = [(0, 2), (1, 2), (2, 3)]
    ch = choose_radius(hops, (1.5, 3.5), excluded=VertexSet(3, [0, 1]))
    assert ch.radius == 2 and len(ch.members) == 0


def test_radius_requires_integer():
    with pytest.raises(ValueError):
        choose_radius([(0, 1)], (1.2, 1.9))


def test_integer_range_is_open():
    assert integer_range(1.0, 3.0) == (2, 2)
    assert integer_range(0.5, 1.0) == (1, 0)


@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 12)), max_size=60),
       st.floats(0.0, 6.0), st.floats(1.01, 3.0))
def test_radius_pigeonhole_and_determinism(hops, lo, scale):
    hi = lo * scale + 1.01
    rlo, rhi = integer_range(lo, hi)
    if rlo > rhi:
        return
    a = choose_radius(hops, (lo, hi), n_slots=31)
    b = choose_radius(hops, (lo, hi), n_slots=31)
    assert (a.radius, set(a.members)) == (b.radius, set(b.members))
    assert rlo <= a.radius <= rhi
    assert len(a.members) * a.choices <= a.candidates

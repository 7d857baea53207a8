import numpy as np
import pytest

from holonet.errors import (
    CycleInOrder,
    DuplicateElement,
    EndpointMismatch,
    NotComparable,
    UnknownElement,
)
from holonet.poset import (
    OneSimplex,
    build_poset,
    check_connected,
    compose_paths,
    degenerate_simplex,
    edge_simplex,
    enumerate_one_simplices,
    make_path,
    opposite_path,
)
from holonet.randomgen import random_connected_poset, random_path
from holonet.standard import chain_poset, circle_poset, hexagon_poset, with_top


# oracle: enumerate simplices by filtering all element triples

def brute_force_simplices(poset):
    out = []
    for s in poset.elements:
        for f0 in poset.elements:
            for f1 in poset.elements:
                if poset.leq(f0, s) and poset.leq(f1, s):
                    out.append((s, f0, f1))
    return sorted(out)


# oracle: connectivity by union-find on comparability edges

def union_find_connected(poset):
    parent = {e: e for e in poset.elements}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x, y in poset.strict_pairs():
        parent[find(x)] = find(y)
    roots = {find(e) for e in poset.elements}
    return len(roots) <= 1


def test_build_poset_closure_and_order():
    p = build_poset(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert p.leq("a", "c")
    assert p.lt("a", "c")
    assert not p.leq("c", "a")
    assert p.below("c") == ["a", "b", "c"]


def test_build_poset_errors():
    with pytest.raises(DuplicateElement):
        build_poset(["a", "a"], [])
    with pytest.raises(UnknownElement):
        build_poset(["a"], [("a", "b")])
    with pytest.raises(CycleInOrder):
        build_poset(["a", "b"], [("a", "b"), ("b", "a")])


def test_two_element_chain_has_five_simplices():
    p = chain_poset(2)
    got = enumerate_one_simplices(p)
    assert len(got) == 5  # frozen from the brute-force oracle
    assert [(b.support, b.face0, b.face1) for b in got] == brute_force_simplices(p)
    expected = {
        ("o1", "o1", "o1"),
        ("o2", "o2", "o2"),
        ("o2", "o1", "o2"),
        ("o2", "o2", "o1"),
        ("o2", "o1", "o1"),
    }
    assert {(b.support, b.face0, b.face1) for b in got} == expected


def test_hexagon_simplex_count_matches_oracle():
    p = hexagon_poset()
    got = enumerate_one_simplices(p)
    oracle = brute_force_simplices(p)
    assert [(b.support, b.face0, b.face1) for b in got] == oracle
    # frozen from the oracle: each arc has 3 elements below it (itself and
    # two overlaps), each overlap only itself: 3*9 + 3*1
    assert len(got) == 30
    assert sum(1 for b in got if b.support == b.face0 == b.face1) == 6


@pytest.mark.parametrize("seed", range(15))
def test_enumeration_matches_oracle_on_random_posets(seed):
    rng = np.random.default_rng(seed)
    p = random_connected_poset(rng, 9)
    got = [(b.support, b.face0, b.face1) for b in enumerate_one_simplices(p)]
    assert got == brute_force_simplices(p)


def test_opposite_simplex_swaps_faces():
    b = OneSimplex("s", "x", "y")
    assert b.opposite == OneSimplex("s", "y", "x")
    assert degenerate_simplex("s").opposite == degenerate_simplex("s")


def test_edge_simplex_supports_on_upper_element():
    p = chain_poset(2)
    up = edge_simplex(p, "o1", "o2")
    assert (up.support, up.face0, up.face1) == ("o2", "o2", "o1")
    down = edge_simplex(p, "o2", "o1")
    assert (down.support, down.face0, down.face1) == ("o2", "o1", "o2")
    with pytest.raises(NotComparable):
        edge_simplex(hexagon_poset(), "U1", "U2")


def test_make_path_checks_chaining():
    p = chain_poset(3)
    b1 = edge_simplex(p, "o1", "o2")
    b2 = edge_simplex(p, "o2", "o3")
    path = make_path(p, [b1, b2])
    assert path.start == "o1" and path.end == "o3"
    with pytest.raises(EndpointMismatch):
        make_path(p, [b2, b1])


def test_compose_with_reversal_gives_loop():
    p = chain_poset(3)
    b1 = edge_simplex(p, "o1", "o2")
    b2 = edge_simplex(p, "o2", "o3")
    path = make_path(p, [b1, b2])
    loop = compose_paths(p, path, path, reverse_q=True)
    assert loop.is_loop
    assert len(loop) == 4


def test_compose_appends_degenerate_segment():
    p = chain_poset(2)
    b1 = edge_simplex(p, "o1", "o2")
    path = make_path(p, [b1])
    iota = make_path(p, [degenerate_simplex("o1")])
    out = compose_paths(p, path, iota)
    assert len(out) == 2
    assert out.simplices[0] == degenerate_simplex("o1")
    assert out.start == "o1" and out.end == "o2"


def test_compose_endpoint_mismatch():
    p = chain_poset(3)
    path = make_path(p, [edge_simplex(p, "o1", "o2")])
    with pytest.raises(EndpointMismatch):
        compose_paths(p, path, path)


def test_opposite_path_reverses():
    rng = np.random.default_rng(3)
    p = random_connected_poset(rng, 8)
    q = random_path(p, rng, p.elements[0], 6)
    opp = opposite_path(q)
    assert opp.start == q.end and opp.end == q.start
    assert opposite_path(opp) == q


def test_hexagon_half_loops_compose_to_full_loop():
    p = hexagon_poset()
    half1 = make_path(p, [
        edge_simplex(p, "U1", "V12"),
        edge_simplex(p, "V12", "U2"),
        edge_simplex(p, "U2", "V23"),
    ])
    half2 = make_path(p, [
        edge_simplex(p, "V23", "U3"),
        edge_simplex(p, "U3", "V31"),
        edge_simplex(p, "V31", "U1"),
    ])
    full = compose_paths(p, half2, half1)
    assert full.is_loop and full.start == "U1"
    assert len(full) == 6


@pytest.mark.parametrize("seed", range(20))
def test_connectivity_matches_union_find(seed):
    rng = np.random.default_rng(seed + 100)
    n = int(rng.integers(2, 9))
    els = [f"x{i}" for i in range(n)]
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.25:
                pairs.append((els[i], els[j]))
    p = build_poset(els, pairs)
    assert check_connected(p) == union_find_connected(p)


def test_standard_posets_connected():
    assert check_connected(hexagon_poset())
    assert check_connected(chain_poset(5))
    assert check_connected(circle_poset(5))
    assert check_connected(with_top(hexagon_poset()))

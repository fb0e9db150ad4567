import math

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from khoburn import cube

from oracles import assert_permutohedral, subchains, surjections


def order_graph(chains):
    g = nx.DiGraph()
    g.add_nodes_from(chains)
    for a in chains:
        for b in chains:
            if a != b and cube.refines(a, b):
                g.add_edge(a, b)
    return g


@pytest.mark.parametrize("r", [1, 2, 3, 4, 5])
def test_f_vector_matches_ordered_partitions(r):
    P = cube.face_poset((1,) * r, (0,) * r)
    expected = {r - k: surjections(r, k) for k in range(1, r + 1)}
    assert P.f_vector() == dict(sorted(expected.items()))
    assert P.f_vector()[0] == math.factorial(r)
    assert P.euler_characteristic() == 1


def test_hexagon_f_vector():
    assert cube.face_poset((1, 1, 1), (0, 0, 0)).f_vector() == {0: 6, 1: 6, 2: 1}


@pytest.mark.parametrize("r", [1, 2, 3, 4, 5])
def test_face_poset_is_ordered_partition_poset(r):
    P = cube.face_poset((1,) * r, (0,) * r)
    assert_permutohedral(P.chains, cube.chain_to_partition, r)
    for a in P.chains:
        for b in subchains(a):
            assert cube.refines(a, b)


def test_small_posets_isomorphic_by_graph_matching():
    P = cube.face_poset((1, 1, 1), (0, 0, 0))
    Q = cube.face_poset((0, 1, 1, 1), (0, 0, 0, 0))
    assert cube.posets_isomorphic(P.chains, Q.chains)
    assert not cube.posets_isomorphic(P.chains, cube.face_poset((1, 1), (0, 0)).chains)
    assert nx.is_isomorphic(order_graph(P.chains), order_graph(Q.chains))


def test_face_poset_hasse_of_square():
    P = cube.face_poset((1, 1), (0, 0))
    g = P.hasse_graph()
    assert g.number_of_nodes() == 3 and g.number_of_edges() == 2


def test_degenerate_interval_rejected():
    with pytest.raises(ValueError):
        cube.face_poset((1, 0), (1, 0))
    with pytest.raises(ValueError):
        cube.face_poset((1, 0), (0, 1))


@given(st.lists(st.integers(0, 1), min_size=1, max_size=6), st.data())
def test_partition_chain_roundtrip(u, data):
    u = tuple(u)
    ones = [i for i, x in enumerate(u) if x]
    if not ones:
        return
    k = data.draw(st.integers(1, len(ones)))
    labels = data.draw(st.permutations(list(range(k)) + [data.draw(st.integers(0, k - 1)) for _ in ones[k:]]))
    blocks = tuple(frozenset(i for i, lab in zip(ones, labels) if lab == b) for b in range(k))
    ch = cube.chain_from_partition(u, blocks)
    assert cube.chain_to_partition(ch) == blocks
    assert ch[0] == u and cube.norm(ch[-1]) == 0


def test_canonical_chain_drops_in_increasing_order():
    assert cube.canonical_chain((1, 1, 0, 1), (0, 1, 0, 0)) == ((1, 1, 0, 1), (0, 1, 0, 1), (0, 1, 0, 0))
    with pytest.raises(ValueError):
        cube.canonical_chain((0, 1), (1, 0))


@settings(max_examples=60)
@given(st.sampled_from([(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1)]), st.data())
def test_cyclic_action_is_a_group_action_by_poset_maps(mn, data):
    m, n = mn
    a = cube.CyclicAction(m, n)
    u = tuple(data.draw(st.lists(st.integers(0, 1), min_size=n * m, max_size=n * m)))
    v = tuple(min(x, y) for x, y in zip(u, data.draw(st.lists(st.integers(0, 1), min_size=n * m, max_size=n * m))))
    g, h = data.draw(st.integers(0, m - 1)), data.draw(st.integers(0, m - 1))
    assert a.act_vertex(0, u) == u
    assert a.act_vertex(g, a.act_vertex(h, u)) == a.act_vertex((g + h) % m, u)
    assert cube.geq(a.act_vertex(g, u), a.act_vertex(g, v))
    assert cube.norm(a.act_vertex(g, u)) == cube.norm(u)


def test_block_action_convention():
    a = cube.CyclicAction(3, 2)
    # generator moves block b to block b+1
    assert a.act_vertex(1, (1, 0, 0, 0, 0, 1)) == (0, 1, 1, 0, 0, 0)
    with pytest.raises(ValueError):
        cube.CyclicAction(2, 1, perm=(1, 2, 0))


def test_coordinate_orbits_and_subgroups():
    a = cube.CyclicAction(4, 1)
    assert a.subgroup(2) == (0, 2)
    assert a.coordinate_orbits(a.subgroup(2)) == [[0, 2], [1, 3]]
    with pytest.raises(ValueError):
        a.subgroup(3)


def _fixed_cases():
    for m in (2, 3):
        for n in range(1, 4):
            if n * m > 6:
                continue
            a = cube.CyclicAction(m, n)
            for index in range(1, m + 1):
                if m % index:
                    continue
                sub = cube.fixed_subcube(a, index)
                fv = sub.fixed_vertices()
                for u in fv:
                    for v in fv:
                        if u != v and cube.geq(u, v):
                            yield a, index, u, v


def test_fixed_face_posets_are_lower_permutohedra():
    count = 0
    for a, index, u, v in _fixed_cases():
        FP = cube.fixed_face_poset(u, v, a, index)
        H = a.subgroup(index)
        # fixed chains drop whole H-orbits of coordinates; relabel orbits 0..r-1
        orbits = [tuple(o) for o in a.coordinate_orbits(H) if u[o[0]] and not v[o[0]]]
        r = len(orbits)
        which = {i: k for k, o in enumerate(orbits) for i in o}

        def to_partition(c):
            return tuple(frozenset(which[i] for i in b) for b in cube.chain_to_partition(c))

        assert_permutohedral(FP.chains, to_partition, r)
        if len(FP.chains) <= 20:
            assert cube.posets_isomorphic(FP.chains, FP.target.chains)
        count += 1
    assert count > 50


def test_fixed_subcube_include_restrict():
    a = cube.CyclicAction(3, 2)
    sub = cube.fixed_subcube(a, 1)
    assert sub.dim == 2
    for y in cube.vertices(2):
        assert sub.restrict(sub.include(y)) == y
    assert len(sub.fixed_vertices()) == 4
    with pytest.raises(ValueError):
        sub.restrict((1, 0, 0, 0, 0, 0))

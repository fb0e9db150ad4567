import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from khoburn import actions as Ac
from khoburn import burnside as B
from khoburn import corpus
from khoburn.verify import periodic_setup

PERIODIC = sorted(corpus.periodic_diagrams().items())


@pytest.fixture(scope="module")
def induced():
    return {name: periodic_setup(data) for name, data in PERIODIC}


@pytest.mark.parametrize("name", [n for n, _ in PERIODIC])
def test_induced_action_axioms(name, induced):
    P, F, phi = induced[name]
    rep = Ac.validate_musyt(F, phi)
    assert rep.ok, rep.failures[:3]
    psi = Ac.musyt_to_sz(F, phi)
    rep = Ac.validate_sz(F, psi)
    assert rep.ok, rep.failures[:3]
    assert Ac.musyt_equal(Ac.sz_to_musyt(F, psi), phi)


@pytest.mark.parametrize("name", [n for n, _ in PERIODIC])
def test_fixed_point_functors_valid(name, induced):
    P, F, phi = induced[name]
    for index in range(1, P.m + 1):
        if P.m % index:
            continue
        FH, sub = Ac.fixed_point_functor(F, phi, index)
        assert B.validate_functor(FH).ok
        assert FH.n == sub.dim
        psi = Ac.fixed_residual_action(F, phi, index, FH, sub)
        assert Ac.validate_musyt(FH, psi).ok
        if index == P.m:
            # trivial subgroup: everything is fixed
            assert sum(len(x) for x in FH.vertex_sets.values()) == sum(len(x) for x in F.vertex_sets.values())


def _instance(seed, m):
    rng = random.Random(seed)
    return rng, *Ac.random_musyt_instance(rng, m)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_random_instances_roundtrip(seed, m):
    rng, F, phi = _instance(seed, m)
    assert B.validate_functor(F).ok
    assert Ac.validate_musyt(F, phi).ok
    psi = Ac.musyt_to_sz(F, phi)
    assert Ac.validate_sz(F, psi).ok
    assert Ac.musyt_equal(Ac.sz_to_musyt(F, psi), phi)
    psi2 = Ac.random_sz_from_musyt(rng, F, phi)
    assert Ac.validate_sz(F, psi2).ok
    w = Ac.roundtrip_sz(F, psi2)
    assert w.ok, w.report.failures[:3]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_random_instance_bounds(seed, m):
    _, F, phi = _instance(seed, m)
    assert F.n <= 3
    assert phi.group.m == m and phi.group.dim == F.n
    assert max((len(x) for x in F.vertex_sets.values()), default=0) <= 3


def test_trivial_roundtrip_witness_is_identity():
    _, F, phi = _instance(7, 2)
    w = Ac.roundtrip_sz(F, Ac.musyt_to_sz(F, phi))
    assert w.ok


def _transpose_edge_images(F, phi):
    for (g, u, v), mp in sorted(phi.edge.items()):
        if g != 1:
            continue
        c = F.edge(u, v)
        fib: dict = {}
        for a in c.elements:
            fib.setdefault((c.s[a], c.t[a]), []).append(a)
        pair = next((x for x in fib.values() if len(x) >= 2), None)
        if pair:
            a, b = pair[:2]
            mp2 = dict(mp)
            mp2[a], mp2[b] = mp[b], mp[a]
            edge = dict(phi.edge)
            edge[(g, u, v)] = mp2
            return Ac.MusytAction(phi.group, phi.vertex, edge)
    return None


def test_md5_mutation_detected():
    rng = random.Random(5)
    F, phi = Ac.random_musyt_instance(rng, 2)
    bad = _transpose_edge_images(F, phi)
    assert bad is not None
    rep = Ac.validate_musyt(F, bad)
    assert not rep.ok
    assert {s for s, _, _ in rep.failures} == {"MD-5"}


def test_md1_mutation_detected():
    for seed in range(500):
        _, F, phi = _instance(seed, 3)
        keys = [k for k, mp in sorted(phi.vertex.items()) if k[0] == 0 and len(mp) >= 2]
        if keys:
            break
    key = keys[0]
    mp = dict(phi.vertex[key])
    a, b = sorted(mp)[:2]
    mp[a], mp[b] = mp[b], mp[a]
    vertex = dict(phi.vertex)
    vertex[key] = mp
    rep = Ac.validate_musyt(F, Ac.MusytAction(phi.group, vertex, phi.edge))
    assert not rep.ok


def test_sz_two_morphism_mutation_detected(induced):
    P, F, phi = induced["hopf_p2"]
    psi = Ac.musyt_to_sz(F, phi)
    key = next(k for k, mp in sorted(psi.edge.items(), key=repr) if len(mp) >= 2)
    mp = dict(psi.edge[key])
    x, y = sorted(mp, key=repr)[:2]
    mp[x], mp[y] = mp[y], mp[x]
    edge = dict(psi.edge)
    edge[key] = mp
    rep = Ac.validate_sz(F, Ac.SZAction(psi.group, psi.one_isos, psi.squares, edge))
    assert not rep.ok


def test_json_roundtrips(induced):
    P, F, phi = induced["trefoil_p3"]
    phi2 = Ac.musyt_from_json(json.loads(json.dumps(Ac.musyt_to_json(phi))))
    assert Ac.musyt_equal(phi, phi2)
    psi = Ac.musyt_to_sz(F, phi)
    psi2 = Ac.sz_from_json(json.loads(json.dumps(Ac.sz_to_json(psi))), F)
    assert Ac.validate_sz(F, psi2).ok
    assert Ac.musyt_equal(Ac.sz_to_musyt(F, psi2), phi)


def test_composite_map_is_functorial(induced):
    P, F, phi = induced["trefoil_p3"]
    G = phi.group
    u = (1,) * F.n
    w = (0,) * F.n
    for e in F.corr(u, w).elements[:20]:
        once = Ac.composite_map(F, phi, 1, u, w, e)
        twice = Ac.composite_map(F, phi, 1, G.act_vertex(1, u), G.act_vertex(1, w), once)
        assert twice == Ac.composite_map(F, phi, 2, u, w, e)
        back = Ac.composite_map(F, phi, 1, G.act_vertex(2, u), G.act_vertex(2, w), twice)
        assert back == tuple(B.flat(e)) or back == e


def test_rep_label_arithmetic():
    a = Ac.RepLabel((("triv", 1),))
    b = Ac.RepLabel((("rot1", 2), ("triv", 1)))
    assert (a + b).dim == 6
    assert Ac.RepLabel.from_json((a + b).to_json()) == a + b


def test_trivial_action_on_product_functor():
    F = B.product_functor([B.from_bijection(["p"], {"p": "q"})] * 2)
    phi = Ac.trivial_musyt(F)
    assert Ac.validate_musyt(F, phi).ok
    assert phi.group.m == 1

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from khoburn import burnside as B
from khoburn import cube, linalg


@st.composite
def correspondences(draw, src=None, tgt=None, prefix="e"):
    if src is None:
        src = tuple(f"s{i}" for i in range(draw(st.integers(0, 3))))
    if tgt is None:
        tgt = tuple(f"t{i}" for i in range(draw(st.integers(0, 3))))
    elements, s, t = [], {}, {}
    if src and tgt:
        for k in range(draw(st.integers(0, 5))):
            a = f"{prefix}{k}"
            elements.append(a)
            s[a] = draw(st.sampled_from(src))
            t[a] = draw(st.sampled_from(tgt))
    return B.Correspondence(src, tgt, tuple(elements), s, t)


def count_matrix(c):
    M = np.zeros((len(c.tgt), len(c.src)), dtype=np.int64)
    for (x, y), k in c.counts().items():
        M[c.tgt.index(y), c.src.index(x)] = k
    return M


@st.composite
def composable_triples(draw):
    X = tuple(f"x{i}" for i in range(draw(st.integers(1, 3))))
    Y = tuple(f"y{i}" for i in range(draw(st.integers(1, 3))))
    Z = tuple(f"z{i}" for i in range(draw(st.integers(1, 3))))
    W = tuple(f"w{i}" for i in range(draw(st.integers(1, 3))))
    return (draw(correspondences(X, Y, "a")), draw(correspondences(Y, Z, "b")), draw(correspondences(Z, W, "c")))


@settings(max_examples=60, deadline=None)
@given(composable_triples())
def test_composition_counts_multiply_and_associate(t):
    A, Bc, C = t
    BA = B.compose(Bc, A)
    assert (count_matrix(BA) == count_matrix(Bc) @ count_matrix(A)).all()
    left, right = B.compose(C, BA), B.compose(B.compose(C, Bc), A)
    # flattened tuples make the associator the identity
    assert left.same_as(right)
    assert B.compose(B.identity(A.tgt), A).counts() == A.counts()


def test_from_bijection_is_invertible():
    c = B.from_bijection(["a", "b"], {"a": "q", "b": "p"})
    assert c.is_invertible()
    assert not B.Correspondence(("a",), ("p", "q"), ("e",), {"e": "a"}, {"e": "p"}).is_invertible()
    with pytest.raises(ValueError):
        B.Correspondence(("a",), ("p",), ("e",), {"e": "zz"}, {"e": "p"})


def test_is_morphism():
    A = B.Correspondence(("x",), ("y",), ("a1", "a2"), {"a1": "x", "a2": "x"}, {"a1": "y", "a2": "y"})
    C = B.Correspondence(("x",), ("y",), ("b1", "b2"), {"b1": "x", "b2": "x"}, {"b1": "y", "b2": "y"})
    assert B.is_morphism({"a1": "b2", "a2": "b1"}, A, C)
    assert not B.is_morphism({"a1": "b1", "a2": "b1"}, A, C)


def factor(nsrc, ntgt, pairs, tag):
    src = tuple(f"{tag}s{i}" for i in range(nsrc))
    tgt = tuple(f"{tag}t{i}" for i in range(ntgt))
    els = tuple(f"{tag}e{k}" for k in range(len(pairs)))
    return B.Correspondence(src, tgt, els, {e: src[p[0]] for e, p in zip(els, pairs)},
                            {e: tgt[p[1]] for e, p in zip(els, pairs)})


FACTORS = [
    factor(1, 2, [(0, 0), (0, 1)], "A"),
    factor(2, 1, [(0, 0), (1, 0), (1, 0)], "B"),
    factor(2, 2, [(0, 0), (1, 1), (0, 1)], "C"),
]


def kuenneth_betti(factors):
    """Rational Betti numbers of the tensor product of 2-term complexes, by Kuenneth."""
    total = {0: 1}
    for f in factors:
        M = count_matrix(f)
        r = np.linalg.matrix_rank(M.astype(float)) if M.size else 0
        h = {1: len(f.src) - r, 0: len(f.tgt) - r}
        new: dict = {}
        for a, x in total.items():
            for b, y in h.items():
                new[a + b] = new.get(a + b, 0) + x * y
        total = new
    return {k: v for k, v in total.items() if v}


def rational_betti(T):
    out = {}
    for d, basis in T.bases.items():
        h = len(basis) - linalg.rank_z(T.d(d)) - linalg.rank_z(T.d(d + 1))
        if h:
            out[d] = h
    return out


@pytest.mark.parametrize("k", [1, 2, 3])
def test_product_functor_valid_and_kuenneth(k):
    fs = FACTORS[:k]
    F = B.product_functor(fs)
    rep = B.validate_functor(F)
    assert rep.ok, rep.failures[:3]
    T = B.totalize(F)
    assert T.d_squared_zero()
    assert rational_betti(T) == kuenneth_betti(fs)


def _square_with_big_fiber(F):
    for key, sq in sorted(F.squares.items()):
        u, v, vp, w = key
        fib: dict = {}
        for b, a in sq:
            fib.setdefault((F.edge(u, v).s[a], F.edge(v, w).t[b]), []).append((b, a))
        for comps in fib.values():
            if len(comps) >= 2:
                return key, comps[0], comps[1]
    raise AssertionError("no square with a fiber of size 2")


def test_square_mutation_is_detected():
    F = B.product_functor(FACTORS)
    key, x, y = _square_with_big_fiber(F)
    u, v, vp, w = key
    sq = dict(F.squares[key])
    # transpose the images of two composites with the same endpoints
    sq[x], sq[y] = sq[y], sq[x]
    squares = {k: s2 for k, s2 in F.squares.items() if k not in (key, (u, vp, v, w))}
    squares[key] = sq
    rep = B.validate_functor(B.BurnsideFunctor(F.n, F.vertex_sets, F.edges, squares))
    assert not rep.ok
    assert any(stage == "hexagon" for stage, _, _ in rep.failures)


def test_sign_rule_makes_squares_anticommute():
    n = 3
    for u, v, vp, w in cube.two_faces(n):
        s1 = B.standard_sign(u, v) * B.standard_sign(v, w)
        s2 = B.standard_sign(u, vp) * B.standard_sign(vp, w)
        assert s1 == -s2


def test_json_roundtrip():
    F = B.product_functor(FACTORS[:2])
    G = B.functor_from_json(json.loads(json.dumps(B.functor_to_json(F))))
    assert G.vertex_sets == F.vertex_sets
    assert all(G.edges[e].same_as(F.edges[e]) for e in F.edges)
    assert G.squares == F.squares


def test_transport_is_independent_of_path():
    F = B.product_functor(FACTORS)
    u = (1, 1, 1)
    for elem in F.chain_composite(cube.chain_from_order(u, (2, 0, 1))).elements:
        direct = F.transport(elem, u, (2, 0, 1), (0, 1, 2))
        via = F.transport(F.transport(elem, u, (2, 0, 1), (1, 2, 0)), u, (1, 2, 0), (0, 1, 2))
        assert direct == via
        assert F.transport(direct, u, (0, 1, 2), (2, 0, 1)) == tuple(B.flat(elem))


def test_relabel_gives_isomorphic_functor():
    F = B.product_functor(FACTORS[:2])
    maps = {v: {x: f"{x}'" for x in F.F(v)} for v in cube.vertices(F.n)}
    G = F.relabel(maps)
    assert B.validate_functor(G).ok
    assert B.natural_isomorphism_check(F, G, maps)


def test_empty_functor():
    F = B.BurnsideFunctor(1, {(0,): (), (1,): ()}, {((1,), (0,)): B.Correspondence((), (), (), {}, {})}, {})
    assert B.validate_functor(F).ok
    T = B.totalize(F)
    assert all(len(b) == 0 for b in T.bases.values())

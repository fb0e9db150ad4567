import copy

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from khoburn import corpus, linalg
from khoburn import khovanov as K
from khoburn import periodic as Pe
from khoburn.verify import periodic_setup

PERIODIC = dict(sorted(corpus.periodic_diagrams().items()))
NAMES = list(PERIODIC)


@pytest.fixture(scope="module")
def setups():
    return {name: periodic_setup(PERIODIC[name]) for name in NAMES}


@pytest.fixture(scope="module")
def complexes(setups):
    return {name: Pe.equivariant_complex(*setups[name]) for name in NAMES}


@pytest.mark.parametrize("name", NAMES)
def test_corpus_is_periodic(name):
    P = Pe.parse_periodic(PERIODIC[name])
    rep = Pe.validate_periodic(P)
    assert rep.ok, rep.failures
    assert rep.n_block * P.m == P.diagram.n


def test_wrong_order_rejected():
    data = copy.deepcopy(PERIODIC["hopf_p2"])
    data["m"] = 3
    rep = Pe.validate_periodic(Pe.parse_periodic(data))
    assert not rep.ok


def test_non_symmetry_rejected():
    data = copy.deepcopy(PERIODIC["trefoil_p3"])
    se = [list(p) for p in data["sigma_edges"]]
    se[0][1], se[1][1] = se[1][1], se[0][1]
    data["sigma_edges"] = se
    assert not Pe.validate_periodic(Pe.parse_periodic(data)).ok


def test_missing_keys_are_parse_errors():
    with pytest.raises(K.PDError):
        Pe.parse_periodic({"pd": PERIODIC["hopf_p2"]["pd"]})


@pytest.mark.parametrize("name", NAMES)
def test_action_commutes_with_d(name, complexes):
    E = complexes[name]
    C = E.complex
    for (i, q), M in C.diffs.items():
        T0 = E.t(i, q)
        T1 = E.t(i + 1, q)
        assert not ((linalg.matmul_f2(M, T0) + linalg.matmul_f2(T1, M)) % 2).any()
    # t has order dividing m in every bidegree
    for key, g in C.gens.items():
        P = np.eye(len(g), dtype=np.uint8)
        for _ in range(E.m):
            P = linalg.matmul_f2(E.t(*key), P)
        assert (P == np.eye(len(g), dtype=np.uint8)).all()


def test_group_module_validation():
    with pytest.raises(ValueError):
        Pe.GroupModule(2, np.array([[1, 1], [0, 1], [1, 0]]))
    with pytest.raises(ValueError):
        Pe.GroupModule(2, Pe.free_shift(3, 1))
    assert Pe.GroupModule.free(3, 2).dim == 6


MODULES = [
    ("trivial2", Pe.GroupModule.trivial(2)),
    ("trivial3", Pe.GroupModule.trivial(3)),
    ("free2", Pe.GroupModule.free(2)),
    ("free3x2", Pe.GroupModule.free(3, 2)),
    ("jordan2", Pe.GroupModule(2, np.array([[1, 1], [0, 1]]))),
    ("perm3", Pe.GroupModule(3, np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]]))),
    ("twodim3", Pe.GroupModule(3, np.array([[0, 1], [1, 1]]))),
]


def _rank(M):
    return linalg.rank_f2(M) if M.size else 0


@pytest.mark.parametrize("label,M", MODULES)
def test_resolution_exact_to_length_6(label, M):
    res = Pe.module_resolution(M, 6)
    assert res.check_exact() == []
    m = M.m
    # independent rank bookkeeping: im(d_{j+1}) = ker(d_j), augmentation onto M
    assert _rank(res.maps[0]) == M.dim
    for j in range(len(res.maps) - 1):
        dj, dj1 = res.maps[j], res.maps[j + 1]
        assert dj.shape[1] == res.ranks[j] * m
        assert not linalg.matmul_f2(dj, dj1).any()
        assert res.ranks[j] * m - _rank(dj) == _rank(dj1)
    if res.finite:
        last = res.maps[-1]
        assert res.ranks[-1] * m == _rank(last)


def test_resolution_shapes():
    assert Pe.module_resolution(Pe.GroupModule.free(2), 6).length == 0
    r = Pe.module_resolution(Pe.GroupModule.trivial(2), 6)
    assert r.ranks == [1] * 7 and not r.finite


@pytest.mark.parametrize("name", NAMES)
def test_free_module_gives_kh(name, complexes):
    P = Pe.normalize(Pe.parse_periodic(PERIODIC[name]))
    E = complexes[name]
    res = Pe.ekh(P, Pe.GroupModule.free(P.m), 4, E=E)
    kh = Pe.kh_f2_by_q(P)
    assert {q: d for (j, q), d in res.table.items() if j == 0} == kh
    assert all(d == 0 for (j, q), d in res.table.items() if 1 <= j <= 4)


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("module", ["trivial", "free"])
def test_ekh_matches_dense_oracle(name, module, complexes):
    P = Pe.normalize(Pe.parse_periodic(PERIODIC[name]))
    M = Pe.GroupModule.trivial(P.m) if module == "trivial" else Pe.GroupModule.free(P.m)
    E = complexes[name]
    a = Pe.ekh(P, M, 3, E=E)
    b = Pe.ekh(P, M, 3, E=E, oracle=True)
    assert a.fine == b.fine and a.total == b.total and a.table == b.table


@pytest.mark.parametrize("name", NAMES)
def test_associated_graded_sums_to_total(name, complexes):
    P = Pe.normalize(Pe.parse_periodic(PERIODIC[name]))
    jmax = 3
    E = complexes[name]
    res = Pe.ekh(P, Pe.GroupModule.trivial(P.m), jmax, E=E)
    sums: dict = {}
    for (j, i, q), d in res.fine.items():
        sums[(i + j, q)] = sums.get((i + j, q), 0) + d
    checked = 0
    for (n, q), d in res.total.items():
        imin = min(i for (i, q2), g in E.complex.gens.items() if q2 == q and g)
        if n - imin <= jmax:
            # every filtration piece of H^n has j <= jmax
            assert sums.get((n, q), 0) == d
            checked += 1
    assert checked


def test_odd_order_trivial_module_concentrated_in_j0(complexes):
    # F_2[Z_3] is semisimple, so higher Ext of any module vanishes
    P = Pe.normalize(Pe.parse_periodic(PERIODIC["trefoil_p3"]))
    res = Pe.ekh(P, Pe.GroupModule.trivial(3), 4, E=complexes["trefoil_p3"])
    assert res.table and all(j == 0 for (j, q) in res.table)


def test_module_order_mismatch():
    P = Pe.normalize(Pe.parse_periodic(PERIODIC["hopf_p2"]))
    with pytest.raises(ValueError):
        Pe.ekh(P, Pe.GroupModule.trivial(3), 2)
    with pytest.raises(ValueError):
        Pe.ekh(P, Pe.GroupModule.trivial(2), -1)


@settings(max_examples=10, deadline=None)
@given(st.lists(st.sampled_from([1, -1]), min_size=1, max_size=2), st.sampled_from([2, 3]))
def test_random_periodic_braid_closures(beta, m):
    data = corpus.periodic_braid_closure(beta, 2, m)
    P, F, phi = periodic_setup(data)
    E = Pe.equivariant_complex(P, F, phi)
    free = Pe.ekh(P, Pe.GroupModule.free(m), 1, E=E).table
    assert {q: d for (j, q), d in free.items() if j == 0} == Pe.kh_f2_by_q(P)
